#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kge/rules.hpp"
#include "kge/triples.hpp"
#include "kge/vocab.hpp"

namespace kge {

/// Result of loading one split file.
struct LoadedSplit {
    std::vector<Triple> triples;
    /// Exact duplicate lines collapsed within this file.
    std::size_t duplicates_collapsed = 0;
};

/// Load a TSV triple file (`head<TAB>relation<TAB>tail`, UTF-8, one triple
/// per line). New names extend vocab in first-seen order; with
/// fixed_vocab, unknown names raise VocabError. Malformed lines raise
/// ParseError with the line number. Duplicate lines within the file are
/// collapsed and counted.
LoadedSplit load_triples(const std::string& path, Vocabulary& vocab, bool fixed_vocab = false);

/// Write triples in the same TSV format.
void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab);

/// Export `id<TAB>name` vocabulary files, entities and relations separately.
void save_vocab(const std::string& entities_path, const std::string& relations_path,
                const Vocabulary& vocab);

/// A dataset directory holds train.txt, valid.txt, test.txt.
struct Dataset {
    Vocabulary vocab;
    TripleSet triples;
    std::size_t duplicates_collapsed = 0;  // summed over the three splits
};

/// Load all three splits (train, then valid, then test, extending the
/// vocabulary in that order) and build the filter index.
Dataset load_dataset(const std::string& dir);

/// Drop training triples made redundant by background rules: for each
/// unordered pair of distinct triples where one can be inferred from the
/// other (inverse pair, same-direction equivalence pair, or the mirror
/// image under a symmetric rule), exactly one member is removed, chosen by
/// the seeded RNG. Antisymmetric rules never remove anything, nor do
/// symmetric self-loops (a,r,a). Output preserves input order.
std::vector<Triple> remove_redundant(const std::vector<Triple>& train,
                                     const std::vector<Rule>& rules, const Vocabulary& vocab,
                                     std::uint64_t seed);

}  // namespace kge
