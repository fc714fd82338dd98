#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kge/model.hpp"
#include "kge/triples.hpp"
#include "kge/vocab.hpp"

namespace kge {

enum class EntitySlot { Head, Tail };
enum class RankMode { Raw, Filtered };

/// Ranks of the true entity among head- and tail-replacements. Ties are
/// averaged, so ranks may be half-integers.
struct RankPair {
    double head = 0.0;
    double tail = 0.0;
};

struct TripleRanks {
    Triple triple;
    RankPair raw;
    RankPair filtered;
};

struct EvalReport {
    double mrr_raw = 0.0;
    double mrr_filtered = 0.0;
    std::map<int, double> hits_at;  // filtered ranks, k in {1, 3, 10}
    std::vector<TripleRanks> per_triple;
    std::size_t n_test = 0;
};

using TripleScorer = std::function<double(const Triple&)>;

/// Rank of the triple's true entity in `slot` among all candidate
/// replacements: 1 + (#strictly better) + (#other exact ties)/2.
/// Filtered mode drops candidates whose substituted triple is known true,
/// except the test triple itself. Score equality is exact (bitwise).
double rank_entity(const Triple& triple, EntitySlot slot, RankMode mode,
                   const FilterIndex& filter, int num_entities, const TripleScorer& scorer);

/// Raw and filtered ranks from a single scoring pass over the candidates.
void rank_both(const Triple& triple, EntitySlot slot, const FilterIndex& filter,
               int num_entities, const TripleScorer& scorer, double& raw_out,
               double& filtered_out);

/// Head and tail ranks for every test triple in both modes; MRR averages
/// 1/rank over both slots (denominator 2|test|); hit@k counts head- and
/// tail-ranking events against the same denominator, on filtered ranks.
EvalReport evaluate(const ModelParams& params, std::span<const Triple> testset,
                    const FilterIndex& filter, int threads = 1);

/// Same protocol under an arbitrary scorer (evaluation-only tests).
EvalReport evaluate_with_scorer(const TripleScorer& scorer, std::span<const Triple> testset,
                                const FilterIndex& filter, int num_entities, int threads = 1);

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

/// Per-triple CSV:
/// head,relation,tail,rank_head_raw,rank_tail_raw,rank_head_filtered,rank_tail_filtered
void save_per_triple_csv(const std::string& path, const EvalReport& report,
                         const Vocabulary& vocab);

}  // namespace kge
