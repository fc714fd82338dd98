#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

namespace kge {

/// (head, relation, tail) with ids resolved against one vocabulary.
struct Triple {
    int head = 0;
    int relation = 0;
    int tail = 0;

    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Set-semantics membership over known-true triples. Backs the filtered
/// ranking protocol: a candidate is excluded when its substituted triple
/// is known true anywhere in train/valid/test.
class FilterIndex {
public:
    FilterIndex() = default;
    FilterIndex(int num_entities, int num_relations)
        : num_entities_(num_entities), num_relations_(num_relations) {}

    void insert(const Triple& t) { keys_.insert(key(t)); }
    bool contains(const Triple& t) const { return keys_.count(key(t)) != 0; }
    std::size_t size() const { return keys_.size(); }

    int num_entities() const { return num_entities_; }
    int num_relations() const { return num_relations_; }

private:
    std::uint64_t key(const Triple& t) const {
        return (static_cast<std::uint64_t>(t.head) * num_relations_ + t.relation) *
                   num_entities_ +
               t.tail;
    }

    int num_entities_ = 0;
    int num_relations_ = 0;
    std::unordered_set<std::uint64_t> keys_;
};

/// The three dataset splits plus the filter index over their union.
struct TripleSet {
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;
    FilterIndex filter;

    /// Triples appearing in more than one split (union is smaller than the
    /// sum of the deduplicated splits). Reported, not assumed away.
    std::size_t split_overlap = 0;
};

/// Build the membership index over all three splits. num_entities and
/// num_relations bound the id space (normally vocabulary sizes).
TripleSet build_filter_index(std::vector<Triple> train, std::vector<Triple> valid,
                             std::vector<Triple> test, int num_entities, int num_relations);

}  // namespace kge
