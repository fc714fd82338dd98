#pragma once

#include <string>
#include <vector>

#include "kge/vocab.hpp"

namespace kge {

enum class RuleKind { Symmetric, Antisymmetric, Inverse, Equivalence };

/// One background-knowledge rule over relation names.
/// Symmetric/antisymmetric rules name a single relation; inverse and
/// equivalence rules name an ordered pair.
struct Rule {
    RuleKind kind;
    std::string rel1;
    std::string rel2;  // empty for symmetric/antisymmetric
};

enum class RelSlot { Forward, Inverse };

/// One storage tie: reads of (relation, target) resolve to sign *
/// storage[(canonical_relation, canonical_slot)].
struct TieEntry {
    int relation;
    RelSlot target;
    int canonical_relation;
    RelSlot canonical_slot;
    double sign;  // +1 or -1
};

using TieSpec = std::vector<TieEntry>;

/// Flattened per-slot resolution table. Built from a TieSpec; chains are
/// collapsed and cycles rejected, so resolution is a single lookup.
class TieTable {
public:
    struct Resolved {
        int relation;
        RelSlot slot;
        double sign;
    };

    TieTable() = default;
    TieTable(const TieSpec& spec, int num_relations);

    Resolved resolve(int relation, RelSlot slot) const {
        if (fwd_.empty()) return {relation, slot, 1.0};
        return slot == RelSlot::Forward ? fwd_[relation] : inv_[relation];
    }

    bool is_tied(int relation, RelSlot slot) const {
        Resolved r = resolve(relation, slot);
        return r.relation != relation || r.slot != slot;
    }

    const TieSpec& spec() const { return spec_; }
    bool empty() const { return spec_.empty(); }

private:
    TieSpec spec_;
    std::vector<Resolved> fwd_;
    std::vector<Resolved> inv_;
};

/// Parse a rule file: one rule per line, `#` comments and blank lines
/// ignored. Lines are `symmetric R`, `antisymmetric R`, `inverse R1 R2`,
/// or `equivalence R1 R2`. Throws ParseError with the offending line.
std::vector<Rule> parse_rules(const std::string& path);

/// Translate rules into parameter ties:
///   symmetric r      -> (r, inv)  = +(r, fwd)
///   antisymmetric r  -> (r, inv)  = -(r, fwd)
///   inverse r1 r2    -> (r1, inv) = +(r2, fwd), (r2, inv) = +(r1, fwd)
///   equivalence r1 r2-> (r2, fwd) = +(r1, fwd), (r2, inv) = +(r1, inv)
/// Throws RuleError on unknown relations or when two rules claim the same
/// target slot.
TieSpec ties_from_rules(const std::vector<Rule>& rules, const Vocabulary& vocab);

}  // namespace kge
