#include "kge/rules.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "kge/errors.hpp"

namespace kge {

TieTable::TieTable(const TieSpec& spec, int num_relations) : spec_(spec) {
    if (spec.empty()) return;
    fwd_.resize(num_relations);
    inv_.resize(num_relations);
    for (int r = 0; r < num_relations; ++r) {
        fwd_[r] = {r, RelSlot::Forward, 1.0};
        inv_[r] = {r, RelSlot::Inverse, 1.0};
    }
    std::map<std::pair<int, int>, TieEntry> by_target;
    for (const TieEntry& e : spec) {
        if (e.relation < 0 || e.relation >= num_relations || e.canonical_relation < 0 ||
            e.canonical_relation >= num_relations) {
            throw RuleError("tie references relation id out of range");
        }
        auto key = std::make_pair(e.relation, static_cast<int>(e.target));
        if (!by_target.emplace(key, e).second) {
            throw RuleError("slot tied twice: relation " + std::to_string(e.relation));
        }
    }
    // Collapse chains (an equivalence tie may land on a slot that a
    // symmetry tie redirects again); anything longer than the entry count
    // is a cycle.
    for (const auto& [key, entry] : by_target) {
        int rel = entry.canonical_relation;
        RelSlot slot = entry.canonical_slot;
        double sign = entry.sign;
        std::size_t hops = 1;
        while (true) {
            auto it = by_target.find({rel, static_cast<int>(slot)});
            if (it == by_target.end()) break;
            if (++hops > by_target.size() + 1) {
                throw RuleError("tie cycle involving relation " + std::to_string(entry.relation));
            }
            rel = it->second.canonical_relation;
            slot = it->second.canonical_slot;
            sign *= it->second.sign;
        }
        if (rel == entry.relation && slot == entry.target) {
            throw RuleError("tie cycle involving relation " + std::to_string(entry.relation));
        }
        auto& table = entry.target == RelSlot::Forward ? fwd_ : inv_;
        table[entry.relation] = {rel, slot, sign};
    }
}

std::vector<Rule> parse_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open rule file: " + path);

    std::vector<Rule> rules;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string keyword;
        if (!(fields >> keyword)) continue;  // blank or comment-only

        Rule rule;
        int arity;
        if (keyword == "symmetric") {
            rule.kind = RuleKind::Symmetric;
            arity = 1;
        } else if (keyword == "antisymmetric") {
            rule.kind = RuleKind::Antisymmetric;
            arity = 1;
        } else if (keyword == "inverse") {
            rule.kind = RuleKind::Inverse;
            arity = 2;
        } else if (keyword == "equivalence") {
            rule.kind = RuleKind::Equivalence;
            arity = 2;
        } else {
            throw ParseError("unknown rule keyword: " + keyword, line_no);
        }

        std::string extra;
        if (!(fields >> rule.rel1) || (arity == 2 && !(fields >> rule.rel2)) || (fields >> extra)) {
            throw ParseError("rule `" + keyword + "` expects " + std::to_string(arity) +
                                 " relation name(s)",
                             line_no);
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

TieSpec ties_from_rules(const std::vector<Rule>& rules, const Vocabulary& vocab) {
    TieSpec spec;
    auto rel_id = [&](const std::string& name) {
        auto id = vocab.relation_id(name);
        if (!id) throw RuleError("rule names unknown relation: " + name);
        return *id;
    };

    for (const Rule& rule : rules) {
        int r1 = rel_id(rule.rel1);
        switch (rule.kind) {
            case RuleKind::Symmetric:
                spec.push_back({r1, RelSlot::Inverse, r1, RelSlot::Forward, +1.0});
                break;
            case RuleKind::Antisymmetric:
                spec.push_back({r1, RelSlot::Inverse, r1, RelSlot::Forward, -1.0});
                break;
            case RuleKind::Inverse: {
                int r2 = rel_id(rule.rel2);
                spec.push_back({r1, RelSlot::Inverse, r2, RelSlot::Forward, +1.0});
                spec.push_back({r2, RelSlot::Inverse, r1, RelSlot::Forward, +1.0});
                break;
            }
            case RuleKind::Equivalence: {
                int r2 = rel_id(rule.rel2);
                spec.push_back({r2, RelSlot::Forward, r1, RelSlot::Forward, +1.0});
                spec.push_back({r2, RelSlot::Inverse, r1, RelSlot::Inverse, +1.0});
                break;
            }
        }
    }

    // Surface conflicts (and cycles) now rather than at model construction.
    TieTable validate(spec, vocab.num_relations());
    return spec;
}

}  // namespace kge
