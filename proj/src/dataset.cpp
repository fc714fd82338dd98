#include "kge/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "kge/errors.hpp"
#include "kge/rng.hpp"

namespace kge {

namespace {

// Strip a trailing \r so CRLF files load the same as LF files.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::uint64_t triple_key(const Triple& t, int num_entities, int num_relations) {
    return (static_cast<std::uint64_t>(t.head) * num_relations + t.relation) * num_entities +
           t.tail;
}

}  // namespace

LoadedSplit load_triples(const std::string& path, Vocabulary& vocab, bool fixed_vocab) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open triple file: " + path);

    LoadedSplit result;
    std::unordered_set<std::string> seen_lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;

        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab1 == std::string::npos || tab2 == std::string::npos ||
            line.find('\t', tab2 + 1) != std::string::npos) {
            throw ParseError("expected head<TAB>relation<TAB>tail in " + path, line_no);
        }
        std::string head = line.substr(0, tab1);
        std::string rel = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string tail = line.substr(tab2 + 1);
        if (head.empty() || rel.empty() || tail.empty()) {
            throw ParseError("empty field in " + path, line_no);
        }

        if (!seen_lines.insert(line).second) {
            ++result.duplicates_collapsed;
            continue;
        }

        Triple t;
        if (fixed_vocab) {
            auto h = vocab.entity_id(head);
            auto r = vocab.relation_id(rel);
            auto tl = vocab.entity_id(tail);
            if (!h) throw VocabError("unknown entity: " + head);
            if (!r) throw VocabError("unknown relation: " + rel);
            if (!tl) throw VocabError("unknown entity: " + tail);
            t = {*h, *r, *tl};
        } else {
            t = {vocab.add_entity(head), vocab.add_relation(rel), vocab.add_entity(tail)};
        }
        result.triples.push_back(t);
    }
    return result;
}

void save_triples(const std::string& path, const std::vector<Triple>& triples,
                  const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write triple file: " + path);
    for (const Triple& t : triples) {
        out << vocab.entity_name(t.head) << '\t' << vocab.relation_name(t.relation) << '\t'
            << vocab.entity_name(t.tail) << '\n';
    }
}

void save_vocab(const std::string& entities_path, const std::string& relations_path,
                const Vocabulary& vocab) {
    std::ofstream ents(entities_path);
    if (!ents) throw ParseError("cannot write vocabulary file: " + entities_path);
    for (int i = 0; i < vocab.num_entities(); ++i) ents << i << '\t' << vocab.entity_name(i) << '\n';

    std::ofstream rels(relations_path);
    if (!rels) throw ParseError("cannot write vocabulary file: " + relations_path);
    for (int i = 0; i < vocab.num_relations(); ++i)
        rels << i << '\t' << vocab.relation_name(i) << '\n';
}

TripleSet build_filter_index(std::vector<Triple> train, std::vector<Triple> valid,
                             std::vector<Triple> test, int num_entities, int num_relations) {
    TripleSet set;
    set.filter = FilterIndex(num_entities, num_relations);
    for (const auto* split : {&train, &valid, &test}) {
        for (const Triple& t : *split) set.filter.insert(t);
    }
    set.split_overlap = train.size() + valid.size() + test.size() - set.filter.size();
    set.train = std::move(train);
    set.valid = std::move(valid);
    set.test = std::move(test);
    return set;
}

Dataset load_dataset(const std::string& dir) {
    Dataset ds;
    auto train = load_triples(dir + "/train.txt", ds.vocab);
    auto valid = load_triples(dir + "/valid.txt", ds.vocab);
    auto test = load_triples(dir + "/test.txt", ds.vocab);
    ds.duplicates_collapsed =
        train.duplicates_collapsed + valid.duplicates_collapsed + test.duplicates_collapsed;
    ds.triples = build_filter_index(std::move(train.triples), std::move(valid.triples),
                                    std::move(test.triples), ds.vocab.num_entities(),
                                    ds.vocab.num_relations());
    return ds;
}

namespace {

struct BoundRule {
    RuleKind kind;
    int rel1;
    int rel2;
};

std::vector<BoundRule> bind_rules(const std::vector<Rule>& rules, const Vocabulary& vocab) {
    std::vector<BoundRule> bound;
    bound.reserve(rules.size());
    for (const Rule& rule : rules) {
        auto r1 = vocab.relation_id(rule.rel1);
        if (!r1) throw RuleError("rule names unknown relation: " + rule.rel1);
        int r2 = *r1;
        if (rule.kind == RuleKind::Inverse || rule.kind == RuleKind::Equivalence) {
            auto id2 = vocab.relation_id(rule.rel2);
            if (!id2) throw RuleError("rule names unknown relation: " + rule.rel2);
            r2 = *id2;
        }
        bound.push_back({rule.kind, *r1, r2});
    }
    return bound;
}

}  // namespace

std::vector<Triple> remove_redundant(const std::vector<Triple>& train,
                                     const std::vector<Rule>& rules, const Vocabulary& vocab,
                                     std::uint64_t seed) {
    auto bound = bind_rules(rules, vocab);
    const int ne = vocab.num_entities();
    const int nr = vocab.num_relations();

    std::unordered_set<std::uint64_t> present;
    present.reserve(train.size() * 2);
    for (const Triple& t : train) present.insert(triple_key(t, ne, nr));

    std::unordered_set<std::uint64_t> removed;
    Rng rng = Rng::stream(seed, "dedupe");

    auto alive = [&](const Triple& t) {
        std::uint64_t k = triple_key(t, ne, nr);
        return present.count(k) != 0 && removed.count(k) == 0;
    };

    // Walk train in order; for each triple still alive, look for a partner
    // it can be inferred from (or vice versa) and drop one of the two.
    // Removal decisions only ever shrink the set, so one pass settles it.
    for (const Triple& t : train) {
        if (!alive(t)) continue;
        for (const BoundRule& rule : bound) {
            Triple partner;
            switch (rule.kind) {
                case RuleKind::Symmetric:
                    if (t.relation != rule.rel1 || t.head == t.tail) continue;
                    partner = {t.tail, t.relation, t.head};
                    break;
                case RuleKind::Antisymmetric:
                    continue;  // implies absence, never redundancy
                case RuleKind::Inverse:
                    if (t.relation == rule.rel1)
                        partner = {t.tail, rule.rel2, t.head};
                    else if (t.relation == rule.rel2)
                        partner = {t.tail, rule.rel1, t.head};
                    else
                        continue;
                    break;
                case RuleKind::Equivalence:
                    if (t.relation == rule.rel1)
                        partner = {t.head, rule.rel2, t.tail};
                    else if (t.relation == rule.rel2)
                        partner = {t.head, rule.rel1, t.tail};
                    else
                        continue;
                    break;
            }
            if (partner == t || !alive(partner)) continue;
            const Triple& drop = rng.coin() ? t : partner;
            removed.insert(triple_key(drop, ne, nr));
            if (drop == t) break;  // t is gone; no further pairing for it
        }
    }

    std::vector<Triple> kept;
    kept.reserve(train.size() - removed.size());
    for (const Triple& t : train) {
        if (removed.count(triple_key(t, ne, nr)) == 0) kept.push_back(t);
    }
    return kept;
}

}  // namespace kge
