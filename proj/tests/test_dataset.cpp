#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <fstream>
#include <set>

#include "doctest.h"
#include "kge/dataset.hpp"
#include "kge/errors.hpp"
#include "kge/rng.hpp"
#include "support/tmpdir.hpp"

using namespace kge;

namespace {

std::string write_file(const testsupport::TmpDir& tmp, const std::string& name,
                       const std::string& content) {
    std::string path = tmp.str(name);
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load a minimal two-line file") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "t.tsv", "a\tr\tb\nb\tr\ta\n");
    Vocabulary vocab;
    LoadedSplit split = load_triples(path, vocab);
    CHECK(split.triples.size() == 2);
    CHECK(vocab.num_entities() == 2);
    CHECK(vocab.num_relations() == 1);
    CHECK(split.triples[0] == Triple{0, 0, 1});
    CHECK(split.triples[1] == Triple{1, 0, 0});
}

TEST_CASE("empty file loads to nothing and leaves the vocabulary alone") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "empty.tsv", "");
    Vocabulary vocab;
    vocab.add_entity("pre");
    LoadedSplit split = load_triples(path, vocab);
    CHECK(split.triples.empty());
    CHECK(vocab.num_entities() == 1);
    CHECK(vocab.num_relations() == 0);
}

TEST_CASE("malformed lines carry their line number") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "bad.tsv", "a\tr\tb\nonly two\tfields\n");
    Vocabulary vocab;
    try {
        load_triples(path, vocab);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("fixed vocabulary rejects unknown names") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "t.tsv", "a\tr\tmystery\n");
    Vocabulary vocab;
    vocab.add_entity("a");
    vocab.add_relation("r");
    CHECK_THROWS_AS(load_triples(path, vocab, /*fixed_vocab=*/true), VocabError);
}

TEST_CASE("duplicate lines collapse with a count") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "dup.tsv", "a\tr\tb\na\tr\tb\nb\tr\ta\na\tr\tb\n");
    Vocabulary vocab;
    LoadedSplit split = load_triples(path, vocab);
    CHECK(split.triples.size() == 2);
    CHECK(split.duplicates_collapsed == 2);
}

TEST_CASE("vocabulary ids are contiguous and round-trip") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "t.tsv", "x\tr1\ty\nz\tr2\tx\ny\tr1\tz\n");
    Vocabulary vocab;
    load_triples(path, vocab);
    for (int i = 0; i < vocab.num_entities(); ++i) {
        CHECK(vocab.entity_id(vocab.entity_name(i)) == i);
    }
    for (int i = 0; i < vocab.num_relations(); ++i) {
        CHECK(vocab.relation_id(vocab.relation_name(i)) == i);
    }
    // first-seen order
    CHECK(vocab.entity_name(0) == "x");
    CHECK(vocab.entity_name(1) == "y");
    CHECK(vocab.entity_name(2) == "z");
}

TEST_CASE("write then reload reproduces the triple list") {
    testsupport::TmpDir tmp;
    std::string path = write_file(tmp, "t.tsv", "a\tr\tb\nb\tr\ta\nc\ts\ta\n");
    Vocabulary vocab;
    LoadedSplit split = load_triples(path, vocab);

    std::string out = tmp.str("roundtrip.tsv");
    save_triples(out, split.triples, vocab);
    Vocabulary vocab2;
    LoadedSplit again = load_triples(out, vocab2);
    CHECK(again.triples == split.triples);
    CHECK(vocab2.entity_names() == vocab.entity_names());
    CHECK(vocab2.relation_names() == vocab.relation_names());
}

TEST_CASE("vocabulary export format") {
    testsupport::TmpDir tmp;
    Vocabulary vocab;
    vocab.add_entity("alpha");
    vocab.add_entity("beta");
    vocab.add_relation("rel");
    save_vocab(tmp.str("e.tsv"), tmp.str("r.tsv"), vocab);

    std::ifstream ents(tmp.str("e.tsv"));
    std::string line;
    std::getline(ents, line);
    CHECK(line == "0\talpha");
    std::getline(ents, line);
    CHECK(line == "1\tbeta");
    std::ifstream rels(tmp.str("r.tsv"));
    std::getline(rels, line);
    CHECK(line == "0\trel");
}

TEST_CASE("filter index membership") {
    std::vector<Triple> train{{0, 0, 1}};
    std::vector<Triple> valid{};
    std::vector<Triple> test{{1, 0, 0}};
    TripleSet set = build_filter_index(train, valid, test, 2, 1);
    CHECK(set.filter.contains({0, 0, 1}));
    CHECK(set.filter.contains({1, 0, 0}));
    CHECK_FALSE(set.filter.contains({0, 0, 0}));
    CHECK(set.filter.size() == 2);
    CHECK(set.split_overlap == 0);
}

TEST_CASE("triples shared between splits count once") {
    std::vector<Triple> train{{0, 0, 1}, {1, 0, 1}};
    std::vector<Triple> valid{{0, 0, 1}};
    std::vector<Triple> test{{1, 0, 0}};
    TripleSet set = build_filter_index(train, valid, test, 2, 1);
    CHECK(set.filter.size() == 3);
    CHECK(set.split_overlap == 1);
}

TEST_CASE("filter index agrees with a linear scan on random probes") {
    Rng rng(321);
    const int ne = 30, nr = 5;
    auto draw = [&] {
        return Triple{rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                      rng.uniform_int(0, ne - 1)};
    };
    std::vector<Triple> train, valid, test;
    for (int i = 0; i < 200; ++i) train.push_back(draw());
    for (int i = 0; i < 40; ++i) valid.push_back(draw());
    for (int i = 0; i < 40; ++i) test.push_back(draw());
    TripleSet set = build_filter_index(train, valid, test, ne, nr);

    auto scan = [&](const Triple& t) {
        for (const auto* split : {&set.train, &set.valid, &set.test}) {
            for (const Triple& u : *split)
                if (u == t) return true;
        }
        return false;
    };
    for (int i = 0; i < 1000; ++i) {
        Triple probe = draw();
        CHECK(set.filter.contains(probe) == scan(probe));
    }
}

TEST_CASE("remove_redundant drops one of an inverse pair") {
    Vocabulary vocab;
    int a = vocab.add_entity("a"), b = vocab.add_entity("b");
    int hypo = vocab.add_relation("hyponym"), hyper = vocab.add_relation("hypernym");
    std::vector<Triple> train{{a, hypo, b}, {b, hyper, a}};
    std::vector<Rule> rules{{RuleKind::Inverse, "hyponym", "hypernym"}};
    auto kept = remove_redundant(train, rules, vocab, 7);
    CHECK(kept.size() == 1);
}

TEST_CASE("remove_redundant drops one of a symmetric pair") {
    Vocabulary vocab;
    int a = vocab.add_entity("a"), b = vocab.add_entity("b");
    int sim = vocab.add_relation("similarTo");
    std::vector<Triple> train{{a, sim, b}, {b, sim, a}};
    std::vector<Rule> rules{{RuleKind::Symmetric, "similarTo", ""}};
    auto kept = remove_redundant(train, rules, vocab, 7);
    CHECK(kept.size() == 1);
}

TEST_CASE("remove_redundant keeps symmetric self-loops") {
    Vocabulary vocab;
    int a = vocab.add_entity("a");
    vocab.add_relation("similarTo");
    std::vector<Triple> train{{a, 0, a}};
    std::vector<Rule> rules{{RuleKind::Symmetric, "similarTo", ""}};
    CHECK(remove_redundant(train, rules, vocab, 7).size() == 1);
}

TEST_CASE("antisymmetric rules never remove") {
    Vocabulary vocab;
    int a = vocab.add_entity("a"), b = vocab.add_entity("b");
    vocab.add_relation("before");
    std::vector<Triple> train{{a, 0, b}, {b, 0, a}};  // contradictory data, still untouched
    std::vector<Rule> rules{{RuleKind::Antisymmetric, "before", ""}};
    CHECK(remove_redundant(train, rules, vocab, 7).size() == 2);
}

TEST_CASE("equivalence pairs are same-direction duplicates") {
    Vocabulary vocab;
    int a = vocab.add_entity("a"), b = vocab.add_entity("b");
    int r1 = vocab.add_relation("r1"), r2 = vocab.add_relation("r2");
    std::vector<Triple> train{{a, r1, b}, {a, r2, b}, {b, r1, a}};
    std::vector<Rule> rules{{RuleKind::Equivalence, "r1", "r2"}};
    auto kept = remove_redundant(train, rules, vocab, 7);
    // (a,r1,b)/(a,r2,b) is the redundant pair; (b,r1,a) is untouched
    CHECK(kept.size() == 2);
    CHECK(std::count(kept.begin(), kept.end(), Triple{b, r1, a}) == 1);
}

TEST_CASE("remove_redundant rejects unknown relations") {
    Vocabulary vocab;
    vocab.add_entity("a");
    vocab.add_relation("r");
    std::vector<Rule> rules{{RuleKind::Symmetric, "ghost", ""}};
    CHECK_THROWS_AS(remove_redundant({}, rules, vocab, 7), RuleError);
}

TEST_CASE("remove_redundant properties on a random relational soup") {
    Vocabulary vocab;
    for (int e = 0; e < 12; ++e) vocab.add_entity("e" + std::to_string(e));
    vocab.add_relation("sym");
    vocab.add_relation("fwd");
    vocab.add_relation("rev");
    std::vector<Rule> rules{{RuleKind::Symmetric, "sym", ""}, {RuleKind::Inverse, "fwd", "rev"}};

    Rng rng(99);
    std::vector<Triple> train;
    std::set<Triple> seen;
    while (train.size() < 120) {
        Triple t{rng.uniform_int(0, 11), rng.uniform_int(0, 2), rng.uniform_int(0, 11)};
        if (seen.insert(t).second) train.push_back(t);
        // force plenty of matched pairs into the mix
        Triple mirror = t.relation == 1 ? Triple{t.tail, 2, t.head}
                        : t.relation == 2 ? Triple{t.tail, 1, t.head}
                                          : Triple{t.tail, 0, t.head};
        if (train.size() < 120 && rng.coin() && seen.insert(mirror).second)
            train.push_back(mirror);
    }

    auto once = remove_redundant(train, rules, vocab, 1);

    SUBCASE("output is a subset of the input") {
        std::set<Triple> in(train.begin(), train.end());
        for (const Triple& t : once) CHECK(in.count(t) == 1);
    }
    SUBCASE("idempotent under any second seed") {
        for (std::uint64_t seed2 : {0ull, 1ull, 42ull}) {
            auto twice = remove_redundant(once, rules, vocab, seed2);
            CHECK(twice == once);
        }
    }
    SUBCASE("no matched pair survives") {
        std::set<Triple> out(once.begin(), once.end());
        for (const Triple& t : out) {
            if (t.relation == 0 && t.head != t.tail) CHECK(out.count({t.tail, 0, t.head}) == 0);
            if (t.relation == 1) CHECK(out.count({t.tail, 2, t.head}) == 0);
            if (t.relation == 2) CHECK(out.count({t.tail, 1, t.head}) == 0);
        }
    }
    SUBCASE("deterministic given the seed, count stable across seeds") {
        CHECK(remove_redundant(train, rules, vocab, 1) == once);
        CHECK(remove_redundant(train, rules, vocab, 2).size() == once.size());
    }
}
