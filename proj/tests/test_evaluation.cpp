#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>

#include "doctest.h"
#include "kge/evaluation.hpp"
#include "kge/rng.hpp"
#include "support/oracles.hpp"
#include "support/tmpdir.hpp"

using namespace kge;

namespace {

// Fixed per-candidate scores for head replacement of a 5-entity world.
TripleScorer table_scorer(std::vector<double> head_scores) {
    return [scores = std::move(head_scores)](const Triple& t) { return scores[t.head]; };
}

}  // namespace

TEST_CASE("tie-averaged rank") {
    // target (head=0) scores 5 against {7, 5, 3, 1}: one better, one tie
    FilterIndex empty(5, 1);
    TripleScorer s = table_scorer({5, 7, 5, 3, 1});
    CHECK(rank_entity({0, 0, 0}, EntitySlot::Head, RankMode::Raw, empty, 5, s) == 2.5);
}

TEST_CASE("strictly best candidate ranks first") {
    FilterIndex empty(5, 1);
    TripleScorer s = table_scorer({9, 7, 5, 3, 1});
    CHECK(rank_entity({0, 0, 0}, EntitySlot::Head, RankMode::Raw, empty, 5, s) == 1.0);
}

TEST_CASE("filtering removes known-true competitors") {
    FilterIndex filter(5, 1);
    filter.insert({1, 0, 4});  // the strongest competitor is known true
    TripleScorer s = table_scorer({5, 7, 3, 3, 1});
    Triple t{0, 0, 4};
    CHECK(rank_entity(t, EntitySlot::Head, RankMode::Raw, filter, 5, s) == 2.0);
    CHECK(rank_entity(t, EntitySlot::Head, RankMode::Filtered, filter, 5, s) == 1.0);
}

TEST_CASE("the test triple itself stays in the candidate pool") {
    FilterIndex filter(5, 1);
    Triple t{0, 0, 4};
    filter.insert(t);  // test triples are always in the filter index
    TripleScorer s = table_scorer({5, 7, 3, 3, 1});
    CHECK(rank_entity(t, EntitySlot::Head, RankMode::Filtered, filter, 5, s) == 2.0);
}

TEST_CASE("constant scorer ranks mid-field, not first") {
    FilterIndex empty(7, 1);
    TripleScorer constant = [](const Triple&) { return 0.125; };
    double rank = rank_entity({2, 0, 3}, EntitySlot::Head, RankMode::Raw, empty, 7, constant);
    CHECK(rank == 4.0);  // (|E|+1)/2
}

TEST_CASE("filtered rank never exceeds raw rank") {
    Rng rng(17);
    const int ne = 12, nr = 3;
    FilterIndex filter(ne, nr);
    for (int i = 0; i < 60; ++i) {
        filter.insert({rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                       rng.uniform_int(0, ne - 1)});
    }
    ModelParams p = [&] {
        Rng r2(55);
        return ModelParams::init(ModelKind::SimplE, 4, ne, nr, {}, r2);
    }();
    TripleScorer s = [&](const Triple& t) { return score(p, t); };
    for (int i = 0; i < 100; ++i) {
        Triple t{rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                 rng.uniform_int(0, ne - 1)};
        for (EntitySlot slot : {EntitySlot::Head, EntitySlot::Tail}) {
            double raw, filt;
            rank_both(t, slot, filter, ne, s, raw, filt);
            CHECK(filt <= raw);
            CHECK(raw >= 1.0);
            CHECK(raw <= ne);
        }
    }
}

TEST_CASE("ranking matches the sort-based oracle") {
    Rng rng(23);
    const int ne = 10, nr = 2;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng init(seed);
        ModelParams p = ModelParams::init(ModelKind::SimplE, 3, ne, nr, {}, init);
        FilterIndex filter(ne, nr);
        for (int i = 0; i < 30; ++i) {
            filter.insert({rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                           rng.uniform_int(0, ne - 1)});
        }
        TripleScorer s = [&](const Triple& t) { return score(p, t); };
        for (int i = 0; i < 10; ++i) {
            Triple t{rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                     rng.uniform_int(0, ne - 1)};
            for (EntitySlot slot : {EntitySlot::Head, EntitySlot::Tail}) {
                for (RankMode mode : {RankMode::Raw, RankMode::Filtered}) {
                    double got = rank_entity(t, slot, mode, filter, ne, s);
                    double want = testsupport::brute_force_rank(t, slot, mode, filter, ne, s);
                    CHECK(got == want);
                }
            }
        }
    }
}

TEST_CASE("mrr formula on known ranks") {
    SUBCASE("single triple") {
        // rank_head=1, rank_tail=2 -> (1 + 1/2) / 2
        FilterIndex empty(3, 1);
        TripleScorer s = [](const Triple& t) {
            // head replacement: target 0 best; tail replacement: target 2 second
            static const double head_scores[3] = {10, 1, 0};
            static const double tail_scores[3] = {20, 1, 5};
            return head_scores[t.head] + tail_scores[t.tail];
        };
        EvalReport r = evaluate_with_scorer(s, std::vector<Triple>{{0, 0, 2}}, empty, 3);
        CHECK(r.per_triple[0].raw.head == 1.0);
        CHECK(r.per_triple[0].raw.tail == 2.0);
        CHECK(r.mrr_raw == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("perfect model") {
        FilterIndex empty(4, 1);
        std::vector<Triple> tests{{0, 0, 1}, {2, 0, 3}};
        TripleScorer s = [&](const Triple& t) {
            for (const Triple& x : tests)
                if (t == x) return 1.0;
            return 0.0;
        };
        EvalReport r = evaluate_with_scorer(s, tests, empty, 4);
        CHECK(r.mrr_raw == 1.0);
        CHECK(r.mrr_filtered == 1.0);
        CHECK(r.hits_at.at(1) == 1.0);
        CHECK(r.hits_at.at(3) == 1.0);
        CHECK(r.hits_at.at(10) == 1.0);
    }
}

TEST_CASE("mrr over three triples with prescribed filtered ranks") {
    // engineer head/tail ranks {1,2},{4,1},{2,10} for triples (9,k,9):
    // candidates below the wanted rank outscore the target, the rest trail
    const int head_rank[3] = {1, 4, 2};
    const int tail_rank[3] = {2, 1, 10};
    TripleScorer s = [&](const Triple& t) -> double {
        if (t.head == 9 && t.tail == 9) return 50.0;
        int c = t.tail == 9 ? t.head : t.tail;
        int want = t.tail == 9 ? head_rank[t.relation] : tail_rank[t.relation];
        return c < want - 1 ? 100.0 + c : -static_cast<double>(c);
    };
    FilterIndex empty(10, 3);
    std::vector<Triple> tests{{9, 0, 9}, {9, 1, 9}, {9, 2, 9}};
    EvalReport r = evaluate_with_scorer(s, tests, empty, 10);

    for (int k = 0; k < 3; ++k) {
        CHECK(r.per_triple[k].filtered.head == head_rank[k]);
        CHECK(r.per_triple[k].filtered.tail == tail_rank[k]);
    }
    double want = (1.0 + 0.5 + 0.25 + 1.0 + 0.5 + 0.1) / 6.0;
    CHECK(want == doctest::Approx(0.5583).epsilon(1e-3));
    CHECK(r.mrr_filtered == doctest::Approx(want).epsilon(1e-15));
    CHECK(r.hits_at.at(1) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(r.hits_at.at(3) == doctest::Approx(4.0 / 6.0).epsilon(1e-15));
    CHECK(r.hits_at.at(10) == 1.0);
}

TEST_CASE("report invariants and order independence") {
    Rng rng(31);
    const int ne = 8, nr = 2;
    Rng init(9);
    ModelParams p = ModelParams::init(ModelKind::SimplE, 3, ne, nr, {}, init);

    std::vector<Triple> tests;
    FilterIndex filter(ne, nr);
    for (int i = 0; i < 12; ++i) {
        Triple t{rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                 rng.uniform_int(0, ne - 1)};
        tests.push_back(t);
        filter.insert(t);
    }

    EvalReport r = evaluate(p, tests, filter);
    CHECK(r.hits_at.at(1) <= r.hits_at.at(3));
    CHECK(r.hits_at.at(3) <= r.hits_at.at(10));
    CHECK(r.mrr_filtered >= r.mrr_raw);
    CHECK(r.mrr_raw > 0.0);
    CHECK(r.mrr_raw <= 1.0);

    std::vector<Triple> permuted(tests.rbegin(), tests.rend());
    EvalReport r2 = evaluate(p, permuted, filter);
    CHECK(r2.mrr_raw == r.mrr_raw);
    CHECK(r2.mrr_filtered == r.mrr_filtered);
    CHECK(r2.hits_at == r.hits_at);
}

TEST_CASE("evaluation is identical across thread counts") {
    Rng rng(41);
    const int ne = 9, nr = 2;
    Rng init(10);
    ModelParams p = ModelParams::init(ModelKind::ComplEx, 4, ne, nr, {}, init);
    std::vector<Triple> tests;
    FilterIndex filter(ne, nr);
    for (int i = 0; i < 20; ++i) {
        Triple t{rng.uniform_int(0, ne - 1), rng.uniform_int(0, nr - 1),
                 rng.uniform_int(0, ne - 1)};
        tests.push_back(t);
        filter.insert(t);
    }
    EvalReport r1 = evaluate(p, tests, filter, 1);
    for (int threads : {2, 5}) {
        EvalReport rn = evaluate(p, tests, filter, threads);
        CHECK(rn.mrr_raw == r1.mrr_raw);
        CHECK(rn.mrr_filtered == r1.mrr_filtered);
        for (std::size_t i = 0; i < tests.size(); ++i) {
            CHECK(rn.per_triple[i].filtered.head == r1.per_triple[i].filtered.head);
            CHECK(rn.per_triple[i].filtered.tail == r1.per_triple[i].filtered.tail);
        }
    }
}

TEST_CASE("report serialization") {
    EvalReport r;
    r.mrr_raw = 0.25;
    r.mrr_filtered = 0.5;
    r.hits_at = {{1, 0.1}, {3, 0.3}, {10, 0.9}};
    r.n_test = 4;
    std::string json = report_to_json(r);
    CHECK(json.find("\"mrr_filtered\": 0.5") != std::string::npos);
    CHECK(json.find("\"n_test\": 4") != std::string::npos);
    CHECK(json.find("\"10\": 0.9") != std::string::npos);

    std::string table = report_to_table(r);
    CHECK(table.find("MRR") != std::string::npos);

    Vocabulary vocab;
    vocab.add_entity("a");
    vocab.add_entity("b");
    vocab.add_relation("r");
    r.per_triple = {{{0, 0, 1}, {1.5, 2}, {1, 2}}};
    testsupport::TmpDir tmp;
    save_per_triple_csv(tmp.str("ranks.csv"), r, vocab);
    std::ifstream in(tmp.str("ranks.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line ==
          "head,relation,tail,rank_head_raw,rank_tail_raw,rank_head_filtered,rank_tail_filtered");
    std::getline(in, line);
    CHECK(line == "a,r,b,1.5,2,1,2");
}
