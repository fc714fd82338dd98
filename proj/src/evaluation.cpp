#include "kge/evaluation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kge/errors.hpp"
#include "kge/parallel.hpp"

namespace kge {

namespace {

void rank_from_scores(const Triple& triple, EntitySlot slot, const FilterIndex& filter,
                      const std::vector<double>& scores, double& raw_out, double& filtered_out) {
    const int target = slot == EntitySlot::Head ? triple.head : triple.tail;
    const double target_score = scores[target];

    std::size_t raw_greater = 0, raw_equal = 0;
    std::size_t filt_greater = 0, filt_equal = 0;

    Triple probe = triple;
    int& candidate = slot == EntitySlot::Head ? probe.head : probe.tail;
    for (int c = 0; c < static_cast<int>(scores.size()); ++c) {
        if (c == target) continue;
        const double s = scores[c];
        const bool greater = s > target_score;
        const bool equal = s == target_score;  // exact: full 64-bit comparison
        if (!greater && !equal) continue;
        raw_greater += greater;
        raw_equal += equal;
        candidate = c;
        if (filter.contains(probe)) continue;  // known true elsewhere: not a competitor
        filt_greater += greater;
        filt_equal += equal;
    }
    raw_out = 1.0 + raw_greater + 0.5 * raw_equal;
    filtered_out = 1.0 + filt_greater + 0.5 * filt_equal;
}

}  // namespace

void rank_both(const Triple& triple, EntitySlot slot, const FilterIndex& filter,
               int num_entities, const TripleScorer& scorer, double& raw_out,
               double& filtered_out) {
    std::vector<double> scores(num_entities);
    Triple probe = triple;
    int& candidate = slot == EntitySlot::Head ? probe.head : probe.tail;
    for (int c = 0; c < num_entities; ++c) {
        candidate = c;
        scores[c] = scorer(probe);
    }
    rank_from_scores(triple, slot, filter, scores, raw_out, filtered_out);
}

double rank_entity(const Triple& triple, EntitySlot slot, RankMode mode,
                   const FilterIndex& filter, int num_entities, const TripleScorer& scorer) {
    double raw, filtered;
    rank_both(triple, slot, filter, num_entities, scorer, raw, filtered);
    return mode == RankMode::Raw ? raw : filtered;
}

EvalReport evaluate_with_scorer(const TripleScorer& scorer, std::span<const Triple> testset,
                                const FilterIndex& filter, int num_entities, int threads) {
    if (testset.empty()) throw std::invalid_argument("evaluate: empty test set");
    EvalReport report;
    report.n_test = testset.size();
    report.per_triple.resize(testset.size());

    parallel_for(testset.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            TripleRanks& r = report.per_triple[i];
            r.triple = testset[i];
            rank_both(r.triple, EntitySlot::Head, filter, num_entities, scorer, r.raw.head,
                      r.filtered.head);
            rank_both(r.triple, EntitySlot::Tail, filter, num_entities, scorer, r.raw.tail,
                      r.filtered.tail);
        }
    });

    const double denom = 2.0 * static_cast<double>(testset.size());
    std::map<int, std::size_t> hit_counts{{1, 0}, {3, 0}, {10, 0}};
    double rr_raw = 0.0, rr_filtered = 0.0;
    for (const TripleRanks& r : report.per_triple) {
        rr_raw += 1.0 / r.raw.head + 1.0 / r.raw.tail;
        rr_filtered += 1.0 / r.filtered.head + 1.0 / r.filtered.tail;
        for (auto& [k, count] : hit_counts) {
            count += (r.filtered.head <= k) ? 1 : 0;
            count += (r.filtered.tail <= k) ? 1 : 0;
        }
    }
    report.mrr_raw = rr_raw / denom;
    report.mrr_filtered = rr_filtered / denom;
    for (auto& [k, count] : hit_counts) report.hits_at[k] = count / denom;
    return report;
}

EvalReport evaluate(const ModelParams& params, std::span<const Triple> testset,
                    const FilterIndex& filter, int threads) {
    TripleScorer scorer = [&params](const Triple& t) { return score(params, t); };
    return evaluate_with_scorer(scorer, testset, filter, params.num_entities(), threads);
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::json j;
    j["mrr_raw"] = report.mrr_raw;
    j["mrr_filtered"] = report.mrr_filtered;
    nlohmann::json hits;
    for (const auto& [k, v] : report.hits_at) hits[std::to_string(k)] = v;
    j["hits"] = hits;
    j["n_test"] = report.n_test;
    return j.dump(2);
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed;
    out << "triples evaluated: " << report.n_test << '\n';
    out << "MRR  raw:      " << report.mrr_raw << '\n';
    out << "MRR  filtered: " << report.mrr_filtered << '\n';
    for (const auto& [k, v] : report.hits_at) {
        out << "hit@" << k << (k < 10 ? ":  " : ": ") << "       " << v << '\n';
    }
    return out.str();
}

void save_per_triple_csv(const std::string& path, const EvalReport& report,
                         const Vocabulary& vocab) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write rank file: " + path);
    out << "head,relation,tail,rank_head_raw,rank_tail_raw,rank_head_filtered,"
           "rank_tail_filtered\n";
    for (const TripleRanks& r : report.per_triple) {
        out << vocab.entity_name(r.triple.head) << ',' << vocab.relation_name(r.triple.relation)
            << ',' << vocab.entity_name(r.triple.tail) << ',' << r.raw.head << ',' << r.raw.tail
            << ',' << r.filtered.head << ',' << r.filtered.tail << '\n';
    }
}

}  // namespace kge
