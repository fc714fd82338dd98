#pragma once

#include <algorithm>
#include <complex>
#include <vector>

#include "kge/evaluation.hpp"
#include "kge/model.hpp"
#include "kge/triples.hpp"

namespace testsupport {

/// Complex-arithmetic route to the ComplEx score:
/// Real(sum_j (re_h + i im_h)(re_r + i im_r)(re_t - i im_t)).
/// Independent of the expanded four-term implementation.
inline double complex_score_oracle(const kge::ModelParams& params, const kge::Triple& t) {
    std::complex<double> total = 0.0;
    for (int j = 0; j < params.dim; ++j) {
        std::complex<double> h(params.head_emb.at(t.head, j), params.tail_emb.at(t.head, j));
        std::complex<double> r(params.rel_fwd.at(t.relation, j), params.rel_inv.at(t.relation, j));
        std::complex<double> tl(params.head_emb.at(t.tail, j), -params.tail_emb.at(t.tail, j));
        total += h * r * tl;
    }
    return total.real();
}

/// Sort-based ranking oracle: materialize every admissible candidate score,
/// sort descending, and average the positions of the tie block containing
/// the target. Filtering drops known-true candidates except the target.
inline double brute_force_rank(const kge::Triple& triple, kge::EntitySlot slot,
                               kge::RankMode mode, const kge::FilterIndex& filter,
                               int num_entities, const kge::TripleScorer& scorer) {
    const int target = slot == kge::EntitySlot::Head ? triple.head : triple.tail;
    kge::Triple probe = triple;
    int& candidate = slot == kge::EntitySlot::Head ? probe.head : probe.tail;

    std::vector<double> scores;
    double target_score = 0.0;
    for (int c = 0; c < num_entities; ++c) {
        candidate = c;
        double s = scorer(probe);
        if (c == target) {
            target_score = s;
            scores.push_back(s);
            continue;
        }
        if (mode == kge::RankMode::Filtered && filter.contains(probe)) continue;
        scores.push_back(s);
    }

    std::sort(scores.begin(), scores.end(), std::greater<double>());
    std::size_t first = 0;
    while (scores[first] != target_score) ++first;
    std::size_t count = 0;
    while (first + count < scores.size() && scores[first + count] == target_score) ++count;
    // 1-based positions first+1 .. first+count, averaged.
    return static_cast<double>(first) + (static_cast<double>(count) + 1.0) / 2.0;
}

}  // namespace testsupport
