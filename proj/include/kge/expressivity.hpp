#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kge/model.hpp"
#include "kge/triples.hpp"

namespace kge {

/// A complete truth assignment over all |R|*|E|^2 triples.
class GroundTruth {
public:
    GroundTruth(int num_entities, int num_relations)
        : num_entities_(num_entities),
          num_relations_(num_relations),
          truth_(static_cast<std::size_t>(num_relations) * num_entities * num_entities, 0) {}

    int num_entities() const { return num_entities_; }
    int num_relations() const { return num_relations_; }

    bool get(int h, int r, int t) const { return truth_[index(h, r, t)] != 0; }
    void set(int h, int r, int t, bool value) { truth_[index(h, r, t)] = value ? 1 : 0; }

    /// Number of true triples.
    std::size_t gamma() const;

    /// True triples in lexicographic (relation, head, tail) order.
    std::vector<Triple> true_triples() const;

    /// File format: first line `|E| |R|`, then one line `h r t` per TRUE
    /// triple (integer ids); everything unlisted is false.
    static GroundTruth load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::size_t index(int h, int r, int t) const;

    int num_entities_;
    int num_relations_;
    std::vector<std::uint8_t> truth_;
};

/// Grid construction: dimension |E|*|R|. h vectors are entity indicators
/// repeated per relation block, relation vectors are block indicators, and
/// each tail vector stores +1/-1 truth codes, so every forward score is
/// exactly +1 or -1. Inverse relation vectors are zero; the averaged score
/// is half the forward score and carries its sign.
ModelParams construct_grid(const GroundTruth& gt);

/// Inductive construction: dimension gamma+1. Starts at d=1 with all
/// forward scores -1, then appends one coordinate per true fact (processed
/// in (relation, head, tail) order) that raises exactly that fact's forward
/// score above zero without touching any other score.
ModelParams construct_incremental(const GroundTruth& gt);

/// Check sign(scorer) against the ground truth for all |R|*|E|^2 triples:
/// true requires score > 0, false requires score < 0 (an exact zero is a
/// violation). Returns the violating triples.
struct VerifyResult {
    bool pass = true;
    std::vector<Triple> violations;
};
VerifyResult verify(const ModelParams& params, const GroundTruth& gt,
                    const std::function<double(const ModelParams&, const Triple&)>& scorer =
                        [](const ModelParams& p, const Triple& t) { return score_simple(p, t); });

}  // namespace kge
