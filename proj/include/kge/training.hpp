#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "kge/model.hpp"
#include "kge/rng.hpp"
#include "kge/triples.hpp"

namespace kge {

struct TrainConfig {
    double learning_rate = 0.1;
    double lambda = 0.0;  // L2 coefficient
    int batch_size = 100;
    int neg_ratio = 1;  // negatives per positive
    int max_epochs = 1000;
    int eval_every = 50;  // epochs between validation evaluations
    std::uint64_t seed = 0;
    ModelKind model_kind = ModelKind::SimplE;
    int dim = 200;

    /// Throws std::invalid_argument when a positivity constraint fails.
    void validate() const;
};

/// Triples labelled +1 (positive) or -1 (corrupted negative).
struct LabelledBatch {
    std::vector<Triple> triples;
    std::vector<int> labels;
};

/// Sparse per-row gradient accumulator addressed by canonical storage rows.
struct Gradients {
    std::map<ParamRef, std::vector<double>> rows;

    std::vector<double>& row(ParamRef ref, std::size_t dim) {
        auto& r = rows[ref];
        if (r.empty()) r.assign(dim, 0.0);
        return r;
    }
};

/// AdaGrad squared-gradient accumulators, one per parameter matrix.
struct AdagradState {
    Matrix head_emb;
    Matrix tail_emb;
    Matrix rel_fwd;
    Matrix rel_inv;
    double epsilon = 1e-8;

    explicit AdagradState(const ModelParams& params);
    std::span<double> storage(ParamRef ref);
};

/// Replace the head or tail (fair coin) with a uniform draw from the other
/// entities. The output always differs from the input in exactly one slot.
Triple corrupt(const Triple& positive, int num_entities, Rng& rng);

/// Each positive with label +1 followed by neg_ratio corruptions labelled -1.
LabelledBatch make_batch(std::span<const Triple> positives, int neg_ratio, Rng& rng,
                         int num_entities);

/// Sum over the batch of softplus(-label * score), plus lambda times the
/// squared norm of every canonical parameter row the batch touches (each
/// row counted once per batch). SimplE-ignr contributes
/// softplus(-l*forward) + softplus(-l*inverse) per triple.
double batch_loss(const ModelParams& params, const LabelledBatch& batch, double lambda);

/// Analytic gradients of batch_loss, accumulated into canonical rows with
/// tie signs applied. threads>1 computes per-triple contributions in
/// parallel and merges them in triple order, so results are bit-identical
/// for any thread count.
Gradients batch_gradients(const ModelParams& params, const LabelledBatch& batch, double lambda,
                          int threads = 1);

/// Loss and gradients in one pass (training hot path).
double batch_loss_and_gradients(const ModelParams& params, const LabelledBatch& batch,
                                double lambda, Gradients& grads, int threads = 1);

/// G += g^2; x -= lr * g / (sqrt(G) + eps), per accumulated row.
void adagrad_step(ModelParams& params, const Gradients& grads, AdagradState& state, double lr);

struct EpochStats {
    int epoch;
    double train_loss;                // summed batch losses for the epoch
    std::optional<double> valid_mrr;  // filtered MRR, present at eval epochs
};
using TrainHistory = std::vector<EpochStats>;

struct TrainResult {
    ModelParams params;  // best-validation snapshot (final params if never evaluated)
    TrainHistory history;
    double best_valid_mrr = 0.0;
    int best_epoch = 0;
};

/// Mini-batch training: seeded epoch shuffle, corruption sampling, AdaGrad
/// updates, validation filtered MRR every eval_every epochs (and at the
/// final epoch) with best-snapshot selection. Deterministic given the seed.
TrainResult train(const TrainConfig& config, const TripleSet& data, const TieSpec& ties = {},
                  int threads = 1);

/// Max relative error between analytic gradients and central finite
/// differences of the loss on a single-triple batch, over every touched
/// parameter: |a - n| / max(1e-12, |a| + |n|).
double gradient_check(ModelParams& params, const Triple& triple, int label, double lambda,
                      double step);

/// Write history as CSV: epoch,train_loss,valid_filtered_mrr.
void save_history(const std::string& path, const TrainHistory& history);

double softplus(double x);
double logistic(double x);

}  // namespace kge
