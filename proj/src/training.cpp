#include "kge/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "kge/errors.hpp"
#include "kge/evaluation.hpp"
#include "kge/parallel.hpp"

namespace kge {

double softplus(double x) {
    if (x > 30.0) return x;  // log(1+e^x) = x to double precision
    return std::log1p(std::exp(x));
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
    if (!(lambda >= 0)) throw std::invalid_argument("lambda must be non-negative");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (neg_ratio < 1) throw std::invalid_argument("neg_ratio must be positive");
    if (max_epochs < 0) throw std::invalid_argument("max_epochs must be non-negative");
    if (eval_every < 1) throw std::invalid_argument("eval_every must be positive");
    if (dim < 1) throw std::invalid_argument("dim must be positive");
}

AdagradState::AdagradState(const ModelParams& params)
    : head_emb(params.head_emb.rows(), params.head_emb.cols()),
      tail_emb(params.tail_emb.rows(), params.tail_emb.cols()),
      rel_fwd(params.rel_fwd.rows(), params.rel_fwd.cols()),
      rel_inv(params.rel_inv.rows(), params.rel_inv.cols()) {}

std::span<double> AdagradState::storage(ParamRef ref) {
    switch (ref.table) {
        case ParamTable::HeadEmb: return head_emb.row(ref.row);
        case ParamTable::TailEmb: return tail_emb.row(ref.row);
        case ParamTable::RelFwd: return rel_fwd.row(ref.row);
        case ParamTable::RelInv: return rel_inv.row(ref.row);
    }
    throw std::invalid_argument("bad ParamTable");
}

Triple corrupt(const Triple& positive, int num_entities, Rng& rng) {
    if (num_entities < 2) throw std::invalid_argument("cannot corrupt with fewer than 2 entities");
    Triple out = positive;
    bool corrupt_head = rng.coin();
    int original = corrupt_head ? positive.head : positive.tail;
    int draw = rng.uniform_int(0, num_entities - 2);
    if (draw >= original) ++draw;  // skip the original entity
    (corrupt_head ? out.head : out.tail) = draw;
    return out;
}

LabelledBatch make_batch(std::span<const Triple> positives, int neg_ratio, Rng& rng,
                         int num_entities) {
    if (positives.empty()) throw std::invalid_argument("make_batch: empty positive slice");
    LabelledBatch batch;
    batch.triples.reserve(positives.size() * (1 + neg_ratio));
    batch.labels.reserve(batch.triples.capacity());
    for (const Triple& pos : positives) {
        batch.triples.push_back(pos);
        batch.labels.push_back(+1);
        for (int k = 0; k < neg_ratio; ++k) {
            batch.triples.push_back(corrupt(pos, num_entities, rng));
            batch.labels.push_back(-1);
        }
    }
    return batch;
}

namespace {

// One trilinear term of a score: value = weight * rel_sign * <a, b, c>,
// where b is the canonical relation storage row and a, c entity rows.
struct Term {
    double weight;
    ParamRef a_ref;
    std::span<const double> a;
    ParamRef b_ref;
    std::span<const double> b;
    double rel_sign;
    ParamRef c_ref;
    std::span<const double> c;

    double value() const { return weight * rel_sign * trilinear(a, b, c); }
};

struct TermList {
    Term terms[4];
    int count = 0;
    void push(const Term& t) { terms[count++] = t; }
};

Term make_term(const ModelParams& params, double weight, int head_entity, int relation,
               RelSlot slot, int tail_entity) {
    Term t;
    t.weight = weight;
    t.a_ref = params.entity_ref(ParamTable::HeadEmb, head_entity);
    t.a = params.head(head_entity);
    t.b_ref = params.rel_ref(relation, slot, t.rel_sign);
    t.b = params.storage(t.b_ref);
    t.c_ref = params.entity_ref(ParamTable::TailEmb, tail_entity);
    t.c = params.tail(tail_entity);
    return t;
}

// ComplEx addresses the four matrices directly (no tie resolution).
Term raw_term(const ModelParams& params, double weight, ParamTable a_t, int a_row, ParamTable b_t,
              int b_row, ParamTable c_t, int c_row) {
    Term t;
    t.weight = weight;
    t.a_ref = {a_t, a_row};
    t.a = params.storage(t.a_ref);
    t.b_ref = {b_t, b_row};
    t.b = params.storage(t.b_ref);
    t.rel_sign = 1.0;
    t.c_ref = {c_t, c_row};
    t.c = params.storage(t.c_ref);
    return t;
}

TermList score_terms(const ModelParams& params, const Triple& triple) {
    TermList list;
    switch (params.kind) {
        case ModelKind::SimplE:
            list.push(make_term(params, 0.5, triple.head, triple.relation, RelSlot::Forward,
                                triple.tail));
            list.push(make_term(params, 0.5, triple.tail, triple.relation, RelSlot::Inverse,
                                triple.head));
            break;
        case ModelKind::SimplEIgnr:
            list.push(make_term(params, 1.0, triple.head, triple.relation, RelSlot::Forward,
                                triple.tail));
            list.push(make_term(params, 1.0, triple.tail, triple.relation, RelSlot::Inverse,
                                triple.head));
            break;
        case ModelKind::CP:
        case ModelKind::DistMult:
            list.push(make_term(params, 1.0, triple.head, triple.relation, RelSlot::Forward,
                                triple.tail));
            break;
        case ModelKind::ComplEx: {
            int h = triple.head, r = triple.relation, t = triple.tail;
            list.push(raw_term(params, 1.0, ParamTable::HeadEmb, h, ParamTable::RelFwd, r,
                               ParamTable::HeadEmb, t));
            list.push(raw_term(params, 1.0, ParamTable::HeadEmb, h, ParamTable::RelInv, r,
                               ParamTable::TailEmb, t));
            list.push(raw_term(params, 1.0, ParamTable::TailEmb, h, ParamTable::RelFwd, r,
                               ParamTable::TailEmb, t));
            list.push(raw_term(params, -1.0, ParamTable::TailEmb, h, ParamTable::RelInv, r,
                               ParamTable::HeadEmb, t));
            break;
        }
    }
    return list;
}

// Loss and logistic coefficients for one labelled triple. SimplE-ignr
// trains both CP terms through their own softplus (one coefficient each);
// every other kind applies softplus to the model score.
struct TripleEval {
    double loss;
    double coeff[2];
    bool per_term;
};

TripleEval evaluate_triple(const ModelParams& params, const Triple& triple, int label) {
    const double l = label;
    TripleEval eval{0.0, {0.0, 0.0}, params.kind == ModelKind::SimplEIgnr};
    if (eval.per_term) {
        TermList terms = score_terms(params, triple);
        for (int k = 0; k < terms.count; ++k) {
            double s = terms.terms[k].value();
            eval.loss += softplus(-l * s);
            eval.coeff[k] = logistic(-l * s) * -l;
        }
        return eval;
    }
    // phi through the scorer itself, so the trained quantity is bitwise the
    // quantity reported at test time
    double phi = score(params, triple);
    eval.loss = softplus(-l * phi);
    eval.coeff[0] = logistic(-l * phi) * -l;
    return eval;
}

double batch_core(const ModelParams& params, const LabelledBatch& batch, double lambda,
                  Gradients* grads_out, int threads) {
    if (batch.triples.size() != batch.labels.size()) {
        throw std::invalid_argument("batch triples/labels length mismatch");
    }
    const std::size_t n = batch.triples.size();
    const std::size_t dim = static_cast<std::size_t>(params.dim);

    for (std::size_t i = 0; i < n; ++i) {
        if (batch.labels[i] != 1 && batch.labels[i] != -1) {
            throw std::invalid_argument("labels must be +1 or -1");
        }
        params.check_entity(batch.triples[i].head);
        params.check_entity(batch.triples[i].tail);
        params.check_relation(batch.triples[i].relation);
    }

    std::vector<TripleEval> evals(n);
    parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            evals[i] = evaluate_triple(params, batch.triples[i], batch.labels[i]);
        }
    });

    // Accumulate in triple order: results are independent of the thread count.
    double loss = 0.0;
    std::set<ParamRef> touched;
    for (std::size_t i = 0; i < n; ++i) {
        loss += evals[i].loss;
        TermList terms = score_terms(params, batch.triples[i]);
        for (int k = 0; k < terms.count; ++k) {
            const Term& t = terms.terms[k];
            touched.insert(t.a_ref);
            touched.insert(t.b_ref);
            touched.insert(t.c_ref);
            if (!grads_out) continue;
            double coeff = evals[i].coeff[evals[i].per_term ? k : 0];
            double scale = coeff * t.weight * t.rel_sign;
            auto add = [&](ParamRef ref, std::span<const double> x, std::span<const double> y) {
                auto& row = grads_out->row(ref, dim);
                for (std::size_t j = 0; j < dim; ++j) row[j] += scale * x[j] * y[j];
            };
            add(t.a_ref, t.b, t.c);
            add(t.b_ref, t.a, t.c);
            add(t.c_ref, t.a, t.b);
        }
    }

    // L2 over the parameter rows this batch touches, once per batch.
    if (lambda != 0.0) {
        for (ParamRef ref : touched) {
            std::span<const double> row = params.storage(ref);
            double sq = 0.0;
            for (double v : row) sq += v * v;
            loss += lambda * sq;
            if (grads_out) {
                auto& grow = grads_out->row(ref, dim);
                for (std::size_t j = 0; j < dim; ++j) grow[j] += 2.0 * lambda * row[j];
            }
        }
    }
    return loss;
}

}  // namespace

double batch_loss(const ModelParams& params, const LabelledBatch& batch, double lambda) {
    return batch_core(params, batch, lambda, nullptr, 1);
}

Gradients batch_gradients(const ModelParams& params, const LabelledBatch& batch, double lambda,
                          int threads) {
    Gradients grads;
    batch_core(params, batch, lambda, &grads, threads);
    return grads;
}

double batch_loss_and_gradients(const ModelParams& params, const LabelledBatch& batch,
                                double lambda, Gradients& grads, int threads) {
    return batch_core(params, batch, lambda, &grads, threads);
}

void adagrad_step(ModelParams& params, const Gradients& grads, AdagradState& state, double lr) {
    for (const auto& [ref, grad] : grads.rows) {
        std::span<double> x = params.storage(ref);
        std::span<double> accum = state.storage(ref);
        if (grad.size() != x.size()) throw DimensionError("gradient/parameter shape mismatch");
        for (std::size_t j = 0; j < grad.size(); ++j) {
            double g = grad[j];
            accum[j] += g * g;
            x[j] -= lr * g / (std::sqrt(accum[j]) + state.epsilon);
        }
    }
}

TrainResult train(const TrainConfig& config, const TripleSet& data, const TieSpec& ties,
                  int threads) {
    config.validate();
    if (data.train.empty()) throw std::invalid_argument("train split is empty");

    const int ne = data.filter.num_entities();
    const int nr = data.filter.num_relations();

    Rng init_rng = Rng::stream(config.seed, "init");
    Rng shuffle_rng = Rng::stream(config.seed, "shuffle");
    Rng corrupt_rng = Rng::stream(config.seed, "corrupt");

    TrainResult result;
    result.params = ModelParams::init(config.model_kind, config.dim, ne, nr, ties, init_rng);
    ModelParams& params = result.params;
    AdagradState state(params);

    ModelParams best;
    bool have_best = false;
    double best_mrr = -1.0;
    int best_epoch = 0;

    std::vector<std::size_t> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<Triple> positives;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng.engine());

        double epoch_loss = 0.0;
        const std::size_t bs = static_cast<std::size_t>(config.batch_size);
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += bs, ++batch_index) {
            std::size_t end = std::min(start + bs, order.size());
            positives.clear();
            for (std::size_t i = start; i < end; ++i) positives.push_back(data.train[order[i]]);

            LabelledBatch batch = make_batch(positives, config.neg_ratio, corrupt_rng, ne);
            Gradients grads;
            double loss = batch_loss_and_gradients(params, batch, config.lambda, grads, threads);
            if (!std::isfinite(loss)) throw DivergenceError(epoch, batch_index);
            epoch_loss += loss;
            adagrad_step(params, grads, state, config.learning_rate);
        }

        EpochStats stats{epoch, epoch_loss, std::nullopt};
        bool eval_now = (epoch % config.eval_every == 0 || epoch == config.max_epochs) &&
                        !data.valid.empty();
        if (eval_now) {
            double mrr = evaluate(params, data.valid, data.filter, threads).mrr_filtered;
            stats.valid_mrr = mrr;
            if (mrr > best_mrr) {
                best_mrr = mrr;
                best_epoch = epoch;
                best = params;
                have_best = true;
            }
        }
        result.history.push_back(stats);
    }

    if (have_best) {
        result.params = std::move(best);
        result.best_valid_mrr = best_mrr;
        result.best_epoch = best_epoch;
    }
    return result;
}

double gradient_check(ModelParams& params, const Triple& triple, int label, double lambda,
                      double step) {
    if (!(step > 0)) throw std::invalid_argument("step must be positive");
    LabelledBatch batch;
    batch.triples = {triple};
    batch.labels = {label};

    Gradients grads = batch_gradients(params, batch, lambda);
    double max_rel = 0.0;
    for (const auto& [ref, grad] : grads.rows) {
        std::span<double> row = params.storage(ref);
        for (std::size_t j = 0; j < row.size(); ++j) {
            double original = row[j];
            row[j] = original + step;
            double up = batch_loss(params, batch, lambda);
            row[j] = original - step;
            double down = batch_loss(params, batch, lambda);
            row[j] = original;
            double numeric = (up - down) / (2.0 * step);
            double analytic = grad[j];
            double rel = std::abs(analytic - numeric) /
                         std::max(1e-12, std::abs(analytic) + std::abs(numeric));
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

void save_history(const std::string& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write history file: " + path);
    out << "epoch,train_loss,valid_filtered_mrr\n";
    out.precision(17);
    for (const EpochStats& row : history) {
        out << row.epoch << ',' << row.train_loss << ',';
        if (row.valid_mrr) out << *row.valid_mrr;
        out << '\n';
    }
}

}  // namespace kge
