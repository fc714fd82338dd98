#include "kge/model.hpp"

#include <cmath>

#include "kge/errors.hpp"

namespace kge {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::SimplE: return "simple";
        case ModelKind::SimplEIgnr: return "simple-ignr";
        case ModelKind::CP: return "cp";
        case ModelKind::DistMult: return "distmult";
        case ModelKind::ComplEx: return "complex";
    }
    throw std::invalid_argument("bad ModelKind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "simple") return ModelKind::SimplE;
    if (name == "simple-ignr") return ModelKind::SimplEIgnr;
    if (name == "cp") return ModelKind::CP;
    if (name == "distmult") return ModelKind::DistMult;
    if (name == "complex") return ModelKind::ComplEx;
    throw std::invalid_argument("unknown model kind: " + name);
}

ModelParams ModelParams::zeros(ModelKind kind, int dim, int num_entities, int num_relations,
                               const TieSpec& ties) {
    if (dim <= 0) throw DimensionError("embedding size must be positive");
    ModelParams p;
    p.kind = kind;
    p.dim = dim;
    p.head_emb = Matrix(num_entities, dim);
    if (kind != ModelKind::DistMult) p.tail_emb = Matrix(num_entities, dim);
    p.rel_fwd = Matrix(num_relations, dim);
    p.rel_inv = Matrix(num_relations, dim);
    p.ties = TieTable(ties, num_relations);
    return p;
}

ModelParams ModelParams::init(ModelKind kind, int dim, int num_entities, int num_relations,
                              const TieSpec& ties, Rng& rng) {
    ModelParams p = zeros(kind, dim, num_entities, num_relations, ties);
    const double bound = std::sqrt(6.0 / dim);
    for (Matrix* m : {&p.head_emb, &p.tail_emb, &p.rel_fwd, &p.rel_inv}) {
        for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-bound, bound);
    }
    return p;
}

int ModelParams::check_entity(int e) const {
    if (e < 0 || e >= num_entities()) throw IndexError("entity id out of range: " + std::to_string(e));
    return e;
}

int ModelParams::check_relation(int r) const {
    if (r < 0 || r >= num_relations())
        throw IndexError("relation id out of range: " + std::to_string(r));
    return r;
}

ModelParams::RelVec ModelParams::rel(int r, RelSlot slot) const {
    check_relation(r);
    TieTable::Resolved res = ties.resolve(r, slot);
    const Matrix& m = res.slot == RelSlot::Forward ? rel_fwd : rel_inv;
    return {m.row(res.relation), res.sign};
}

ParamRef ModelParams::rel_ref(int r, RelSlot slot, double& sign_out) const {
    check_relation(r);
    TieTable::Resolved res = ties.resolve(r, slot);
    sign_out = res.sign;
    return {res.slot == RelSlot::Forward ? ParamTable::RelFwd : ParamTable::RelInv, res.relation};
}

std::span<double> ModelParams::storage(ParamRef ref) {
    switch (ref.table) {
        case ParamTable::HeadEmb: return head_emb.row(ref.row);
        case ParamTable::TailEmb: return tail_emb.row(ref.row);
        case ParamTable::RelFwd: return rel_fwd.row(ref.row);
        case ParamTable::RelInv: return rel_inv.row(ref.row);
    }
    throw std::invalid_argument("bad ParamTable");
}

std::span<const double> ModelParams::storage(ParamRef ref) const {
    return const_cast<ModelParams*>(this)->storage(ref);
}

double trilinear(std::span<const double> a, std::span<const double> b,
                 std::span<const double> c) {
    if (a.size() != b.size() || b.size() != c.size()) {
        throw DimensionError("trilinear: vector lengths differ");
    }
    // Group the outer factors first: swapping a and c then yields the
    // bit-identical result, which the symmetric-model equalities rely on.
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) sum += (a[j] * c[j]) * b[j];
    return sum;
}

namespace {

// Signed trilinear against a tie-resolved relation vector. The sign is a
// final exact multiplication, so tied equalities hold bitwise.
double rel_term(std::span<const double> a, const ModelParams::RelVec& r,
                std::span<const double> c) {
    return r.sign * trilinear(a, r.v, c);
}

}  // namespace

double score_cp(const ModelParams& params, const Triple& t) {
    return rel_term(params.head(t.head), params.rel(t.relation, RelSlot::Forward),
                    params.tail(t.tail));
}

double score_simple(const ModelParams& params, const Triple& t) {
    double forward = rel_term(params.head(t.head), params.rel(t.relation, RelSlot::Forward),
                              params.tail(t.tail));
    double inverse = rel_term(params.head(t.tail), params.rel(t.relation, RelSlot::Inverse),
                              params.tail(t.head));
    return 0.5 * (forward + inverse);
}

double score_simple_ignr(const ModelParams& params, const Triple& t) {
    return score_cp(params, t);
}

double score_distmult(const ModelParams& params, const Triple& t) {
    if (params.kind != ModelKind::DistMult) {
        throw DimensionError("score_distmult requires DistMult storage");
    }
    return rel_term(params.head(t.head), params.rel(t.relation, RelSlot::Forward),
                    params.tail(t.tail));
}

double score_complex(const ModelParams& params, const Triple& t) {
    if (params.kind != ModelKind::ComplEx) {
        throw DimensionError("score_complex requires ComplEx storage");
    }
    std::span<const double> re_h = params.head(t.head);
    std::span<const double> im_h = params.tail(t.head);
    std::span<const double> re_t = params.head(t.tail);
    std::span<const double> im_t = params.tail(t.tail);
    std::span<const double> re_r = params.rel_fwd.row(params.check_relation(t.relation));
    std::span<const double> im_r = params.rel_inv.row(t.relation);
    return trilinear(re_h, re_r, re_t) + trilinear(re_h, im_r, im_t) +
           trilinear(im_h, re_r, im_t) - trilinear(im_h, im_r, re_t);
}

double score(const ModelParams& params, const Triple& t) {
    switch (params.kind) {
        case ModelKind::SimplE: return score_simple(params, t);
        case ModelKind::SimplEIgnr: return score_simple_ignr(params, t);
        case ModelKind::CP: return score_cp(params, t);
        case ModelKind::DistMult: return score_distmult(params, t);
        case ModelKind::ComplEx: return score_complex(params, t);
    }
    throw std::invalid_argument("bad ModelKind");
}

Matrix build_bilinear_matrix(const ModelParams& params, int relation, ModelKind kind) {
    params.check_relation(relation);
    const std::size_t d = static_cast<std::size_t>(params.dim);

    if (kind == ModelKind::DistMult) {
        ModelParams::RelVec r = params.rel(relation, RelSlot::Forward);
        Matrix m(d, d);
        for (std::size_t j = 0; j < d; ++j) m.at(j, j) = r.sign * r.v[j];
        return m;
    }

    Matrix m(2 * d, 2 * d);
    ModelParams::RelVec fwd = params.rel(relation, RelSlot::Forward);
    switch (kind) {
        case ModelKind::CP:
            for (std::size_t j = 0; j < d; ++j) m.at(j, d + j) = fwd.sign * fwd.v[j];
            break;
        case ModelKind::SimplE: {
            ModelParams::RelVec inv = params.rel(relation, RelSlot::Inverse);
            for (std::size_t j = 0; j < d; ++j) {
                m.at(j, d + j) = fwd.sign * fwd.v[j];
                m.at(d + j, j) = inv.sign * inv.v[j];
            }
            break;
        }
        case ModelKind::ComplEx: {
            ModelParams::RelVec im = params.rel(relation, RelSlot::Inverse);
            for (std::size_t j = 0; j < d; ++j) {
                m.at(j, j) = fwd.sign * fwd.v[j];
                m.at(d + j, d + j) = fwd.sign * fwd.v[j];
                m.at(j, d + j) = im.sign * im.v[j];
                m.at(d + j, j) = -im.sign * im.v[j];
            }
            break;
        }
        default:
            throw std::invalid_argument("no bilinear form for kind " + to_string(kind));
    }
    return m;
}

double bilinear_score(const Matrix& m, std::span<const double> v_head,
                      std::span<const double> v_tail) {
    if (v_head.size() != m.rows() || v_tail.size() != m.cols()) {
        throw DimensionError("bilinear_score: vector/matrix sizes disagree");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double row_dot = 0.0;
        std::span<const double> row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) row_dot += row[j] * v_tail[j];
        total += v_head[i] * row_dot;
    }
    return total;
}

}  // namespace kge
