#pragma once

#include <compare>
#include <span>
#include <string>

#include "kge/matrix.hpp"
#include "kge/rng.hpp"
#include "kge/rules.hpp"
#include "kge/triples.hpp"

namespace kge {

enum class ModelKind { SimplE, SimplEIgnr, CP, DistMult, ComplEx };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Addresses one row of one parameter matrix. Used for sparse gradient
/// accumulation and optimizer updates; always refers to canonical storage.
enum class ParamTable : std::uint8_t { HeadEmb, TailEmb, RelFwd, RelInv };

struct ParamRef {
    ParamTable table;
    int row;
    friend auto operator<=>(const ParamRef&, const ParamRef&) = default;
};

/// Embedding storage for all model kinds.
///
/// head_emb/tail_emb hold the per-entity head and tail vectors; rel_fwd and
/// rel_inv the per-relation forward and inverse vectors. DistMult has a
/// single vector per entity: tail reads alias head_emb and tail_emb stays
/// empty. ComplEx reuses the same four matrices as (entity real, entity
/// imaginary, relation real, relation imaginary).
///
/// Relation reads go through the tie table: a tied slot resolves to its
/// canonical row with a sign, so rule-derived equalities hold exactly by
/// construction and survive any sequence of updates.
struct ModelParams {
    ModelKind kind = ModelKind::SimplE;
    int dim = 0;
    Matrix head_emb;
    Matrix tail_emb;  // empty for DistMult
    Matrix rel_fwd;
    Matrix rel_inv;
    TieTable ties;

    /// Uniform init on [-sqrt(6/d), +sqrt(6/d)], element order fixed.
    static ModelParams init(ModelKind kind, int dim, int num_entities, int num_relations,
                            const TieSpec& ties, Rng& rng);
    static ModelParams zeros(ModelKind kind, int dim, int num_entities, int num_relations,
                             const TieSpec& ties = {});

    int num_entities() const { return static_cast<int>(head_emb.rows()); }
    int num_relations() const { return static_cast<int>(rel_fwd.rows()); }
    bool shared_entity_storage() const { return kind == ModelKind::DistMult; }

    std::span<const double> head(int e) const { return head_emb.row(check_entity(e)); }
    std::span<const double> tail(int e) const {
        check_entity(e);
        return shared_entity_storage() ? head_emb.row(e) : tail_emb.row(e);
    }

    /// Tie-resolved relation vector. The sign applies to every element on
    /// read (and, transposed, to gradient accumulation on write).
    struct RelVec {
        std::span<const double> v;
        double sign;
    };
    RelVec rel(int r, RelSlot slot) const;

    /// Canonical storage address for an entity row in the given role.
    ParamRef entity_ref(ParamTable table, int e) const {
        check_entity(e);
        if (shared_entity_storage() && table == ParamTable::TailEmb)
            return {ParamTable::HeadEmb, e};
        return {table, e};
    }

    /// Canonical storage address for a relation slot; sign_out receives the
    /// tie sign to apply to gradients routed there.
    ParamRef rel_ref(int r, RelSlot slot, double& sign_out) const;

    std::span<double> storage(ParamRef ref);
    std::span<const double> storage(ParamRef ref) const;

    int check_entity(int e) const;
    int check_relation(int r) const;
};

/// <a, b, c> = sum_j a[j] * b[j] * c[j].
double trilinear(std::span<const double> a, std::span<const double> b, std::span<const double> c);

/// Forward canonical-polyadic score <h_head, v_r, t_tail>.
double score_cp(const ModelParams& params, const Triple& t);

/// Average of the forward and inverse CP scores:
/// (1/2) (<h_head, v_r, t_tail> + <h_tail, v_r_inv, t_head>).
double score_simple(const ModelParams& params, const Triple& t);

/// Test-time score of the ignore-inverse variant: the forward term only.
double score_simple_ignr(const ModelParams& params, const Triple& t);

/// <v_head, v_r, v_tail> with one vector per entity. Requires DistMult storage.
double score_distmult(const ModelParams& params, const Triple& t);

/// Expanded real part of the complex product:
/// <re_h,re_r,re_t> + <re_h,im_r,im_t> + <im_h,re_r,im_t> - <im_h,im_r,re_t>.
double score_complex(const ModelParams& params, const Triple& t);

/// Dispatch on params.kind (SimplE-ignr scores with the forward term only).
double score(const ModelParams& params, const Triple& t);

/// The relation matrix M_r of the bilinear view v_h^T M_r v_t.
/// SimplE: 2d x 2d with v_r on the upper-right diagonal block and v_r_inv on
/// the lower-left. CP: upper-right block only. DistMult: d x d diag(v_r).
/// ComplEx: both diagonal blocks carry re_r, off-diagonal blocks +/- im_r.
Matrix build_bilinear_matrix(const ModelParams& params, int relation, ModelKind kind);

/// v_head^T M v_tail. Entity vectors are [h_e; t_e] for SimplE/CP,
/// [re_e; im_e] for ComplEx, and the single d-vector for DistMult.
double bilinear_score(const Matrix& m, std::span<const double> v_head,
                      std::span<const double> v_tail);

}  // namespace kge
