#pragma once

// Exact prior-mass-reduction and diameter functionals over an explicit
// version space.

#include <vector>

#include "vsal/core.hpp"

namespace vsal {

// Shared setting of every measure: hypotheses, prior, current version space
// and the evaluation distribution. Holds references; the caller keeps the
// matrix, prior and distribution alive.
struct MeasureContext {
    MeasureContext(const LabelingMatrix& labelings, const Prior& prior, VersionSpaceMask mask,
                   const ItemDistribution& dist);

    // Same context with a different mask.
    MeasureContext with_mask(VersionSpaceMask other) const;

    const LabelingMatrix& labelings;
    const Prior& prior;
    VersionSpaceMask mask;
    const ItemDistribution& dist;
};

// pi|_V(V_x^y) for every class y.
std::vector<double> label_masses(const MeasureContext& ctx, ItemIndex x);

// 1 - sum_y p(y)^2 with p the pi|_V-predictive label distribution at x.
double gibbs_error(const MeasureContext& ctx, ItemIndex x);

// 1 - max_y pi|_V(V_x^y).
double variation_ratio(const MeasureContext& ctx, ItemIndex x);

// pi(V) * GE(x|V): expected absolute prior mass removed by querying x.
double marginal_gain_avg(const MeasureContext& ctx, ItemIndex x);

// pi(V) * VR(x|V): worst-case absolute prior mass removed by querying x.
double marginal_gain_wc(const MeasureContext& ctx, ItemIndex x);

// Expected disagreement of two independent draws from pi|_V, self-pairs
// included. Computed by direct pairwise summation.
double pwd(const MeasureContext& ctx);

// Expected disagreement between a draw from pi|_V and the majority vote over
// the support of the evaluation distribution.
double gvd(const MeasureContext& ctx);

// sum_x P(x) GE(x|V). Equal to pwd(ctx); linear in |V| instead of quadratic.
double expected_gibbs_error(const MeasureContext& ctx);

// sum_x P(x) VR(x|V). Equal to gvd(ctx) when the vote is computed from hard labels.
double expected_variation_ratio(const MeasureContext& ctx);

// E_{h ~ pi|_V}[d(h, target)] under the evaluation distribution.
double expected_distance_to(const MeasureContext& ctx, std::span<const Label> target);

} // namespace vsal
