#pragma once

// Monte Carlo estimators of the version-space measures from a finite set of
// sampled hypotheses.

#include <cstdint>
#include <string_view>
#include <vector>

#include "vsal/core.hpp"
#include "vsal/measures.hpp"

namespace vsal {

enum class Provenance { exact_sampler, external };

std::string_view provenance_name(Provenance p);

// Hypothesis rows drawn iid (with replacement) from pi|_V, or imported from an
// external trainer.
struct Ensemble {
    std::vector<HypothesisIndex> members;
    Provenance provenance = Provenance::exact_sampler;

    std::size_t size() const noexcept { return members.size(); }
};

// `size` iid draws from the prior renormalized to the mask; deterministic in `seed`.
Ensemble draw_ensemble(const MeasureContext& ctx, std::size_t size, std::uint64_t seed);

// U-statistic over ordered pairs of distinct draws:
// 1 / (M (M - 1)) * sum_{i != j} d(h_i, h_j). Requires at least two draws.
double pwd_hat(const Ensemble& ens, const LabelingMatrix& labelings, const ItemDistribution& dist);

// Mean distance from each draw to the empirical vote (duplicates weighted by
// multiplicity, ties to the smallest class).
double gvd_hat(const Ensemble& ens, const LabelingMatrix& labelings, const ItemDistribution& dist);

// Empirical predictive distribution at x: averaged class probabilities when
// the matrix carries them, label frequencies otherwise.
std::vector<double> ensemble_label_distribution(const Ensemble& ens, const LabelingMatrix& labelings,
                                                ItemIndex x);

double ge_hat(const Ensemble& ens, const LabelingMatrix& labelings, ItemIndex x);
double vr_hat(const Ensemble& ens, const LabelingMatrix& labelings, ItemIndex x);

// The empirical vote over `items`.
std::vector<Label> ensemble_vote(const Ensemble& ens, const LabelingMatrix& labelings,
                                 std::span<const ItemIndex> items);

// Externally trained hypotheses restricted to the pool. Rows contradicting
// the query set are rejected and reported; they indicate a biased sampler.
struct ExternalImport {
    Ensemble ensemble;
    std::vector<HypothesisIndex> rejected;
};

ExternalImport import_external_ensemble(const LabelingMatrix& external, const QuerySet& q);

} // namespace vsal
