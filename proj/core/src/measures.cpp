#include "vsal/measures.hpp"

#include <algorithm>

#include "vsal/error.hpp"

namespace vsal {

namespace {

// A single occupied class means no spread at all; skipping the arithmetic
// keeps the result exactly 0 instead of a rounding residue.
bool unanimous(const std::vector<double>& mass) {
    return std::count_if(mass.begin(), mass.end(), [](double m) { return m > 0.0; }) <= 1;
}

} // namespace

MeasureContext::MeasureContext(const LabelingMatrix& labelings_, const Prior& prior_,
                               VersionSpaceMask mask_, const ItemDistribution& dist_)
    : labelings(labelings_), prior(prior_), mask(std::move(mask_)), dist(dist_) {
    if (prior.size() != labelings.num_hypotheses()) {
        throw InvalidArgument("prior size does not match the number of hypotheses");
    }
    if (mask.size() != labelings.num_hypotheses()) {
        throw InvalidArgument("mask size does not match the number of hypotheses");
    }
    dist.validate(labelings.num_items());
}

MeasureContext MeasureContext::with_mask(VersionSpaceMask other) const {
    return MeasureContext(labelings, prior, std::move(other), dist);
}

std::vector<double> label_masses(const MeasureContext& ctx, ItemIndex x) {
    if (x >= ctx.labelings.num_items()) throw InvalidArgument("item index out of range");
    if (ctx.mask.empty()) throw EmptyVersionSpace("label masses of an empty version space");
    std::vector<double> mass(static_cast<std::size_t>(ctx.labelings.num_classes()), 0.0);
    double total = 0.0;
    for (HypothesisIndex h = 0; h < ctx.mask.size(); ++h) {
        if (!ctx.mask.contains(h)) continue;
        mass[static_cast<std::size_t>(ctx.labelings.label(h, x))] += ctx.prior[h];
        total += ctx.prior[h];
    }
    if (!(total > 0.0)) throw EmptyVersionSpace("version space has zero prior mass");
    for (auto& m : mass) m /= total;
    return mass;
}

double gibbs_error(const MeasureContext& ctx, ItemIndex x) {
    // Summed in sorted order so relabeling the classes cannot change the result.
    auto masses = label_masses(ctx, x);
    if (unanimous(masses)) return 0.0;
    std::sort(masses.begin(), masses.end());
    double sum_sq = 0.0;
    for (double p : masses) sum_sq += p * p;
    return std::max(0.0, 1.0 - sum_sq);
}

double variation_ratio(const MeasureContext& ctx, ItemIndex x) {
    const auto masses = label_masses(ctx, x);
    if (unanimous(masses)) return 0.0;
    return 1.0 - *std::max_element(masses.begin(), masses.end());
}

double marginal_gain_avg(const MeasureContext& ctx, ItemIndex x) {
    return prior_mass(ctx.prior, ctx.mask) * gibbs_error(ctx, x);
}

double marginal_gain_wc(const MeasureContext& ctx, ItemIndex x) {
    return prior_mass(ctx.prior, ctx.mask) * variation_ratio(ctx, x);
}

double pwd(const MeasureContext& ctx) {
    const auto members = conditional_prior(ctx.prior, ctx.mask);
    double total = 0.0;
    // d is symmetric with zero diagonal: sum over i < j and double.
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto row_i = ctx.labelings.row(members[i].index);
        double inner = 0.0;
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            inner += members[j].weight * disagreement(row_i, ctx.labelings.row(members[j].index), ctx.dist);
        }
        total += members[i].weight * inner;
    }
    return 2.0 * total;
}

double gvd(const MeasureContext& ctx) {
    const auto members = conditional_prior(ctx.prior, ctx.mask);
    std::vector<Label> vote(ctx.labelings.num_items(), 0);
    for (const auto& e : ctx.dist.entries()) {
        vote[e.item] = vote_label(ctx.labelings, members, e.item);
    }
    double total = 0.0;
    for (const auto& m : members) {
        total += m.weight * disagreement(ctx.labelings.row(m.index), vote, ctx.dist);
    }
    return total;
}

double expected_gibbs_error(const MeasureContext& ctx) {
    const auto members = conditional_prior(ctx.prior, ctx.mask);
    std::vector<double> mass(static_cast<std::size_t>(ctx.labelings.num_classes()));
    double total = 0.0;
    for (const auto& e : ctx.dist.entries()) {
        std::fill(mass.begin(), mass.end(), 0.0);
        for (const auto& m : members) {
            mass[static_cast<std::size_t>(ctx.labelings.label(m.index, e.item))] += m.weight;
        }
        if (unanimous(mass)) continue;
        double sum_sq = 0.0;
        for (double p : mass) sum_sq += p * p;
        total += e.weight * std::max(0.0, 1.0 - sum_sq);
    }
    return total;
}

double expected_variation_ratio(const MeasureContext& ctx) {
    const auto members = conditional_prior(ctx.prior, ctx.mask);
    std::vector<double> mass(static_cast<std::size_t>(ctx.labelings.num_classes()));
    double total = 0.0;
    for (const auto& e : ctx.dist.entries()) {
        std::fill(mass.begin(), mass.end(), 0.0);
        for (const auto& m : members) {
            mass[static_cast<std::size_t>(ctx.labelings.label(m.index, e.item))] += m.weight;
        }
        if (unanimous(mass)) continue;
        total += e.weight * (1.0 - *std::max_element(mass.begin(), mass.end()));
    }
    return total;
}

double expected_distance_to(const MeasureContext& ctx, std::span<const Label> target) {
    const auto members = conditional_prior(ctx.prior, ctx.mask);
    double total = 0.0;
    for (const auto& m : members) {
        total += m.weight * disagreement(ctx.labelings.row(m.index), target, ctx.dist);
    }
    return total;
}

} // namespace vsal
