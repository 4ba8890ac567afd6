#include "vsal/estimators.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "vsal/error.hpp"
#include "vsal/random.hpp"

namespace vsal {

std::string_view provenance_name(Provenance p) {
    return p == Provenance::external ? "external" : "exact-sampler";
}

Ensemble draw_ensemble(const MeasureContext& ctx, std::size_t size, std::uint64_t seed) {
    if (size == 0) throw InvalidArgument("ensemble size must be at least 1");
    const auto members = conditional_prior(ctx.prior, ctx.mask);

    std::vector<double> cumulative;
    cumulative.reserve(members.size());
    double running = 0.0;
    for (const auto& m : members) {
        running += m.weight;
        cumulative.push_back(running);
    }

    Rng rng(seed);
    Ensemble ens;
    ens.members.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double u = rng.uniform01() * running;
        // First cumulative weight strictly above u; zero-weight members are never hit.
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        auto pos = static_cast<std::size_t>(it - cumulative.begin());
        while (members[pos].weight <= 0.0 && pos > 0) --pos;
        ens.members.push_back(members[pos].index);
    }
    return ens;
}

double pwd_hat(const Ensemble& ens, const LabelingMatrix& labelings, const ItemDistribution& dist) {
    const std::size_t m = ens.size();
    if (m < 2) throw InvalidArgument("pairwise disagreement estimate needs at least two draws");
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            total += disagreement(labelings.row(ens.members[i]), labelings.row(ens.members[j]), dist);
        }
    }
    return 2.0 * total / (static_cast<double>(m) * static_cast<double>(m - 1));
}

namespace {

std::vector<WeightedHypothesis> uniform_members(const Ensemble& ens) {
    const double w = 1.0 / static_cast<double>(ens.size());
    std::vector<WeightedHypothesis> out;
    out.reserve(ens.size());
    for (auto h : ens.members) out.push_back({h, w});
    return out;
}

} // namespace

std::vector<Label> ensemble_vote(const Ensemble& ens, const LabelingMatrix& labelings,
                                 std::span<const ItemIndex> items) {
    if (ens.size() == 0) throw InvalidArgument("vote of an empty ensemble");
    const auto members = uniform_members(ens);
    std::vector<Label> out;
    out.reserve(items.size());
    for (auto x : items) out.push_back(vote_label(labelings, members, x));
    return out;
}

double gvd_hat(const Ensemble& ens, const LabelingMatrix& labelings, const ItemDistribution& dist) {
    if (ens.size() == 0) throw InvalidArgument("Gibbs-vote estimate of an empty ensemble");
    const auto members = uniform_members(ens);
    std::vector<Label> vote(labelings.num_items(), 0);
    for (const auto& e : dist.entries()) vote[e.item] = vote_label(labelings, members, e.item);
    double total = 0.0;
    for (auto h : ens.members) total += disagreement(labelings.row(h), vote, dist);
    return total / static_cast<double>(ens.size());
}

std::vector<double> ensemble_label_distribution(const Ensemble& ens, const LabelingMatrix& labelings,
                                                ItemIndex x) {
    if (ens.size() == 0) throw InvalidArgument("label distribution of an empty ensemble");
    if (x >= labelings.num_items()) throw InvalidArgument("item index out of range");
    const Label classes = labelings.num_classes();
    std::vector<double> p(static_cast<std::size_t>(classes), 0.0);
    for (auto h : ens.members) {
        if (labelings.has_soft_probs()) {
            for (Label y = 0; y < classes; ++y) p[static_cast<std::size_t>(y)] += labelings.prob(h, x, y);
        } else {
            p[static_cast<std::size_t>(labelings.label(h, x))] += 1.0;
        }
    }
    for (auto& v : p) v /= static_cast<double>(ens.size());
    return p;
}

double ge_hat(const Ensemble& ens, const LabelingMatrix& labelings, ItemIndex x) {
    double sum_sq = 0.0;
    for (double p : ensemble_label_distribution(ens, labelings, x)) sum_sq += p * p;
    return std::max(0.0, 1.0 - sum_sq);
}

double vr_hat(const Ensemble& ens, const LabelingMatrix& labelings, ItemIndex x) {
    const auto p = ensemble_label_distribution(ens, labelings, x);
    return std::max(0.0, 1.0 - *std::max_element(p.begin(), p.end()));
}

ExternalImport import_external_ensemble(const LabelingMatrix& external, const QuerySet& q) {
    q.validate(external);
    const auto consistent = consistent_mask(external, q);
    ExternalImport out;
    out.ensemble.provenance = Provenance::external;
    for (HypothesisIndex h = 0; h < external.num_hypotheses(); ++h) {
        (consistent.contains(h) ? out.ensemble.members : out.rejected).push_back(h);
    }
    return out;
}

} // namespace vsal
