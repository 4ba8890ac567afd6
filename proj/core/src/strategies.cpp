#include "vsal/strategies.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "vsal/error.hpp"
#include "vsal/random.hpp"

namespace vsal {

namespace {

struct NamedKind {
    StrategyKind kind;
    std::string_view name;
};

constexpr std::array<NamedKind, 8> kNames{{
    {StrategyKind::random, "random"},
    {StrategyKind::max_gibbs_error, "ge"},
    {StrategyKind::max_variation_ratio, "vr"},
    {StrategyKind::min_wc_pwd, "pwd"},
    {StrategyKind::min_wc_gvd, "gvd"},
    {StrategyKind::min_wc_m2_pwd, "m2-pwd"},
    {StrategyKind::min_wc_m1_pwd, "m1-pwd"},
    {StrategyKind::min_wc_m1_gvd, "m1-gvd"},
}};

bool uses_pwd(StrategyKind kind) {
    return kind == StrategyKind::min_wc_pwd || kind == StrategyKind::min_wc_m2_pwd ||
           kind == StrategyKind::min_wc_m1_pwd;
}

// Exponent on the subspace mass: 0 plain, 1 singly, 2 doubly weighted.
int mass_exponent(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::min_wc_m2_pwd: return 2;
    case StrategyKind::min_wc_m1_pwd:
    case StrategyKind::min_wc_m1_gvd: return 1;
    default: return 0;
    }
}

double weighted(double mass, int exponent, double diameter) {
    switch (exponent) {
    case 0: return diameter;
    case 1: return mass * diameter;
    default: return mass * mass * diameter;
    }
}

// True when score a beats score b under the rule's direction.
bool better(StrategyKind kind, double a, double b) {
    return is_diameter_rule(kind) ? a < b : a > b;
}

std::vector<CandidateScore> score_all(const StrategySpec& spec, const MeasureContext& ctx,
                                      std::span<const ItemIndex> candidates) {
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    for (auto x : candidates) out.push_back(score_candidate(spec, ctx, x));
    return out;
}

std::vector<CandidateScore> score_all(const StrategySpec& spec, const Ensemble& ens,
                                      const LabelingMatrix& labelings, const ItemDistribution& dist,
                                      std::span<const ItemIndex> candidates) {
    std::vector<CandidateScore> out;
    out.reserve(candidates.size());
    for (auto x : candidates) out.push_back(score_candidate(spec, ens, labelings, dist, x));
    return out;
}

// Scores ordered best first; stable on ascending item index.
std::vector<CandidateScore> ranked(StrategyKind kind, std::vector<CandidateScore> scores) {
    std::sort(scores.begin(), scores.end(), [](const CandidateScore& a, const CandidateScore& b) {
        return a.item < b.item;
    });
    std::stable_sort(scores.begin(), scores.end(), [kind](const CandidateScore& a, const CandidateScore& b) {
        return better(kind, a.score, b.score);
    });
    return scores;
}

std::vector<ItemIndex> sorted_candidates(std::span<const ItemIndex> candidates) {
    std::vector<ItemIndex> out(candidates.begin(), candidates.end());
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw InvalidArgument("candidate list contains duplicates");
    }
    return out;
}

// Picks from an already-scored table, best first, keeping per-pick audit tables.
BatchSelection take_ranked(StrategyKind kind, std::vector<CandidateScore> scores, std::size_t k) {
    auto order = ranked(kind, std::move(scores));
    BatchSelection out;
    out.picks.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        Selection sel;
        sel.chosen = order[i].item;
        sel.scores.assign(order.begin() + static_cast<std::ptrdiff_t>(i), order.end());
        std::sort(sel.scores.begin(), sel.scores.end(),
                  [](const CandidateScore& a, const CandidateScore& b) { return a.item < b.item; });
        out.picks.push_back(std::move(sel));
    }
    return out;
}

std::vector<ItemIndex> argmax_set(std::span<const ItemIndex> items, std::span<const double> values) {
    std::vector<ItemIndex> out;
    if (values.empty()) return out;
    const double best = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == best) out.push_back(items[i]);
    }
    return out;
}

} // namespace

std::string_view strategy_name(StrategyKind kind) {
    for (const auto& n : kNames) {
        if (n.kind == kind) return n.name;
    }
    return "unknown";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) {
    for (const auto& n : kNames) {
        if (n.name == name) return n.kind;
    }
    return std::nullopt;
}

bool is_diameter_rule(StrategyKind kind) {
    return kind != StrategyKind::random && kind != StrategyKind::max_gibbs_error &&
           kind != StrategyKind::max_variation_ratio;
}

void StrategySpec::validate() const {
    if (kind == StrategyKind::random) return;
    if (backend.kind == Backend::Kind::ensemble) {
        if (backend.ensemble_size < 1) throw InvalidArgument("ensemble size must be at least 1");
        if (uses_pwd(kind) && backend.ensemble_size < 2) {
            throw InvalidArgument("pairwise-disagreement rules need an ensemble of at least 2");
        }
        if (refresh_mask) throw InvalidArgument("refresh_mask requires the exact backend");
    }
}

std::string StrategySpec::label() const {
    std::string out(strategy_name(kind));
    if (kind != StrategyKind::random && backend.kind == Backend::Kind::ensemble) {
        out += fmt::format("/ens{}", backend.ensemble_size);
    }
    if (refresh_mask) out += "+refresh";
    return out;
}

CandidateScore score_candidate(const StrategySpec& spec, const MeasureContext& ctx, ItemIndex x) {
    switch (spec.kind) {
    case StrategyKind::random: return {x, 0.0, std::nullopt};
    case StrategyKind::max_gibbs_error: return {x, gibbs_error(ctx, x), std::nullopt};
    case StrategyKind::max_variation_ratio: return {x, variation_ratio(ctx, x), std::nullopt};
    default: break;
    }

    if (x >= ctx.labelings.num_items()) throw InvalidArgument("item index out of range");
    if (ctx.mask.empty()) throw EmptyVersionSpace("cannot score against an empty version space");

    // Absolute prior mass pi(V_x^y) per label.
    std::vector<double> mass(static_cast<std::size_t>(ctx.labelings.num_classes()), 0.0);
    for (HypothesisIndex h = 0; h < ctx.mask.size(); ++h) {
        if (ctx.mask.contains(h)) mass[static_cast<std::size_t>(ctx.labelings.label(h, x))] += ctx.prior[h];
    }

    const int exponent = mass_exponent(spec.kind);
    std::optional<Label> worst;
    double worst_value = 0.0;
    for (Label y = 0; y < ctx.labelings.num_classes(); ++y) {
        const double m = mass[static_cast<std::size_t>(y)];
        if (!(m > 0.0)) continue;
        const auto sub = ctx.with_mask(restrict(ctx.mask, ctx.labelings, x, y));
        const double diameter = uses_pwd(spec.kind) ? expected_gibbs_error(sub) : gvd(sub);
        const double value = weighted(m, exponent, diameter);
        if (!worst || value > worst_value) {
            worst = y;
            worst_value = value;
        }
    }
    if (!worst) throw EmptyVersionSpace("no label at the candidate is achievable");
    return {x, worst_value, worst};
}

double score(const StrategySpec& spec, const MeasureContext& ctx, ItemIndex x) {
    return score_candidate(spec, ctx, x).score;
}

CandidateScore score_candidate(const StrategySpec& spec, const Ensemble& ens,
                               const LabelingMatrix& labelings, const ItemDistribution& dist,
                               ItemIndex x) {
    if (ens.size() == 0) throw InvalidArgument("cannot score against an empty ensemble");
    switch (spec.kind) {
    case StrategyKind::random: return {x, 0.0, std::nullopt};
    case StrategyKind::max_gibbs_error: return {x, ge_hat(ens, labelings, x), std::nullopt};
    case StrategyKind::max_variation_ratio: return {x, vr_hat(ens, labelings, x), std::nullopt};
    default: break;
    }

    std::vector<Ensemble> parts(static_cast<std::size_t>(labelings.num_classes()));
    for (auto h : ens.members) {
        auto& part = parts[static_cast<std::size_t>(labelings.label(h, x))];
        part.provenance = ens.provenance;
        part.members.push_back(h);
    }

    const int exponent = mass_exponent(spec.kind);
    const double total = static_cast<double>(ens.size());
    std::optional<Label> worst;
    double worst_value = 0.0;
    for (Label y = 0; y < labelings.num_classes(); ++y) {
        const auto& part = parts[static_cast<std::size_t>(y)];
        if (part.size() == 0) continue;
        double diameter = 0.0;
        if (part.size() >= 2) {
            diameter = uses_pwd(spec.kind) ? pwd_hat(part, labelings, dist) : gvd_hat(part, labelings, dist);
        }
        const double value = weighted(static_cast<double>(part.size()) / total, exponent, diameter);
        if (!worst || value > worst_value) {
            worst = y;
            worst_value = value;
        }
    }
    return {x, worst_value, worst};
}

double score(const StrategySpec& spec, const Ensemble& ens, const LabelingMatrix& labelings,
             const ItemDistribution& dist, ItemIndex x) {
    return score_candidate(spec, ens, labelings, dist, x).score;
}

BatchSelection select_batch(const StrategySpec& spec, const SelectionState& state, std::size_t k,
                            std::uint64_t seed, const Ensemble* ensemble) {
    spec.validate();
    auto candidates = sorted_candidates(state.candidates);
    if (candidates.size() < k) {
        throw InvalidArgument(fmt::format("batch of {} requested but only {} candidates remain",
                                          k, candidates.size()));
    }
    if (state.mask.empty()) throw EmptyVersionSpace("cannot select against an empty version space");
    for (auto x : candidates) {
        if (x >= state.labelings.num_items()) throw InvalidArgument("candidate item out of range");
    }
    if (k == 0) return {};

    if (spec.kind == StrategyKind::random) {
        Rng rng(seed);
        BatchSelection out;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + rng.below(candidates.size() - i);
            std::swap(candidates[i], candidates[j]);
            out.picks.push_back({candidates[i], {}});
        }
        return out;
    }

    MeasureContext ctx(state.labelings, state.prior, state.mask, state.eval);

    if (spec.backend.kind == Backend::Kind::ensemble) {
        Ensemble ens = ensemble ? *ensemble : draw_ensemble(ctx, spec.backend.ensemble_size, seed);
        auto out = take_ranked(spec.kind, score_all(spec, ens, state.labelings, state.eval, candidates), k);
        out.ensemble = std::move(ens);
        return out;
    }

    if (!spec.refresh_mask) {
        return take_ranked(spec.kind, score_all(spec, ctx, candidates), k);
    }

    if (!state.label_oracle) throw InvalidArgument("refresh_mask selection needs a label oracle");
    BatchSelection out;
    VersionSpaceMask mask = state.mask;
    for (std::size_t i = 0; i < k; ++i) {
        const auto current = ctx.with_mask(mask);
        auto batch = take_ranked(spec.kind, score_all(spec, current, candidates), 1);
        const ItemIndex chosen = batch.picks.front().chosen;
        out.picks.push_back(std::move(batch.picks.front()));
        candidates.erase(std::find(candidates.begin(), candidates.end(), chosen));
        mask = restrict(mask, state.labelings, chosen, state.label_oracle(chosen));
        if (mask.empty() && i + 1 < k) {
            throw EmptyVersionSpace(fmt::format("version space emptied after labeling item {}", chosen));
        }
    }
    return out;
}

EquivalenceAudit equivalence_audit(const MeasureContext& ctx, std::span<const ItemIndex> candidates) {
    std::vector<double> ge, gain_avg, vr, gain_wc;
    for (auto x : candidates) {
        ge.push_back(gibbs_error(ctx, x));
        gain_avg.push_back(marginal_gain_avg(ctx, x));
        vr.push_back(variation_ratio(ctx, x));
        gain_wc.push_back(marginal_gain_wc(ctx, x));
    }
    EquivalenceAudit audit;
    audit.argmax_gibbs_error = argmax_set(candidates, ge);
    audit.argmax_gain_avg = argmax_set(candidates, gain_avg);
    audit.argmax_variation_ratio = argmax_set(candidates, vr);
    audit.argmax_gain_wc = argmax_set(candidates, gain_wc);
    audit.pass = audit.argmax_gibbs_error == audit.argmax_gain_avg &&
                 audit.argmax_variation_ratio == audit.argmax_gain_wc;
    return audit;
}

} // namespace vsal
