#pragma once

// Query-selection rules and the greedy batch loop of worst-case diameter
// reduction.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsal/core.hpp"
#include "vsal/estimators.hpp"
#include "vsal/measures.hpp"

namespace vsal {

enum class StrategyKind {
    random,
    max_gibbs_error,
    max_variation_ratio,
    min_wc_pwd,
    min_wc_gvd,
    min_wc_m2_pwd,
    min_wc_m1_pwd,
    min_wc_m1_gvd,
};

// CLI names: random, ge, vr, pwd, gvd, m2-pwd, m1-pwd, m1-gvd.
std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view name);

// Diameter-family rules minimize the worst-case (weighted) diameter; the
// mass family maximizes GE or VR.
bool is_diameter_rule(StrategyKind kind);

struct Backend {
    enum class Kind { exact, ensemble };
    Kind kind = Kind::exact;
    std::size_t ensemble_size = 0;

    static Backend exact() { return {}; }
    static Backend ensemble(std::size_t size) { return {Kind::ensemble, size}; }
};

struct StrategySpec {
    StrategyKind kind = StrategyKind::random;
    Backend backend;
    // Re-restrict the exact mask after each in-batch label instead of scoring
    // the whole batch against one version space.
    bool refresh_mask = false;

    // Throws InvalidArgument on an inconsistent combination.
    void validate() const;
    std::string label() const;
};

struct CandidateScore {
    ItemIndex item;
    double score;
    // Label attaining the worst case (diameter family only).
    std::optional<Label> worst_label;
};

struct Selection {
    ItemIndex chosen;
    std::vector<CandidateScore> scores;
};

// Exact-backend score of candidate x.
CandidateScore score_candidate(const StrategySpec& spec, const MeasureContext& ctx, ItemIndex x);
double score(const StrategySpec& spec, const MeasureContext& ctx, ItemIndex x);

// Ensemble-backend score: the ensemble is partitioned by predicted label at x
// and each part's diameter estimated; parts with fewer than two draws count as 0.
CandidateScore score_candidate(const StrategySpec& spec, const Ensemble& ens,
                               const LabelingMatrix& labelings, const ItemDistribution& dist,
                               ItemIndex x);
double score(const StrategySpec& spec, const Ensemble& ens, const LabelingMatrix& labelings,
             const ItemDistribution& dist, ItemIndex x);

// Everything a batch selection reads.
struct SelectionState {
    const LabelingMatrix& labelings;
    const Prior& prior;
    VersionSpaceMask mask;
    const ItemDistribution& eval;
    // Unlabeled pool items eligible for querying.
    std::vector<ItemIndex> candidates;
    // Labels queried items during refresh-mode batches.
    std::function<Label(ItemIndex)> label_oracle;
};

struct BatchSelection {
    std::vector<Selection> picks;
    // The ensemble the batch was scored against (ensemble backend only).
    std::optional<Ensemble> ensemble;
};

// Picks k items. One ensemble (or the exact mask) is used for the whole batch
// unless refresh_mask is set. Ties go to the smallest item index. When
// `ensemble` is null and the backend needs one, it is drawn from `seed`.
BatchSelection select_batch(const StrategySpec& spec, const SelectionState& state, std::size_t k,
                            std::uint64_t seed, const Ensemble* ensemble = nullptr);

struct EquivalenceAudit {
    bool pass = false;
    std::vector<ItemIndex> argmax_gibbs_error;
    std::vector<ItemIndex> argmax_gain_avg;
    std::vector<ItemIndex> argmax_variation_ratio;
    std::vector<ItemIndex> argmax_gain_wc;
};

// Checks argmax GE == argmax pi(V) GE and argmax VR == argmax pi(V) VR as
// index sets over the candidates (before tie-breaking).
EquivalenceAudit equivalence_audit(const MeasureContext& ctx, std::span<const ItemIndex> candidates);

} // namespace vsal
