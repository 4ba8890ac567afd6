#pragma once

// Explicit finite hypothesis spaces: labeling matrices, query sets, version
// space masks, priors, item distributions, and the disagreement pseudo-metric.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vsal {

using Label = std::int32_t;
using ItemIndex = std::size_t;
using HypothesisIndex = std::size_t;

// M hypotheses x N pool items, each entry a class label in [0, C). Optionally
// carries per-entry class probabilities whose argmax equals the hard label.
class LabelingMatrix {
public:
    LabelingMatrix(std::size_t num_hypotheses, std::size_t num_items, Label num_classes,
                   std::vector<Label> labels,
                   std::optional<std::vector<double>> soft_probs = std::nullopt);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t num_items() const noexcept { return num_items_; }
    Label num_classes() const noexcept { return num_classes_; }

    Label label(HypothesisIndex h, ItemIndex x) const noexcept {
        return labels_[h * num_items_ + x];
    }
    std::span<const Label> row(HypothesisIndex h) const noexcept {
        return {labels_.data() + h * num_items_, num_items_};
    }

    bool has_soft_probs() const noexcept { return soft_probs_.has_value(); }

    // p(y | x; h): the stored probability, or one-hot of the hard label.
    double prob(HypothesisIndex h, ItemIndex x, Label y) const noexcept;

    const std::vector<Label>& labels() const noexcept { return labels_; }
    const std::optional<std::vector<double>>& soft_probs() const noexcept { return soft_probs_; }

private:
    std::size_t num_hypotheses_;
    std::size_t num_items_;
    Label num_classes_;
    std::vector<Label> labels_;
    std::optional<std::vector<double>> soft_probs_;
};

struct QueryEntry {
    ItemIndex item;
    Label label;

    friend bool operator==(const QueryEntry&, const QueryEntry&) = default;
};

// Ordered query history; item indices are unique.
class QuerySet {
public:
    QuerySet() = default;

    // Throws InvalidQuery when `item` was already queried.
    void add(ItemIndex item, Label label);

    bool contains(ItemIndex item) const noexcept;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<QueryEntry>& entries() const noexcept { return entries_; }

    // Throws InvalidQuery when an item or label is out of range for `labelings`.
    void validate(const LabelingMatrix& labelings) const;

private:
    std::vector<QueryEntry> entries_;
};

// Indicator over hypotheses consistent with a query set.
class VersionSpaceMask {
public:
    VersionSpaceMask() = default;
    explicit VersionSpaceMask(std::vector<std::uint8_t> bits);

    static VersionSpaceMask full(std::size_t num_hypotheses);
    static VersionSpaceMask none(std::size_t num_hypotheses);
    static VersionSpaceMask of(std::size_t num_hypotheses, std::span<const HypothesisIndex> members);

    std::size_t size() const noexcept { return bits_.size(); }
    std::size_t count() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    bool contains(HypothesisIndex h) const noexcept { return bits_[h] != 0; }

    std::vector<HypothesisIndex> members() const;
    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    friend bool operator==(const VersionSpaceMask& a, const VersionSpaceMask& b) {
        return a.bits_ == b.bits_;
    }

private:
    std::vector<std::uint8_t> bits_;
    std::size_t count_ = 0;
};

// Nonnegative weights over hypotheses summing to one.
class Prior {
public:
    // Takes already-normalized weights; throws when the sum is off by more than 1e-12.
    explicit Prior(std::vector<double> weights);

    static Prior uniform(std::size_t num_hypotheses);
    // Normalizes arbitrary nonnegative weights with a positive sum.
    static Prior from_weights(std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](HypothesisIndex h) const noexcept { return weights_[h]; }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    std::vector<double> weights_;
};

struct ItemWeight {
    ItemIndex item;
    double weight;
};

// Weighted evaluation item set standing in for the marginal P_X. It is the
// domain of the disagreement pseudo-metric and of agreement regions.
class ItemDistribution {
public:
    // Entries must be normalized (sum within 1e-12) with unique items.
    explicit ItemDistribution(std::vector<ItemWeight> entries);

    static ItemDistribution uniform(std::span<const ItemIndex> items);
    static ItemDistribution uniform_over(std::size_t num_items);
    static ItemDistribution from_weights(std::vector<ItemWeight> entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<ItemWeight>& entries() const noexcept { return entries_; }
    std::vector<ItemIndex> items() const;

    // Throws InvalidArgument if any item is >= num_items.
    void validate(std::size_t num_items) const;

private:
    std::vector<ItemWeight> entries_;
};

// Ground-truth labeling h* over the pool items.
class BayesLabeling {
public:
    explicit BayesLabeling(std::vector<Label> labels) : labels_(std::move(labels)) {}

    static BayesLabeling from_row(const LabelingMatrix& labelings, HypothesisIndex h);

    std::size_t size() const noexcept { return labels_.size(); }
    Label operator[](ItemIndex x) const noexcept { return labels_[x]; }
    std::span<const Label> labels() const noexcept { return labels_; }

    void validate(const LabelingMatrix& labelings) const;

private:
    std::vector<Label> labels_;
};

// A hypothesis with its weight under the conditional prior pi|_V.
struct WeightedHypothesis {
    HypothesisIndex index;
    double weight;
};

struct Regions {
    std::vector<ItemIndex> agreement;
    std::vector<ItemIndex> disagreement;
};

// Hypotheses matching every (x, y) in `q`. An empty query keeps everything;
// an unrealizable query yields an empty mask.
VersionSpaceMask consistent_mask(const LabelingMatrix& labelings, const QuerySet& q);

// V_x^y: the members of `mask` that label x as y.
VersionSpaceMask restrict(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                          ItemIndex x, Label y);

// pi(V). The prior mass reduction utility of the query set is 1 - prior_mass.
double prior_mass(const Prior& prior, const VersionSpaceMask& mask);

// pi|_V as (index, weight) pairs over the mask members. Throws
// EmptyVersionSpace on an empty mask or zero mass.
std::vector<WeightedHypothesis> conditional_prior(const Prior& prior, const VersionSpaceMask& mask);

// Probability under `dist` that two labelings differ.
double disagreement(std::span<const Label> a, std::span<const Label> b, const ItemDistribution& dist);
double disagreement(const LabelingMatrix& labelings, HypothesisIndex h, HypothesisIndex h2,
                    const ItemDistribution& dist);

// Agreement and disagreement regions of the version space within `items`.
Regions regions(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                std::span<const ItemIndex> items);

// Label maximizing the weighted average of p(y | x; h); ties go to the smallest class.
Label vote_label(const LabelingMatrix& labelings, std::span<const WeightedHypothesis> members,
                 ItemIndex x);

// Majority vote of pi|_V over `items`, one label per item in order.
std::vector<Label> majority_vote(const VersionSpaceMask& mask, const Prior& prior,
                                 const LabelingMatrix& labelings, std::span<const ItemIndex> items);

// Mass of AGR(V) (within the support of `dist`) on which the common in-mask
// prediction contradicts `bayes`; the distance from h* to its projection onto
// the hypotheses that agree with V on AGR(V).
double wrong_agreement(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                       const BayesLabeling& bayes, const ItemDistribution& dist);

} // namespace vsal
