#include "vsal/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "vsal/error.hpp"

namespace vsal {

namespace {

constexpr double kPriorSumTolerance = 1e-12;
constexpr double kSoftSumTolerance = 1e-9;

double checked_sum(std::span<const double> weights, const char* what) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw InvalidArgument(fmt::format("{} weights must be finite and nonnegative", what));
        }
        sum += w;
    }
    return sum;
}

} // namespace

// ---------------------------------------------------------------------------
// LabelingMatrix

LabelingMatrix::LabelingMatrix(std::size_t num_hypotheses, std::size_t num_items,
                               Label num_classes, std::vector<Label> labels,
                               std::optional<std::vector<double>> soft_probs)
    : num_hypotheses_(num_hypotheses),
      num_items_(num_items),
      num_classes_(num_classes),
      labels_(std::move(labels)),
      soft_probs_(std::move(soft_probs)) {
    if (num_hypotheses_ == 0 || num_items_ == 0) {
        throw InvalidArgument("labeling matrix needs at least one hypothesis and one item");
    }
    if (num_classes_ < 2) {
        throw InvalidArgument("labeling matrix needs at least two classes");
    }
    if (labels_.size() != num_hypotheses_ * num_items_) {
        throw InvalidArgument(fmt::format("expected {} labels, got {}",
                                          num_hypotheses_ * num_items_, labels_.size()));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= num_classes_) {
            throw InvalidArgument(fmt::format("label {} at hypothesis {}, item {} outside [0, {})",
                                              labels_[i], i / num_items_, i % num_items_,
                                              num_classes_));
        }
    }
    if (!soft_probs_) return;

    const auto classes = static_cast<std::size_t>(num_classes_);
    if (soft_probs_->size() != labels_.size() * classes) {
        throw InvalidArgument(fmt::format("expected {} probabilities, got {}",
                                          labels_.size() * classes, soft_probs_->size()));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        std::span<const double> slice(soft_probs_->data() + i * classes, classes);
        double sum = 0.0;
        std::size_t best = 0;
        for (std::size_t y = 0; y < classes; ++y) {
            if (!std::isfinite(slice[y]) || slice[y] < 0.0) {
                throw InvalidArgument(fmt::format("negative or non-finite probability at hypothesis {}, item {}",
                                                  i / num_items_, i % num_items_));
            }
            sum += slice[y];
            if (slice[y] > slice[best]) best = y;
        }
        if (std::abs(sum - 1.0) > kSoftSumTolerance) {
            throw InvalidArgument(fmt::format("probabilities at hypothesis {}, item {} sum to {}",
                                              i / num_items_, i % num_items_, sum));
        }
        if (static_cast<Label>(best) != labels_[i]) {
            throw InvalidArgument(fmt::format("probability argmax {} disagrees with label {} at hypothesis {}, item {}",
                                              best, labels_[i], i / num_items_, i % num_items_));
        }
    }
}

double LabelingMatrix::prob(HypothesisIndex h, ItemIndex x, Label y) const noexcept {
    if (soft_probs_) {
        const auto classes = static_cast<std::size_t>(num_classes_);
        return (*soft_probs_)[(h * num_items_ + x) * classes + static_cast<std::size_t>(y)];
    }
    return label(h, x) == y ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// QuerySet

void QuerySet::add(ItemIndex item, Label label) {
    if (contains(item)) {
        throw InvalidQuery(fmt::format("item {} already queried", item));
    }
    entries_.push_back({item, label});
}

bool QuerySet::contains(ItemIndex item) const noexcept {
    return std::any_of(entries_.begin(), entries_.end(),
                       [item](const QueryEntry& e) { return e.item == item; });
}

void QuerySet::validate(const LabelingMatrix& labelings) const {
    for (const auto& e : entries_) {
        if (e.item >= labelings.num_items()) {
            throw InvalidQuery(fmt::format("query item {} out of range (N = {})", e.item,
                                           labelings.num_items()));
        }
        if (e.label < 0 || e.label >= labelings.num_classes()) {
            throw InvalidQuery(fmt::format("query label {} out of range (C = {})", e.label,
                                           labelings.num_classes()));
        }
    }
}

// ---------------------------------------------------------------------------
// VersionSpaceMask

VersionSpaceMask::VersionSpaceMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) b = b != 0 ? 1 : 0;
    count_ = static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

VersionSpaceMask VersionSpaceMask::full(std::size_t num_hypotheses) {
    return VersionSpaceMask(std::vector<std::uint8_t>(num_hypotheses, 1));
}

VersionSpaceMask VersionSpaceMask::none(std::size_t num_hypotheses) {
    return VersionSpaceMask(std::vector<std::uint8_t>(num_hypotheses, 0));
}

VersionSpaceMask VersionSpaceMask::of(std::size_t num_hypotheses,
                                      std::span<const HypothesisIndex> members) {
    std::vector<std::uint8_t> bits(num_hypotheses, 0);
    for (auto h : members) {
        if (h >= num_hypotheses) {
            throw InvalidArgument(fmt::format("hypothesis {} out of range (M = {})", h, num_hypotheses));
        }
        bits[h] = 1;
    }
    return VersionSpaceMask(std::move(bits));
}

std::vector<HypothesisIndex> VersionSpaceMask::members() const {
    std::vector<HypothesisIndex> out;
    out.reserve(count_);
    for (std::size_t h = 0; h < bits_.size(); ++h) {
        if (bits_[h]) out.push_back(h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Prior

Prior::Prior(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw InvalidArgument("prior over zero hypotheses");
    const double sum = checked_sum(weights_, "prior");
    if (std::abs(sum - 1.0) > kPriorSumTolerance) {
        throw InvalidArgument(fmt::format("prior weights sum to {:.17g}, expected 1", sum));
    }
}

Prior Prior::uniform(std::size_t num_hypotheses) {
    if (num_hypotheses == 0) throw InvalidArgument("prior over zero hypotheses");
    return Prior(std::vector<double>(num_hypotheses, 1.0 / static_cast<double>(num_hypotheses)));
}

Prior Prior::from_weights(std::vector<double> weights) {
    if (weights.empty()) throw InvalidArgument("prior over zero hypotheses");
    const double sum = checked_sum(weights, "prior");
    if (!(sum > 0.0)) throw InvalidArgument("prior weights sum to zero");
    for (auto& w : weights) w /= sum;
    return Prior(std::move(weights));
}

// ---------------------------------------------------------------------------
// ItemDistribution

ItemDistribution::ItemDistribution(std::vector<ItemWeight> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidArgument("item distribution with empty support");
    double sum = 0.0;
    std::vector<ItemIndex> seen;
    seen.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            throw InvalidArgument("item weights must be finite and nonnegative");
        }
        sum += e.weight;
        seen.push_back(e.item);
    }
    if (std::abs(sum - 1.0) > kPriorSumTolerance) {
        throw InvalidArgument(fmt::format("item weights sum to {:.17g}, expected 1", sum));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
        throw InvalidArgument("item distribution lists an item twice");
    }
}

ItemDistribution ItemDistribution::uniform(std::span<const ItemIndex> items) {
    if (items.empty()) throw InvalidArgument("item distribution with empty support");
    const double w = 1.0 / static_cast<double>(items.size());
    std::vector<ItemWeight> entries;
    entries.reserve(items.size());
    for (auto x : items) entries.push_back({x, w});
    return ItemDistribution(std::move(entries));
}

ItemDistribution ItemDistribution::uniform_over(std::size_t num_items) {
    std::vector<ItemIndex> items(num_items);
    std::iota(items.begin(), items.end(), ItemIndex{0});
    return uniform(items);
}

ItemDistribution ItemDistribution::from_weights(std::vector<ItemWeight> entries) {
    double sum = 0.0;
    for (const auto& e : entries) {
        if (!std::isfinite(e.weight) || e.weight < 0.0) {
            throw InvalidArgument("item weights must be finite and nonnegative");
        }
        sum += e.weight;
    }
    if (!(sum > 0.0)) throw InvalidArgument("item weights sum to zero");
    for (auto& e : entries) e.weight /= sum;
    return ItemDistribution(std::move(entries));
}

std::vector<ItemIndex> ItemDistribution::items() const {
    std::vector<ItemIndex> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.item);
    return out;
}

void ItemDistribution::validate(std::size_t num_items) const {
    for (const auto& e : entries_) {
        if (e.item >= num_items) {
            throw InvalidArgument(fmt::format("evaluation item {} out of range (N = {})", e.item, num_items));
        }
    }
}

// ---------------------------------------------------------------------------
// BayesLabeling

BayesLabeling BayesLabeling::from_row(const LabelingMatrix& labelings, HypothesisIndex h) {
    if (h >= labelings.num_hypotheses()) {
        throw InvalidArgument(fmt::format("hypothesis {} out of range (M = {})", h, labelings.num_hypotheses()));
    }
    auto row = labelings.row(h);
    return BayesLabeling(std::vector<Label>(row.begin(), row.end()));
}

void BayesLabeling::validate(const LabelingMatrix& labelings) const {
    if (labels_.size() != labelings.num_items()) {
        throw InvalidArgument(fmt::format("Bayes labeling covers {} items, matrix has {}",
                                          labels_.size(), labelings.num_items()));
    }
    for (auto y : labels_) {
        if (y < 0 || y >= labelings.num_classes()) {
            throw InvalidArgument(fmt::format("Bayes label {} outside [0, {})", y, labelings.num_classes()));
        }
    }
}

// ---------------------------------------------------------------------------
// Operations

VersionSpaceMask consistent_mask(const LabelingMatrix& labelings, const QuerySet& q) {
    q.validate(labelings);
    std::vector<std::uint8_t> bits(labelings.num_hypotheses(), 1);
    for (HypothesisIndex h = 0; h < bits.size(); ++h) {
        for (const auto& e : q.entries()) {
            if (labelings.label(h, e.item) != e.label) {
                bits[h] = 0;
                break;
            }
        }
    }
    return VersionSpaceMask(std::move(bits));
}

VersionSpaceMask restrict(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                          ItemIndex x, Label y) {
    if (mask.size() != labelings.num_hypotheses()) {
        throw InvalidArgument("mask size does not match the labeling matrix");
    }
    if (x >= labelings.num_items()) {
        throw InvalidQuery(fmt::format("item {} out of range (N = {})", x, labelings.num_items()));
    }
    if (y < 0 || y >= labelings.num_classes()) {
        throw InvalidQuery(fmt::format("label {} out of range (C = {})", y, labelings.num_classes()));
    }
    std::vector<std::uint8_t> bits(mask.bits());
    for (HypothesisIndex h = 0; h < bits.size(); ++h) {
        if (bits[h] && labelings.label(h, x) != y) bits[h] = 0;
    }
    return VersionSpaceMask(std::move(bits));
}

double prior_mass(const Prior& prior, const VersionSpaceMask& mask) {
    if (prior.size() != mask.size()) {
        throw InvalidArgument("prior and mask sizes differ");
    }
    double mass = 0.0;
    for (HypothesisIndex h = 0; h < mask.size(); ++h) {
        if (mask.contains(h)) mass += prior[h];
    }
    return mass;
}

std::vector<WeightedHypothesis> conditional_prior(const Prior& prior, const VersionSpaceMask& mask) {
    if (mask.empty()) throw EmptyVersionSpace("version space is empty");
    const double mass = prior_mass(prior, mask);
    if (!(mass > 0.0)) throw EmptyVersionSpace("version space has zero prior mass");
    std::vector<WeightedHypothesis> out;
    out.reserve(mask.count());
    for (HypothesisIndex h = 0; h < mask.size(); ++h) {
        if (mask.contains(h)) out.push_back({h, prior[h] / mass});
    }
    return out;
}

double disagreement(std::span<const Label> a, std::span<const Label> b, const ItemDistribution& dist) {
    double d = 0.0;
    for (const auto& e : dist.entries()) {
        if (a[e.item] != b[e.item]) d += e.weight;
    }
    return d;
}

double disagreement(const LabelingMatrix& labelings, HypothesisIndex h, HypothesisIndex h2,
                    const ItemDistribution& dist) {
    if (h >= labelings.num_hypotheses() || h2 >= labelings.num_hypotheses()) {
        throw InvalidArgument("hypothesis index out of range");
    }
    return disagreement(labelings.row(h), labelings.row(h2), dist);
}

Regions regions(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                std::span<const ItemIndex> items) {
    if (mask.empty()) throw EmptyVersionSpace("agreement regions of an empty version space are undefined");
    const auto members = mask.members();
    Regions out;
    for (auto x : items) {
        const Label first = labelings.label(members.front(), x);
        const bool agree = std::all_of(members.begin(), members.end(),
                                       [&](HypothesisIndex h) { return labelings.label(h, x) == first; });
        (agree ? out.agreement : out.disagreement).push_back(x);
    }
    return out;
}

Label vote_label(const LabelingMatrix& labelings, std::span<const WeightedHypothesis> members,
                 ItemIndex x) {
    const Label classes = labelings.num_classes();
    std::vector<double> mass(static_cast<std::size_t>(classes), 0.0);
    if (labelings.has_soft_probs()) {
        for (const auto& m : members) {
            for (Label y = 0; y < classes; ++y) {
                mass[static_cast<std::size_t>(y)] += m.weight * labelings.prob(m.index, x, y);
            }
        }
    } else {
        for (const auto& m : members) {
            mass[static_cast<std::size_t>(labelings.label(m.index, x))] += m.weight;
        }
    }
    Label best = 0;
    for (Label y = 1; y < classes; ++y) {
        if (mass[static_cast<std::size_t>(y)] > mass[static_cast<std::size_t>(best)]) best = y;
    }
    return best;
}

std::vector<Label> majority_vote(const VersionSpaceMask& mask, const Prior& prior,
                                 const LabelingMatrix& labelings, std::span<const ItemIndex> items) {
    const auto members = conditional_prior(prior, mask);
    std::vector<Label> out;
    out.reserve(items.size());
    for (auto x : items) out.push_back(vote_label(labelings, members, x));
    return out;
}

double wrong_agreement(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                       const BayesLabeling& bayes, const ItemDistribution& dist) {
    if (mask.empty()) throw EmptyVersionSpace("wrong agreement of an empty version space is undefined");
    const auto members = mask.members();
    double total = 0.0;
    for (const auto& e : dist.entries()) {
        const Label first = labelings.label(members.front(), e.item);
        const bool agree = std::all_of(members.begin(), members.end(), [&](HypothesisIndex h) {
            return labelings.label(h, e.item) == first;
        });
        if (agree && first != bayes[e.item]) total += e.weight;
    }
    return total;
}

} // namespace vsal
