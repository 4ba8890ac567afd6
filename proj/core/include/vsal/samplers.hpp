#pragma once

// Synthetic hypothesis classes with a planted ground truth, and the biased
// sampler that withholds a neighborhood of the truth from the version space.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vsal/core.hpp"

namespace vsal {

// N items on a line; N + 1 hypotheses. Row m labels the last m items 1, so
// row 0 is all zeros and row N all ones.
struct Thresholds {
    std::size_t n = 0;
};

// Indicators of contiguous item ranges [a, b] plus the empty labeling (row 0).
struct Intervals {
    std::size_t n = 0;
};

// Random linear separators over a side x side grid in the unit square.
struct GridHalfspaces {
    std::size_t side = 0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

// Rows of iid uniform labels. When not realizable the truth is an independent
// random labeling and need not appear in the matrix.
struct RandomClass {
    std::size_t m = 0;
    std::size_t n = 0;
    Label classes = 2;
    std::uint64_t seed = 0;
    bool realizable = true;
};

// Planted truth: a fixed row, or a row drawn from `seed`.
struct TruthRule {
    std::optional<HypothesisIndex> row;
    std::uint64_t seed = 0;
};

struct ClassSpec {
    std::variant<Thresholds, Intervals, GridHalfspaces, RandomClass> kind;
    TruthRule truth;
    std::size_t max_hypotheses = std::size_t{1} << 20;
    std::size_t max_entries = std::size_t{1} << 27;

    std::string describe() const;
    // Number of pool items, known without building the class.
    std::size_t num_items() const;
};

struct GeneratedClass {
    LabelingMatrix labelings;
    BayesLabeling bayes;
    // Row equal to the truth, when the class is realizable.
    std::optional<HypothesisIndex> truth_row;
};

// Generated classes hold distinct labelings only (first occurrence kept).
GeneratedClass build_class(const ClassSpec& spec);

// Parses "thresholds(8)", "intervals(3)", "grid_halfspaces(8,200,seed=1)",
// "random_class(50,20,3,seed=7,realizable=0)", with optional "truth=<row>".
ClassSpec parse_class_spec(std::string_view text);

// Exclusion radius schedule over the number of labels queried.
struct BiasSpec {
    double radius = 0.0;
    // (labels queried, radius) steps; the latest step reached applies.
    std::vector<std::pair<std::size_t, double>> steps;
    // Linear decay from `radius` to 0 at this label count.
    std::optional<std::size_t> linear_until;

    void validate() const;
    // Radius after `labels_queried` labels; 0 once the whole pool is labeled.
    double radius_at(std::size_t labels_queried, std::size_t pool_size) const;
};

// Samplable version space: drops members within the current radius of h*.
// If nothing is left, the nearest member that differs from h* is kept (lowest
// index on ties); only a mask holding nothing but copies of h* keeps h*.
// Never returns an empty mask.
VersionSpaceMask biased_mask(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                             const BayesLabeling& bayes, const BiasSpec& bias,
                             std::size_t labels_queried, std::size_t pool_size,
                             const ItemDistribution& dist);

} // namespace vsal
