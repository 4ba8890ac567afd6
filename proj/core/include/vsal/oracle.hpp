#pragma once

// Brute-force reference computations, written independently of the measure
// and strategy code they check. Meant for tests and ad-hoc verification.

#include <optional>
#include <vector>

#include "vsal/core.hpp"

namespace vsal::oracle {

inline constexpr std::size_t kMaxHypotheses = 1000;
inline constexpr std::size_t kMaxItems = 1000;

struct BruteMeasures {
    // Per item 0..N-1.
    std::vector<double> gibbs_error;
    std::vector<double> variation_ratio;
    double pwd = 0.0;
    double gvd = 0.0;
    std::vector<Label> vote;
    std::optional<double> wrong_agreement;
};

// Throws InvalidArgument beyond kMaxHypotheses x kMaxItems and
// EmptyVersionSpace for an empty or massless mask.
BruteMeasures brute_measures(const LabelingMatrix& labelings, const Prior& prior, const VersionSpaceMask& mask,
                             const ItemDistribution& dist, const BayesLabeling* bayes = nullptr);

struct VoteOptimality {
    double vote_distance = 0.0;
    double best_distance = 0.0;
    std::vector<Label> best;
    bool optimal = false;
};

// Enumerates all C^N labelings (N <= 8, C <= 3) and compares the best expected
// distance to the Gibbs classifier with that of the vote.
VoteOptimality vote_optimality(const LabelingMatrix& labelings, const Prior& prior, const VersionSpaceMask& mask,
                               const ItemDistribution& dist, double tolerance = 1e-12);

} // namespace vsal::oracle
