#pragma once

// Two-dimensional pictures of version-space evolution: pairwise disagreement
// between logged hypotheses, embedded by classical multidimensional scaling.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsal/core.hpp"

namespace vsal {

struct PointTag {
    enum class Kind { hypothesis, gibbs, bayes };
    Kind kind = Kind::hypothesis;
    // Round the point was logged in; absent for the Bayes point.
    std::optional<std::size_t> round;
    // Row index for hypothesis points.
    HypothesisIndex id = 0;

    // "h<id>", "gibbs" or "bayes".
    std::string name() const;
};

// K x K symmetric, nonnegative, zero diagonal.
class DistanceMatrix {
public:
    DistanceMatrix(std::vector<PointTag> tags, std::vector<double> values);

    std::size_t size() const noexcept { return tags_.size(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * tags_.size() + j]; }
    const std::vector<PointTag>& tags() const noexcept { return tags_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<PointTag> tags_;
    std::vector<double> values_;
};

struct RoundSample {
    std::size_t round = 0;
    std::vector<HypothesisIndex> hypotheses;
};

// One point per logged draw (repeats included), plus the Bayes labeling when
// given. With `gibbs_points`, each round also gets a Gibbs point whose distance
// to anything is the mean distance from that round's draws; its self-distance
// is pinned to 0. Needs at least two points.
DistanceMatrix build_distances(std::span<const RoundSample> rounds, const LabelingMatrix& labelings,
                               const ItemDistribution& dist, const BayesLabeling* bayes = nullptr,
                               bool gibbs_points = false);

// Row-major K x dim coordinates.
struct Embedding {
    std::size_t points = 0;
    std::size_t dim = 0;
    std::vector<double> coords;

    double at(std::size_t i, std::size_t k) const noexcept { return coords[i * dim + k]; }
    double distance(std::size_t i, std::size_t j) const;
};

// Torgerson scaling: B = -1/2 J D^2 J, top `dim` eigenpairs with negative
// eigenvalues clipped to 0. Centered at the origin; each axis is oriented so
// its largest-magnitude coordinate is positive.
Embedding classical_mds(const DistanceMatrix& d, std::size_t dim = 2);

// Translates every round so its Gibbs point (or, lacking one, the mean of its
// hypothesis points) sits at the origin. The Bayes point is left in place.
Embedding center_per_round(const Embedding& e, const std::vector<PointTag>& tags);

// `tag,round,x,y` rows; the Bayes point has round -1. Requires dim == 2.
void write_embedding_csv(std::ostream& out, const std::vector<PointTag>& tags, const Embedding& e);

} // namespace vsal
