#include "vsal/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "vsal/error.hpp"

namespace vsal {

std::string PointTag::name() const {
    switch (kind) {
    case Kind::hypothesis: return fmt::format("h{}", id);
    case Kind::gibbs: return "gibbs";
    case Kind::bayes: return "bayes";
    }
    return {};
}

DistanceMatrix::DistanceMatrix(std::vector<PointTag> tags, std::vector<double> values)
    : tags_(std::move(tags)), values_(std::move(values)) {
    const std::size_t k = tags_.size();
    if (values_.size() != k * k) throw InvalidArgument("distance matrix must be K x K");
    for (std::size_t i = 0; i < k; ++i) {
        if (values_[i * k + i] != 0.0) throw InvalidArgument("distance matrix needs a zero diagonal");
        for (std::size_t j = 0; j < k; ++j) {
            const double v = values_[i * k + j];
            if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("distances must be finite and nonnegative");
            if (std::abs(v - values_[j * k + i]) > 1e-12) throw InvalidArgument("distance matrix is not symmetric");
        }
    }
}

DistanceMatrix build_distances(std::span<const RoundSample> rounds, const LabelingMatrix& labelings,
                               const ItemDistribution& dist, const BayesLabeling* bayes, bool gibbs_points) {
    dist.validate(labelings.num_items());
    if (bayes) bayes->validate(labelings);

    // Each point is a mixture of rows: one row for hypotheses and Bayes, the
    // round's draws (uniformly) for Gibbs points.
    struct Point {
        PointTag tag;
        std::vector<std::span<const Label>> rows;
    };
    std::vector<Point> points;
    for (const auto& r : rounds) {
        std::vector<std::span<const Label>> drawn;
        for (auto h : r.hypotheses) {
            if (h >= labelings.num_hypotheses()) throw InvalidArgument("logged hypothesis out of range");
            drawn.push_back(labelings.row(h));
            points.push_back({PointTag{PointTag::Kind::hypothesis, r.round, h}, {labelings.row(h)}});
        }
        if (gibbs_points && !drawn.empty()) points.push_back({PointTag{PointTag::Kind::gibbs, r.round, 0}, drawn});
    }
    if (bayes) points.push_back({PointTag{PointTag::Kind::bayes, std::nullopt, 0}, {bayes->labels()}});
    if (points.size() < 2) throw InvalidArgument("an embedding needs at least two points");

    const std::size_t k = points.size();
    std::vector<double> values(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            double total = 0.0;
            for (const auto& a : points[i].rows) {
                for (const auto& b : points[j].rows) total += disagreement(a, b, dist);
            }
            const double d = total / static_cast<double>(points[i].rows.size() * points[j].rows.size());
            values[i * k + j] = values[j * k + i] = d;
        }
    }
    std::vector<PointTag> tags;
    tags.reserve(k);
    for (auto& p : points) tags.push_back(p.tag);
    return DistanceMatrix(std::move(tags), std::move(values));
}

double Embedding::distance(std::size_t i, std::size_t j) const {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        const double diff = at(i, k) - at(j, k);
        sq += diff * diff;
    }
    return std::sqrt(sq);
}

Embedding classical_mds(const DistanceMatrix& d, std::size_t dim) {
    const std::size_t k = d.size();
    if (k < 2) throw InvalidArgument("classical MDS needs at least two points");
    if (dim == 0) throw InvalidArgument("embedding dimension must be positive");

    Eigen::MatrixXd sq(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) sq(i, j) = d(i, j) * d(i, j);
    }
    // Double centering: B = -1/2 (D2 - row means - column means + grand mean).
    const Eigen::VectorXd row_mean = sq.rowwise().mean();
    const Eigen::RowVectorXd col_mean = sq.colwise().mean();
    const double grand = sq.mean();
    Eigen::MatrixXd b = -0.5 * ((sq.colwise() - row_mean).rowwise() - col_mean).array() - 0.5 * grand;
    b = 0.5 * (b + b.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");

    Embedding out;
    out.points = k;
    out.dim = dim;
    out.coords.assign(k * dim, 0.0);
    // Eigenvalues come in ascending order. Ones at rounding level of the
    // largest count as zero so rank-deficient inputs pad with exact zeros.
    const double cutoff = 1e-12 * std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(k - 1)));
    for (std::size_t a = 0; a < dim && a < k; ++a) {
        const auto col = static_cast<Eigen::Index>(k - 1 - a);
        const double lambda = solver.eigenvalues()(col);
        if (!(lambda > cutoff)) continue;
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        const double scale = std::sqrt(lambda);
        for (std::size_t i = 0; i < k; ++i) out.coords[i * dim + a] = v(static_cast<Eigen::Index>(i)) * scale;
    }
    for (std::size_t a = 0; a < dim; ++a) {
        double mean = 0.0;
        for (std::size_t i = 0; i < k; ++i) mean += out.coords[i * dim + a];
        mean /= static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i) out.coords[i * dim + a] -= mean;
    }
    return out;
}

Embedding center_per_round(const Embedding& e, const std::vector<PointTag>& tags) {
    if (tags.size() != e.points) throw InvalidArgument("one tag per embedded point is required");
    std::map<std::size_t, std::vector<double>> anchor;
    std::map<std::size_t, std::pair<std::vector<double>, std::size_t>> mean;
    for (std::size_t i = 0; i < e.points; ++i) {
        if (!tags[i].round) continue;
        const auto r = *tags[i].round;
        if (tags[i].kind == PointTag::Kind::gibbs) {
            anchor[r].assign(e.coords.begin() + static_cast<std::ptrdiff_t>(i * e.dim),
                             e.coords.begin() + static_cast<std::ptrdiff_t>((i + 1) * e.dim));
        } else {
            auto& [sum, count] = mean[r];
            sum.resize(e.dim, 0.0);
            for (std::size_t k = 0; k < e.dim; ++k) sum[k] += e.at(i, k);
            ++count;
        }
    }
    for (auto& [r, acc] : mean) {
        if (anchor.contains(r)) continue;
        for (auto& v : acc.first) v /= static_cast<double>(acc.second);
        anchor[r] = acc.first;
    }
    Embedding out = e;
    for (std::size_t i = 0; i < e.points; ++i) {
        if (!tags[i].round) continue;
        const auto& c = anchor.at(*tags[i].round);
        for (std::size_t k = 0; k < e.dim; ++k) out.coords[i * e.dim + k] -= c[k];
    }
    return out;
}

void write_embedding_csv(std::ostream& out, const std::vector<PointTag>& tags, const Embedding& e) {
    if (e.dim != 2) throw InvalidArgument("embedding CSV needs two dimensions");
    if (tags.size() != e.points) throw InvalidArgument("one tag per embedded point is required");
    out << "tag,round,x,y\n";
    for (std::size_t i = 0; i < e.points; ++i) {
        const std::string round = tags[i].round ? std::to_string(*tags[i].round) : "-1";
        // Adding 0.0 turns -0 into +0.
        out << tags[i].name() << ',' << round << ',' << fmt::format("{:.17g}", e.at(i, 0) + 0.0) << ','
            << fmt::format("{:.17g}", e.at(i, 1) + 0.0) << '\n';
    }
}

} // namespace vsal
