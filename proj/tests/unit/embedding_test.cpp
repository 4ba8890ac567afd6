#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "vsal/embedding.hpp"
#include "vsal/error.hpp"

namespace vsal {
namespace {

DistanceMatrix from_values(std::size_t k, std::vector<double> values) {
    std::vector<PointTag> tags(k);
    for (std::size_t i = 0; i < k; ++i) tags[i].id = i;
    return DistanceMatrix(std::move(tags), std::move(values));
}

void expect_reproduces(const DistanceMatrix& d, double tol) {
    const auto e = classical_mds(d, 2);
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) EXPECT_NEAR(e.distance(i, j), d(i, j), tol) << i << "," << j;
    }
}

TEST(BuildDistances, FixtureRowsAndTruth) {
    const auto f = testing::fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    const std::vector<RoundSample> rounds{{0, {0, 1, 2}}};
    const auto d = build_distances(rounds, f.labelings, f.dist, &bayes);
    ASSERT_EQ(d.size(), 4u);
    EXPECT_DOUBLE_EQ(d(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(d(0, 2), 1.0);
    EXPECT_DOUBLE_EQ(d(1, 2), 0.5);
    EXPECT_EQ(d(2, 3), 0.0);
    EXPECT_EQ(d.tags()[3].kind, PointTag::Kind::bayes);
    EXPECT_EQ(d.tags()[1].name(), "h1");
}

TEST(BuildDistances, IdenticalRowsGiveZeros) {
    const auto f = testing::fixture_a();
    const std::vector<RoundSample> rounds{{0, {1, 1, 1}}};
    const auto d = build_distances(rounds, f.labelings, f.dist);
    for (double v : d.values()) EXPECT_EQ(v, 0.0);
    const auto e = classical_mds(d, 2);
    for (double c : e.coords) EXPECT_EQ(c, 0.0);
}

TEST(BuildDistances, GibbsPointsUseMeanDistances) {
    const auto f = testing::fixture_a();
    const std::vector<RoundSample> rounds{{0, {0, 2}}};
    const auto d = build_distances(rounds, f.labelings, f.dist, nullptr, true);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.tags()[2].kind, PointTag::Kind::gibbs);
    EXPECT_DOUBLE_EQ(d(0, 2), 0.5);
    EXPECT_DOUBLE_EQ(d(1, 2), 0.5);
}

TEST(BuildDistances, NeedsTwoPoints) {
    const auto f = testing::fixture_a();
    const std::vector<RoundSample> rounds{{0, {1}}};
    EXPECT_THROW(build_distances(rounds, f.labelings, f.dist), InvalidArgument);
}

TEST(DistanceMatrix, Validation) {
    EXPECT_THROW(from_values(2, {0, 1, 2, 0}), InvalidArgument);
    EXPECT_THROW(from_values(2, {1, 1, 1, 0}), InvalidArgument);
    EXPECT_THROW(from_values(2, {0, -1, -1, 0}), InvalidArgument);
    EXPECT_THROW(from_values(2, {0, 1, 1}), InvalidArgument);
}

TEST(ClassicalMds, CollinearFixtureDistances) {
    expect_reproduces(from_values(3, {0, 0.5, 1, 0.5, 0, 0.5, 1, 0.5, 0}), 1e-9);
}

TEST(ClassicalMds, UnitSquare) {
    const double s = std::sqrt(2.0);
    expect_reproduces(from_values(4, {0, 1, s, 1, 1, 0, 1, s, s, 1, 0, 1, 1, s, 1, 0}), 1e-9);
}

TEST(ClassicalMds, RandomPlanarPoints) {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + rng.below(30);
        std::vector<double> x(k), y(k), values(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            x[i] = rng.uniform01() * 10 - 5;
            y[i] = rng.uniform01() * 10 - 5;
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) values[i * k + j] = i == j ? 0.0 : std::hypot(x[i] - x[j], y[i] - y[j]);
        }
        expect_reproduces(from_values(k, values), 1e-9);
    }
}

TEST(ClassicalMds, OutputIsCentered) {
    const auto e = classical_mds(from_values(3, {0, 0.5, 1, 0.5, 0, 0.5, 1, 0.5, 0}), 2);
    for (std::size_t a = 0; a < 2; ++a) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 3; ++i) sum += e.at(i, a);
        EXPECT_NEAR(sum, 0.0, 1e-12);
    }
    EXPECT_NEAR(e.at(1, 1), 0.0, 1e-12);
}

TEST(ClassicalMds, NonEuclideanInputsClipNegativeEigenvalues) {
    // Violates the triangle inequality: B has a negative eigenvalue.
    const auto e = classical_mds(from_values(3, {0, 1, 5, 1, 0, 1, 5, 1, 0}), 2);
    for (double c : e.coords) EXPECT_TRUE(std::isfinite(c));
}

TEST(CenterPerRound, AnchorsEachRoundAtItsGibbsPoint) {
    const auto f = testing::fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    const std::vector<RoundSample> rounds{{0, {0, 1, 2}}, {1, {1, 2}}};
    const auto d = build_distances(rounds, f.labelings, f.dist, &bayes, true);
    const auto e = center_per_round(classical_mds(d, 2), d.tags());
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.tags()[i].kind == PointTag::Kind::gibbs) {
            EXPECT_NEAR(e.at(i, 0), 0.0, 1e-12);
            EXPECT_NEAR(e.at(i, 1), 0.0, 1e-12);
        }
    }
}

TEST(EmbeddingCsv, Layout) {
    const auto f = testing::fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    const std::vector<RoundSample> rounds{{3, {2, 2}}};
    const auto d = build_distances(rounds, f.labelings, f.dist, &bayes);
    std::ostringstream out;
    write_embedding_csv(out, d.tags(), classical_mds(d, 2));
    EXPECT_EQ(out.str(), "tag,round,x,y\nh2,3,0,0\nh2,3,0,0\nbayes,-1,0,0\n");
}

} // namespace
} // namespace vsal
