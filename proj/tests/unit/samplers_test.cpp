#include <set>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "vsal/error.hpp"
#include "vsal/samplers.hpp"

namespace vsal {
namespace {

std::set<std::vector<Label>> distinct_rows(const LabelingMatrix& l) {
    std::set<std::vector<Label>> rows;
    for (HypothesisIndex h = 0; h < l.num_hypotheses(); ++h) rows.emplace(l.row(h).begin(), l.row(h).end());
    return rows;
}

TEST(BuildClass, ThresholdsOfTwoIsFixtureA) {
    const auto g = build_class(parse_class_spec("thresholds(2, truth=2)"));
    EXPECT_EQ(g.labelings.labels(), testing::fixture_a_matrix().labels());
    EXPECT_EQ(g.truth_row, HypothesisIndex{2});
    EXPECT_EQ(std::vector<Label>(g.bayes.labels().begin(), g.bayes.labels().end()), (std::vector<Label>{1, 1}));
}

TEST(BuildClass, AdjacentThresholdsDifferOnOneItem) {
    const std::size_t n = 10;
    const auto g = build_class(parse_class_spec("thresholds(10)"));
    const auto d = ItemDistribution::uniform_over(n);
    for (HypothesisIndex t = 0; t < n; ++t) EXPECT_NEAR(disagreement(g.labelings, t, t + 1, d), 0.1, 1e-15);
}

TEST(BuildClass, IntervalsOfThreeHasSevenDistinctRows) {
    const auto g = build_class(parse_class_spec("intervals(3)"));
    EXPECT_EQ(g.labelings.num_hypotheses(), 7u);
    EXPECT_EQ(distinct_rows(g.labelings).size(), 7u);
}

TEST(BuildClass, GridHalfspacesAreDeduplicatedAndRealizable) {
    const auto g = build_class(parse_class_spec("grid_halfspaces(5, 300, seed=3)"));
    EXPECT_EQ(g.labelings.num_items(), 25u);
    EXPECT_LE(g.labelings.num_hypotheses(), 300u);
    EXPECT_EQ(distinct_rows(g.labelings).size(), g.labelings.num_hypotheses());
    ASSERT_TRUE(g.truth_row);
    const auto row = g.labelings.row(*g.truth_row);
    EXPECT_TRUE(std::equal(row.begin(), row.end(), g.bayes.labels().begin()));
}

TEST(BuildClass, RandomClassRealizability) {
    const auto r = build_class(parse_class_spec("random_class(40, 12, 3, seed=7)"));
    ASSERT_TRUE(r.truth_row);
    EXPECT_EQ(distinct_rows(r.labelings).size(), r.labelings.num_hypotheses());
    const auto u = build_class(parse_class_spec("random_class(40, 12, 3, seed=7, realizable=0)"));
    EXPECT_EQ(u.bayes.size(), 12u);
    EXPECT_FALSE(u.truth_row);
}

TEST(BuildClass, DeterministicInSeeds) {
    const auto a = build_class(parse_class_spec("random_class(20, 8, 2, seed=1)"));
    const auto b = build_class(parse_class_spec("random_class(20, 8, 2, seed=1)"));
    const auto c = build_class(parse_class_spec("random_class(20, 8, 2, seed=2)"));
    EXPECT_EQ(a.labelings.labels(), b.labelings.labels());
    EXPECT_NE(a.labelings.labels(), c.labelings.labels());
}

TEST(BuildClass, RejectsOversizedAndDegenerateSpecs) {
    auto spec = parse_class_spec("thresholds(100)");
    spec.max_hypotheses = 50;
    EXPECT_THROW(build_class(spec), InvalidArgument);
    EXPECT_THROW(build_class(parse_class_spec("thresholds(0)")), InvalidArgument);
    EXPECT_THROW(build_class(parse_class_spec("thresholds(4, truth=9)")), InvalidArgument);
}

TEST(ParseClassSpec, Errors) {
    EXPECT_THROW(parse_class_spec("thresholds"), ParseError);
    EXPECT_THROW(parse_class_spec("circles(3)"), ParseError);
    EXPECT_THROW(parse_class_spec("thresholds(3, 4)"), ParseError);
    EXPECT_THROW(parse_class_spec("thresholds(x)"), ParseError);
    EXPECT_THROW(parse_class_spec("thresholds(3, colour=1)"), ParseError);
    EXPECT_EQ(parse_class_spec(" intervals( 4 ) ").num_items(), 4u);
}

TEST(BiasSpec, Schedules) {
    BiasSpec linear{0.3, {}, 64};
    EXPECT_DOUBLE_EQ(linear.radius_at(0, 64), 0.3);
    EXPECT_DOUBLE_EQ(linear.radius_at(32, 64), 0.15);
    EXPECT_EQ(linear.radius_at(64, 64), 0.0);
    BiasSpec steps{0.4, {{4, 0.2}, {8, 0.0}}, std::nullopt};
    EXPECT_DOUBLE_EQ(steps.radius_at(3, 100), 0.4);
    EXPECT_DOUBLE_EQ(steps.radius_at(4, 100), 0.2);
    EXPECT_EQ(steps.radius_at(9, 100), 0.0);
    BiasSpec constant{0.5, {}, std::nullopt};
    EXPECT_EQ(constant.radius_at(10, 10), 0.0);
    EXPECT_THROW((BiasSpec{1.5, {}, std::nullopt}.validate()), InvalidArgument);
    EXPECT_THROW((BiasSpec{0.3, {{4, 0.4}}, std::nullopt}.validate()), InvalidArgument);
    EXPECT_THROW((BiasSpec{0.3, {{4, 0.2}, {4, 0.1}}, std::nullopt}.validate()), InvalidArgument);
    EXPECT_THROW((BiasSpec{0.3, {{4, 0.2}}, 8}.validate()), InvalidArgument);
}

TEST(BiasedMask, FixtureExamples) {
    const auto f = testing::fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    const auto full = VersionSpaceMask::full(3);
    EXPECT_EQ(biased_mask(full, f.labelings, bayes, BiasSpec{0.0, {}, std::nullopt}, 0, 2, f.dist), full);
    const auto biased = biased_mask(full, f.labelings, bayes, BiasSpec{0.6, {}, std::nullopt}, 0, 2, f.dist);
    EXPECT_EQ(biased.members(), (std::vector<HypothesisIndex>{0}));
    // Every member inside the radius: the nearest wrong member survives, not h*.
    const auto near_truth = VersionSpaceMask::of(3, std::vector<HypothesisIndex>{1, 2});
    EXPECT_EQ(biased_mask(near_truth, f.labelings, bayes, BiasSpec{0.6, {}, std::nullopt}, 0, 2, f.dist).members(),
              (std::vector<HypothesisIndex>{1}));
    // Whole pool labeled: exclusion is off and the truth stays.
    const auto truth_only = VersionSpaceMask::of(3, std::vector<HypothesisIndex>{2});
    EXPECT_EQ(biased_mask(truth_only, f.labelings, bayes, BiasSpec{0.6, {}, std::nullopt}, 2, 2, f.dist), truth_only);
    EXPECT_THROW(biased_mask(VersionSpaceMask::none(3), f.labelings, bayes, BiasSpec{}, 0, 2, f.dist),
                 EmptyVersionSpace);
}

TEST(BiasedMask, NeverEmptiesAndKeepsTheNearest) {
    const auto f = testing::fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    const auto truth_only = VersionSpaceMask::of(3, std::vector<HypothesisIndex>{2});
    const auto kept = biased_mask(truth_only, f.labelings, bayes, BiasSpec{1.0, {}, std::nullopt}, 0, 2, f.dist);
    EXPECT_EQ(kept, truth_only);

    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto inst = testing::random_instance(rng);
        const auto members = inst.mask.members();
        const auto bayes_row = BayesLabeling::from_row(inst.labelings, members[rng.below(members.size())]);
        const BiasSpec bias{rng.uniform01(), {}, std::nullopt};
        const auto out = biased_mask(inst.mask, inst.labelings, bayes_row, bias, 0, 1000, inst.dist);
        EXPECT_FALSE(out.empty());
        for (auto h : out.members()) EXPECT_TRUE(inst.mask.contains(h));
        if (out.count() > 1) {
            for (auto h : out.members()) {
                EXPECT_GE(disagreement(inst.labelings.row(h), bayes_row.labels(), inst.dist), bias.radius);
            }
        }
    }
}

} // namespace
} // namespace vsal
