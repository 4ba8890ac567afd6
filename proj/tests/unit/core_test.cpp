#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "vsal/core.hpp"
#include "vsal/error.hpp"

namespace vsal {
namespace {

using testing::fixture_a;
using testing::fixture_a_matrix;

std::vector<HypothesisIndex> members_of(const VersionSpaceMask& m) { return m.members(); }
using Members = std::vector<HypothesisIndex>;

TEST(LabelingMatrix, RejectsOutOfRangeLabels) {
    EXPECT_THROW(LabelingMatrix(1, 2, 2, {0, 2}), InvalidArgument);
    EXPECT_THROW(LabelingMatrix(1, 2, 2, {0, -1}), InvalidArgument);
    EXPECT_THROW(LabelingMatrix(1, 2, 1, {0, 0}), InvalidArgument);
    EXPECT_THROW(LabelingMatrix(2, 2, 2, {0, 0, 1}), InvalidArgument);
}

TEST(LabelingMatrix, SoftProbsMustSumToOneAndMatchArgmax) {
    EXPECT_NO_THROW(LabelingMatrix(1, 1, 2, {1}, std::vector<double>{0.3, 0.7}));
    EXPECT_THROW(LabelingMatrix(1, 1, 2, {1}, std::vector<double>{0.3, 0.6}), InvalidArgument);
    EXPECT_THROW(LabelingMatrix(1, 1, 2, {0}, std::vector<double>{0.3, 0.7}), InvalidArgument);
    // A 1/2-1/2 tie belongs to class 0.
    EXPECT_NO_THROW(LabelingMatrix(1, 1, 2, {0}, std::vector<double>{0.5, 0.5}));
    EXPECT_THROW(LabelingMatrix(1, 1, 2, {1}, std::vector<double>{0.5, 0.5}), InvalidArgument);
}

TEST(LabelingMatrix, ProbDefaultsToOneHot) {
    const auto l = fixture_a_matrix();
    EXPECT_EQ(l.prob(1, 1, 1), 1.0);
    EXPECT_EQ(l.prob(1, 1, 0), 0.0);
}

TEST(QuerySet, RejectsDuplicatesAndValidatesRanges) {
    QuerySet q;
    q.add(0, 1);
    EXPECT_THROW(q.add(0, 0), InvalidQuery);
    q.add(1, 0);
    EXPECT_EQ(q.entries()[0], (QueryEntry{0, 1}));
    EXPECT_NO_THROW(q.validate(fixture_a_matrix()));
    QuerySet bad;
    bad.add(5, 0);
    EXPECT_THROW(bad.validate(fixture_a_matrix()), InvalidQuery);
}

TEST(ConsistentMask, FixtureExamples) {
    const auto l = fixture_a_matrix();
    EXPECT_EQ(members_of(consistent_mask(l, {})), (Members{0, 1, 2}));
    QuerySet q1;
    q1.add(0, 0);
    EXPECT_EQ(members_of(consistent_mask(l, q1)), (Members{0, 1}));
    QuerySet q2;
    q2.add(0, 1);
    q2.add(1, 0);
    const auto empty = consistent_mask(l, q2);
    EXPECT_TRUE(empty.empty());
    EXPECT_EQ(empty.count(), 0u);
    QuerySet bad;
    bad.add(2, 0);
    EXPECT_THROW(consistent_mask(l, bad), InvalidQuery);
}

TEST(Restrict, FixtureExamples) {
    const auto l = fixture_a_matrix();
    const auto full = VersionSpaceMask::full(3);
    const auto v01 = restrict(full, l, 0, 0);
    EXPECT_EQ(members_of(v01), (Members{0, 1}));
    EXPECT_EQ(restrict(v01, l, 0, 0), v01);
    EXPECT_EQ(members_of(restrict(v01, l, 1, 1)), (Members{1}));
    EXPECT_THROW(restrict(full, l, 2, 0), InvalidQuery);
    EXPECT_THROW(restrict(full, l, 0, 2), InvalidQuery);
}

TEST(PriorMass, FixtureExamples) {
    const auto p = Prior::uniform(3);
    EXPECT_DOUBLE_EQ(prior_mass(p, VersionSpaceMask::full(3)), 1.0);
    const Members v01{0, 1};
    EXPECT_NEAR(prior_mass(p, VersionSpaceMask::of(3, v01)), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(prior_mass(p, VersionSpaceMask::none(3)), 0.0);
}

TEST(Prior, ValidatesNormalization) {
    EXPECT_THROW(Prior({0.5, 0.6}), InvalidArgument);
    EXPECT_THROW(Prior({1.5, -0.5}), InvalidArgument);
    const auto p = Prior::from_weights({1.0, 3.0});
    EXPECT_DOUBLE_EQ(p[1], 0.75);
}

TEST(ItemDistribution, ValidatesWeightsAndItems) {
    EXPECT_THROW(ItemDistribution({{0, 0.5}, {1, 0.6}}), InvalidArgument);
    EXPECT_THROW(ItemDistribution({{0, 0.5}, {0, 0.5}}), InvalidArgument);
    const auto d = ItemDistribution::uniform_over(4);
    EXPECT_THROW(d.validate(3), InvalidArgument);
    EXPECT_NO_THROW(d.validate(4));
}

TEST(ConditionalPrior, FailsOnEmptyMask) {
    EXPECT_THROW(conditional_prior(Prior::uniform(3), VersionSpaceMask::none(3)), EmptyVersionSpace);
    EXPECT_THROW(conditional_prior(Prior({0.0, 1.0}), VersionSpaceMask::of(2, Members{0})), EmptyVersionSpace);
}

TEST(Disagreement, FixtureExamples) {
    const auto f = fixture_a();
    EXPECT_EQ(disagreement(f.labelings, 0, 0, f.dist), 0.0);
    EXPECT_DOUBLE_EQ(disagreement(f.labelings, 0, 2, f.dist), 1.0);
    EXPECT_DOUBLE_EQ(disagreement(f.labelings, 0, 1, f.dist), 0.5);
}

TEST(Regions, FixtureExamples) {
    const auto l = fixture_a_matrix();
    const std::vector<ItemIndex> items{0, 1};
    const auto r01 = regions(VersionSpaceMask::of(3, Members{0, 1}), l, items);
    EXPECT_EQ(r01.agreement, (std::vector<ItemIndex>{0}));
    EXPECT_EQ(r01.disagreement, (std::vector<ItemIndex>{1}));
    const auto r2 = regions(VersionSpaceMask::of(3, Members{2}), l, items);
    EXPECT_EQ(r2.agreement, (std::vector<ItemIndex>{0, 1}));
    EXPECT_TRUE(r2.disagreement.empty());
    const auto rall = regions(VersionSpaceMask::full(3), l, items);
    EXPECT_TRUE(rall.agreement.empty());
    EXPECT_EQ(rall.disagreement, (std::vector<ItemIndex>{0, 1}));
    EXPECT_THROW(regions(VersionSpaceMask::none(3), l, items), EmptyVersionSpace);
}

TEST(MajorityVote, FixtureExamples) {
    const auto l = fixture_a_matrix();
    const auto p = Prior::uniform(3);
    const std::vector<ItemIndex> items{0, 1};
    EXPECT_EQ(majority_vote(VersionSpaceMask::full(3), p, l, items), (std::vector<Label>{0, 1}));
    EXPECT_EQ(majority_vote(VersionSpaceMask::of(3, Members{2}), p, l, items), (std::vector<Label>{1, 1}));
    const std::vector<ItemIndex> x1{1};
    EXPECT_EQ(majority_vote(VersionSpaceMask::of(3, Members{0, 1}), p, l, x1), (std::vector<Label>{0}));
    EXPECT_THROW(majority_vote(VersionSpaceMask::none(3), p, l, items), EmptyVersionSpace);
}

TEST(MajorityVote, UsesSoftProbabilities) {
    // Hard labels say 2 x class 0 vs 1 x class 1; confidences tip the vote to 1.
    const LabelingMatrix l(3, 1, 2, {0, 0, 1}, std::vector<double>{0.55, 0.45, 0.55, 0.45, 0.0, 1.0});
    const std::vector<ItemIndex> items{0};
    EXPECT_EQ(majority_vote(VersionSpaceMask::full(3), Prior::uniform(3), l, items), (std::vector<Label>{1}));
}

TEST(WrongAgreement, FixtureExamples) {
    const auto f = fixture_a();
    const auto bayes = BayesLabeling::from_row(f.labelings, 2);
    EXPECT_DOUBLE_EQ(wrong_agreement(VersionSpaceMask::of(3, Members{0, 1}), f.labelings, bayes, f.dist), 0.5);
    EXPECT_EQ(wrong_agreement(VersionSpaceMask::of(3, Members{2}), f.labelings, bayes, f.dist), 0.0);
    EXPECT_EQ(wrong_agreement(VersionSpaceMask::full(3), f.labelings, bayes, f.dist), 0.0);
    EXPECT_THROW(wrong_agreement(VersionSpaceMask::none(3), f.labelings, bayes, f.dist), EmptyVersionSpace);
}

class CoreProperties : public ::testing::TestWithParam<int> {};

TEST_P(CoreProperties, MaskCompositionAndMonotonicity) {
    Rng rng(derive_seed(17, static_cast<std::uint64_t>(GetParam())));
    const auto inst = testing::random_instance(rng);
    const auto& l = inst.labelings;
    QuerySet q;
    VersionSpaceMask incremental = VersionSpaceMask::full(l.num_hypotheses());
    double mass = 1.0;
    for (ItemIndex x = 0; x < l.num_items(); ++x) {
        if (rng.uniform01() < 0.5) continue;
        const auto y = static_cast<Label>(rng.below(static_cast<std::size_t>(l.num_classes())));
        q.add(x, y);
        incremental = restrict(incremental, l, x, y);
        EXPECT_EQ(consistent_mask(l, q), incremental);
        const double next = prior_mass(inst.prior, incremental);
        EXPECT_LE(next, mass + 1e-15);
        mass = next;
    }
}

TEST_P(CoreProperties, DisagreementIsAPseudoMetric) {
    Rng rng(derive_seed(23, static_cast<std::uint64_t>(GetParam())));
    const auto inst = testing::random_instance(rng);
    const auto& l = inst.labelings;
    const std::size_t m = l.num_hypotheses();
    for (HypothesisIndex a = 0; a < m; ++a) {
        EXPECT_EQ(disagreement(l, a, a, inst.dist), 0.0);
        for (HypothesisIndex b = 0; b < m; ++b) {
            const double ab = disagreement(l, a, b, inst.dist);
            EXPECT_EQ(ab, disagreement(l, b, a, inst.dist));
            EXPECT_GE(ab, 0.0);
            EXPECT_LE(ab, 1.0 + 1e-12);
            for (HypothesisIndex c = 0; c < m; ++c) {
                EXPECT_LE(ab, disagreement(l, a, c, inst.dist) + disagreement(l, c, b, inst.dist) + 1e-12);
            }
        }
    }
}

TEST_P(CoreProperties, TruthInMaskMeansNoWrongAgreementAndSingletonVoteIsItsRow) {
    Rng rng(derive_seed(29, static_cast<std::uint64_t>(GetParam())));
    const auto inst = testing::random_instance(rng);
    const auto members = inst.mask.members();
    const auto truth = members[rng.below(members.size())];
    const auto bayes = BayesLabeling::from_row(inst.labelings, truth);
    EXPECT_EQ(wrong_agreement(inst.mask, inst.labelings, bayes, inst.dist), 0.0);

    const auto single = VersionSpaceMask::of(inst.labelings.num_hypotheses(), std::vector<HypothesisIndex>{truth});
    const auto items = inst.dist.items();
    const auto vote = majority_vote(single, inst.prior, inst.labelings, items);
    for (std::size_t i = 0; i < items.size(); ++i) EXPECT_EQ(vote[i], inst.labelings.label(truth, items[i]));
}

INSTANTIATE_TEST_SUITE_P(RandomInstances, CoreProperties, ::testing::Range(0, 20));

} // namespace
} // namespace vsal
