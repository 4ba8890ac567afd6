#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "vsal/error.hpp"
#include "vsal/simulator.hpp"

namespace vsal {
namespace {

ExperimentConfig thresholds_config(std::size_t n, StrategyKind kind, std::size_t rounds) {
    ExperimentConfig cfg;
    cfg.class_spec.kind = Thresholds{n};
    cfg.strategy = StrategySpec{kind, Backend::exact(), false};
    cfg.rounds = rounds;
    cfg.seeds = {1, 2, 3};
    cfg.output = "unused";
    return cfg;
}

std::string metrics_of(const ExperimentResult& r) {
    std::ostringstream out;
    write_metrics_csv(out, r);
    return out.str();
}

TEST(Simulator, ZeroRoundsLogsOnlyTheInitialRound) {
    auto cfg = thresholds_config(16, StrategyKind::min_wc_pwd, 0);
    cfg.initial = 3;
    const auto r = run_experiment(cfg);
    ASSERT_EQ(r.runs.size(), 3u);
    for (const auto& run : r.runs) {
        ASSERT_EQ(run.rounds.size(), 1u);
        EXPECT_EQ(run.rounds[0].n_labels, 3u);
        EXPECT_EQ(run.rounds[0].selected_items.size(), 3u);
    }
}

TEST(Simulator, PwdReachesASingletonWithinTheBinarySearchBound) {
    auto cfg = thresholds_config(128, StrategyKind::min_wc_pwd, 10);
    for (HypothesisIndex t : {0u, 1u, 64u, 100u, 127u, 128u}) {
        cfg.class_spec.truth.row = t;
        cfg.seeds = {7};
        const auto run = run_experiment(cfg).runs.front();
        const auto q = labels_to_singleton(run);
        ASSERT_TRUE(q) << "t=" << t;
        EXPECT_LE(*q, 8u) << "t=" << t;
    }
}

TEST(Simulator, MetricsAreConsistentForExactRealizableRuns) {
    auto cfg = thresholds_config(40, StrategyKind::min_wc_gvd, 8);
    cfg.batch = 2;
    cfg.initial = 4;
    cfg.splits = {0.25, 0.25};
    cfg.prior = PriorKind::random;
    const auto result = run_experiment(cfg);
    for (const auto& run : result.runs) {
        ASSERT_FALSE(run.aborted);
        const auto inst = materialize(cfg, run.seed);
        double previous_mass = 2.0;
        std::set<ItemIndex> queried;
        for (const auto& row : run.rounds) {
            EXPECT_EQ(row.n_labels, cfg.initial + row.round * cfg.batch);
            for (double v : {row.gibbs_err, row.vote_err, row.pwd_eval, row.gvd_eval, row.wrong_agreement}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
            EXPECT_EQ(row.wrong_agreement, 0.0);
            EXPECT_LE(row.prior_mass, previous_mass);
            previous_mass = row.prior_mass;
            if (row.version_space_size == 1) {
                EXPECT_EQ(row.pwd_eval, 0.0);
                EXPECT_EQ(row.gvd_eval, 0.0);
            }
            for (auto x : row.selected_items) {
                EXPECT_TRUE(queried.insert(x).second) << "item queried twice";
                EXPECT_TRUE(std::binary_search(inst.split.pool.begin(), inst.split.pool.end(), x));
            }
        }
    }
}

TEST(Simulator, VoteErrorIsTheDistanceFromVoteToTruth) {
    auto cfg = thresholds_config(30, StrategyKind::max_gibbs_error, 3);
    cfg.splits = {0.0, 0.3};
    cfg.seeds = {11};
    const auto run = run_experiment(cfg).runs.front();
    const auto inst = materialize(cfg, 11);
    const auto& l = inst.generated.labelings;
    VersionSpaceMask mask = VersionSpaceMask::full(l.num_hypotheses());
    for (const auto& row : run.rounds) {
        for (auto x : row.selected_items) mask = restrict(mask, l, x, inst.generated.bayes[x]);
        const auto test_items = inst.test.items();
        const auto vote_on_test = majority_vote(mask, inst.prior, l, test_items);
        std::vector<Label> vote(l.num_items(), 0);
        for (std::size_t i = 0; i < test_items.size(); ++i) vote[test_items[i]] = vote_on_test[i];
        EXPECT_NEAR(row.vote_err, disagreement(vote, inst.generated.bayes.labels(), inst.test), 1e-15);
    }
}

TEST(Simulator, InitialSetIsClassBalanced) {
    auto cfg = thresholds_config(32, StrategyKind::random, 0);
    cfg.initial = 6;
    cfg.class_spec.truth.row = 20;
    for (const auto& run : run_experiment(cfg).runs) {
        const auto inst = materialize(cfg, run.seed);
        std::size_t ones = 0;
        for (auto x : run.rounds[0].selected_items) ones += static_cast<std::size_t>(inst.generated.bayes[x]);
        EXPECT_EQ(ones, 3u);
    }
    // Only two positives exist: round-robin skips the exhausted class.
    cfg.class_spec.truth.row = 2;
    for (const auto& run : run_experiment(cfg).runs) {
        const auto inst = materialize(cfg, run.seed);
        std::size_t ones = 0;
        for (auto x : run.rounds[0].selected_items) ones += static_cast<std::size_t>(inst.generated.bayes[x]);
        EXPECT_EQ(ones, 2u);
    }
}

TEST(Simulator, SplitsAreDisjointAndCoverTheItems) {
    const auto s = split_items(50, {0.2, 0.3}, 9);
    EXPECT_EQ(s.eval.size(), 10u);
    EXPECT_EQ(s.test.size(), 15u);
    EXPECT_EQ(s.pool.size(), 25u);
    std::set<ItemIndex> all(s.pool.begin(), s.pool.end());
    all.insert(s.eval.begin(), s.eval.end());
    all.insert(s.test.begin(), s.test.end());
    EXPECT_EQ(all.size(), 50u);
    const auto pooled = split_items(10, {0.0, 0.0}, 9);
    EXPECT_EQ(pooled.pool, pooled.eval);
    EXPECT_EQ(pooled.pool, pooled.test);
    EXPECT_EQ(pooled.pool.size(), 10u);
}

TEST(Simulator, IsDeterministicAcrossRunsAndJobCounts) {
    auto cfg = thresholds_config(64, StrategyKind::min_wc_m1_pwd, 6);
    cfg.strategy.backend = Backend::ensemble(10);
    cfg.batch = 2;
    cfg.initial = 2;
    cfg.splits = {0.25, 0.25};
    cfg.bias = BiasSpec{0.2, {}, 32};
    cfg.seeds = {1, 2, 3, 4, 5, 6};
    const auto a = metrics_of(run_experiment(cfg, 1));
    EXPECT_EQ(a, metrics_of(run_experiment(cfg, 1)));
    EXPECT_EQ(a, metrics_of(run_experiment(cfg, 4)));
    cfg.seeds = {1, 2, 3, 4, 5, 7};
    EXPECT_NE(a, metrics_of(run_experiment(cfg, 1)));
}

TEST(Simulator, EnsembleBackendLogsItsEnsembles) {
    auto cfg = thresholds_config(20, StrategyKind::min_wc_pwd, 3);
    cfg.strategy.backend = Backend::ensemble(5);
    const auto result = run_experiment(cfg);
    for (const auto& run : result.runs) {
        for (const auto& row : run.rounds) EXPECT_EQ(row.ensemble.size(), 5u);
    }
    std::ostringstream out;
    write_ensembles_csv(out, result);
    std::istringstream in(out.str());
    const auto rows = read_ensembles_csv(in);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(rows[5].run_seed, 2u);
    EXPECT_EQ(rows[5].round, 1u);
    EXPECT_EQ(rows[5].hypotheses, result.runs[1].rounds[1].ensemble);
}

TEST(Simulator, NonRealizableRunsAbortWhenTheVersionSpaceEmpties) {
    ExperimentConfig cfg;
    cfg.class_spec.kind = RandomClass{20, 10, 2, 0, false};
    cfg.strategy = StrategySpec{StrategyKind::random, Backend::exact(), false};
    cfg.rounds = 10;
    cfg.seeds = {1, 2, 3};
    cfg.output = "unused";
    const auto result = run_experiment(cfg);
    EXPECT_TRUE(result.any_aborted());
    for (const auto& run : result.runs) {
        if (run.aborted) EXPECT_LT(run.rounds.size(), cfg.rounds + 1);
    }
}

TEST(Simulator, MetricsCsvLayout) {
    auto cfg = thresholds_config(8, StrategyKind::min_wc_pwd, 2);
    cfg.seeds = {4};
    cfg.initial = 2;
    const auto text = metrics_of(run_experiment(cfg));
    std::istringstream in(text);
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header, kMetricsHeader);
    EXPECT_EQ(first.substr(0, 10), "4,0,2,pwd,");
    EXPECT_NE(first.find(';'), std::string::npos);
    EXPECT_EQ(first.substr(first.size() - 2), ",0");
}

TEST(CompareStrategies, SummarizesFinalRounds) {
    auto pwd_cfg = thresholds_config(128, StrategyKind::min_wc_pwd, 10);
    auto random_cfg = thresholds_config(128, StrategyKind::random, 10);
    pwd_cfg.seeds = random_cfg.seeds = {1, 2, 3, 4, 5};
    const auto table = compare_strategies({pwd_cfg, random_cfg});
    ASSERT_EQ(table.size(), 2u);
    EXPECT_EQ(table[0].strategy, "pwd");
    EXPECT_EQ(table[0].n_seeds, 5u);
    EXPECT_EQ(table[0].n_labels, 10u);
    ASSERT_TRUE(table[0].median_labels_to_singleton);
    EXPECT_LE(*table[0].median_labels_to_singleton, 8.0);
    EXPECT_EQ(table[0].vote_err_diff.mean, 0.0);
    std::ostringstream out;
    write_comparison_csv(out, table);
    EXPECT_EQ(out.str().substr(0, 30), "strategy,n_seeds,n_labels,gibb");

    const auto one = compare_strategies({pwd_cfg});
    EXPECT_EQ(one.size(), 1u);
    random_cfg.seeds = {1, 2};
    EXPECT_THROW(compare_strategies({pwd_cfg, random_cfg}), InvalidArgument);
}

} // namespace
} // namespace vsal
