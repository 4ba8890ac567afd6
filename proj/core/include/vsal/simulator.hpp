#pragma once

// Seeded active-learning experiments over synthetic hypothesis classes:
// select, label from the planted truth, shrink the version space, log metrics.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vsal/core.hpp"
#include "vsal/estimators.hpp"
#include "vsal/samplers.hpp"
#include "vsal/strategies.hpp"

namespace vsal {

// Fractions of the items held out for selection-time evaluation and for
// reporting. A zero fraction means that set is the query pool itself.
struct SplitSpec {
    double eval_fraction = 0.0;
    double test_fraction = 0.0;
};

enum class PriorKind { uniform, random };

struct ExperimentConfig {
    // The truth row and the seeds of random classes are filled per run unless
    // fixed here.
    ClassSpec class_spec;
    bool class_seed_fixed = false;
    StrategySpec strategy;
    std::size_t rounds = 0;
    std::size_t batch = 1;
    std::size_t initial = 0;
    SplitSpec splits;
    PriorKind prior = PriorKind::uniform;
    std::optional<BiasSpec> bias;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output;
    // Hypotheses drawn per round for the ensembles log when the backend is exact.
    std::size_t log_sample_size = 20;
    // elapsed_ms stays 0 unless set, so metrics files are reproducible byte for byte.
    bool record_timing = false;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// Items of one run's instance split into query pool, evaluation and test sets.
struct ItemSplit {
    std::vector<ItemIndex> pool;
    std::vector<ItemIndex> eval;
    std::vector<ItemIndex> test;
};

ItemSplit split_items(std::size_t num_items, const SplitSpec& splits, std::uint64_t seed);

// Everything a run needs that is fixed by (config, seed).
struct ExperimentInstance {
    GeneratedClass generated;
    Prior prior;
    ItemSplit split;
    ItemDistribution eval;
    ItemDistribution test;
};

ExperimentInstance materialize(const ExperimentConfig& cfg, std::uint64_t seed);

struct RoundMetrics {
    std::uint64_t run_seed = 0;
    std::size_t round = 0;
    std::size_t n_labels = 0;
    std::string strategy;
    double gibbs_err = 0.0;
    double vote_err = 0.0;
    double pwd_eval = 0.0;
    double gvd_eval = 0.0;
    double wrong_agreement = 0.0;
    double prior_mass = 0.0;
    std::vector<ItemIndex> selected_items;
    double elapsed_ms = 0.0;
    // Not written to the metrics file.
    std::size_t version_space_size = 0;
    std::vector<HypothesisIndex> ensemble;
};

struct SeedRun {
    std::uint64_t seed = 0;
    std::vector<RoundMetrics> rounds;
    // Set when the run stopped early (e.g. the version space emptied).
    std::optional<std::string> aborted;
};

struct ExperimentResult {
    std::vector<SeedRun> runs;
    bool any_aborted() const;
};

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

// Runs every seed; at most `jobs` seeds execute concurrently. Results are in
// seed order regardless of `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

// Labels queried when the version space first became a singleton.
std::optional<std::size_t> labels_to_singleton(const SeedRun& run);

inline constexpr const char* kMetricsHeader =
    "run_seed,round,n_labels,strategy,gibbs_err,vote_err,pwd_eval,gvd_eval,wrong_agreement,"
    "prior_mass,selected_items,elapsed_ms";

void write_metrics_csv(std::ostream& out, const ExperimentResult& result);
// One row per (seed, round) listing the logged hypotheses, for embeddings.
void write_ensembles_csv(std::ostream& out, const ExperimentResult& result);

struct EnsembleLogRow {
    std::uint64_t run_seed = 0;
    std::size_t round = 0;
    std::vector<HypothesisIndex> hypotheses;
};
std::vector<EnsembleLogRow> read_ensembles_csv(std::istream& in);

// Writes metrics.csv, ensembles.csv and config.json into cfg.output.
void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result);

struct MetricSummary {
    double mean = 0.0;
    double std = 0.0;
};

struct StrategySummary {
    std::string strategy;
    std::size_t n_seeds = 0;
    std::size_t n_labels = 0;
    MetricSummary gibbs_err, vote_err, pwd_eval, gvd_eval, wrong_agreement, prior_mass;
    // Median labels needed to reach a singleton version space; seeds that never did count as
    // infinite, and an infinite median is nullopt.
    std::optional<double> median_labels_to_singleton;
    // Paired per-seed differences of the final vote error and pwd against the first strategy.
    MetricSummary vote_err_diff, pwd_eval_diff;
};

// Configs must share everything but the strategy (including the seed list).
std::vector<StrategySummary> compare_strategies(const std::vector<ExperimentConfig>& cfgs,
                                                std::size_t jobs = 1);
std::vector<StrategySummary> summarize(const std::vector<ExperimentConfig>& cfgs,
                                       const std::vector<ExperimentResult>& results);
void write_comparison_csv(std::ostream& out, const std::vector<StrategySummary>& table);

// JSON config (schema 1). Unknown fields are rejected.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

} // namespace vsal
