#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "vsal/embedding.hpp"
#include "vsal/error.hpp"
#include "vsal/labeling_io.hpp"
#include "vsal/oracle.hpp"
#include "vsal/samplers.hpp"
#include "vsal/simulator.hpp"

namespace vsal::cli {

namespace {

std::string real(double v) { return fmt::format("{:.17g}", v); }

// "7" or "1,2,3".
std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::uint64_t v = 0;
        const auto* end = part.data() + part.size();
        const auto [ptr, ec] = std::from_chars(part.data(), end, v);
        if (part.empty() || ec != std::errc{} || ptr != end) {
            throw ConfigError("VSAL_SEED", fmt::format("invalid seed '{}'", part));
        }
        seeds.push_back(v);
    }
    if (seeds.empty()) throw ConfigError("VSAL_SEED", "no seeds given");
    return seeds;
}

ExperimentConfig load_config_with_overrides(const std::string& path) {
    ExperimentConfig cfg = load_experiment_config(path);
    if (const char* env = std::getenv("VSAL_SEED"); env && *env) {
        cfg.seeds = parse_seed_list(env);
        cfg.validate();
    }
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw Error(fmt::format("cannot write {}", path.string()));
}

int cmd_run(const std::string& config, std::size_t jobs, bool dry_run, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config_with_overrides(config);
    if (dry_run) {
        const std::size_t n = cfg.class_spec.num_items();
        out << "class: " << cfg.class_spec.describe() << " (" << n << " items)\n";
        out << "strategy: " << cfg.strategy.label() << "\n";
        out << fmt::format("labels per seed: {} initial + {} rounds x {} = {}\n", cfg.initial, cfg.rounds, cfg.batch,
                           cfg.initial + cfg.rounds * cfg.batch);
        out << "seeds: " << cfg.seeds.size() << "\n";
        out << "output: " << cfg.output.string() << "\n";
        out << to_json(cfg).dump(2) << "\n";
        return kOk;
    }
    const auto result = run_experiment(cfg, jobs);
    write_experiment_outputs(cfg, result);
    for (const auto& run : result.runs) {
        if (run.aborted) err << fmt::format("seed {} aborted: {}\n", run.seed, *run.aborted);
    }
    out << fmt::format("wrote {}\n", (cfg.output / "metrics.csv").string());
    return result.any_aborted() ? kRuntimeError : kOk;
}

int cmd_compare(const std::vector<std::string>& configs, const std::string& out_path, std::size_t jobs,
                std::ostream& out, std::ostream& err) {
    std::vector<ExperimentConfig> cfgs;
    for (const auto& path : configs) cfgs.push_back(load_config_with_overrides(path));
    for (std::size_t i = 1; i < cfgs.size(); ++i) {
        if (cfgs[i].seeds != cfgs.front().seeds) {
            err << fmt::format("error: {} and {} use different seed sets\n", configs.front(), configs[i]);
            return kUsageError;
        }
    }
    std::vector<ExperimentResult> results;
    for (const auto& cfg : cfgs) results.push_back(run_experiment(cfg, jobs));
    std::ostringstream csv;
    write_comparison_csv(csv, summarize(cfgs, results));
    write_file(out_path, csv.str());
    bool aborted = false;
    for (const auto& r : results) aborted = aborted || r.any_aborted();
    if (aborted) err << "warning: some seeds aborted; their last logged round is summarized\n";
    out << fmt::format("wrote {}\n", out_path);
    return aborted ? kRuntimeError : kOk;
}

int cmd_embed(const std::string& metrics_dir, const std::string& out_path, bool center,
              std::optional<std::uint64_t> seed, std::ostream& out) {
    const std::filesystem::path dir(metrics_dir);
    const auto cfg = load_experiment_config(dir / "config.json");
    std::ifstream ens_in(dir / "ensembles.csv");
    if (!ens_in) throw Error(fmt::format("cannot open {}", (dir / "ensembles.csv").string()));
    const auto rows = read_ensembles_csv(ens_in);
    if (rows.empty()) throw Error("ensembles file has no rows");
    const std::uint64_t run_seed = seed.value_or(rows.front().run_seed);

    std::vector<RoundSample> rounds;
    for (const auto& r : rows) {
        if (r.run_seed == run_seed) rounds.push_back({r.round, r.hypotheses});
    }
    if (rounds.empty()) throw InvalidArgument(fmt::format("no logged rounds for seed {}", run_seed));

    const auto inst = materialize(cfg, run_seed);
    const auto d = build_distances(rounds, inst.generated.labelings, inst.test, &inst.generated.bayes, center);
    auto e = classical_mds(d, 2);
    if (center) e = center_per_round(e, d.tags());
    std::ostringstream csv;
    write_embedding_csv(csv, d.tags(), e);
    write_file(out_path, csv.str());
    out << fmt::format("wrote {} ({} points)\n", out_path, d.size());
    return kOk;
}

int cmd_oracle(const std::string& matrix, const std::optional<std::string>& probs,
               const std::optional<std::string>& query, std::optional<std::size_t> bayes_row, std::ostream& out) {
    const auto labelings =
        load_labeling_matrix(matrix, probs ? std::optional<std::filesystem::path>(*probs) : std::nullopt);
    QuerySet q;
    if (query) q = load_query_set(*query);
    const auto mask = consistent_mask(labelings, q);
    const auto prior = Prior::uniform(labelings.num_hypotheses());
    const auto dist = ItemDistribution::uniform_over(labelings.num_items());
    std::optional<BayesLabeling> bayes;
    if (bayes_row) {
        if (*bayes_row >= labelings.num_hypotheses()) throw InvalidArgument("--bayes row out of range");
        bayes = BayesLabeling::from_row(labelings, *bayes_row);
    }
    const auto m = oracle::brute_measures(labelings, prior, mask, dist, bayes ? &*bayes : nullptr);

    out << "VERSION_SPACE=" << mask.count() << "\n";
    out << "PWD=" << real(m.pwd) << "\n";
    out << "GVD=" << real(m.gvd) << "\n";
    for (std::size_t x = 0; x < m.gibbs_error.size(); ++x) out << "GE[" << x << "]=" << real(m.gibbs_error[x]) << "\n";
    for (std::size_t x = 0; x < m.variation_ratio.size(); ++x) {
        out << "VR[" << x << "]=" << real(m.variation_ratio[x]) << "\n";
    }
    out << "VOTE=";
    for (std::size_t x = 0; x < m.vote.size(); ++x) out << (x ? " " : "") << m.vote[x];
    out << "\n";
    if (m.wrong_agreement) out << "WRONG_AGREEMENT=" << real(*m.wrong_agreement) << "\n";
    return kOk;
}

int cmd_export(const std::string& spec, const std::string& out_path, std::ostream& out) {
    const auto generated = build_class(parse_class_spec(spec));
    std::ostringstream text;
    write_labeling_matrix(text, generated.labelings);
    write_file(out_path, text.str());
    out << fmt::format("wrote {} ({} x {})\n", out_path, generated.labelings.num_hypotheses(),
                       generated.labelings.num_items());
    return kOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Active learning by version-space reduction over finite hypothesis classes", "vsal"};
    app.require_subcommand(1);

    std::string config;
    std::size_t jobs = 1;
    bool dry_run = false;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment config and write metrics");
    run_cmd->add_option("--config", config, "Experiment config (JSON)")->required();
    run_cmd->add_option("--jobs", jobs, "Seeds executed concurrently")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--dry-run", dry_run, "Validate and print the resolved plan");

    std::vector<std::string> configs;
    std::string compare_out;
    std::size_t compare_jobs = 1;
    auto* compare_cmd = app.add_subcommand("compare", "Run several strategies and tabulate final-round metrics");
    compare_cmd->add_option("--configs", configs, "Configs differing only in strategy")->required();
    compare_cmd->add_option("--out", compare_out, "Summary CSV")->required();
    compare_cmd->add_option("--jobs", compare_jobs, "Seeds executed concurrently")->check(CLI::PositiveNumber);

    std::string metrics_dir, embed_out;
    bool center = false;
    std::optional<std::uint64_t> embed_seed;
    auto* embed_cmd = app.add_subcommand("embed", "Embed logged hypotheses of one run in 2-D");
    embed_cmd->add_option("--metrics", metrics_dir, "Output directory of a run")->required();
    embed_cmd->add_option("--out", embed_out, "Coordinates CSV")->required();
    embed_cmd->add_flag("--center-per-round", center, "Add Gibbs points and center each round on its own");
    embed_cmd->add_option("--seed", embed_seed, "Run seed to embed (default: the first logged)");

    std::string matrix;
    std::optional<std::string> probs, query;
    std::optional<std::size_t> bayes_row;
    auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force measures of a labeling matrix");
    oracle_cmd->add_option("--matrix", matrix, "Labeling matrix file")->required();
    oracle_cmd->add_option("--probs", probs, "Probability sidecar");
    oracle_cmd->add_option("--query", query, "Query set file");
    oracle_cmd->add_option("--bayes", bayes_row, "Row used as the Bayes labeling");

    std::string class_spec, export_out;
    auto* export_cmd = app.add_subcommand("export", "Write the labeling matrix of a synthetic class");
    export_cmd->add_option("--class", class_spec, "Class spec, e.g. thresholds(8)")->required();
    export_cmd->add_option("--out", export_out, "Matrix file")->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*run_cmd) return cmd_run(config, jobs, dry_run, out, err);
        if (*compare_cmd) return cmd_compare(configs, compare_out, compare_jobs, out, err);
        if (*embed_cmd) return cmd_embed(metrics_dir, embed_out, center, embed_seed, out);
        if (*oracle_cmd) return cmd_oracle(matrix, probs, query, bayes_row, out);
        if (*export_cmd) return cmd_export(class_spec, export_out, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kUsageError;
}

} // namespace vsal::cli
