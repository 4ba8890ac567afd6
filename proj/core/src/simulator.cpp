#include "vsal/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "vsal/error.hpp"
#include "vsal/random.hpp"

namespace vsal {

namespace {

// Seed streams; every random choice in a run derives from (run seed, stream).
constexpr std::uint64_t kStreamClass = 1;
constexpr std::uint64_t kStreamTruth = 2;
constexpr std::uint64_t kStreamSplit = 3;
constexpr std::uint64_t kStreamInitial = 4;
constexpr std::uint64_t kStreamPrior = 5;
constexpr std::uint64_t kStreamEnsemble = 100;
constexpr std::uint64_t kStreamSelection = 1000000;

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::string real(double v) { return fmt::format("{:.17g}", v); }

std::string join_items(const std::vector<std::size_t>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(items[i]);
    }
    return out;
}

double weighted_error(std::span<const Label> predicted, std::span<const ItemIndex> items,
                      const ItemDistribution& dist, const BayesLabeling& bayes) {
    // predicted[i] is the label of items[i]; items are dist's support in order.
    double err = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (predicted[i] != bayes[items[i]]) err += dist.entries()[i].weight;
    }
    return err;
}

// Class-balanced initial set: items grouped by their true label, then taken
// round-robin over classes in a seeded order; exhausted classes are skipped.
std::vector<ItemIndex> balanced_initial(const std::vector<ItemIndex>& pool, const BayesLabeling& bayes,
                                        Label num_classes, std::size_t count, std::uint64_t seed) {
    std::vector<ItemIndex> order = pool;
    Rng rng(seed);
    shuffle(order, rng);
    std::vector<std::vector<ItemIndex>> by_class(static_cast<std::size_t>(num_classes));
    for (auto x : order) by_class[static_cast<std::size_t>(bayes[x])].push_back(x);
    std::vector<std::size_t> next(by_class.size(), 0);
    std::vector<ItemIndex> chosen;
    while (chosen.size() < count) {
        for (std::size_t c = 0; c < by_class.size() && chosen.size() < count; ++c) {
            if (next[c] < by_class[c].size()) chosen.push_back(by_class[c][next[c]++]);
        }
    }
    return chosen;
}

struct RoundState {
    VersionSpaceMask sample_mask;
    std::optional<Ensemble> ensemble;
};

} // namespace

bool ExperimentResult::any_aborted() const {
    return std::any_of(runs.begin(), runs.end(), [](const SeedRun& r) { return r.aborted.has_value(); });
}

ItemSplit split_items(std::size_t num_items, const SplitSpec& splits, std::uint64_t seed) {
    std::vector<ItemIndex> order(num_items);
    for (std::size_t i = 0; i < num_items; ++i) order[i] = i;
    Rng rng(seed);
    shuffle(order, rng);
    const auto held = [num_items](double f) { return static_cast<std::size_t>(f * static_cast<double>(num_items)); };
    const std::size_t eval_n = held(splits.eval_fraction), test_n = held(splits.test_fraction);
    if (eval_n + test_n >= num_items) throw InvalidArgument("held-out sets leave no pool items");

    ItemSplit out;
    out.eval.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(eval_n));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(eval_n),
                    order.begin() + static_cast<std::ptrdiff_t>(eval_n + test_n));
    out.pool.assign(order.begin() + static_cast<std::ptrdiff_t>(eval_n + test_n), order.end());
    std::sort(out.pool.begin(), out.pool.end());
    std::sort(out.eval.begin(), out.eval.end());
    std::sort(out.test.begin(), out.test.end());
    if (eval_n == 0) out.eval = out.pool;
    if (test_n == 0) out.test = out.pool;
    return out;
}

ExperimentInstance materialize(const ExperimentConfig& cfg, std::uint64_t seed) {
    ClassSpec spec = cfg.class_spec;
    if (!cfg.class_seed_fixed) {
        const auto class_seed = derive_seed(seed, kStreamClass);
        if (auto* g = std::get_if<GridHalfspaces>(&spec.kind)) g->seed = class_seed;
        if (auto* r = std::get_if<RandomClass>(&spec.kind)) r->seed = class_seed;
    }
    spec.truth.seed = derive_seed(seed, kStreamTruth);
    GeneratedClass generated = build_class(spec);

    const std::size_t m = generated.labelings.num_hypotheses();
    Prior prior = Prior::uniform(m);
    if (cfg.prior == PriorKind::random) {
        Rng rng(derive_seed(seed, kStreamPrior));
        std::vector<double> w(m);
        // Exponential weights give a Dirichlet(1, ..., 1) prior.
        for (auto& v : w) v = -std::log1p(-rng.uniform01()) + 1e-12;
        prior = Prior::from_weights(std::move(w));
    }

    ItemSplit split = split_items(generated.labelings.num_items(), cfg.splits, derive_seed(seed, kStreamSplit));
    auto eval = ItemDistribution::uniform(split.eval);
    auto test = ItemDistribution::uniform(split.test);
    return ExperimentInstance{std::move(generated), std::move(prior), std::move(split), std::move(eval),
                              std::move(test)};
}

SeedRun run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    using Clock = std::chrono::steady_clock;
    SeedRun run;
    run.seed = seed;

    const auto inst = materialize(cfg, seed);
    const LabelingMatrix& labelings = inst.generated.labelings;
    const BayesLabeling& bayes = inst.generated.bayes;
    const std::size_t pool_size = inst.split.pool.size();
    const std::string strategy = cfg.strategy.label();
    const bool ensemble_backend = cfg.strategy.backend.kind == Backend::Kind::ensemble;
    const auto test_items = inst.test.items();
    const auto oracle = [&bayes](ItemIndex x) { return bayes[x]; };

    auto start = Clock::now();
    VersionSpaceMask mask = VersionSpaceMask::full(labelings.num_hypotheses());
    std::vector<std::uint8_t> labeled(labelings.num_items(), 0);
    std::size_t n_labels = 0;
    std::vector<ItemIndex> selected =
        balanced_initial(inst.split.pool, bayes, labelings.num_classes(), cfg.initial, derive_seed(seed, kStreamInitial));

    const auto apply_labels = [&](const std::vector<ItemIndex>& items) {
        for (auto x : items) {
            mask = restrict(mask, labelings, x, oracle(x));
            labeled[x] = 1;
            ++n_labels;
        }
    };
    apply_labels(selected);

    for (std::size_t round = 0;; ++round) {
        if (mask.empty()) {
            run.aborted = fmt::format("version space became empty after {} labels (round {})", n_labels, round);
            break;
        }
        const VersionSpaceMask sample_mask =
            cfg.bias ? biased_mask(mask, labelings, bayes, *cfg.bias, n_labels, pool_size, inst.test) : mask;
        const MeasureContext eval_ctx(labelings, inst.prior, sample_mask, inst.eval);
        const MeasureContext test_ctx(labelings, inst.prior, sample_mask, inst.test);

        const std::size_t draws = ensemble_backend ? cfg.strategy.backend.ensemble_size : cfg.log_sample_size;
        const Ensemble ens = draw_ensemble(eval_ctx, draws, derive_seed(seed, kStreamEnsemble + round));

        RoundMetrics row;
        row.run_seed = seed;
        row.round = round;
        row.n_labels = n_labels;
        row.strategy = strategy;
        if (ensemble_backend) {
            double gibbs = 0.0;
            for (auto h : ens.members) gibbs += disagreement(labelings.row(h), bayes.labels(), inst.test);
            row.gibbs_err = gibbs / static_cast<double>(ens.size());
            row.vote_err = weighted_error(ensemble_vote(ens, labelings, test_items), test_items, inst.test, bayes);
            row.pwd_eval = pwd_hat(ens, labelings, inst.eval);
            row.gvd_eval = gvd_hat(ens, labelings, inst.eval);
        } else {
            row.gibbs_err = expected_distance_to(test_ctx, bayes.labels());
            row.vote_err = weighted_error(majority_vote(sample_mask, inst.prior, labelings, test_items), test_items,
                                          inst.test, bayes);
            row.pwd_eval = expected_gibbs_error(eval_ctx);
            row.gvd_eval = gvd(eval_ctx);
        }
        row.wrong_agreement = wrong_agreement(sample_mask, labelings, bayes, inst.test);
        row.prior_mass = prior_mass(inst.prior, sample_mask);
        row.selected_items = selected;
        row.version_space_size = mask.count();
        row.ensemble = ens.members;

        if (round == cfg.rounds) {
            if (cfg.record_timing) row.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            run.rounds.push_back(std::move(row));
            break;
        }

        std::vector<ItemIndex> candidates;
        for (auto x : inst.split.pool) {
            if (!labeled[x]) candidates.push_back(x);
        }
        SelectionState state{labelings, inst.prior, sample_mask, inst.eval, std::move(candidates), oracle};
        const auto batch = select_batch(cfg.strategy, state, cfg.batch, derive_seed(seed, kStreamSelection + round),
                                        ensemble_backend ? &ens : nullptr);
        if (cfg.record_timing) row.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        run.rounds.push_back(std::move(row));

        start = Clock::now();
        selected.clear();
        for (const auto& pick : batch.picks) selected.push_back(pick.chosen);
        apply_labels(selected);
    }
    return run;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs) {
    cfg.validate();
    ExperimentResult result;
    result.runs.resize(cfg.seeds.size());
    const std::size_t workers = std::clamp<std::size_t>(jobs, 1, cfg.seeds.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) result.runs[i] = run_seed(cfg, cfg.seeds[i]);
        return result;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
                try {
                    result.runs[i] = run_seed(cfg, cfg.seeds[i]);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return result;
}

std::optional<std::size_t> labels_to_singleton(const SeedRun& run) {
    for (const auto& r : run.rounds) {
        if (r.version_space_size == 1) return r.n_labels;
    }
    return std::nullopt;
}

void write_metrics_csv(std::ostream& out, const ExperimentResult& result) {
    out << kMetricsHeader << '\n';
    for (const auto& run : result.runs) {
        for (const auto& r : run.rounds) {
            out << r.run_seed << ',' << r.round << ',' << r.n_labels << ',' << r.strategy << ',' << real(r.gibbs_err)
                << ',' << real(r.vote_err) << ',' << real(r.pwd_eval) << ',' << real(r.gvd_eval) << ','
                << real(r.wrong_agreement) << ',' << real(r.prior_mass) << ',' << join_items(r.selected_items) << ','
                << real(r.elapsed_ms) << '\n';
        }
    }
}

void write_ensembles_csv(std::ostream& out, const ExperimentResult& result) {
    out << "run_seed,round,hypotheses\n";
    for (const auto& run : result.runs) {
        for (const auto& r : run.rounds) out << r.run_seed << ',' << r.round << ',' << join_items(r.ensemble) << '\n';
    }
}

std::vector<EnsembleLogRow> read_ensembles_csv(std::istream& in) {
    std::vector<EnsembleLogRow> rows;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || line != "run_seed,round,hypotheses") {
        throw ParseError("ensembles file: missing header 'run_seed,round,hypotheses'");
    }
    ++line_no;
    const auto parse_uint = [&](const std::string& text) {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(text, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (text.empty() || pos != text.size() || text[0] == '-') {
            throw ParseError(fmt::format("ensembles file line {}: invalid integer '{}'", line_no, text));
        }
        return static_cast<std::uint64_t>(v);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string seed, round, hyps;
        if (!std::getline(ss, seed, ',') || !std::getline(ss, round, ',')) {
            throw ParseError(fmt::format("ensembles file line {}: expected 3 fields", line_no));
        }
        std::getline(ss, hyps);
        EnsembleLogRow row;
        row.run_seed = parse_uint(seed);
        row.round = parse_uint(round);
        std::stringstream hs(hyps);
        std::string h;
        while (std::getline(hs, h, ';')) row.hypotheses.push_back(parse_uint(h));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentResult& result) {
    std::filesystem::create_directories(cfg.output);
    const auto open = [](const std::filesystem::path& p) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error(fmt::format("cannot write {}", p.string()));
        return out;
    };
    {
        auto out = open(cfg.output / "metrics.csv");
        write_metrics_csv(out, result);
    }
    {
        auto out = open(cfg.output / "ensembles.csv");
        write_ensembles_csv(out, result);
    }
    {
        auto out = open(cfg.output / "config.json");
        out << to_json(cfg).dump(2) << '\n';
    }
}

namespace {

MetricSummary summary_of(const std::vector<double>& v) {
    MetricSummary s;
    if (v.empty()) return s;
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

const RoundMetrics& final_round(const SeedRun& run) {
    if (run.rounds.empty()) throw Error(fmt::format("seed {} logged no rounds", run.seed));
    return run.rounds.back();
}

} // namespace

std::vector<StrategySummary> summarize(const std::vector<ExperimentConfig>& cfgs,
                                       const std::vector<ExperimentResult>& results) {
    if (cfgs.size() != results.size()) throw InvalidArgument("one result per config is required");
    std::vector<StrategySummary> table;
    for (std::size_t c = 0; c < cfgs.size(); ++c) {
        const auto& runs = results[c].runs;
        if (runs.size() != results.front().runs.size()) throw InvalidArgument("mismatched seed sets");
        StrategySummary s;
        s.strategy = cfgs[c].strategy.label();
        s.n_seeds = runs.size();
        std::vector<double> ge, ve, pe, gv, wa, pm, dv, dp;
        std::vector<double> to_singleton;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& last = final_round(runs[i]);
            const auto& base = final_round(results.front().runs[i]);
            if (runs[i].seed != results.front().runs[i].seed) throw InvalidArgument("mismatched seed sets");
            s.n_labels = std::max(s.n_labels, last.n_labels);
            ge.push_back(last.gibbs_err);
            ve.push_back(last.vote_err);
            pe.push_back(last.pwd_eval);
            gv.push_back(last.gvd_eval);
            wa.push_back(last.wrong_agreement);
            pm.push_back(last.prior_mass);
            dv.push_back(last.vote_err - base.vote_err);
            dp.push_back(last.pwd_eval - base.pwd_eval);
            const auto q = labels_to_singleton(runs[i]);
            to_singleton.push_back(q ? static_cast<double>(*q) : std::numeric_limits<double>::infinity());
        }
        s.gibbs_err = summary_of(ge);
        s.vote_err = summary_of(ve);
        s.pwd_eval = summary_of(pe);
        s.gvd_eval = summary_of(gv);
        s.wrong_agreement = summary_of(wa);
        s.prior_mass = summary_of(pm);
        s.vote_err_diff = summary_of(dv);
        s.pwd_eval_diff = summary_of(dp);
        if (!to_singleton.empty()) {
            std::sort(to_singleton.begin(), to_singleton.end());
            const std::size_t n = to_singleton.size();
            const double med = n % 2 ? to_singleton[n / 2] : 0.5 * (to_singleton[n / 2 - 1] + to_singleton[n / 2]);
            if (std::isfinite(med)) s.median_labels_to_singleton = med;
        }
        table.push_back(std::move(s));
    }
    return table;
}

std::vector<StrategySummary> compare_strategies(const std::vector<ExperimentConfig>& cfgs, std::size_t jobs) {
    if (cfgs.empty()) throw InvalidArgument("compare needs at least one config");
    for (const auto& cfg : cfgs) {
        if (cfg.seeds != cfgs.front().seeds) throw InvalidArgument("mismatched seed sets across configs");
    }
    std::vector<ExperimentResult> results;
    results.reserve(cfgs.size());
    for (const auto& cfg : cfgs) results.push_back(run_experiment(cfg, jobs));
    return summarize(cfgs, results);
}

void write_comparison_csv(std::ostream& out, const std::vector<StrategySummary>& table) {
    out << "strategy,n_seeds,n_labels";
    for (const char* m : {"gibbs_err", "vote_err", "pwd_eval", "gvd_eval", "wrong_agreement", "prior_mass"}) {
        out << ',' << m << "_mean," << m << "_std";
    }
    out << ",median_labels_to_singleton,vote_err_diff_mean,vote_err_diff_std,pwd_eval_diff_mean,pwd_eval_diff_std\n";
    for (const auto& s : table) {
        out << s.strategy << ',' << s.n_seeds << ',' << s.n_labels;
        for (const auto* m : {&s.gibbs_err, &s.vote_err, &s.pwd_eval, &s.gvd_eval, &s.wrong_agreement, &s.prior_mass}) {
            out << ',' << real(m->mean) << ',' << real(m->std);
        }
        out << ',' << (s.median_labels_to_singleton ? real(*s.median_labels_to_singleton) : std::string());
        out << ',' << real(s.vote_err_diff.mean) << ',' << real(s.vote_err_diff.std) << ','
            << real(s.pwd_eval_diff.mean) << ',' << real(s.pwd_eval_diff.std) << '\n';
    }
}

} // namespace vsal
