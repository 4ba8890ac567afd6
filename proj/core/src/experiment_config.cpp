#include <fstream>
#include <set>
#include <string>

#include <fmt/format.h>

#include "vsal/error.hpp"
#include "vsal/simulator.hpp"

namespace vsal {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) throw ConfigError(join_path(path, key), "unknown field");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError(join_path(path, key), "required field missing");
    return obj.at(key);
}

std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(path, "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

double as_real(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

std::uint64_t uint_or(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    return obj.contains(key) ? as_uint(obj.at(key), join_path(path, key)) : fallback;
}

void parse_class(const json& obj, ExperimentConfig& cfg) {
    const std::string path = "class";
    const auto kind = as_string(require(obj, path, "kind"), "class.kind");
    ClassSpec spec;
    if (kind == "thresholds" || kind == "intervals") {
        reject_unknown(obj, path, {"kind", "n", "truth", "max_hypotheses"});
        const auto n = as_uint(require(obj, path, "n"), "class.n");
        if (kind == "thresholds") spec.kind = Thresholds{n};
        else spec.kind = Intervals{n};
    } else if (kind == "grid_halfspaces") {
        reject_unknown(obj, path, {"kind", "side", "count", "seed", "truth", "max_hypotheses"});
        GridHalfspaces g;
        g.side = as_uint(require(obj, path, "side"), "class.side");
        g.count = as_uint(require(obj, path, "count"), "class.count");
        if (obj.contains("seed")) {
            g.seed = as_uint(obj.at("seed"), "class.seed");
            cfg.class_seed_fixed = true;
        }
        spec.kind = g;
    } else if (kind == "random_class") {
        reject_unknown(obj, path, {"kind", "m", "n", "classes", "seed", "realizable", "truth", "max_hypotheses"});
        RandomClass r;
        r.m = as_uint(require(obj, path, "m"), "class.m");
        r.n = as_uint(require(obj, path, "n"), "class.n");
        const auto classes = uint_or(obj, path, "classes", 2);
        if (classes < 2 || classes > 1024) throw ConfigError("class.classes", "must lie in [2, 1024]");
        r.classes = static_cast<Label>(classes);
        if (obj.contains("seed")) {
            r.seed = as_uint(obj.at("seed"), "class.seed");
            cfg.class_seed_fixed = true;
        }
        if (obj.contains("realizable")) r.realizable = as_bool(obj.at("realizable"), "class.realizable");
        spec.kind = r;
    } else {
        throw ConfigError("class.kind", fmt::format("unknown hypothesis class '{}'", kind));
    }
    if (obj.contains("truth")) {
        const auto& t = obj.at("truth");
        if (t.is_string()) {
            if (t.get<std::string>() != "random") throw ConfigError("class.truth", "expected a row index or \"random\"");
        } else {
            spec.truth.row = as_uint(t, "class.truth");
        }
    }
    spec.max_hypotheses = uint_or(obj, path, "max_hypotheses", spec.max_hypotheses);
    cfg.class_spec = spec;
}

void parse_strategy(const json& v, ExperimentConfig& cfg) {
    const std::string path = "strategy";
    std::string name;
    if (v.is_string()) {
        name = v.get<std::string>();
    } else {
        reject_unknown(v, path, {"name", "backend", "ensemble_size", "refresh_mask"});
        name = as_string(require(v, path, "name"), "strategy.name");
        if (v.contains("backend")) {
            const auto backend = as_string(v.at("backend"), "strategy.backend");
            if (backend == "exact") {
                cfg.strategy.backend = Backend::exact();
            } else if (backend == "ensemble") {
                cfg.strategy.backend = Backend::ensemble(uint_or(v, path, "ensemble_size", 20));
            } else {
                throw ConfigError("strategy.backend", "expected \"exact\" or \"ensemble\"");
            }
        } else if (v.contains("ensemble_size")) {
            throw ConfigError("strategy.ensemble_size", "only valid with backend \"ensemble\"");
        }
        if (v.contains("refresh_mask")) cfg.strategy.refresh_mask = as_bool(v.at("refresh_mask"), "strategy.refresh_mask");
    }
    const auto kind = parse_strategy_kind(name);
    if (!kind) throw ConfigError("strategy.name", fmt::format("unknown strategy '{}'", name));
    cfg.strategy.kind = *kind;
}

void parse_bias(const json& obj, ExperimentConfig& cfg) {
    const std::string path = "bias";
    reject_unknown(obj, path, {"radius", "steps", "linear_until"});
    BiasSpec bias;
    bias.radius = as_real(require(obj, path, "radius"), "bias.radius");
    if (obj.contains("steps")) {
        const auto& steps = obj.at("steps");
        if (!steps.is_array()) throw ConfigError("bias.steps", "expected an array of [labels, radius] pairs");
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const auto p = fmt::format("bias.steps[{}]", i);
            if (!steps[i].is_array() || steps[i].size() != 2) throw ConfigError(p, "expected [labels, radius]");
            bias.steps.emplace_back(as_uint(steps[i][0], p + "[0]"), as_real(steps[i][1], p + "[1]"));
        }
    }
    if (obj.contains("linear_until")) bias.linear_until = as_uint(obj.at("linear_until"), "bias.linear_until");
    try {
        bias.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError("bias", e.what());
    }
    cfg.bias = bias;
}

} // namespace

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
    if (batch == 0) throw ConfigError("batch", "must be at least 1");
    if (!(splits.eval_fraction >= 0.0 && splits.eval_fraction < 1.0)) {
        throw ConfigError("splits.eval_fraction", "must lie in [0, 1)");
    }
    if (!(splits.test_fraction >= 0.0 && splits.test_fraction < 1.0)) {
        throw ConfigError("splits.test_fraction", "must lie in [0, 1)");
    }
    const std::size_t n = class_spec.num_items();
    if (n == 0) throw ConfigError("class", "hypothesis class has no items");
    const auto held = [n](double f) { return static_cast<std::size_t>(f * static_cast<double>(n)); };
    const std::size_t eval_n = held(splits.eval_fraction), test_n = held(splits.test_fraction);
    if (splits.eval_fraction > 0.0 && eval_n == 0) throw ConfigError("splits.eval_fraction", "selects no items");
    if (splits.test_fraction > 0.0 && test_n == 0) throw ConfigError("splits.test_fraction", "selects no items");
    if (eval_n + test_n >= n) throw ConfigError("splits", "held-out sets leave no pool items");
    const std::size_t pool = n - eval_n - test_n;
    if ((rounds != 0 && batch > pool) || rounds > pool || initial > pool) {
        throw ConfigError("rounds", fmt::format("rounds*batch + initial exceeds the pool size {} (N = {})", pool, n));
    }
    const std::size_t needed = rounds * batch + initial;
    if (needed > pool) {
        throw ConfigError("rounds", fmt::format("rounds*batch + initial = {}*{} + {} = {} exceeds the pool size {} (N = {})",
                                                rounds, batch, initial, needed, pool, n));
    }
    try {
        strategy.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError("strategy", e.what());
    }
    if (strategy.backend.kind == Backend::Kind::ensemble && strategy.backend.ensemble_size < 2) {
        throw ConfigError("strategy.ensemble_size", "the simulator needs ensembles of at least 2");
    }
    if (bias) {
        try {
            bias->validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError("bias", e.what());
        }
    }
    if (log_sample_size == 0) throw ConfigError("log_sample_size", "must be at least 1");
}

ExperimentConfig parse_experiment_config(const json& doc) {
    reject_unknown(doc, "", {"schema", "class", "strategy", "rounds", "batch", "initial", "splits", "prior",
                             "bias", "seeds", "output", "log_sample_size", "record_timing"});
    const auto schema = as_uint(require(doc, "", "schema"), "schema");
    if (schema != kSchemaVersion) {
        throw ConfigError("schema", fmt::format("unsupported schema {}, expected {}", schema, kSchemaVersion));
    }

    ExperimentConfig cfg;
    parse_class(require(doc, "", "class"), cfg);
    parse_strategy(require(doc, "", "strategy"), cfg);
    cfg.rounds = as_uint(require(doc, "", "rounds"), "rounds");
    cfg.batch = uint_or(doc, "", "batch", 1);
    cfg.initial = uint_or(doc, "", "initial", 0);
    if (doc.contains("splits")) {
        const auto& s = doc.at("splits");
        reject_unknown(s, "splits", {"eval_fraction", "test_fraction"});
        if (s.contains("eval_fraction")) cfg.splits.eval_fraction = as_real(s.at("eval_fraction"), "splits.eval_fraction");
        if (s.contains("test_fraction")) cfg.splits.test_fraction = as_real(s.at("test_fraction"), "splits.test_fraction");
    }
    if (doc.contains("prior")) {
        const auto prior = as_string(doc.at("prior"), "prior");
        if (prior == "uniform") cfg.prior = PriorKind::uniform;
        else if (prior == "random") cfg.prior = PriorKind::random;
        else throw ConfigError("prior", "expected \"uniform\" or \"random\"");
    }
    if (doc.contains("bias") && !doc.at("bias").is_null()) parse_bias(doc.at("bias"), cfg);

    const auto& seeds = require(doc, "", "seeds");
    if (!seeds.is_array()) throw ConfigError("seeds", "expected an array of integers");
    for (std::size_t i = 0; i < seeds.size(); ++i) cfg.seeds.push_back(as_uint(seeds[i], fmt::format("seeds[{}]", i)));
    std::set<std::uint64_t> unique(cfg.seeds.begin(), cfg.seeds.end());
    if (unique.size() != cfg.seeds.size()) throw ConfigError("seeds", "duplicate seed");

    cfg.output = as_string(require(doc, "", "output"), "output");
    cfg.log_sample_size = uint_or(doc, "", "log_sample_size", cfg.log_sample_size);
    if (doc.contains("record_timing")) cfg.record_timing = as_bool(doc.at("record_timing"), "record_timing");

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open config {}", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", fmt::format("invalid JSON in {}: {}", path.string(), e.what()));
    }
    return parse_experiment_config(doc);
}

json to_json(const ExperimentConfig& cfg) {
    json cls;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Thresholds>) {
                cls["kind"] = "thresholds";
                cls["n"] = k.n;
            } else if constexpr (std::is_same_v<T, Intervals>) {
                cls["kind"] = "intervals";
                cls["n"] = k.n;
            } else if constexpr (std::is_same_v<T, GridHalfspaces>) {
                cls["kind"] = "grid_halfspaces";
                cls["side"] = k.side;
                cls["count"] = k.count;
                if (cfg.class_seed_fixed) cls["seed"] = k.seed;
            } else {
                cls["kind"] = "random_class";
                cls["m"] = k.m;
                cls["n"] = k.n;
                cls["classes"] = k.classes;
                cls["realizable"] = k.realizable;
                if (cfg.class_seed_fixed) cls["seed"] = k.seed;
            }
        },
        cfg.class_spec.kind);
    if (cfg.class_spec.truth.row) cls["truth"] = *cfg.class_spec.truth.row;
    else cls["truth"] = "random";
    cls["max_hypotheses"] = cfg.class_spec.max_hypotheses;

    json strategy;
    strategy["name"] = std::string(strategy_name(cfg.strategy.kind));
    if (cfg.strategy.backend.kind == Backend::Kind::ensemble) {
        strategy["backend"] = "ensemble";
        strategy["ensemble_size"] = cfg.strategy.backend.ensemble_size;
    } else {
        strategy["backend"] = "exact";
    }
    strategy["refresh_mask"] = cfg.strategy.refresh_mask;

    json doc;
    doc["schema"] = kSchemaVersion;
    doc["class"] = cls;
    doc["strategy"] = strategy;
    doc["rounds"] = cfg.rounds;
    doc["batch"] = cfg.batch;
    doc["initial"] = cfg.initial;
    doc["splits"] = {{"eval_fraction", cfg.splits.eval_fraction}, {"test_fraction", cfg.splits.test_fraction}};
    doc["prior"] = cfg.prior == PriorKind::uniform ? "uniform" : "random";
    if (cfg.bias) {
        json bias;
        bias["radius"] = cfg.bias->radius;
        if (!cfg.bias->steps.empty()) {
            json steps = json::array();
            for (const auto& [at, r] : cfg.bias->steps) steps.push_back({at, r});
            bias["steps"] = steps;
        }
        if (cfg.bias->linear_until) bias["linear_until"] = *cfg.bias->linear_until;
        doc["bias"] = bias;
    }
    doc["seeds"] = cfg.seeds;
    doc["output"] = cfg.output.string();
    doc["log_sample_size"] = cfg.log_sample_size;
    doc["record_timing"] = cfg.record_timing;
    return doc;
}

} // namespace vsal
