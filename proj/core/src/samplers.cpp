#include "vsal/samplers.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "vsal/error.hpp"
#include "vsal/random.hpp"

namespace vsal {

namespace {

template <typename... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_scale(const ClassSpec& spec, std::size_t m, std::size_t n) {
    if (m > spec.max_hypotheses) {
        throw InvalidArgument(fmt::format("{} hypotheses exceed the limit of {}", m, spec.max_hypotheses));
    }
    if (n != 0 && m > spec.max_entries / n) {
        throw InvalidArgument(fmt::format("{} x {} labeling matrix exceeds the limit of {} entries",
                                          m, n, spec.max_entries));
    }
}

// Keeps first occurrences of each row.
std::vector<Label> deduplicate_rows(const std::vector<Label>& labels, std::size_t n, std::size_t& rows) {
    std::set<std::vector<Label>> seen;
    std::vector<Label> out;
    out.reserve(labels.size());
    std::size_t kept = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<Label> row(labels.begin() + static_cast<std::ptrdiff_t>(r * n),
                               labels.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
        if (seen.insert(row).second) {
            out.insert(out.end(), row.begin(), row.end());
            ++kept;
        }
    }
    rows = kept;
    return out;
}

GeneratedClass plant_truth(LabelingMatrix labelings, const TruthRule& truth) {
    HypothesisIndex row = 0;
    if (truth.row) {
        row = *truth.row;
        if (row >= labelings.num_hypotheses()) {
            throw InvalidArgument(fmt::format("truth row {} out of range (M = {})", row, labelings.num_hypotheses()));
        }
    } else {
        Rng rng(derive_seed(truth.seed, 0x7275746855ULL));
        row = rng.below(labelings.num_hypotheses());
    }
    auto bayes = BayesLabeling::from_row(labelings, row);
    return {std::move(labelings), std::move(bayes), row};
}

std::size_t parse_count(std::string_view text, std::string_view what) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(fmt::format("class spec: '{}' is not a valid {}", text, what));
    }
    return value;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

std::string ClassSpec::describe() const {
    return std::visit(Overloaded{
                          [](const Thresholds& t) { return fmt::format("thresholds({})", t.n); },
                          [](const Intervals& t) { return fmt::format("intervals({})", t.n); },
                          [](const GridHalfspaces& g) {
                              return fmt::format("grid_halfspaces({},{},seed={})", g.side, g.count, g.seed);
                          },
                          [](const RandomClass& r) {
                              return fmt::format("random_class({},{},{},seed={},realizable={})", r.m, r.n,
                                                 r.classes, r.seed, r.realizable ? 1 : 0);
                          },
                      },
                      kind);
}

std::size_t ClassSpec::num_items() const {
    return std::visit(Overloaded{
                          [](const Thresholds& t) { return t.n; },
                          [](const Intervals& t) { return t.n; },
                          [](const GridHalfspaces& g) { return g.side * g.side; },
                          [](const RandomClass& r) { return r.n; },
                      },
                      kind);
}

GeneratedClass build_class(const ClassSpec& spec) {
    if (const auto* t = std::get_if<Thresholds>(&spec.kind)) {
        if (t->n == 0) throw InvalidArgument("thresholds need at least one item");
        const std::size_t n = t->n, m = n + 1;
        check_scale(spec, m, n);
        std::vector<Label> labels(m * n, 0);
        for (std::size_t row = 0; row < m; ++row) {
            for (std::size_t i = n - row; i < n; ++i) labels[row * n + i] = 1;
        }
        return plant_truth(LabelingMatrix(m, n, 2, std::move(labels)), spec.truth);
    }

    if (const auto* t = std::get_if<Intervals>(&spec.kind)) {
        if (t->n == 0) throw InvalidArgument("intervals need at least one item");
        const std::size_t n = t->n;
        if (n > 1u << 16) throw InvalidArgument("interval class too large");
        const std::size_t m = n * (n + 1) / 2 + 1;
        check_scale(spec, m, n);
        std::vector<Label> labels(m * n, 0);
        std::size_t row = 1;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b, ++row) {
                for (std::size_t i = a; i <= b; ++i) labels[row * n + i] = 1;
            }
        }
        return plant_truth(LabelingMatrix(m, n, 2, std::move(labels)), spec.truth);
    }

    if (const auto* g = std::get_if<GridHalfspaces>(&spec.kind)) {
        if (g->side < 2 || g->count == 0) throw InvalidArgument("grid halfspaces need side >= 2 and count >= 1");
        const std::size_t n = g->side * g->side;
        check_scale(spec, g->count, n);
        Rng rng(g->seed);
        std::vector<Label> labels;
        labels.reserve(g->count * n);
        const double step = 1.0 / static_cast<double>(g->side - 1);
        for (std::size_t s = 0; s < g->count; ++s) {
            const double angle = 2.0 * std::numbers::pi * rng.uniform01();
            const double cx = rng.uniform01(), cy = rng.uniform01();
            const double wx = std::cos(angle), wy = std::sin(angle);
            for (std::size_t i = 0; i < g->side; ++i) {
                for (std::size_t j = 0; j < g->side; ++j) {
                    const double px = static_cast<double>(i) * step, py = static_cast<double>(j) * step;
                    labels.push_back((px - cx) * wx + (py - cy) * wy >= 0.0 ? 1 : 0);
                }
            }
        }
        std::size_t rows = g->count;
        auto unique = deduplicate_rows(labels, n, rows);
        return plant_truth(LabelingMatrix(rows, n, 2, std::move(unique)), spec.truth);
    }

    const auto& r = std::get<RandomClass>(spec.kind);
    if (r.m == 0 || r.n == 0 || r.classes < 2) {
        throw InvalidArgument("random class needs M >= 1, N >= 1, C >= 2");
    }
    check_scale(spec, r.m, r.n);
    Rng rng(r.seed);
    const auto classes = static_cast<std::size_t>(r.classes);
    std::vector<Label> labels(r.m * r.n);
    for (auto& y : labels) y = static_cast<Label>(rng.below(classes));
    std::size_t rows = r.m;
    auto unique = deduplicate_rows(labels, r.n, rows);
    LabelingMatrix matrix(rows, r.n, r.classes, std::move(unique));

    if (r.realizable) return plant_truth(std::move(matrix), spec.truth);

    Rng truth_rng(derive_seed(spec.truth.seed, 0x6f75747369ULL));
    std::vector<Label> truth(r.n);
    for (auto& y : truth) y = static_cast<Label>(truth_rng.below(classes));
    std::optional<HypothesisIndex> row;
    for (HypothesisIndex h = 0; h < matrix.num_hypotheses(); ++h) {
        if (std::equal(truth.begin(), truth.end(), matrix.row(h).begin())) {
            row = h;
            break;
        }
    }
    return {std::move(matrix), BayesLabeling(std::move(truth)), row};
}

ClassSpec parse_class_spec(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw ParseError(fmt::format("class spec '{}' must look like name(arg,...)", text));
    }
    const auto name = trim(text.substr(0, open));
    auto body = text.substr(open + 1, text.size() - open - 2);

    std::vector<std::string_view> positional;
    std::map<std::string, std::string_view, std::less<>> named;
    while (!body.empty()) {
        const auto comma = body.find(',');
        auto field = trim(body.substr(0, comma));
        body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
        if (field.empty()) throw ParseError(fmt::format("class spec '{}' has an empty argument", text));
        const auto eq = field.find('=');
        if (eq == std::string_view::npos) {
            if (!named.empty()) throw ParseError("class spec: positional argument after named argument");
            positional.push_back(field);
        } else {
            named.emplace(std::string(trim(field.substr(0, eq))), trim(field.substr(eq + 1)));
        }
    }

    auto take = [&](std::size_t pos, std::string_view key, std::optional<std::size_t> fallback) -> std::size_t {
        if (pos < positional.size()) return parse_count(positional[pos], key);
        if (auto it = named.find(key); it != named.end()) {
            const auto v = parse_count(it->second, key);
            named.erase(it);
            return v;
        }
        if (fallback) return *fallback;
        throw ParseError(fmt::format("class spec '{}' is missing '{}'", text, key));
    };

    ClassSpec spec;
    std::size_t expected_positional = 0;
    if (name == "thresholds") {
        spec.kind = Thresholds{take(0, "n", std::nullopt)};
        expected_positional = 1;
    } else if (name == "intervals") {
        spec.kind = Intervals{take(0, "n", std::nullopt)};
        expected_positional = 1;
    } else if (name == "grid_halfspaces") {
        GridHalfspaces g;
        g.side = take(0, "side", std::nullopt);
        g.count = take(1, "count", std::nullopt);
        g.seed = take(2, "seed", 0);
        spec.kind = g;
        expected_positional = 3;
    } else if (name == "random_class") {
        RandomClass r;
        r.m = take(0, "m", std::nullopt);
        r.n = take(1, "n", std::nullopt);
        r.classes = static_cast<Label>(take(2, "c", 2));
        r.seed = take(3, "seed", 0);
        r.realizable = take(4, "realizable", 1) != 0;
        spec.kind = r;
        expected_positional = 5;
    } else {
        throw ParseError(fmt::format("unknown hypothesis class '{}'", name));
    }
    if (positional.size() > expected_positional) {
        throw ParseError(fmt::format("class spec '{}' has too many arguments", text));
    }
    if (auto it = named.find("truth"); it != named.end()) {
        spec.truth.row = parse_count(it->second, "truth");
        named.erase(it);
    }
    if (auto it = named.find("truth_seed"); it != named.end()) {
        spec.truth.seed = parse_count(it->second, "truth_seed");
        named.erase(it);
    }
    if (!named.empty()) {
        throw ParseError(fmt::format("class spec '{}' has unknown argument '{}'", text, named.begin()->first));
    }
    return spec;
}

void BiasSpec::validate() const {
    if (!(radius >= 0.0 && radius <= 1.0)) throw InvalidArgument("bias radius must lie in [0, 1]");
    if (!steps.empty() && linear_until) {
        throw InvalidArgument("bias decay takes either steps or linear_until, not both");
    }
    double previous = radius;
    std::size_t previous_at = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& [at, r] = steps[i];
        if (i > 0 && at <= previous_at) throw InvalidArgument("bias steps must have increasing label counts");
        if (!(r >= 0.0 && r <= previous)) throw InvalidArgument("bias radius must be non-increasing");
        previous = r;
        previous_at = at;
    }
    if (linear_until && *linear_until == 0) throw InvalidArgument("linear_until must be positive");
}

double BiasSpec::radius_at(std::size_t labels_queried, std::size_t pool_size) const {
    if (labels_queried >= pool_size) return 0.0;
    if (linear_until) {
        if (labels_queried >= *linear_until) return 0.0;
        return radius * (1.0 - static_cast<double>(labels_queried) / static_cast<double>(*linear_until));
    }
    double r = radius;
    for (const auto& [at, value] : steps) {
        if (labels_queried >= at) r = value;
    }
    return r;
}

VersionSpaceMask biased_mask(const VersionSpaceMask& mask, const LabelingMatrix& labelings,
                             const BayesLabeling& bayes, const BiasSpec& bias,
                             std::size_t labels_queried, std::size_t pool_size,
                             const ItemDistribution& dist) {
    if (mask.empty()) throw EmptyVersionSpace("biased sampler needs a nonempty version space");
    if (mask.size() != labelings.num_hypotheses()) throw InvalidArgument("mask size does not match the matrix");
    bayes.validate(labelings);

    const double r = bias.radius_at(labels_queried, pool_size);
    if (!(r > 0.0)) return mask;

    std::vector<std::uint8_t> bits(mask.size(), 0);
    bool any_kept = false;
    std::optional<HypothesisIndex> nearest_wrong;
    double nearest_wrong_d = 0.0;
    std::optional<HypothesisIndex> nearest;
    for (HypothesisIndex h = 0; h < mask.size(); ++h) {
        if (!mask.contains(h)) continue;
        const double d = disagreement(labelings.row(h), bayes.labels(), dist);
        if (!nearest) nearest = h;
        if (d >= r) {
            bits[h] = 1;
            any_kept = true;
        } else if (d > 0.0 && (!nearest_wrong || d < nearest_wrong_d)) {
            nearest_wrong = h;
            nearest_wrong_d = d;
        }
    }
    if (!any_kept) bits[nearest_wrong ? *nearest_wrong : *nearest] = 1;
    return VersionSpaceMask(std::move(bits));
}

} // namespace vsal
