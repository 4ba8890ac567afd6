#include "vsal/labeling_io.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "vsal/error.hpp"

namespace vsal {

namespace {

// Next non-blank line; false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

template <typename T>
std::vector<T> parse_fields(const std::string& line, std::size_t line_no, std::size_t expected) {
    std::istringstream ss(line);
    std::vector<T> out;
    out.reserve(expected);
    T value{};
    while (ss >> value) out.push_back(value);
    if (!ss.eof()) {
        throw ParseError(fmt::format("line {}: malformed number", line_no));
    }
    if (out.size() != expected) {
        throw ParseError(fmt::format("line {}: expected {} fields, found {}", line_no, expected, out.size()));
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(fmt::format("cannot open {}", path.string()));
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    return out;
}

} // namespace

LabelingMatrix read_labeling_matrix(std::istream& labels, std::istream* probs) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(labels, line, line_no)) throw ParseError("empty labeling matrix file");
    const auto header = parse_fields<long long>(line, line_no, 3);
    if (header[0] <= 0 || header[1] <= 0 || header[2] < 2 ||
        header[2] > std::numeric_limits<Label>::max()) {
        throw ParseError(fmt::format("line {}: invalid header '{} {} {}'", line_no, header[0], header[1], header[2]));
    }
    const auto m = static_cast<std::size_t>(header[0]);
    const auto n = static_cast<std::size_t>(header[1]);
    const auto c = static_cast<Label>(header[2]);

    std::vector<Label> values;
    values.reserve(m * n);
    for (std::size_t h = 0; h < m; ++h) {
        if (!next_line(labels, line, line_no)) {
            throw ParseError(fmt::format("expected {} hypothesis rows, found {}", m, h));
        }
        for (auto v : parse_fields<long long>(line, line_no, n)) {
            if (v < 0 || v >= c) {
                throw ParseError(fmt::format("line {}: label {} outside [0, {})", line_no, v, c));
            }
            values.push_back(static_cast<Label>(v));
        }
    }
    if (next_line(labels, line, line_no)) {
        throw ParseError(fmt::format("line {}: trailing content after {} rows", line_no, m));
    }

    std::optional<std::vector<double>> soft;
    if (probs != nullptr) {
        std::vector<double> p;
        p.reserve(m * n * static_cast<std::size_t>(c));
        std::size_t prob_line = 0;
        for (std::size_t i = 0; i < m * n; ++i) {
            if (!next_line(*probs, line, prob_line)) {
                throw ParseError(fmt::format("probability file: expected {} lines, found {}", m * n, i));
            }
            for (double v : parse_fields<double>(line, prob_line, static_cast<std::size_t>(c))) p.push_back(v);
        }
        if (next_line(*probs, line, prob_line)) {
            throw ParseError(fmt::format("probability file line {}: trailing content", prob_line));
        }
        soft = std::move(p);
    }
    return LabelingMatrix(m, n, c, std::move(values), std::move(soft));
}

LabelingMatrix load_labeling_matrix(const std::filesystem::path& labels,
                                    const std::optional<std::filesystem::path>& probs) {
    auto in = open_input(labels);
    if (probs) {
        auto pin = open_input(*probs);
        return read_labeling_matrix(in, &pin);
    }
    return read_labeling_matrix(in);
}

void write_labeling_matrix(std::ostream& out, const LabelingMatrix& labelings) {
    out << labelings.num_hypotheses() << ' ' << labelings.num_items() << ' '
        << labelings.num_classes() << '\n';
    for (HypothesisIndex h = 0; h < labelings.num_hypotheses(); ++h) {
        const auto row = labelings.row(h);
        for (std::size_t x = 0; x < row.size(); ++x) {
            if (x) out << ' ';
            out << row[x];
        }
        out << '\n';
    }
}

void write_probability_sidecar(std::ostream& out, const LabelingMatrix& labelings) {
    if (!labelings.has_soft_probs()) return;
    for (HypothesisIndex h = 0; h < labelings.num_hypotheses(); ++h) {
        for (ItemIndex x = 0; x < labelings.num_items(); ++x) {
            for (Label y = 0; y < labelings.num_classes(); ++y) {
                if (y) out << ' ';
                out << fmt::format("{:.17g}", labelings.prob(h, x, y));
            }
            out << '\n';
        }
    }
}

void save_labeling_matrix(const std::filesystem::path& labels, const LabelingMatrix& labelings,
                          const std::optional<std::filesystem::path>& probs) {
    auto out = open_output(labels);
    write_labeling_matrix(out, labelings);
    if (probs && labelings.has_soft_probs()) {
        auto pout = open_output(*probs);
        write_probability_sidecar(pout, labelings);
    }
}

QuerySet read_query_set(std::istream& in) {
    QuerySet q;
    std::string line;
    std::size_t line_no = 0;
    while (next_line(in, line, line_no)) {
        const auto fields = parse_fields<long long>(line, line_no, 2);
        if (fields[0] < 0 || fields[1] < 0) {
            throw ParseError(fmt::format("line {}: negative item or label", line_no));
        }
        try {
            q.add(static_cast<ItemIndex>(fields[0]), static_cast<Label>(fields[1]));
        } catch (const InvalidQuery& e) {
            throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
        }
    }
    return q;
}

QuerySet load_query_set(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_query_set(in);
}

} // namespace vsal
