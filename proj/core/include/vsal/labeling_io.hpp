#pragma once

// Plain-text labeling matrix format.
//
//   line 1        : M N C
//   lines 2..M+1  : N space-separated integer labels for one hypothesis
//
// The optional probability sidecar holds M*N lines of C reals in row-major
// (hypothesis, item) order. Query files hold one "item label" pair per line.

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "vsal/core.hpp"

namespace vsal {

LabelingMatrix read_labeling_matrix(std::istream& labels, std::istream* probs = nullptr);
LabelingMatrix load_labeling_matrix(const std::filesystem::path& labels,
                                    const std::optional<std::filesystem::path>& probs = std::nullopt);

void write_labeling_matrix(std::ostream& out, const LabelingMatrix& labelings);
// Writes the probability sidecar; no-op content when the matrix has none.
void write_probability_sidecar(std::ostream& out, const LabelingMatrix& labelings);
void save_labeling_matrix(const std::filesystem::path& labels, const LabelingMatrix& labelings,
                          const std::optional<std::filesystem::path>& probs = std::nullopt);

QuerySet read_query_set(std::istream& in);
QuerySet load_query_set(const std::filesystem::path& path);

} // namespace vsal
