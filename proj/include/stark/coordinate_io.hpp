#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stark/block_matrix.hpp"
#include "stark/dense.hpp"

namespace stark::blockmat {

struct CoordinateFile {
  std::vector<CoordinateEntry> entries;
  /// Dimension hint from a `# stark-matrix n=<dim>` header, when present.
  std::optional<std::int64_t> n_hint;
};

/// Reads a coordinate matrix file: one `row col value` triple per line,
/// 0-based indices, decimal or scientific values, `#` lines ignored.
CoordinateFile read_coordinate_file(const std::string& path);

/// Writes entries sorted by (row, col), exact zeros omitted, with a
/// `# stark-matrix n=<n>` header so readers can recover the dimension.
/// Output is byte-deterministic for a given (n, entries).
void write_coordinate_file(const std::string& path, std::int64_t n,
                           std::span<const CoordinateEntry> entries);

void write_coordinate_file(const std::string& path, const DenseMatrix& m);

}  // namespace stark::blockmat
