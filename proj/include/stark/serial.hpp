#pragma once

#include <cstdint>

#include "stark/dense.hpp"

namespace stark::serial {

/// Exact triple-loop product; every c[i][j] accumulates in ascending k.
DenseMatrix naive_multiply(const DenseMatrix& a, const DenseMatrix& b);

struct StrassenStats {
  std::uint64_t base_multiplies = 0;
  /// Half-size matrix additions/subtractions: 18 per split (10 operand
  /// sums, 8 combine sums).
  std::uint64_t block_additions = 0;
};

constexpr int kDefaultStrassenThreshold = 64;

/// Classic 7-product Strassen recursion down to `threshold`, then naive
/// multiply. n and threshold must be powers of two, threshold <= n.
DenseMatrix serial_strassen(const DenseMatrix& a, const DenseMatrix& b,
                            int threshold = kDefaultStrassenThreshold,
                            StrassenStats* stats = nullptr);

}  // namespace stark::serial
