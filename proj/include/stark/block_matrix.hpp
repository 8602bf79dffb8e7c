#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stark/block.hpp"
#include "stark/dense.hpp"

namespace stark::blockmat {

struct CoordinateEntry {
  std::int64_t row = 0;
  std::int64_t col = 0;
  double value = 0.0;
};

/// A materialized block-partitioned matrix: b x b tiles of a fixed power-of-two
/// side, each (row, col) present exactly once. Pipelines lift the blocks into
/// a Dataset; at rest they live here.
class BlockMatrix {
 public:
  BlockMatrix(std::int64_t n, std::int32_t block_size, std::vector<Block> blocks);

  std::int64_t n() const { return n_; }
  std::int32_t block_size() const { return block_size_; }
  std::int32_t splits() const { return static_cast<std::int32_t>(n_ / block_size_); }
  const std::vector<Block>& blocks() const { return blocks_; }

  DenseMatrix to_dense() const;

 private:
  std::int64_t n_ = 0;
  std::int32_t block_size_ = 0;
  std::vector<Block> blocks_;  // sorted by (row, col)
};

/// Scatter coordinate entries into a b x b grid of dense tiles. Entries
/// outside [0, n), duplicate (row, col) pairs, and non-power-of-two shapes
/// are rejected. Unspecified entries are zero; every tile is materialized.
BlockMatrix from_coordinate_entries(std::span<const CoordinateEntry> entries,
                                    std::int64_t n, std::int32_t block_size,
                                    MatLabel label = MatLabel::A);

}  // namespace stark::blockmat
