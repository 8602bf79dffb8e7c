#include "stark/block_matrix.hpp"

#include <algorithm>
#include <string>

namespace stark::blockmat {

BlockMatrix::BlockMatrix(std::int64_t n, std::int32_t block_size, std::vector<Block> blocks)
    : n_(n), block_size_(block_size), blocks_(std::move(blocks)) {
  if (n <= 0 || !is_power_of_two(static_cast<std::uint64_t>(n)))
    throw std::invalid_argument("matrix dimension must be a power of two");
  if (block_size <= 0 || !is_power_of_two(static_cast<std::uint64_t>(block_size)))
    throw std::invalid_argument("block size must be a power of two");
  if (block_size > n || n % block_size != 0)
    throw std::invalid_argument("block size must divide the matrix dimension");

  const std::int64_t b = n / block_size;
  if (blocks_.size() != static_cast<std::size_t>(b) * b)
    throw std::invalid_argument("expected " + std::to_string(b * b) + " blocks, got " +
                                std::to_string(blocks_.size()));
  std::sort(blocks_.begin(), blocks_.end(), [](const Block& x, const Block& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  for (std::int64_t i = 0; i < b * b; ++i) {
    const Block& blk = blocks_[static_cast<std::size_t>(i)];
    if (blk.row != i / b || blk.col != i % b)
      throw std::invalid_argument("missing or duplicate block position (" +
                                  std::to_string(i / b) + "," + std::to_string(i % b) + ")");
    if (blk.side != block_size)
      throw std::invalid_argument("block side does not match block_size");
  }
}

DenseMatrix BlockMatrix::to_dense() const {
  DenseMatrix out(static_cast<std::size_t>(n_));
  for (const Block& blk : blocks_) {
    const std::size_t r0 = static_cast<std::size_t>(blk.row) * block_size_;
    const std::size_t c0 = static_cast<std::size_t>(blk.col) * block_size_;
    for (std::int32_t r = 0; r < block_size_; ++r)
      for (std::int32_t c = 0; c < block_size_; ++c)
        out(r0 + r, c0 + c) = blk.at(r, c);
  }
  return out;
}

BlockMatrix from_coordinate_entries(std::span<const CoordinateEntry> entries,
                                    std::int64_t n, std::int32_t block_size,
                                    MatLabel label) {
  if (n <= 0 || !is_power_of_two(static_cast<std::uint64_t>(n)))
    throw std::invalid_argument("matrix dimension must be a power of two");
  if (block_size <= 0 || !is_power_of_two(static_cast<std::uint64_t>(block_size)))
    throw std::invalid_argument("block size must be a power of two");
  if (block_size > n) throw std::invalid_argument("block size exceeds matrix dimension");

  const std::int64_t b = n / block_size;
  const std::size_t area = static_cast<std::size_t>(block_size) * block_size;
  std::vector<Payload> tiles(static_cast<std::size_t>(b) * b, Payload(area, 0.0));
  std::vector<bool> seen(static_cast<std::size_t>(n) * n, false);

  for (const CoordinateEntry& e : entries) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n)
      throw std::out_of_range("coordinate entry (" + std::to_string(e.row) + "," +
                              std::to_string(e.col) + ") outside [0," + std::to_string(n) + ")");
    const std::size_t flat = static_cast<std::size_t>(e.row) * n + e.col;
    if (seen[flat])
      throw std::invalid_argument("duplicate coordinate entry (" + std::to_string(e.row) +
                                  "," + std::to_string(e.col) + ")");
    seen[flat] = true;
    const std::int64_t br = e.row / block_size, bc = e.col / block_size;
    tiles[static_cast<std::size_t>(br) * b + bc]
         [static_cast<std::size_t>(e.row % block_size) * block_size + (e.col % block_size)] =
        e.value;
  }

  std::vector<Block> blocks;
  blocks.reserve(tiles.size());
  for (std::int64_t i = 0; i < b * b; ++i)
    blocks.push_back(make_block(static_cast<std::int32_t>(i / b),
                                static_cast<std::int32_t>(i % b), Tag{label, 0},
                                block_size, std::move(tiles[static_cast<std::size_t>(i)])));
  return BlockMatrix(n, block_size, std::move(blocks));
}

}  // namespace stark::blockmat
