#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stark/dense.hpp"
#include "stark/kernels.hpp"

namespace stark::blockmat {

enum class MatLabel : std::uint8_t { A = 0, B = 1, M = 2, C = 3 };

const char* label_name(MatLabel label);

/// Position of a node in the Strassen recursion tree, encoded base 7:
/// the root is 0 and slot j (product M_{j+1}, j in 0..6) of node i is 7i + j.
/// Every index at depth d therefore lies in [0, 7^d).
struct Tag {
  MatLabel label = MatLabel::A;
  std::uint64_t m_index = 0;

  auto operator<=>(const Tag&) const = default;
};

inline std::uint64_t child_m_index(std::uint64_t parent, int slot) {
  return parent * 7 + static_cast<std::uint64_t>(slot);
}
inline std::uint64_t parent_m_index(std::uint64_t m) { return m / 7; }
inline int m_slot(std::uint64_t m) { return static_cast<int>(m % 7); }

std::uint64_t pow7(int exponent);

using Payload = std::vector<double>;
using PayloadPtr = std::shared_ptr<const Payload>;

/// One dense square tile plus its position in the current sub-matrix and its
/// recursion tag. Payloads are immutable and shared; arithmetic allocates.
struct Block {
  std::int32_t row = 0;
  std::int32_t col = 0;
  Tag tag;
  std::int32_t side = 0;
  PayloadPtr data;

  double at(std::int32_t r, std::int32_t c) const {
    return (*data)[static_cast<std::size_t>(r) * side + c];
  }
  std::uint64_t volume() const {
    return static_cast<std::uint64_t>(side) * static_cast<std::uint64_t>(side);
  }
};

Block make_block(std::int32_t row, std::int32_t col, Tag tag, std::int32_t side,
                 Payload payload);
Block zero_block(std::int32_t row, std::int32_t col, Tag tag, std::int32_t side);

enum class Quadrant : std::uint8_t { q11 = 0, q12 = 1, q21 = 2, q22 = 3 };

const char* quadrant_name(Quadrant q);
inline std::int32_t quadrant_row_offset(Quadrant q) {
  return (q == Quadrant::q21 || q == Quadrant::q22) ? 1 : 0;
}
inline std::int32_t quadrant_col_offset(Quadrant q) {
  return (q == Quadrant::q12 || q == Quadrant::q22) ? 1 : 0;
}

/// Quadrant of a position within a grid of side 2*half_in_blocks.
Quadrant quadrant_of(std::int32_t row, std::int32_t col, std::int32_t half_in_blocks);
/// Quadrant of a block within a sub-matrix of side 2*half_in_blocks.
Quadrant quadrant_of(const Block& block, std::int32_t half_in_blocks);
/// Position of the block within its quadrant: indices mod half_in_blocks.
std::pair<std::int32_t, std::int32_t> local_position(const Block& block,
                                                     std::int32_t half_in_blocks);

/// Elementwise sum / difference. Operands must agree on side and position;
/// the result keeps a's indices and tag (callers re-tag as needed).
Block block_add(const Block& a, const Block& b);
Block block_sub(const Block& a, const Block& b);

/// Payload volume; the dataflow engine charges this at shuffle boundaries.
inline std::uint64_t scalar_volume(const Block& b) { return b.volume(); }

/// Shuffle-group ordering contract: (label, m_index, row, col).
inline bool canonical_less(const Block& x, const Block& y) {
  if (x.tag.label != y.tag.label) return x.tag.label < y.tag.label;
  if (x.tag.m_index != y.tag.m_index) return x.tag.m_index < y.tag.m_index;
  if (x.row != y.row) return x.row < y.row;
  return x.col < y.col;
}

}  // namespace stark::blockmat
