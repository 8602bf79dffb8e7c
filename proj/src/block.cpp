#include "stark/block.hpp"

#include <string>

namespace stark::blockmat {

const char* label_name(MatLabel label) {
  switch (label) {
    case MatLabel::A: return "A";
    case MatLabel::B: return "B";
    case MatLabel::M: return "M";
    case MatLabel::C: return "C";
  }
  return "?";
}

const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::q11: return "Q11";
    case Quadrant::q12: return "Q12";
    case Quadrant::q21: return "Q21";
    case Quadrant::q22: return "Q22";
  }
  return "?";
}

std::uint64_t pow7(int exponent) {
  std::uint64_t v = 1;
  for (int i = 0; i < exponent; ++i) v *= 7;
  return v;
}

Block make_block(std::int32_t row, std::int32_t col, Tag tag, std::int32_t side,
                 Payload payload) {
  if (side <= 0 || !is_power_of_two(static_cast<std::uint64_t>(side)))
    throw std::invalid_argument("block side must be a power of two >= 1");
  if (payload.size() != static_cast<std::size_t>(side) * side)
    throw std::invalid_argument("block payload size does not match side");
  if (row < 0 || col < 0) throw std::invalid_argument("block indices must be non-negative");
  return Block{row, col, tag, side, std::make_shared<const Payload>(std::move(payload))};
}

Block zero_block(std::int32_t row, std::int32_t col, Tag tag, std::int32_t side) {
  return make_block(row, col, tag, side, Payload(static_cast<std::size_t>(side) * side, 0.0));
}

Quadrant quadrant_of(std::int32_t row, std::int32_t col, std::int32_t half_in_blocks) {
  if (half_in_blocks <= 0) throw std::invalid_argument("half_in_blocks must be positive");
  if (row < 0 || col < 0 || row >= 2 * half_in_blocks || col >= 2 * half_in_blocks)
    throw std::out_of_range("block position outside the 2h x 2h grid");
  const bool lower = row >= half_in_blocks;
  const bool right = col >= half_in_blocks;
  if (!lower && !right) return Quadrant::q11;
  if (!lower && right) return Quadrant::q12;
  if (lower && !right) return Quadrant::q21;
  return Quadrant::q22;
}

Quadrant quadrant_of(const Block& block, std::int32_t half_in_blocks) {
  return quadrant_of(block.row, block.col, half_in_blocks);
}

std::pair<std::int32_t, std::int32_t> local_position(const Block& block,
                                                     std::int32_t half_in_blocks) {
  quadrant_of(block, half_in_blocks);  // bounds check
  return {block.row % half_in_blocks, block.col % half_in_blocks};
}

namespace {
void check_compatible(const Block& a, const Block& b) {
  if (a.side != b.side)
    throw std::invalid_argument("block arithmetic: side mismatch (" +
                                std::to_string(a.side) + " vs " + std::to_string(b.side) + ")");
  if (a.row != b.row || a.col != b.col)
    throw std::invalid_argument("block arithmetic: position mismatch");
}
}  // namespace

Block block_add(const Block& a, const Block& b) {
  check_compatible(a, b);
  Payload out(a.data->size());
  kernels::active().add(a.data->data(), b.data->data(), out.data(), out.size());
  return Block{a.row, a.col, a.tag, a.side, std::make_shared<const Payload>(std::move(out))};
}

Block block_sub(const Block& a, const Block& b) {
  check_compatible(a, b);
  Payload out(a.data->size());
  kernels::active().sub(a.data->data(), b.data->data(), out.data(), out.size());
  return Block{a.row, a.col, a.tag, a.side, std::make_shared<const Payload>(std::move(out))};
}

}  // namespace stark::blockmat
