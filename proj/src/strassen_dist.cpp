#include "stark/strassen_dist.hpp"

#include <string>
#include <tuple>

#include "stark/serial.hpp"

namespace stark::strassen {

using blockmat::Block;
using blockmat::MatLabel;
using blockmat::Payload;
using blockmat::Quadrant;
using blockmat::Tag;

/// A block routed towards a signed sum. `source` disambiguates members of one
/// group: the source quadrant during divide, the M slot during combine.
struct RoutedBlock {
  std::int8_t sign = +1;
  std::int8_t source = 0;
  Block block;
};

inline std::uint64_t scalar_volume(const RoutedBlock& r) { return r.block.volume(); }

inline bool canonical_less(const RoutedBlock& x, const RoutedBlock& y) {
  if (blockmat::canonical_less(x.block, y.block)) return true;
  if (blockmat::canonical_less(y.block, x.block)) return false;
  return x.source < y.source;
}

namespace {

// (child m_index, local row, local col, side label)
using DivKey = std::tuple<std::uint64_t, std::int32_t, std::int32_t, std::uint8_t>;
// (parent m_index, row, col) in the doubled grid
using CombKey = std::tuple<std::uint64_t, std::int32_t, std::int32_t>;

Block signed_sum(const std::vector<RoutedBlock>& members, std::int32_t row, std::int32_t col,
                 Tag tag) {
  const Block& first = members.front().block;
  Payload out(first.data->size(), 0.0);
  const auto& ops = kernels::active();
  for (const RoutedBlock& m : members) {
    if (m.block.side != first.side)
      throw std::invalid_argument("signed sum over mismatched block sides");
    if (m.sign > 0)
      ops.acc(out.data(), m.block.data->data(), out.size());
    else
      ops.acc_neg(out.data(), m.block.data->data(), out.size());
  }
  return Block{row, col, tag, first.side,
               std::make_shared<const Payload>(std::move(out))};
}

Block multiply_pair(const Block& a, const Block& b, LeafKernel kernel, std::uint64_t m) {
  if (a.side != b.side)
    throw std::invalid_argument("leaf multiply: mismatched block sides");
  Payload c;
  if (kernel == LeafKernel::naive) {
    c.assign(a.data->size(), 0.0);
    kernels::active().gemm_acc(a.data->data(), b.data->data(), c.data(), a.side);
  } else {
    const int threshold = std::min(serial::kDefaultStrassenThreshold, static_cast<int>(a.side));
    DenseMatrix prod = serial::serial_strassen(DenseMatrix(a.side, *a.data),
                                               DenseMatrix(b.side, *b.data), threshold);
    c = prod.values();
  }
  return Block{0, 0, Tag{MatLabel::M, m}, a.side,
               std::make_shared<const Payload>(std::move(c))};
}

}  // namespace

std::vector<ReplicatedCopy> replicated_copies(const Block& block,
                                              std::int32_t half_in_blocks) {
  if (block.tag.label != MatLabel::A && block.tag.label != MatLabel::B)
    throw std::invalid_argument("div_n_rep: block with label M or C encountered");
  const Quadrant q = blockmat::quadrant_of(block, half_in_blocks);
  const auto [lr, lc] = blockmat::local_position(block, half_in_blocks);
  std::vector<ReplicatedCopy> out;
  for (const ReplicationTarget& t : replication_targets(block.tag.label, q)) {
    const std::uint64_t child = blockmat::child_m_index(block.tag.m_index, t.slot);
    out.push_back(ReplicatedCopy{Block{lr, lc, Tag{block.tag.label, child}, block.side,
                                       block.data},
                                 t.sign, q});
  }
  return out;
}

BlockDataset div_n_rep(BlockDataset level_input, std::int32_t grid_in_blocks,
                       const std::string& stage_label) {
  if (grid_in_blocks < 2)
    throw std::invalid_argument("div_n_rep: sub-matrix side must be at least 2 blocks");
  const std::int32_t half = grid_in_blocks / 2;

  auto routed = level_input.flat_map([half](Block&& blk) {
    std::vector<std::pair<DivKey, RoutedBlock>> out;
    for (ReplicatedCopy& copy : replicated_copies(blk, half)) {
      const std::uint64_t child = copy.block.tag.m_index;
      const std::uint8_t side = static_cast<std::uint8_t>(copy.block.tag.label);
      out.emplace_back(DivKey{child, copy.block.row, copy.block.col, side},
                       RoutedBlock{copy.sign, static_cast<std::int8_t>(copy.source),
                                   std::move(copy.block)});
    }
    return out;
  });

  auto grouped = routed.group_by_key(stage_label);
  return grouped.map([](auto&& group) {
    const auto& [key, members] = group;
    const auto [child, row, col, label_raw] = key;
    const MatLabel label = static_cast<MatLabel>(label_raw);
    const int expected = expected_operand_contributors(label, blockmat::m_slot(child));
    if (static_cast<int>(members.size()) != expected)
      throw std::runtime_error("div_n_rep: operand group for M" +
                               std::to_string(blockmat::m_slot(child) + 1) + " side " +
                               blockmat::label_name(label) + " has " +
                               std::to_string(members.size()) + " of " +
                               std::to_string(expected) + " contributors");
    return signed_sum(members, row, col, Tag{label, child});
  });
}

BlockDataset mul_block_mat(BlockDataset leaves, LeafKernel kernel, LeafCounter counter) {
  auto paired = leaves.map_to_pair([](Block&& blk) {
    if (blk.tag.label != MatLabel::A && blk.tag.label != MatLabel::B)
      throw std::invalid_argument("mul_block_mat: block with label M or C encountered");
    if (blk.row != 0 || blk.col != 0)
      throw std::invalid_argument("mul_block_mat: sub-matrix wider than one block");
    return std::pair<std::uint64_t, Block>(blk.tag.m_index, std::move(blk));
  });

  auto grouped = paired.group_by_key("leaf");
  return grouped.map([kernel, counter](auto&& group) {
    auto& [m, members] = group;
    if (members.size() != 2 || members[0].tag.label != MatLabel::A ||
        members[1].tag.label != MatLabel::B)
      throw std::runtime_error("mul_block_mat: key " + std::to_string(m) +
                               " does not pair one A with one B block");
    Block product = multiply_pair(members[0], members[1], kernel, m);
    if (counter) counter->fetch_add(1, std::memory_order_relaxed);
    return product;
  });
}

BlockDataset combine(BlockDataset m_blocks, int level, std::int32_t grid_in_blocks) {
  if (level < 1) throw std::invalid_argument("combine: level must be >= 1");
  const std::uint64_t tag_space = blockmat::pow7(level);
  const std::int32_t grid = grid_in_blocks;
  const MatLabel out_label = level == 1 ? MatLabel::C : MatLabel::M;

  auto routed = m_blocks.flat_map([tag_space, grid](Block&& blk) {
    if (blk.tag.label != MatLabel::M)
      throw std::invalid_argument("combine: expected M-labelled blocks");
    if (blk.tag.m_index >= tag_space)
      throw std::invalid_argument("combine: m_index out of range for this level");
    const int slot = blockmat::m_slot(blk.tag.m_index);
    const std::uint64_t parent = blockmat::parent_m_index(blk.tag.m_index);
    std::vector<std::pair<CombKey, RoutedBlock>> out;
    for (const CombineTarget& t : combine_targets(slot)) {
      const std::int32_t pr = blk.row + blockmat::quadrant_row_offset(t.quadrant) * grid;
      const std::int32_t pc = blk.col + blockmat::quadrant_col_offset(t.quadrant) * grid;
      out.emplace_back(CombKey{parent, pr, pc},
                       RoutedBlock{t.sign, static_cast<std::int8_t>(slot), blk});
    }
    return out;
  });

  auto grouped = routed.group_by_key("combine-L" + std::to_string(level));
  return grouped.map([grid, out_label](auto&& group) {
    const auto& [key, members] = group;
    const auto [parent, row, col] = key;
    const Quadrant q = blockmat::quadrant_of(row, col, grid);
    const int expected = expected_combine_contributors(q);
    if (static_cast<int>(members.size()) != expected)
      throw std::runtime_error("combine: block (" + std::to_string(row) + "," +
                               std::to_string(col) + ") of " + blockmat::quadrant_name(q) +
                               " has " + std::to_string(members.size()) + " of " +
                               std::to_string(expected) + " contributors");
    return signed_sum(members, row, col, Tag{out_label, parent});
  });
}

DistOutcome dist_strassen(dataflow::Engine& engine, const blockmat::BlockMatrix& a,
                          const blockmat::BlockMatrix& b, LeafKernel kernel) {
  if (a.n() != b.n() || a.block_size() != b.block_size())
    throw std::invalid_argument("dist_strassen: dimension/blocking mismatch");

  const std::int32_t splits = a.splits();
  const int levels = log2_exact(static_cast<std::uint64_t>(splits));

  auto current = engine.source(a.blocks()).union_with(engine.source(b.blocks()));
  std::int32_t grid = splits;
  for (int lvl = 0; lvl < levels; ++lvl) {
    current = div_n_rep(current, grid, "divide-L" + std::to_string(lvl));
    grid /= 2;
  }

  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);
  auto products = mul_block_mat(current, kernel, counter);

  for (int lvl = levels; lvl >= 1; --lvl) products = combine(products, lvl, splits >> lvl);

  if (levels == 0) {
    products = products.map([](Block&& blk) {
      blk.tag.label = MatLabel::C;
      return std::move(blk);
    });
  }

  auto blocks = products.collect("emit");
  blockmat::BlockMatrix product(a.n(), a.block_size(), std::move(blocks));
  return DistOutcome{std::move(product), counter->load()};
}

}  // namespace stark::strassen
