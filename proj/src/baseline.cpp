#include "stark/baseline.hpp"

#include <atomic>
#include <memory>
#include <string>
#include <tuple>

namespace stark::baseline {

using blockmat::Block;
using blockmat::MatLabel;
using blockmat::Payload;
using blockmat::Tag;

/// One replicated operand inside a cogroup destination group.
struct Operand {
  std::uint8_t side = 0;  // 0 = A, 1 = B
  std::int32_t k = 0;
  Block block;
};

inline std::uint64_t scalar_volume(const Operand& o) { return o.block.volume(); }
inline bool canonical_less(const Operand& x, const Operand& y) {
  return x.side != y.side ? x.side < y.side : x.k < y.k;
}

/// One A(i,k)*B(k,j) term awaiting the ascending-k reduction.
struct Partial {
  std::int32_t k = 0;
  Block block;
};

inline std::uint64_t scalar_volume(const Partial& p) { return p.block.volume(); }
inline bool canonical_less(const Partial& x, const Partial& y) { return x.k < y.k; }

namespace {

using JoinKey = std::tuple<std::int32_t, std::int32_t, std::int32_t>;  // (i, j, k)
using CellKey = std::pair<std::int32_t, std::int32_t>;                 // (i, j)

Block multiply_blocks(const Block& a, const Block& b, std::int32_t i, std::int32_t j) {
  if (a.side != b.side) throw std::invalid_argument("block multiply: side mismatch");
  Payload c(a.data->size(), 0.0);
  kernels::active().gemm_acc(a.data->data(), b.data->data(), c.data(), a.side);
  return Block{i, j, Tag{MatLabel::C, 0}, a.side,
               std::make_shared<const Payload>(std::move(c))};
}

Partial add_partials(Partial&& acc, Partial&& next) {
  Payload sum(acc.block.data->size());
  kernels::active().add(acc.block.data->data(), next.block.data->data(), sum.data(),
                        sum.size());
  acc.block.data = std::make_shared<const Payload>(std::move(sum));
  return std::move(acc);
}

BaselineOutcome run_replicate_join(dataflow::Engine& engine, const blockmat::BlockMatrix& a,
                                   const blockmat::BlockMatrix& b) {
  const std::int32_t splits = a.splits();
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);

  auto rep_a = engine.source(a.blocks()).flat_map([splits](Block&& blk) {
    std::vector<std::pair<JoinKey, Block>> out;
    out.reserve(splits);
    for (std::int32_t j = 0; j < splits; ++j)
      out.emplace_back(JoinKey{blk.row, j, blk.col}, blk);
    return out;
  });
  auto rep_b = engine.source(b.blocks()).flat_map([splits](Block&& blk) {
    std::vector<std::pair<JoinKey, Block>> out;
    out.reserve(splits);
    for (std::int32_t i = 0; i < splits; ++i)
      out.emplace_back(JoinKey{i, blk.col, blk.row}, blk);
    return out;
  });

  auto joined = rep_a.union_with(rep_b).group_by_key("join");
  auto partials = joined.map([counter](auto&& group) {
    auto& [key, members] = group;
    const auto [i, j, k] = key;
    if (members.size() != 2 || members[0].tag.label != MatLabel::A ||
        members[1].tag.label != MatLabel::B)
      throw std::runtime_error("join group (" + std::to_string(i) + "," + std::to_string(j) +
                               "," + std::to_string(k) + ") is not an A/B pair");
    counter->fetch_add(1, std::memory_order_relaxed);
    return std::pair<CellKey, Partial>(CellKey{i, j},
                                       Partial{k, multiply_blocks(members[0], members[1], i, j)});
  });

  auto reduced = partials.reduce_by_key(add_partials, "reduce");
  auto cells = reduced.map([](auto&& kv) { return std::move(kv.second.block); });
  auto blocks = cells.collect("emit");
  return BaselineOutcome{blockmat::BlockMatrix(a.n(), a.block_size(), std::move(blocks)),
                         counter->load()};
}

BaselineOutcome run_cogroup(dataflow::Engine& engine, const blockmat::BlockMatrix& a,
                            const blockmat::BlockMatrix& b) {
  const std::int32_t splits = a.splits();
  auto counter = std::make_shared<std::atomic<std::uint64_t>>(0);

  auto rep_a = engine.source(a.blocks()).flat_map([splits](Block&& blk) {
    std::vector<std::pair<CellKey, Operand>> out;
    out.reserve(splits);
    for (std::int32_t j = 0; j < splits; ++j)
      out.emplace_back(CellKey{blk.row, j}, Operand{0, blk.col, blk});
    return out;
  });
  auto rep_b = engine.source(b.blocks()).flat_map([splits](Block&& blk) {
    std::vector<std::pair<CellKey, Operand>> out;
    out.reserve(splits);
    for (std::int32_t i = 0; i < splits; ++i)
      out.emplace_back(CellKey{i, blk.col}, Operand{1, blk.row, blk});
    return out;
  });

  auto grouped = rep_a.union_with(rep_b).group_by_key("cogroup");
  auto partials = grouped.flat_map([splits, counter](auto&& group) {
    auto& [cell, members] = group;
    if (members.size() != 2 * static_cast<std::size_t>(splits))
      throw std::runtime_error("cogroup for (" + std::to_string(cell.first) + "," +
                               std::to_string(cell.second) + ") has " +
                               std::to_string(members.size()) + " operands, expected " +
                               std::to_string(2 * splits));
    // canonical order: A operands by k, then B operands by k
    std::vector<std::pair<CellKey, Partial>> out;
    out.reserve(splits);
    for (std::int32_t k = 0; k < splits; ++k) {
      const Operand& oa = members[static_cast<std::size_t>(k)];
      const Operand& ob = members[static_cast<std::size_t>(splits + k)];
      if (oa.side != 0 || ob.side != 1 || oa.k != k || ob.k != k)
        throw std::runtime_error("cogroup operands out of order");
      counter->fetch_add(1, std::memory_order_relaxed);
      out.emplace_back(cell, Partial{k, multiply_blocks(oa.block, ob.block, cell.first,
                                                        cell.second)});
    }
    return out;
  });

  auto reduced = partials.reduce_by_key(add_partials, "reduce");
  auto cells = reduced.map([](auto&& kv) { return std::move(kv.second.block); });
  auto blocks = cells.collect("emit");
  return BaselineOutcome{blockmat::BlockMatrix(a.n(), a.block_size(), std::move(blocks)),
                         counter->load()};
}

}  // namespace

BaselineOutcome naive_block_multiply(dataflow::Engine& engine, const blockmat::BlockMatrix& a,
                                     const blockmat::BlockMatrix& b, Strategy strategy) {
  if (a.n() != b.n() || a.block_size() != b.block_size())
    throw std::invalid_argument("naive_block_multiply: dimension/blocking mismatch");
  return strategy == Strategy::replicate_join ? run_replicate_join(engine, a, b)
                                              : run_cogroup(engine, a, b);
}

std::pair<std::uint64_t, std::uint64_t> replication_counts(Strategy, std::int32_t splits) {
  const std::uint64_t copies = static_cast<std::uint64_t>(splits) * splits * splits;
  return {copies, copies};
}

}  // namespace stark::baseline
