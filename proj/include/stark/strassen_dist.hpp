#pragma once

#include <atomic>
#include <cstdint>
#include <memory>

#include "stark/block_matrix.hpp"
#include "stark/dataflow.hpp"
#include "stark/strassen_rules.hpp"

namespace stark::strassen {

enum class LeafKernel { naive, strassen };

struct DistOutcome {
  blockmat::BlockMatrix product;
  std::uint64_t leaf_multiplications = 0;
};

using BlockDataset = dataflow::Dataset<blockmat::Block>;
using LeafCounter = std::shared_ptr<std::atomic<std::uint64_t>>;

/// One block's replication fan-out in a divide round: the copies it
/// contributes to the seven child operands, with their signs and source
/// quadrant. Diagonal-quadrant blocks produce 4 copies, off-diagonal ones 2.
struct ReplicatedCopy {
  blockmat::Block block;  // re-indexed into the half grid, child m_index
  std::int8_t sign = +1;
  blockmat::Quadrant source = blockmat::Quadrant::q11;
};

std::vector<ReplicatedCopy> replicated_copies(const blockmat::Block& block,
                                              std::int32_t half_in_blocks);

/// One divide round: replicates each block of the level's A/B sub-matrices
/// into its seven product operands (signed, per the replication table),
/// shuffles on (child m_index, local position, side) and forms the operand
/// blocks as signed sums. `grid_in_blocks` is the current sub-matrix side in
/// blocks (must be >= 2). Closes one stage.
BlockDataset div_n_rep(BlockDataset level_input, std::int32_t grid_in_blocks,
                       const std::string& stage_label = "divide");

/// Pairs the leaf A/B operand blocks by m_index and multiplies each pair
/// serially. Closes one stage. Increments *counter per product if given.
BlockDataset mul_block_mat(BlockDataset leaves, LeafKernel kernel = LeafKernel::naive,
                           LeafCounter counter = nullptr);

/// One combine round from recursion level `level` (m_index < 7^level) to
/// level-1: routes each product block into its C quadrants with the combine
/// coefficients, shuffles on (parent m_index, position in the doubled grid)
/// and emits the signed sums. Blocks come out labelled M, or C when level==1.
/// `grid_in_blocks` is the sub-matrix side in blocks at `level`.
BlockDataset combine(BlockDataset m_blocks, int level, std::int32_t grid_in_blocks);

/// Distributed Strassen product over block datasets: (p-q) divide rounds, one
/// leaf-multiply round, (p-q) combine rounds; 2(p-q)+2 stages and exactly
/// 7^(p-q) leaf multiplications.
DistOutcome dist_strassen(dataflow::Engine& engine, const blockmat::BlockMatrix& a,
                          const blockmat::BlockMatrix& b,
                          LeafKernel kernel = LeafKernel::naive);

}  // namespace stark::strassen
