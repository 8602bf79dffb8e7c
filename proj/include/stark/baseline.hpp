#pragma once

#include <cstdint>
#include <utility>

#include "stark/block_matrix.hpp"
#include "stark/dataflow.hpp"

namespace stark::baseline {

/// The two eight-multiplication execution plans being compared against:
/// `replicate_join` keys every needed (i,j,k) pairing directly and joins;
/// `cogroup` gathers all operands of a destination (i,j) in one group, then
/// reduces the partial products. Both run exactly b^3 leaf multiplications.
enum class Strategy { replicate_join, cogroup };

struct BaselineOutcome {
  blockmat::BlockMatrix product;
  std::uint64_t leaf_multiplications = 0;
};

BaselineOutcome naive_block_multiply(dataflow::Engine& engine,
                                     const blockmat::BlockMatrix& a,
                                     const blockmat::BlockMatrix& b, Strategy strategy);

/// Emitted block copies per input matrix: b copies of each of the b^2 blocks.
std::pair<std::uint64_t, std::uint64_t> replication_counts(Strategy strategy,
                                                           std::int32_t splits);

}  // namespace stark::baseline
