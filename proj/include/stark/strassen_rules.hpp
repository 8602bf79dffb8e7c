#pragma once

#include <cstdint>
#include <span>

#include "stark/block.hpp"

namespace stark::strassen {

/// One replication target: operand side of product M_{slot+1}, added with
/// `sign`. Slots are 0-based (slot j means M_{j+1}).
struct ReplicationTarget {
  std::int8_t slot;
  std::int8_t sign;
};

/// Where a quadrant of A or B is consumed:
///   M1 = (A11 + A22)(B11 + B22)    M2 = (A21 + A22) B11
///   M3 = A11 (B12 - B22)           M4 = A22 (B21 - B11)
///   M5 = (A11 + A12) B22           M6 = (A21 - A11)(B11 + B12)
///   M7 = (A12 - A22)(B21 + B22)
/// Diagonal quadrants fan out to 4 targets, off-diagonal ones to 2;
/// 12 memberships per matrix.
std::span<const ReplicationTarget> replication_targets(blockmat::MatLabel label,
                                                       blockmat::Quadrant quadrant);

/// Number of quadrants feeding the given operand side of M_{slot+1} (1 or 2).
int expected_operand_contributors(blockmat::MatLabel label, int slot);

/// One combine contribution: product M_{slot+1} enters quadrant `quadrant`
/// of C with coefficient `sign`:
///   C11 = M1 + M4 - M5 + M7        C12 = M3 + M5
///   C21 = M2 + M4                  C22 = M1 - M2 + M3 + M6
struct CombineTarget {
  blockmat::Quadrant quadrant;
  std::int8_t sign;
};

std::span<const CombineTarget> combine_targets(int slot);

/// Coefficient of M_{slot+1} in the given C quadrant (-1, 0 or +1).
int combine_coefficient(int slot, blockmat::Quadrant quadrant);

/// Products contributing to a C quadrant: 4 for C11/C22, 2 for C12/C21.
int expected_combine_contributors(blockmat::Quadrant quadrant);

}  // namespace stark::strassen
