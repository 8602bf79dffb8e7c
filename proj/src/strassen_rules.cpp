#include "stark/strassen_rules.hpp"

#include <array>
#include <stdexcept>

namespace stark::strassen {
namespace {

using blockmat::MatLabel;
using blockmat::Quadrant;

// Slots are 0-based: slot j is the operand of M_{j+1}.
constexpr std::array<ReplicationTarget, 4> kA11{{{0, +1}, {2, +1}, {4, +1}, {5, -1}}};
constexpr std::array<ReplicationTarget, 2> kA12{{{4, +1}, {6, +1}}};
constexpr std::array<ReplicationTarget, 2> kA21{{{1, +1}, {5, +1}}};
constexpr std::array<ReplicationTarget, 4> kA22{{{0, +1}, {1, +1}, {3, +1}, {6, -1}}};

constexpr std::array<ReplicationTarget, 4> kB11{{{0, +1}, {1, +1}, {3, -1}, {5, +1}}};
constexpr std::array<ReplicationTarget, 2> kB12{{{2, +1}, {5, +1}}};
constexpr std::array<ReplicationTarget, 2> kB21{{{3, +1}, {6, +1}}};
constexpr std::array<ReplicationTarget, 4> kB22{{{0, +1}, {2, -1}, {4, +1}, {6, +1}}};

constexpr std::array<CombineTarget, 2> kM1{{{Quadrant::q11, +1}, {Quadrant::q22, +1}}};
constexpr std::array<CombineTarget, 2> kM2{{{Quadrant::q21, +1}, {Quadrant::q22, -1}}};
constexpr std::array<CombineTarget, 2> kM3{{{Quadrant::q12, +1}, {Quadrant::q22, +1}}};
constexpr std::array<CombineTarget, 2> kM4{{{Quadrant::q11, +1}, {Quadrant::q21, +1}}};
constexpr std::array<CombineTarget, 2> kM5{{{Quadrant::q11, -1}, {Quadrant::q12, +1}}};
constexpr std::array<CombineTarget, 1> kM6{{{Quadrant::q22, +1}}};
constexpr std::array<CombineTarget, 1> kM7{{{Quadrant::q11, +1}}};

}  // namespace

std::span<const ReplicationTarget> replication_targets(MatLabel label, Quadrant quadrant) {
  if (label == MatLabel::A) {
    switch (quadrant) {
      case Quadrant::q11: return kA11;
      case Quadrant::q12: return kA12;
      case Quadrant::q21: return kA21;
      case Quadrant::q22: return kA22;
    }
  } else if (label == MatLabel::B) {
    switch (quadrant) {
      case Quadrant::q11: return kB11;
      case Quadrant::q12: return kB12;
      case Quadrant::q21: return kB21;
      case Quadrant::q22: return kB22;
    }
  }
  throw std::invalid_argument("replication_targets: label must be A or B");
}

int expected_operand_contributors(MatLabel label, int slot) {
  int count = 0;
  for (auto q : {Quadrant::q11, Quadrant::q12, Quadrant::q21, Quadrant::q22})
    for (const ReplicationTarget& t : replication_targets(label, q))
      if (t.slot == slot) ++count;
  return count;
}

std::span<const CombineTarget> combine_targets(int slot) {
  switch (slot) {
    case 0: return kM1;
    case 1: return kM2;
    case 2: return kM3;
    case 3: return kM4;
    case 4: return kM5;
    case 5: return kM6;
    case 6: return kM7;
    default: throw std::invalid_argument("combine_targets: slot must be in 0..6");
  }
}

int combine_coefficient(int slot, blockmat::Quadrant quadrant) {
  for (const CombineTarget& t : combine_targets(slot))
    if (t.quadrant == quadrant) return t.sign;
  return 0;
}

int expected_combine_contributors(blockmat::Quadrant quadrant) {
  int count = 0;
  for (int slot = 0; slot < 7; ++slot)
    if (combine_coefficient(slot, quadrant) != 0) ++count;
  return count;
}

}  // namespace stark::strassen
