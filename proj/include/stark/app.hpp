#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stark/block_matrix.hpp"
#include "stark/dataflow.hpp"

namespace stark::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitResourceGuard = 3;

/// Deterministic test-matrix entries: U(-1, 1) values, each cell present with
/// probability `density`. Same (n, density, seed) always yields the same list.
std::vector<blockmat::CoordinateEntry> random_entries(std::int64_t n, double density,
                                                      std::uint64_t seed);

struct MultiplyRequest {
  std::string a_path;
  std::string b_path;
  std::string algo = "stark";  // stark | naive-block-join | naive-block-cogroup |
                               // serial-strassen | serial-naive
  std::int32_t block_size = 0;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::string result_out;   // empty: skip writing
  std::string metrics_out;  // empty: skip writing
  std::optional<std::int64_t> n_override;
  bool strassen_leaf = false;  // leaf kernel for stark
};

struct MultiplyReport {
  std::int64_t n = 0;
  double wall_ms = 0.0;
  std::uint64_t leaf_multiplications = 0;
  std::size_t stages = 0;
  std::uint64_t flops = 0;
  std::uint64_t shuffled_elements = 0;
};

/// Loads, guards against the peak-footprint memory bound, runs, writes result
/// and metrics files. Throws ResourceGuardError when the bound exceeds the cap.
MultiplyReport run_multiply(const MultiplyRequest& request);

struct ResourceGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Memory the multiply is allowed to need: peak block footprint x 2 matrices
/// x 8 bytes. Cap defaults to 4 GiB; STARK_MEM_CAP_BYTES overrides.
std::uint64_t memory_guard_bytes(const std::string& algo, std::int64_t n,
                                 std::int32_t block_size);
std::uint64_t memory_cap_bytes();

/// Full command-line interface; returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace stark::app
