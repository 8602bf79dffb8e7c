#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace stark::kernels {

/// Available kernel implementations. `scalar` is the reference; vector
/// variants must produce bit-identical results (same per-element operation
/// order, no fma contraction).
enum class Impl { scalar, avx2 };

struct Ops {
  // dst[i] = a[i] + b[i] / a[i] - b[i]
  void (*add)(const double* a, const double* b, double* dst, std::size_t len);
  void (*sub)(const double* a, const double* b, double* dst, std::size_t len);
  // dst[i] += src[i] / dst[i] -= src[i]
  void (*acc)(double* dst, const double* src, std::size_t len);
  void (*acc_neg)(double* dst, const double* src, std::size_t len);
  // c += a * b for row-major n x n tiles. Every c[i][j] accumulates its
  // products in ascending k; callers rely on this order for determinism.
  void (*gemm_acc)(const double* a, const double* b, double* c, std::size_t n);
};

/// Kernel table selected at startup (STARK_KERNEL=scalar|avx2|auto overrides
/// CPU detection).
const Ops& active();
Impl active_impl();
bool supports(Impl impl);

/// Force a specific implementation; throws std::invalid_argument if the CPU
/// lacks it. Intended for tests and the CLI.
void force(Impl impl);
std::string_view impl_name(Impl impl);

/// Scalar multiply-add count executed by gemm_acc on this thread. The
/// dataflow engine snapshots it around task execution.
std::uint64_t thread_flops();
void bump_thread_flops(std::uint64_t madds);

namespace detail {
extern const Ops scalar_ops;
#if defined(__x86_64__)
extern const Ops avx2_ops;
#endif
}  // namespace detail

}  // namespace stark::kernels
