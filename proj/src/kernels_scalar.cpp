#include "stark/kernels.hpp"

namespace stark::kernels {
namespace {

void add_scalar(const double* a, const double* b, double* dst, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) dst[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* dst, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) dst[i] = a[i] - b[i];
}

void acc_scalar(double* dst, const double* src, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
}

void acc_neg_scalar(double* dst, const double* src, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) dst[i] -= src[i];
}

// i-k-j order: each c[i][j] sees its k terms in ascending order.
void gemm_acc_scalar(const double* a, const double* b, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * n;
    double* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = arow[k];
      const double* brow = b + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  bump_thread_flops(n * n * n);
}

}  // namespace

namespace detail {
const Ops scalar_ops{add_scalar, sub_scalar, acc_scalar, acc_neg_scalar,
                     gemm_acc_scalar};
}  // namespace detail

}  // namespace stark::kernels
