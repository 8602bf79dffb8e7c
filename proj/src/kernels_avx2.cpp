#if defined(__x86_64__)

#include <immintrin.h>

#include "stark/kernels.hpp"

// Bit-compatibility with the scalar kernels: separate mul and add (no fma,
// one rounding per operation, same as scalar code under -ffp-contract=off)
// and vectorization across output elements only, never across the k
// reduction, so each element keeps the scalar accumulation order.

namespace stark::kernels {
namespace {

void add_avx2(const double* a, const double* b, double* dst, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < len; ++i) dst[i] = a[i] + b[i];
}

void sub_avx2(const double* a, const double* b, double* dst, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < len; ++i) dst[i] = a[i] - b[i];
}

void acc_avx2(double* dst, const double* src, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i),
                                            _mm256_loadu_pd(src + i)));
  }
  for (; i < len; ++i) dst[i] += src[i];
}

void acc_neg_avx2(double* dst, const double* src, std::size_t len) {
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(dst + i),
                                            _mm256_loadu_pd(src + i)));
  }
  for (; i < len; ++i) dst[i] -= src[i];
}

void gemm_acc_avx2(const double* a, const double* b, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* arow = a + i * n;
    double* crow = c + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = arow[k];
      const double* brow = b + k * n;
      const __m256d va = _mm256_set1_pd(aik);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(brow + j));
        _mm256_storeu_pd(crow + j, _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
      }
      for (; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  bump_thread_flops(n * n * n);
}

}  // namespace

namespace detail {
const Ops avx2_ops{add_avx2, sub_avx2, acc_avx2, acc_neg_avx2, gemm_acc_avx2};
}  // namespace detail

}  // namespace stark::kernels

#endif  // __x86_64__
