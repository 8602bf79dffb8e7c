#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stark {

/// Row-major square matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
  DenseMatrix(std::size_t n, std::vector<double> values) : n_(n), a_(std::move(values)) {
    if (a_.size() != n * n) throw std::invalid_argument("DenseMatrix: size mismatch");
  }

  std::size_t n() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }
  const std::vector<double>& values() const { return a_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::uint64_t v) {
  if (!is_power_of_two(v)) throw std::invalid_argument("log2_exact: not a power of two");
  int p = 0;
  while (v > 1) { v >>= 1; ++p; }
  return p;
}

/// Elementwise |x - ref| / max(1, |ref|), maximized over the matrix. The unit
/// floor keeps near-zero reference entries from blowing up the quotient.
inline double max_rel_error(const DenseMatrix& x, const DenseMatrix& ref) {
  if (x.n() != ref.n()) throw std::invalid_argument("max_rel_error: dimension mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.values().size(); ++i) {
    const double r = ref.values()[i];
    const double denom = r < 0 ? (r < -1.0 ? -r : 1.0) : (r > 1.0 ? r : 1.0);
    const double d = x.values()[i] - r;
    const double err = (d < 0 ? -d : d) / denom;
    if (err > worst) worst = err;
  }
  return worst;
}

}  // namespace stark
