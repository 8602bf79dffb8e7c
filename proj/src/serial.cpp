#include "stark/serial.hpp"

#include <cstring>
#include <stdexcept>
#include <vector>

#include "stark/kernels.hpp"

namespace stark::serial {
namespace {

using Buf = std::vector<double>;

// Contiguous square scratch matrices; quadrant extraction copies.
Buf quadrant(const Buf& m, std::size_t n, int qr, int qc) {
  const std::size_t h = n / 2;
  Buf out(h * h);
  for (std::size_t i = 0; i < h; ++i)
    std::memcpy(out.data() + i * h, m.data() + (i + qr * h) * n + qc * h, h * sizeof(double));
  return out;
}

void place_quadrant(Buf& m, std::size_t n, int qr, int qc, const Buf& q) {
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < h; ++i)
    std::memcpy(m.data() + (i + qr * h) * n + qc * h, q.data() + i * h, h * sizeof(double));
}

Buf add(const Buf& a, const Buf& b, StrassenStats& st) {
  Buf out(a.size());
  kernels::active().add(a.data(), b.data(), out.data(), out.size());
  ++st.block_additions;
  return out;
}

Buf sub(const Buf& a, const Buf& b, StrassenStats& st) {
  Buf out(a.size());
  kernels::active().sub(a.data(), b.data(), out.data(), out.size());
  ++st.block_additions;
  return out;
}

Buf strassen_rec(const Buf& a, const Buf& b, std::size_t n, std::size_t threshold,
                 StrassenStats& st) {
  if (n <= threshold) {
    Buf c(n * n, 0.0);
    kernels::active().gemm_acc(a.data(), b.data(), c.data(), n);
    ++st.base_multiplies;
    return c;
  }
  const std::size_t h = n / 2;
  const Buf a11 = quadrant(a, n, 0, 0), a12 = quadrant(a, n, 0, 1);
  const Buf a21 = quadrant(a, n, 1, 0), a22 = quadrant(a, n, 1, 1);
  const Buf b11 = quadrant(b, n, 0, 0), b12 = quadrant(b, n, 0, 1);
  const Buf b21 = quadrant(b, n, 1, 0), b22 = quadrant(b, n, 1, 1);

  const Buf m1 = strassen_rec(add(a11, a22, st), add(b11, b22, st), h, threshold, st);
  const Buf m2 = strassen_rec(add(a21, a22, st), b11, h, threshold, st);
  const Buf m3 = strassen_rec(a11, sub(b12, b22, st), h, threshold, st);
  const Buf m4 = strassen_rec(a22, sub(b21, b11, st), h, threshold, st);
  const Buf m5 = strassen_rec(add(a11, a12, st), b22, h, threshold, st);
  const Buf m6 = strassen_rec(sub(a21, a11, st), add(b11, b12, st), h, threshold, st);
  const Buf m7 = strassen_rec(sub(a12, a22, st), add(b21, b22, st), h, threshold, st);

  const Buf c11 = add(sub(add(m1, m4, st), m5, st), m7, st);
  const Buf c12 = add(m3, m5, st);
  const Buf c21 = add(m2, m4, st);
  const Buf c22 = add(add(sub(m1, m2, st), m3, st), m6, st);

  Buf c(n * n);
  place_quadrant(c, n, 0, 0, c11);
  place_quadrant(c, n, 0, 1, c12);
  place_quadrant(c, n, 1, 0, c21);
  place_quadrant(c, n, 1, 1, c22);
  return c;
}

}  // namespace

DenseMatrix naive_multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("naive_multiply: dimension mismatch");
  DenseMatrix c(a.n());
  kernels::active().gemm_acc(a.data(), b.data(), c.data(), a.n());
  return c;
}

DenseMatrix serial_strassen(const DenseMatrix& a, const DenseMatrix& b, int threshold,
                            StrassenStats* stats) {
  if (a.n() != b.n()) throw std::invalid_argument("serial_strassen: dimension mismatch");
  if (a.n() == 0) throw std::invalid_argument("serial_strassen: empty matrix");
  if (!is_power_of_two(a.n()))
    throw std::invalid_argument("serial_strassen: dimension must be a power of two");
  if (threshold <= 0 || !is_power_of_two(static_cast<std::uint64_t>(threshold)) ||
      static_cast<std::size_t>(threshold) > a.n())
    throw std::invalid_argument("serial_strassen: invalid threshold");

  StrassenStats local;
  Buf c = strassen_rec(a.values(), b.values(), a.n(),
                       static_cast<std::size_t>(threshold), local);
  if (stats) *stats = local;
  return DenseMatrix(a.n(), std::move(c));
}

}  // namespace stark::serial
