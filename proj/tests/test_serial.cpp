#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stark/serial.hpp"
#include "test_util.hpp"

using namespace stark;

TEST_CASE("naive multiply basics") {
  const auto a = testutil::random_dense(8, 21);

  SUBCASE("A * I = A") {
    CHECK(serial::naive_multiply(a, testutil::identity(8)) == a);
  }
  SUBCASE("A * 0 = 0") {
    const auto zero = DenseMatrix(8);
    CHECK(serial::naive_multiply(a, zero) == zero);
  }
  SUBCASE("hand-checked 2x2 product") {
    const DenseMatrix x(2, {1, 2, 3, 4});
    const DenseMatrix y(2, {5, 6, 7, 8});
    CHECK(serial::naive_multiply(x, y) == DenseMatrix(2, {19, 22, 43, 50}));
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS(serial::naive_multiply(a, DenseMatrix(4)));
  }
}

TEST_CASE("strassen at the threshold is the naive product") {
  const auto a = testutil::random_dense(16, 1);
  const auto b = testutil::random_dense(16, 2);
  serial::StrassenStats stats;
  const auto c = serial::serial_strassen(a, b, 16, &stats);
  CHECK(c == serial::naive_multiply(a, b));  // base case is the same kernel
  CHECK(stats.base_multiplies == 1);
  CHECK(stats.block_additions == 0);
}

TEST_CASE("one split does 7 multiplications and 18 additions") {
  const auto a = testutil::random_dense(4, 3);
  const auto b = testutil::random_dense(4, 4);
  serial::StrassenStats stats;
  serial::serial_strassen(a, b, 2, &stats);
  CHECK(stats.base_multiplies == 7);
  CHECK(stats.block_additions == 18);
}

TEST_CASE("random 32x32 against the naive oracle") {
  const auto a = testutil::random_dense(32, 5);
  const auto b = testutil::random_dense(32, 6);
  const auto oracle = serial::naive_multiply(a, b);
  const auto c = serial::serial_strassen(a, b, 4);
  CHECK(max_rel_error(c, oracle) <= 1e-9);
}

TEST_CASE("counters follow 7^levels and 18 * sum(7^i)") {
  for (const auto& [n, threshold] : std::vector<std::pair<std::size_t, int>>{
           {8, 8}, {8, 4}, {16, 4}, {32, 4}, {64, 8}}) {
    const auto a = testutil::random_dense(n, 100 + n);
    const auto b = testutil::random_dense(n, 200 + n);
    serial::StrassenStats stats;
    serial::serial_strassen(a, b, threshold, &stats);
    const int levels = log2_exact(n) - log2_exact(static_cast<std::uint64_t>(threshold));
    std::uint64_t expected_mults = 1, expected_adds = 0, nodes = 1;
    for (int i = 0; i < levels; ++i) {
      expected_adds += nodes * 18;
      nodes *= 7;
      expected_mults *= 7;
    }
    CHECK(stats.base_multiplies == expected_mults);
    CHECK(stats.block_additions == expected_adds);
  }
}

TEST_CASE("small-integer inputs reproduce the naive product bit for bit") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto a = testutil::random_int_dense(32, 300 + seed);
    const auto b = testutil::random_int_dense(32, 400 + seed);
    CHECK(serial::serial_strassen(a, b, 4) == serial::naive_multiply(a, b));
  }
}

TEST_CASE("invalid thresholds are rejected") {
  const auto a = testutil::random_dense(8, 7);
  CHECK_THROWS(serial::serial_strassen(a, a, 3));
  CHECK_THROWS(serial::serial_strassen(a, a, 0));
  CHECK_THROWS(serial::serial_strassen(a, a, 16));
  CHECK_THROWS(serial::serial_strassen(a, testutil::random_dense(4, 8), 2));
}
