#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <map>
#include <set>

#include "stark/serial.hpp"
#include "stark/strassen_dist.hpp"
#include "test_util.hpp"

using namespace stark;
using blockmat::Block;
using blockmat::MatLabel;
using blockmat::Quadrant;
using blockmat::Tag;
using dataflow::Engine;

namespace {

struct Membership {
  int slot;
  int sign;
  bool operator==(const Membership&) const = default;
  bool operator<(const Membership& o) const {
    return slot != o.slot ? slot < o.slot : sign < o.sign;
  }
};

std::set<Membership> targets_of(MatLabel label, Quadrant q) {
  std::set<Membership> out;
  for (const auto& t : strassen::replication_targets(label, q))
    out.insert({t.slot, t.sign});
  return out;
}

}  // namespace

TEST_CASE("replication table encodes the seven product operands") {
  using S = std::set<Membership>;
  // independently restated from the product formulas
  CHECK(targets_of(MatLabel::A, Quadrant::q11) == S{{0, 1}, {2, 1}, {4, 1}, {5, -1}});
  CHECK(targets_of(MatLabel::A, Quadrant::q12) == S{{4, 1}, {6, 1}});
  CHECK(targets_of(MatLabel::A, Quadrant::q21) == S{{1, 1}, {5, 1}});
  CHECK(targets_of(MatLabel::A, Quadrant::q22) == S{{0, 1}, {1, 1}, {3, 1}, {6, -1}});
  CHECK(targets_of(MatLabel::B, Quadrant::q11) == S{{0, 1}, {1, 1}, {3, -1}, {5, 1}});
  CHECK(targets_of(MatLabel::B, Quadrant::q12) == S{{2, 1}, {5, 1}});
  CHECK(targets_of(MatLabel::B, Quadrant::q21) == S{{3, 1}, {6, 1}});
  CHECK(targets_of(MatLabel::B, Quadrant::q22) == S{{0, 1}, {2, -1}, {4, 1}, {6, 1}});

  SUBCASE("12 memberships per matrix, 4 on diagonals and 2 off") {
    for (MatLabel label : {MatLabel::A, MatLabel::B}) {
      std::size_t total = 0;
      for (Quadrant q : {Quadrant::q11, Quadrant::q12, Quadrant::q21, Quadrant::q22}) {
        const auto t = strassen::replication_targets(label, q);
        total += t.size();
        const bool diagonal = q == Quadrant::q11 || q == Quadrant::q22;
        CHECK(t.size() == (diagonal ? 4u : 2u));
      }
      CHECK(total == 12);
    }
  }
  SUBCASE("labels M and C have no replication rule") {
    CHECK_THROWS(strassen::replication_targets(MatLabel::M, Quadrant::q11));
  }
}

TEST_CASE("combine table encodes the four result quadrants") {
  // C11 = M1 + M4 - M5 + M7, C12 = M3 + M5, C21 = M2 + M4, C22 = M1 - M2 + M3 + M6
  const std::map<Quadrant, std::map<int, int>> expected{
      {Quadrant::q11, {{0, 1}, {3, 1}, {4, -1}, {6, 1}}},
      {Quadrant::q12, {{2, 1}, {4, 1}}},
      {Quadrant::q21, {{1, 1}, {3, 1}}},
      {Quadrant::q22, {{0, 1}, {1, -1}, {2, 1}, {5, 1}}}};
  for (const auto& [quadrant, coeffs] : expected) {
    for (int slot = 0; slot < 7; ++slot) {
      const auto it = coeffs.find(slot);
      CHECK(strassen::combine_coefficient(slot, quadrant) ==
            (it == coeffs.end() ? 0 : it->second));
    }
  }
  CHECK(strassen::expected_combine_contributors(Quadrant::q11) == 4);
  CHECK(strassen::expected_combine_contributors(Quadrant::q12) == 2);
  CHECK(strassen::expected_combine_contributors(Quadrant::q21) == 2);
  CHECK(strassen::expected_combine_contributors(Quadrant::q22) == 4);
}

TEST_CASE("replicated_copies fans out one block") {
  const auto dense = testutil::random_dense(4, 50);
  const auto m = testutil::to_blocks(dense, 2, MatLabel::A);

  SUBCASE("an off-diagonal A block is copied twice, to products 5 and 7") {
    for (const Block& blk : m.blocks()) {
      if (blk.row == 0 && blk.col == 1) {
        const auto copies = strassen::replicated_copies(blk, 1);
        REQUIRE(copies.size() == 2);
        CHECK(copies[0].block.tag.m_index == 4);  // slot 4 = M5
        CHECK(copies[0].sign == 1);
        CHECK(copies[1].block.tag.m_index == 6);  // slot 6 = M7
        CHECK(copies[1].sign == 1);
        for (const auto& c : copies) {
          CHECK(c.source == Quadrant::q12);
          CHECK(c.block.row == 0);
          CHECK(c.block.col == 0);  // re-indexed into the half grid
          CHECK(c.block.data == blk.data);
        }
      }
    }
  }
  SUBCASE("M-labelled input is rejected") {
    Block bad = m.blocks()[0];
    bad.tag.label = MatLabel::M;
    CHECK_THROWS(strassen::replicated_copies(bad, 1));
  }
}

TEST_CASE("one divide of a b=2 pair yields the 14 operand blocks") {
  Engine eng({2, 0});
  const auto a = testutil::to_blocks(testutil::random_dense(4, 60), 2, MatLabel::A);
  const auto b = testutil::to_blocks(testutil::random_dense(4, 61), 2, MatLabel::B);
  auto input = eng.source(a.blocks()).union_with(eng.source(b.blocks()));
  auto out = strassen::div_n_rep(input, 2).collect();
  CHECK(out.size() == 14);  // 7 products x 1 block x 2 sides

  std::set<std::pair<std::uint64_t, MatLabel>> seen;
  for (const Block& blk : out) {
    CHECK(blk.tag.m_index < 7);
    seen.insert({blk.tag.m_index, blk.tag.label});
  }
  CHECK(seen.size() == 14);
}

TEST_CASE("a divide level triples the per-matrix scalar volume") {
  Engine eng({2, 0});
  const std::int64_t n = 16;
  const auto a = testutil::to_blocks(testutil::random_dense(n, 62), 4, MatLabel::A);
  strassen::div_n_rep(eng.source(a.blocks()), 4).collect();
  REQUIRE(eng.metrics().size() == 2);
  CHECK(eng.metrics()[0].shuffled_elements == 3u * n * n);
  CHECK(eng.metrics()[0].records_out == 12u * 2 * 2);  // 12 quarter grids of (b/2)^2 blocks
}

TEST_CASE("every divide level shuffles 3x its folded input volume") {
  Engine eng({2, 0});
  const std::uint64_t n = 32;
  const auto a = testutil::to_blocks(testutil::random_dense(n, 65), 4, MatLabel::A);
  const auto b = testutil::to_blocks(testutil::random_dense(n, 66), 4, MatLabel::B);
  auto cur = eng.source(a.blocks()).union_with(eng.source(b.blocks()));
  std::int32_t grid = a.splits();
  for (int lvl = 0; lvl < 3; ++lvl) {
    cur = strassen::div_n_rep(cur, grid, "L" + std::to_string(lvl));
    grid /= 2;
  }
  cur.collect();
  // folded input of level i holds 2 n^2 (7/4)^i scalars; replication tripled it
  std::uint64_t expected = 6 * n * n;
  for (int lvl = 0; lvl < 3; ++lvl) {
    CHECK(eng.metrics()[static_cast<std::size_t>(lvl)].shuffled_elements == expected);
    expected = expected * 7 / 4;
  }
}

TEST_CASE("single-element blocks are a valid tile size") {
  Engine eng({2, 0});
  const auto da = testutil::random_dense(4, 67);
  const auto db = testutil::random_dense(4, 68);
  const auto a = testutil::to_blocks(da, 1, MatLabel::A);
  const auto b = testutil::to_blocks(db, 1, MatLabel::B);
  const auto outcome = strassen::dist_strassen(eng, a, b);
  CHECK(outcome.leaf_multiplications == 49);
  CHECK(eng.metrics().size() == 6);
  CHECK(max_rel_error(outcome.product.to_dense(), serial::naive_multiply(da, db)) <= 1e-9);
}

TEST_CASE("divide rejects bad inputs") {
  Engine eng({1, 0});
  SUBCASE("missing operand") {
    // only the A11-quadrant block of a b=2 matrix: every diagonal-product
    // group lacks its partner
    const auto a = testutil::to_blocks(testutil::random_dense(4, 63), 2, MatLabel::A);
    std::vector<Block> only_a11{a.blocks()[0]};
    auto ds = eng.source(only_a11);
    CHECK_THROWS_WITH_AS(strassen::div_n_rep(ds, 2).collect(),
                         doctest::Contains("contributors"), std::runtime_error);
  }
  SUBCASE("single-block grid cannot divide") {
    const auto a = testutil::to_blocks(testutil::random_dense(4, 64), 4, MatLabel::A);
    auto ds = eng.source(a.blocks());
    CHECK_THROWS(strassen::div_n_rep(ds, 1));
  }
}

TEST_CASE("identity times identity") {
  Engine eng({2, 0});
  const auto eye = testutil::identity(4);
  const auto a = testutil::to_blocks(eye, 2, MatLabel::A);
  const auto b = testutil::to_blocks(eye, 2, MatLabel::B);
  const auto outcome = strassen::dist_strassen(eng, a, b);
  CHECK(outcome.product.to_dense() == eye);
  CHECK(outcome.leaf_multiplications == 7);
}

TEST_CASE("single-block matrices skip the recursion entirely") {
  Engine eng({2, 0});
  const auto da = testutil::random_dense(4, 70);
  const auto db = testutil::random_dense(4, 71);
  const auto a = testutil::to_blocks(da, 4, MatLabel::A);
  const auto b = testutil::to_blocks(db, 4, MatLabel::B);
  const auto outcome = strassen::dist_strassen(eng, a, b);
  CHECK(outcome.leaf_multiplications == 1);
  CHECK(eng.metrics().size() == 2);
  CHECK(outcome.product.to_dense() == serial::naive_multiply(da, db));
  CHECK(outcome.product.blocks()[0].tag.label == MatLabel::C);
}

TEST_CASE("random 64x64 with 8x8 blocks against the dense oracle") {
  Engine eng({3, 5});
  const auto da = testutil::random_dense(64, 80);
  const auto db = testutil::random_dense(64, 81);
  const auto a = testutil::to_blocks(da, 8, MatLabel::A);
  const auto b = testutil::to_blocks(db, 8, MatLabel::B);
  const auto outcome = strassen::dist_strassen(eng, a, b);

  CHECK(max_rel_error(outcome.product.to_dense(),
                      serial::naive_multiply(da, db)) <= 1e-9);
  CHECK(outcome.leaf_multiplications == 343);       // 7^3
  CHECK(eng.metrics().size() == 8);                 // 2*3 + 2
  for (const Block& blk : outcome.product.blocks()) {
    CHECK(blk.tag.label == MatLabel::C);
    CHECK(blk.tag.m_index == 0);
  }

  SUBCASE("total flops equal the leaf multiply-add count") {
    std::uint64_t flops = 0;
    for (const auto& s : eng.metrics()) flops += s.flops;
    CHECK(flops == 343u * 8 * 8 * 8);
  }
}

TEST_CASE("strassen leaf kernel gives the same product within tolerance") {
  Engine eng({2, 0});
  const auto da = testutil::random_dense(16, 90);
  const auto db = testutil::random_dense(16, 91);
  const auto a = testutil::to_blocks(da, 8, MatLabel::A);
  const auto b = testutil::to_blocks(db, 8, MatLabel::B);
  const auto outcome = strassen::dist_strassen(eng, a, b, strassen::LeafKernel::strassen);
  CHECK(max_rel_error(outcome.product.to_dense(),
                      serial::naive_multiply(da, db)) <= 1e-9);
}

TEST_CASE("tag space is fully populated after each divide") {
  Engine eng({2, 0});
  const auto a = testutil::to_blocks(testutil::random_dense(16, 95), 2, MatLabel::A);
  const auto b = testutil::to_blocks(testutil::random_dense(16, 96), 2, MatLabel::B);
  auto lvl0 = eng.source(a.blocks()).union_with(eng.source(b.blocks()));
  auto lvl1 = strassen::div_n_rep(lvl0, 8, "L0");
  auto lvl2 = strassen::div_n_rep(lvl1, 4, "L1");
  const auto blocks = lvl2.collect();

  std::map<std::pair<std::uint64_t, MatLabel>, std::set<std::pair<int, int>>> grids;
  for (const Block& blk : blocks) {
    CHECK(blk.tag.m_index < 49);
    grids[{blk.tag.m_index, blk.tag.label}].insert({blk.row, blk.col});
  }
  CHECK(grids.size() == 98);  // 49 tags x 2 sides
  for (const auto& [key, grid] : grids) CHECK(grid.size() == 4);  // full 2x2 grids
}

TEST_CASE("one combine level rebuilds 4 blocks from 7 products") {
  Engine eng({2, 0});
  const auto da = testutil::random_dense(4, 97);
  const auto db = testutil::random_dense(4, 98);
  const auto a = testutil::to_blocks(da, 2, MatLabel::A);
  const auto b = testutil::to_blocks(db, 2, MatLabel::B);
  auto divided = strassen::div_n_rep(
      eng.source(a.blocks()).union_with(eng.source(b.blocks())), 2);
  auto products = strassen::mul_block_mat(divided);
  const auto combined = strassen::combine(products, 1, 1).collect();
  REQUIRE(combined.size() == 4);
  blockmat::BlockMatrix c(4, 2, combined);
  CHECK(max_rel_error(c.to_dense(), serial::naive_multiply(da, db)) <= 1e-9);
}

TEST_CASE("product payloads are bit-identical across worker counts") {
  const auto da = testutil::random_dense(32, 99);
  const auto db = testutil::random_dense(32, 100);
  const auto a = testutil::to_blocks(da, 4, MatLabel::A);
  const auto b = testutil::to_blocks(db, 4, MatLabel::B);

  auto run = [&](std::size_t workers, std::uint64_t seed) {
    Engine eng({workers, seed});
    return strassen::dist_strassen(eng, a, b).product;
  };
  const auto base = run(1, 0);
  for (const auto& [workers, seed] :
       std::vector<std::pair<std::size_t, std::uint64_t>>{{2, 0}, {4, 17}, {3, 5}}) {
    const auto other = run(workers, seed);
    REQUIRE(other.blocks().size() == base.blocks().size());
    for (std::size_t i = 0; i < base.blocks().size(); ++i) {
      const auto& x = *base.blocks()[i].data;
      const auto& y = *other.blocks()[i].data;
      CHECK(std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("leaf pairing rejects malformed key groups") {
  Engine eng({1, 0});
  // two A blocks under the same m_index, no B partner
  std::vector<Block> bad{
      blockmat::zero_block(0, 0, Tag{MatLabel::A, 3}, 2),
      blockmat::zero_block(0, 0, Tag{MatLabel::A, 3}, 2),
  };
  auto ds = eng.source(bad);
  CHECK_THROWS_WITH_AS(strassen::mul_block_mat(ds).collect(),
                       doctest::Contains("pair"), std::runtime_error);
}

TEST_CASE("combine rejects groups with missing contributors") {
  Engine eng({1, 0});
  // a lone M1 block: every C quadrant it feeds expects more products
  std::vector<Block> lone{blockmat::zero_block(0, 0, Tag{MatLabel::M, 0}, 2)};
  auto ds = eng.source(lone);
  CHECK_THROWS_WITH_AS(strassen::combine(ds, 1, 1).collect(),
                       doctest::Contains("contributors"), std::runtime_error);
}

TEST_CASE("mismatched operands are rejected") {
  Engine eng({1, 0});
  const auto a = testutil::to_blocks(testutil::random_dense(8, 1), 2, MatLabel::A);
  const auto b4 = testutil::to_blocks(testutil::random_dense(4, 2), 2, MatLabel::B);
  const auto b_bs = testutil::to_blocks(testutil::random_dense(8, 3), 4, MatLabel::B);
  CHECK_THROWS(strassen::dist_strassen(eng, a, b4));
  CHECK_THROWS(strassen::dist_strassen(eng, a, b_bs));
}
