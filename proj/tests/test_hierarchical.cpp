#include <gtest/gtest.h>

#include <random>

#include "pmle/grip.hpp"
#include "pmle/hierarchical.hpp"
#include "pmle/ips.hpp"
#include "pmle/matrix_io.hpp"
#include "support.hpp"

using namespace pmle;
using namespace testing_support;

namespace {

SimplicialComplex cx_file(const std::string& name) { return parse_complex(read_file(data_path(name))); }

// Every inclusion-maximal facet family covering [n], n <= 4.
std::vector<SimplicialComplex> all_complexes(std::size_t n) {
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t s = 1; s < (1u << n); ++s) subsets.push_back(s);
  std::vector<SimplicialComplex> out;
  const std::size_t q = subsets.size();
  for (std::uint64_t pick = 1; pick < (std::uint64_t{1} << q); ++pick) {
    std::vector<std::uint32_t> fs;
    std::uint32_t cover = 0;
    for (std::size_t i = 0; i < q; ++i)
      if (pick >> i & 1) fs.push_back(subsets[i]), cover |= subsets[i];
    if (cover != (1u << n) - 1) continue;
    bool antichain = true;
    for (auto a : fs)
      for (auto b : fs)
        if (a != b && (a & b) == a) antichain = false;
    if (!antichain) continue;
    std::vector<std::vector<std::size_t>> facets;
    for (auto f : fs) {
      std::vector<std::size_t> v;
      for (std::size_t i = 0; i < n; ++i)
        if (f >> i & 1) v.push_back(i);
      facets.push_back(v);
    }
    out.emplace_back(n, facets);
  }
  return out;
}

}  // namespace

TEST(Complex, Parse) {
  auto cx = cx_file("chain.cx");
  EXPECT_EQ(cx.n, 5u);
  EXPECT_EQ(cx.facets, (std::vector<std::vector<std::size_t>>{{0, 1, 2}, {2, 3, 4}}));
  EXPECT_EQ(cx.states, std::vector<std::size_t>(5, 2));
  EXPECT_EQ(cx.describe(), "[1,2,3][3,4,5]");
  auto tern = cx_file("chain_ternary.cx");
  EXPECT_EQ(tern.states, (std::vector<std::size_t>{2, 3, 2}));
  auto c = parse_complex("# comment\n\n3 1\n  2 3\n");
  EXPECT_EQ(c.facets[0], (std::vector<std::size_t>{0, 2}));
}

TEST(Complex, ParseErrors) {
  EXPECT_THROW(parse_complex("1 x\n"), ParseError);
  EXPECT_THROW(parse_complex("states: 2 2\nstates: 2 2\n1 2\n"), ParseError);
  EXPECT_THROW(parse_complex("states: 2\n1 2\n"), ParseError);
  EXPECT_THROW(parse_complex(""), InvalidComplex);
  EXPECT_THROW(parse_complex("0 1\n"), InvalidComplex);
  EXPECT_THROW(parse_complex("1 2\n1\n"), InvalidComplex);
  EXPECT_THROW(parse_complex("1 1 2\n"), InvalidComplex);
  EXPECT_THROW(parse_complex("states: 2 0\n1 2\n"), InvalidComplex);
  EXPECT_THROW(SimplicialComplex(3, {{0, 1}}), InvalidComplex);
}

TEST(ComplexMatrix, Independence) {
  auto mat = matrix_from_complex(SimplicialComplex::from_one_based({{1}, {2}}));
  EXPECT_EQ(mat, load("twobytwo.txt"));
}

TEST(ComplexMatrix, SingleVertex) {
  auto mat = matrix_from_complex(SimplicialComplex::from_one_based({{1}}));
  ASSERT_EQ(mat.k(), 1u);
  EXPECT_EQ(mat.block(0), PartitionMatrix(2, {0, 1}));
}

TEST(ComplexMatrix, Triangle) {
  auto mat = matrix_from_complex(cx_file("triangle.cx"));
  EXPECT_EQ(mat.k(), 3u);
  EXPECT_EQ(mat.m(), 8u);
  EXPECT_EQ(mat.total_rows(), 12u);
  EXPECT_TRUE(validate(mat.to_raw()).ok());
  // Column 6 is state (1,0,1); block [1 3] row is (1,1).
  EXPECT_EQ(mat.block(1).row_of(5), 3u);
  EXPECT_EQ(mat.block(2).row_of(5), 1u);
}

TEST(ComplexMatrix, MembershipRule) {
  auto cx = cx_file("chain_ternary.cx");
  auto mat = matrix_from_complex(cx, {1, 0});
  EXPECT_EQ(mat.m(), 12u);
  EXPECT_EQ(mat.block(0).rows(), 6u);
  EXPECT_EQ(mat.block(1).rows(), 6u);
  for (std::size_t j = 0; j < 12; ++j) {
    std::size_t x1 = j / 6, x2 = (j / 2) % 3, x3 = j % 2;
    EXPECT_EQ(mat.block(0).row_of(j), x2 * 2 + x3);
    EXPECT_EQ(mat.block(1).row_of(j), x1 * 3 + x2);
  }
  EXPECT_THROW(matrix_from_complex(cx, {0, 0}), InvalidFacetOrder);
  EXPECT_THROW(matrix_from_complex(cx, {0}), InvalidFacetOrder);
  EXPECT_THROW(rip_check(cx, {2, 0}), InvalidFacetOrder);
}

TEST(Rip, Chain) {
  auto cx = cx_file("chain.cx");
  auto r = rip_check(cx, {0, 1});
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.k, std::vector<std::size_t>{0});
  EXPECT_EQ(rip_order_search(cx), (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(is_decomposable(cx));
}

TEST(Rip, TriangleEveryOrder) {
  auto cx = cx_file("triangle.cx");
  std::vector<std::size_t> order{0, 1, 2};
  int n = 0;
  do {
    auto r = rip_check(cx, order);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.failing_r, 2u);
    EXPECT_EQ(r.intersection, cx.facets[order[2]]);
    ++n;
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(n, 6);
  EXPECT_FALSE(rip_order_search(cx).has_value());
  EXPECT_FALSE(is_decomposable(cx));
}

TEST(Rip, SingleFacet) {
  auto cx = SimplicialComplex::from_one_based({{1, 2, 3}});
  EXPECT_TRUE(rip_check(cx, {0}).ok);
  EXPECT_EQ(rip_order_search(cx), std::vector<std::size_t>{0});
  EXPECT_TRUE(is_decomposable(cx));
}

TEST(Rip, LexicographicFirst) {
  // [12][34][23]: the identity fails at the third facet.
  auto cx = SimplicialComplex::from_one_based({{1, 2}, {3, 4}, {2, 3}});
  auto r = rip_check(cx, {0, 1, 2});
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.intersection, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(rip_order_search(cx), (std::vector<std::size_t>{0, 2, 1}));
  // [12][34][13][24], a 4-cycle, has none.
  auto cyc = SimplicialComplex::from_one_based({{1, 2}, {3, 4}, {1, 3}, {2, 4}});
  EXPECT_FALSE(rip_order_search(cyc).has_value());
  EXPECT_FALSE(is_decomposable(cyc));
}

TEST(Rip, SearchBound) {
  std::vector<std::vector<std::size_t>> fs;
  for (std::size_t i = 1; i <= 9; ++i) fs.push_back({i, i + 1});
  auto cx = SimplicialComplex::from_one_based(fs);
  EXPECT_THROW(rip_order_search(cx), FacetCountTooLarge);
  EXPECT_THROW(is_decomposable(cx), FacetCountTooLarge);
  fs.pop_back();
  auto ok = SimplicialComplex::from_one_based(fs);
  EXPECT_TRUE(rip_order_search(ok).has_value());
  EXPECT_TRUE(is_decomposable(ok));
}

TEST(Rip, DecomposableIffOrderExists) {
  std::size_t total = 0, dec = 0;
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& cx : all_complexes(n)) {
      bool d = is_decomposable(cx);
      EXPECT_EQ(d, rip_order_search(cx).has_value()) << cx.describe();
      ++total;
      dec += d;
    }
  EXPECT_GT(total, 100u);
  EXPECT_GT(dec, 0u);
  EXPECT_LT(dec, total);
}

TEST(Rip, ImpliesGrip) {
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& cx : all_complexes(n)) {
      auto order = identity_order(cx);
      do {
        if (!rip_check(cx, order).ok) continue;
        auto mat = matrix_from_complex(cx, order);
        ASSERT_TRUE(validate(mat.to_raw()).ok());
        EXPECT_TRUE(grip_check(mat).overall) << cx.describe();
      } while (std::next_permutation(order.begin(), order.end()));
    }
  auto tern = cx_file("chain_ternary.cx");
  EXPECT_TRUE(grip_check(matrix_from_complex(tern)).overall);
  EXPECT_TRUE(grip_check(matrix_from_complex(tern, {1, 0})).overall);
}

TEST(Rip, OneCycleOnDecomposable) {
  std::mt19937_64 rng(404);
  for (std::size_t n = 2; n <= 4; ++n)
    for (const auto& cx : all_complexes(n)) {
      auto order = rip_order_search(cx);
      if (!order) continue;
      auto mat = matrix_from_complex(cx, *order);
      auto d = random_dist(mat.m(), rng, 30);
      auto res = ips_run<Fraction>(mat, d, IpsConfig{});
      EXPECT_TRUE(res.one_cycle_exact) << cx.describe();
      EXPECT_LE(res.steps_taken, mat.k());
    }
}

TEST(Rip, TriangleNotOneCycle) {
  auto mat = matrix_from_complex(cx_file("triangle.cx"));
  EXPECT_FALSE(grip_check(mat).overall);
  std::mt19937_64 rng(9);
  auto d = random_dist(8, rng, 30);
  IpsConfig cfg;
  cfg.max_cycles = 2;
  EXPECT_FALSE(ips_run<Fraction>(mat, d, cfg).one_cycle_exact);
}
