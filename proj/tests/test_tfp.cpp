#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "pmle/grip.hpp"
#include "pmle/hierarchical.hpp"
#include "pmle/staged_tree.hpp"
#include "pmle/tfp.hpp"
#include "support.hpp"

using namespace pmle;
using namespace testing_support;

namespace {

FractionMatrix dense(const std::vector<std::vector<long>>& rows) {
  FractionMatrix out(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) out(r, c) = Fraction(rows[r][c]);
  return out;
}

// Two classes of two columns on each side, identity grading.
TfpFactors worked_factors() {
  TfpFactors f;
  f.b = dense({{1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  f.c = dense({{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}});
  f.b_class = {0, 0, 1, 1};
  f.c_class = {0, 0, 1, 1};
  f.classes = 2;
  f.grading = dense({{1, 0}, {0, 1}});
  f.index();
  return f;
}

// z^i_{jk} from 1-based indices.
std::size_t Z(const TfpFactors& f, std::size_t i, std::size_t j, std::size_t k) { return f.z(i - 1, j - 1, k - 1); }

Binomial binom(std::initializer_list<std::size_t> plus, std::initializer_list<std::size_t> minus) {
  Binomial b;
  for (auto z : plus) ++b.plus[z];
  for (auto z : minus) ++b.minus[z];
  return b;
}

Binomial oriented(Binomial b) {
  if (b.minus < b.plus) std::swap(b.plus, b.minus);
  return b;
}

std::set<Binomial> oriented_set(const std::vector<Binomial>& bs) {
  std::set<Binomial> out;
  for (const auto& b : bs) out.insert(oriented(b));
  return out;
}

void expect_instance_ok(const MultipartitionMatrix& mat, const std::string& what) {
  auto rep = grip_check(mat);
  ASSERT_TRUE(rep.overall) << what;
  for (std::size_t level = 1; level < mat.k(); ++level) {
    auto inst = build_tfp_instance(mat, rep, level);
    auto chk = check_tfp_instance(mat, inst);
    EXPECT_TRUE(chk.bijection) << what << " level " << level;
    EXPECT_TRUE(chk.columns_match) << what << " level " << level;
    EXPECT_TRUE(chk.grading_independent) << what << " level " << level;
    EXPECT_TRUE(chk.multihomogeneous) << what << " level " << level;
    EXPECT_TRUE(chk.rowspan_equal) << what << " level " << level;
    EXPECT_EQ(inst.factors.vars.size(), mat.m());
    auto param = tfp_parametrization_matrix(inst.factors);
    auto gens = tfp_generators(inst.factors);
    for (const auto* fam : {&gens.quads, &gens.lifts_b, &gens.lifts_c})
      for (const auto& b : *fam) EXPECT_TRUE(binomial_in_kernel(param, b)) << what;
  }
}

}  // namespace

TEST(TfpFactors, VariableOrder) {
  auto f = worked_factors();
  ASSERT_EQ(f.vars.size(), 8u);
  EXPECT_EQ(Z(f, 1, 1, 1), 0u);
  EXPECT_EQ(Z(f, 1, 1, 2), 1u);
  EXPECT_EQ(Z(f, 1, 2, 1), 2u);
  EXPECT_EQ(Z(f, 2, 2, 2), 7u);
  EXPECT_EQ(f.b_rank(3), 1u);
  EXPECT_EQ(f.c_rank(2), 0u);
  TfpFactors bad = f;
  bad.b_class.pop_back();
  EXPECT_THROW(bad.index(), DimensionMismatch);
}

TEST(TfpFactors, WorkedParametrization) {
  auto f = worked_factors();
  auto want = dense({{1, 1, 1, 1, 0, 0, 0, 0},
                     {0, 0, 0, 0, 1, 1, 0, 0},
                     {0, 0, 0, 0, 0, 0, 1, 1},
                     {1, 1, 1, 1, 0, 0, 0, 0},
                     {0, 0, 0, 0, 1, 1, 1, 1},
                     {1, 0, 1, 0, 1, 0, 1, 0},
                     {0, 1, 0, 1, 0, 1, 0, 1}});
  EXPECT_EQ(tfp_parametrization_matrix(f), want);
}

TEST(TfpFactors, WorkedQuads) {
  auto f = worked_factors();
  auto q = quad_generators(f);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0], binom({Z(f, 1, 1, 1), Z(f, 1, 2, 2)}, {Z(f, 1, 1, 2), Z(f, 1, 2, 1)}));
  EXPECT_EQ(q[1], binom({Z(f, 2, 1, 1), Z(f, 2, 2, 2)}, {Z(f, 2, 1, 2), Z(f, 2, 2, 1)}));
}

TEST(TfpFactors, WorkedLiftB) {
  auto f = worked_factors();
  auto lifts = lift_binomial(f, Side::B, {{0}, {1}});
  ASSERT_EQ(lifts.size(), 2u);
  EXPECT_EQ(lifts[0], binom({Z(f, 1, 1, 1)}, {Z(f, 1, 2, 1)}));
  EXPECT_EQ(lifts[1], binom({Z(f, 1, 1, 2)}, {Z(f, 1, 2, 2)}));
}

TEST(TfpFactors, WorkedLiftC) {
  auto f = worked_factors();
  auto lifts = lift_binomial(f, Side::C, {{0, 3}, {1, 2}});
  std::vector<Binomial> want{
      binom({Z(f, 1, 1, 1), Z(f, 2, 1, 2)}, {Z(f, 1, 1, 2), Z(f, 2, 1, 1)}),
      binom({Z(f, 1, 1, 1), Z(f, 2, 2, 2)}, {Z(f, 1, 1, 2), Z(f, 2, 2, 1)}),
      binom({Z(f, 1, 2, 1), Z(f, 2, 1, 2)}, {Z(f, 1, 2, 2), Z(f, 2, 1, 1)}),
      binom({Z(f, 1, 2, 1), Z(f, 2, 2, 2)}, {Z(f, 1, 2, 2), Z(f, 2, 2, 1)}),
  };
  EXPECT_EQ(lifts, want);
  // Factor order in the input does not matter.
  EXPECT_EQ(lift_binomial(f, Side::C, {{3, 0}, {2, 1}}), want);
}

TEST(TfpFactors, WorkedGeneratorSet) {
  auto f = worked_factors();
  auto g = tfp_generators(f);
  EXPECT_EQ(g.quads.size(), 2u);
  EXPECT_EQ(oriented_set(g.lifts_b), oriented_set(lift_binomial(f, Side::B, {{0}, {1}})));
  EXPECT_EQ(oriented_set(g.lifts_c), oriented_set(lift_binomial(f, Side::C, {{0, 3}, {1, 2}})));
  EXPECT_EQ(g.size(), 8u);
  auto param = tfp_parametrization_matrix(f);
  for (const auto* fam : {&g.quads, &g.lifts_b, &g.lifts_c})
    for (const auto& b : *fam) EXPECT_TRUE(binomial_in_kernel(param, b));
  EXPECT_FALSE(binomial_in_kernel(param, binom({Z(f, 1, 1, 1)}, {Z(f, 1, 1, 2)})));
}

TEST(TfpFactors, FactorBinomialsOfKernel) {
  auto f = worked_factors();
  auto fb = factor_binomials(f.b);
  ASSERT_EQ(fb.size(), 1u);
  std::set<std::size_t> sides{fb[0].lhs.at(0), fb[0].rhs.at(0)};
  EXPECT_EQ(sides, (std::set<std::size_t>{0, 1}));
  auto fc = factor_binomials(f.c);
  ASSERT_EQ(fc.size(), 1u);
  EXPECT_EQ(fc[0].lhs.size(), 2u);
  EXPECT_EQ(fc[0].rhs.size(), 2u);
}

TEST(TfpFactors, Errors) {
  auto f = worked_factors();
  EXPECT_THROW(lift_binomial(f, Side::C, {{0}, {2}}), NotMultihomogeneous);
  EXPECT_THROW(lift_binomial(f, Side::C, {{0, 3}, {1}}), NotMultihomogeneous);
  EXPECT_THROW(lift_binomial(f, Side::B, {{0}, {9}}), IndexError);
  EXPECT_THROW(lift_binomial(f, Side::C, {{0, 3}, {1, 2}}, 3), GeneratorLimitExceeded);
  EXPECT_THROW(quad_generators(f, 1), GeneratorLimitExceeded);
  EXPECT_THROW(tfp_generators(f, 7), GeneratorLimitExceeded);
  EXPECT_NO_THROW(tfp_generators(f, 8));
}

TEST(TfpFactors, SingleChoiceLift) {
  TfpFactors f;
  f.b = dense({{1, 1}});
  f.c = dense({{1}});
  f.b_class = {0, 0};
  f.c_class = {0};
  f.classes = 1;
  f.grading = dense({{1}});
  f.index();
  auto lifts = lift_binomial(f, Side::B, {{0}, {1}});
  ASSERT_EQ(lifts.size(), 1u);
  EXPECT_EQ(lifts[0], binom({f.z(0, 0, 0)}, {f.z(0, 1, 0)}));
  EXPECT_TRUE(quad_generators(f).empty());
}

TEST(TfpInstance, TwoByTwo) {
  auto mat = load("twobytwo.txt");
  auto inst = build_tfp_instance(mat, grip_check(mat), 1);
  EXPECT_EQ(inst.grading.rows(), 1u);
  EXPECT_EQ(inst.factors.vars.size(), 4u);
  EXPECT_EQ(inst.factors.classes, 1u);
  EXPECT_TRUE(check_tfp_instance(mat, inst).ok());
  EXPECT_EQ(quad_generators(inst.factors).size(), 1u);
  EXPECT_TRUE(verify_tfp_equality(mat, 1));
}

TEST(TfpInstance, FourteenColumns) {
  auto mat = load("fourteen.txt");
  auto rep = grip_check(mat);
  for (std::size_t level : {1u, 2u}) {
    auto inst = build_tfp_instance(mat, rep, level);
    EXPECT_EQ(inst.factors.vars.size(), 14u);
    EXPECT_TRUE(check_tfp_instance(mat, inst).ok()) << level;
    std::set<std::string> keys;
    std::regex shape("[1-9][0-9]*,[1-9][0-9]*,[1-9][0-9]*");
    for (std::size_t z = 0; z < inst.factors.vars.size(); ++z) {
      EXPECT_TRUE(std::regex_match(inst.var_key(z), shape));
      keys.insert(inst.var_key(z));
    }
    EXPECT_EQ(keys.size(), 14u);
  }
  // The last level: C side carries y copies of e_v, B side x copies of the compression.
  auto inst = build_tfp_instance(mat, rep, 2);
  EXPECT_EQ(inst.c_compression.rows(), 5u);
  EXPECT_EQ(inst.c_compression.cols(), 5u);
  EXPECT_EQ(inst.b_compression.matrix.m(), 6u);
  EXPECT_EQ(inst.factors.classes, 2u);
}

TEST(TfpInstance, CorpusAllLevels) {
  for (const char* name : {"fourteen.txt", "twobytwo.txt", "staged_tree.txt", "diffrep_atilde.txt"}) {
    auto mat = load(name);
    if (mat.k() < 2) continue;
    expect_instance_ok(mat, name);
  }
}

TEST(TfpInstance, GeneratedTrees) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GeneratorConfig cfg;
    cfg.levels = 2 + seed % 2;
    cfg.max_branching = 3;
    cfg.max_leaf_multiplicity = seed % 3 == 0 ? 2 : 1;
    auto mat = matrix_from_tree(generate_balanced_stratified(seed, cfg), true);
    expect_instance_ok(mat, "seed " + std::to_string(seed));
  }
}

TEST(TfpInstance, RipComplexes) {
  expect_instance_ok(matrix_from_complex(SimplicialComplex::from_one_based({{1, 2}, {2, 3}, {3, 4}})), "path");
  expect_instance_ok(matrix_from_complex(SimplicialComplex::from_one_based({{1, 2, 3}, {2, 3, 4}})), "pair");
  expect_instance_ok(
      matrix_from_complex(SimplicialComplex::from_one_based({{1, 2}, {2, 3}}, {2, 3, 2})), "ternary");
}

TEST(TfpInstance, Errors) {
  auto a = load("diffrep_a.txt");
  EXPECT_THROW(verify_tfp_equality(a, 1), GripRequired);
  auto mat = load("fourteen.txt");
  auto rep = grip_check(mat);
  EXPECT_THROW(build_tfp_instance(mat, rep, 0), IndexError);
  EXPECT_THROW(build_tfp_instance(mat, rep, 3), IndexError);
}
