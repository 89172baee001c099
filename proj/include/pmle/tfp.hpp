#pragma once

// Toric fiber products of two graded factors: the parametrization matrix, the
// Quad and Lift binomial families, and the GRIP level split.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"
#include "pmle/grip.hpp"
#include "pmle/linalg.hpp"
#include "pmle/mle.hpp"

namespace pmle {

inline constexpr std::size_t kDefaultGeneratorLimit = 10'000;

// Exponent vectors of z^plus - z^minus, sparse over variable indices.
struct Binomial {
  std::map<std::size_t, long> plus, minus;
  friend bool operator==(const Binomial&, const Binomial&) = default;
  friend bool operator<(const Binomial& a, const Binomial& b) {
    return std::tie(a.plus, a.minus) < std::tie(b.plus, b.minus);
  }
};

// Two factor matrices over a shared grading. Column n of the B side has class
// b_class[n]; variables z^i_{jk} pair the j-th B column of class i with the
// k-th C column of class i, ordered by (i, j, k).
struct TfpFactors {
  FractionMatrix b, c;
  std::vector<std::size_t> b_class, c_class;
  std::size_t classes = 0;
  FractionMatrix grading;  // column i is the degree of class i

  std::vector<std::vector<std::size_t>> b_cols, c_cols;  // class -> columns
  struct Var {
    std::size_t i, j, k;
  };
  std::vector<Var> vars;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> var_index;

  void index() {
    if (b_class.size() != b.cols() || c_class.size() != c.cols())
      throw DimensionMismatch("tfp: one class per factor column expected");
    b_cols.assign(classes, {});
    c_cols.assign(classes, {});
    for (std::size_t n = 0; n < b_class.size(); ++n) b_cols.at(b_class[n]).push_back(n);
    for (std::size_t n = 0; n < c_class.size(); ++n) c_cols.at(c_class[n]).push_back(n);
    vars.clear();
    var_index.clear();
    for (std::size_t i = 0; i < classes; ++i)
      for (std::size_t j = 0; j < b_cols[i].size(); ++j)
        for (std::size_t k = 0; k < c_cols[i].size(); ++k) {
          var_index[{i, j, k}] = vars.size();
          vars.push_back({i, j, k});
        }
  }

  std::size_t z(std::size_t i, std::size_t j, std::size_t k) const { return var_index.at({i, j, k}); }

  // Rank of column n inside its class.
  std::size_t b_rank(std::size_t n) const {
    const auto& cols = b_cols[b_class[n]];
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), n) - cols.begin());
  }
  std::size_t c_rank(std::size_t n) const {
    const auto& cols = c_cols[c_class[n]];
    return static_cast<std::size_t>(std::find(cols.begin(), cols.end(), n) - cols.begin());
  }
};

// Column z^i_{jk} is B column (i,j) stacked over C column (i,k).
inline FractionMatrix tfp_parametrization_matrix(const TfpFactors& f) {
  FractionMatrix out(f.b.rows() + f.c.rows(), f.vars.size());
  for (std::size_t n = 0; n < f.vars.size(); ++n) {
    const auto& v = f.vars[n];
    std::size_t bj = f.b_cols[v.i][v.j], ck = f.c_cols[v.i][v.k];
    for (std::size_t r = 0; r < f.b.rows(); ++r) out(r, n) = f.b(r, bj);
    for (std::size_t r = 0; r < f.c.rows(); ++r) out(f.b.rows() + r, n) = f.c(r, ck);
  }
  return out;
}

inline std::vector<Binomial> quad_generators(const TfpFactors& f, std::size_t limit = kDefaultGeneratorLimit) {
  std::vector<Binomial> out;
  for (std::size_t i = 0; i < f.classes; ++i) {
    std::size_t s = f.b_cols[i].size(), t = f.c_cols[i].size();
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t j2 = j + 1; j2 < s; ++j2)
        for (std::size_t k = 0; k < t; ++k)
          for (std::size_t k2 = k + 1; k2 < t; ++k2) {
            if (out.size() >= limit) throw GeneratorLimitExceeded("Quad exceeds " + std::to_string(limit));
            Binomial q;
            ++q.plus[f.z(i, j, k)];
            ++q.plus[f.z(i, j2, k2)];
            ++q.minus[f.z(i, j, k2)];
            ++q.minus[f.z(i, j2, k)];
            out.push_back(std::move(q));
          }
  }
  return out;
}

// A binomial over one factor's columns: prod x^{lhs} - prod x^{rhs}, each side
// a list of column indices with repetition.
struct FactorBinomial {
  std::vector<std::size_t> lhs, rhs;
};

enum class Side { B, C };

inline std::vector<Binomial> lift_binomial(const TfpFactors& f, Side side, const FactorBinomial& g,
                                           std::size_t limit = kDefaultGeneratorLimit) {
  const auto& cls = side == Side::B ? f.b_class : f.c_class;
  auto sorted = [&](std::vector<std::size_t> mono) {
    for (std::size_t n : mono)
      if (n >= cls.size()) throw IndexError("lift: column " + std::to_string(n) + " out of range");
    std::stable_sort(mono.begin(), mono.end(), [&](std::size_t a, std::size_t b) { return cls[a] < cls[b]; });
    return mono;
  };
  auto lhs = sorted(g.lhs), rhs = sorted(g.rhs);
  bool same = lhs.size() == rhs.size();
  for (std::size_t a = 0; same && a < lhs.size(); ++a) same = cls[lhs[a]] == cls[rhs[a]];
  if (!same) throw NotMultihomogeneous("binomial sides have different degrees under the grading");

  // Free index per factor: k for a B-side binomial, j for a C-side one.
  std::vector<std::size_t> range;
  std::size_t total = 1;
  for (std::size_t n : lhs) {
    std::size_t i = cls[n];
    range.push_back(side == Side::B ? f.c_cols[i].size() : f.b_cols[i].size());
    if (range.back() == 0) return {};
    total *= range.back();
    if (total > limit) throw GeneratorLimitExceeded("Lift exceeds " + std::to_string(limit));
  }
  std::vector<Binomial> out;
  std::vector<std::size_t> choice(lhs.size(), 0);
  for (std::size_t count = 0; count < total; ++count) {
    Binomial b;
    for (std::size_t a = 0; a < lhs.size(); ++a) {
      std::size_t i = cls[lhs[a]];
      if (side == Side::B) {
        ++b.plus[f.z(i, f.b_rank(lhs[a]), choice[a])];
        ++b.minus[f.z(i, f.b_rank(rhs[a]), choice[a])];
      } else {
        ++b.plus[f.z(i, choice[a], f.c_rank(lhs[a]))];
        ++b.minus[f.z(i, choice[a], f.c_rank(rhs[a]))];
      }
    }
    out.push_back(std::move(b));
    // Last factor fastest.
    for (std::size_t a = choice.size(); a-- > 0;) {
      if (++choice[a] < range[a]) break;
      choice[a] = 0;
    }
  }
  return out;
}

inline IntegerVector exponent_difference(const Binomial& b, std::size_t n_vars) {
  IntegerVector v(n_vars, 0);
  for (const auto& [z, e] : b.plus) v.at(z) += e;
  for (const auto& [z, e] : b.minus) v.at(z) -= e;
  return v;
}

inline bool binomial_in_kernel(const FractionMatrix& param, const Binomial& b) {
  auto v = exponent_difference(b, param.cols());
  return in_integer_kernel(param, v);
}

// Kernel lattice basis of a factor as binomials over its columns.
inline std::vector<FactorBinomial> factor_binomials(const FractionMatrix& m) {
  std::vector<FactorBinomial> out;
  for (const auto& v : integer_kernel_basis(m)) {
    FactorBinomial g;
    for (std::size_t n = 0; n < v.size(); ++n) {
      long e = v[n].get_si();
      for (long t = 0; t < (e > 0 ? e : -e); ++t) (e > 0 ? g.lhs : g.rhs).push_back(n);
    }
    out.push_back(std::move(g));
  }
  return out;
}

// The split of A^{1..level+1} at a GRIP level. B side: compression of the
// prefix with x_u copies of class u; C side: y_v copies of e_v. Classes are
// florets. column_of_var maps each z variable to its column of A.
struct TfpInstance {
  std::size_t level = 0;  // number of prefix blocks
  TfpFactors factors;
  Compression b_compression;
  PartitionMatrix c_compression;     // gamma rows, (v, s2) columns
  std::vector<std::size_t> c_source_row;
  PartitionMatrix grading;           // cap of the prefix cup and the next block
  std::vector<TfpIndex> uvs;         // per A column
  std::vector<std::size_t> column_of_var;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> uvs_of_var;

  std::string var_key(std::size_t z) const {
    auto [u, v, s] = uvs_of_var.at(z);
    return std::to_string(u + 1) + "," + std::to_string(v + 1) + "," + std::to_string(s + 1);
  }
};

inline TfpInstance build_tfp_instance(const MultipartitionMatrix& mat, const GripReport& rep, std::size_t level) {
  if (level == 0 || level >= mat.k())
    throw IndexError("tfp level must lie between 1 and " + std::to_string(mat.k() - 1));
  for (std::size_t l = 0; l < level; ++l)
    if (!rep.levels.at(l).ok()) throw GripRequired("GRIP fails at level " + std::to_string(l + 1));
  const auto& lv = rep.levels[level - 1];
  const auto& om = *lv.omega;
  const auto& dec = *lv.decomposition;
  const auto& cblk = mat.block(level);

  TfpInstance inst;
  inst.level = level;
  inst.grading = *lv.cap;
  inst.b_compression = compression(mat.prefix_blocks(level), om.x);

  std::vector<std::size_t> c_rows;
  std::vector<std::pair<std::size_t, std::size_t>> c_index;
  for (std::size_t v = 0; v < cblk.rows(); ++v)
    for (long s = 0; s < om.y[v]; ++s) {
      c_rows.push_back(v);
      c_index.emplace_back(v, static_cast<std::size_t>(s));
    }
  inst.c_compression = PartitionMatrix(cblk.rows(), c_rows);
  inst.c_source_row = c_rows;

  auto& f = inst.factors;
  f.b = inst.b_compression.matrix.stacked();
  f.c = inst.c_compression.dense();
  f.classes = dec.size();
  for (const auto& [u, s1] : inst.b_compression.index) f.b_class.push_back(dec.t_of_b[u]);
  for (std::size_t v : c_rows) f.c_class.push_back(dec.t_of_c[v]);
  f.grading = FractionMatrix(f.classes, f.classes);
  for (std::size_t i = 0; i < f.classes; ++i) f.grading(i, i) = Fraction(1);
  f.index();

  inst.uvs = tfp_indexing(lv, cblk);
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::size_t> col_of;
  for (std::size_t j = 0; j < mat.m(); ++j) col_of[{inst.uvs[j].u, inst.uvs[j].v, inst.uvs[j].s}] = j;
  inst.column_of_var.resize(f.vars.size());
  inst.uvs_of_var.resize(f.vars.size());
  for (std::size_t z = 0; z < f.vars.size(); ++z) {
    const auto& var = f.vars[z];
    auto [u, s1] = inst.b_compression.index[f.b_cols[var.i][var.j]];
    auto [v, s2] = c_index[f.c_cols[var.i][var.k]];
    std::size_t s = s1 * static_cast<std::size_t>(om.y[v]) + s2;
    inst.uvs_of_var[z] = {u, v, s};
    auto it = col_of.find({u, v, s});
    if (it == col_of.end()) throw IndexingUndefined("z variable without a matching column");
    inst.column_of_var[z] = it->second;
  }
  return inst;
}

struct TfpCheck {
  bool bijection = false;
  bool columns_match = false;
  bool grading_independent = false;
  bool multihomogeneous = false;
  bool rowspan_equal = false;
  bool ok() const { return bijection && columns_match && grading_independent && multihomogeneous && rowspan_equal; }
};

inline TfpCheck check_tfp_instance(const MultipartitionMatrix& mat, const TfpInstance& inst) {
  TfpCheck chk;
  const auto& f = inst.factors;
  FractionMatrix param = tfp_parametrization_matrix(f);
  FractionMatrix target = mat.stacked(inst.level + 1);

  std::vector<std::size_t> hits(mat.m(), 0);
  for (std::size_t j : inst.column_of_var) ++hits.at(j);
  chk.bijection = inst.column_of_var.size() == mat.m() &&
                  std::all_of(hits.begin(), hits.end(), [](std::size_t h) { return h == 1; });

  chk.columns_match = chk.bijection;
  for (std::size_t z = 0; chk.columns_match && z < param.cols(); ++z)
    for (std::size_t r = 0; r < param.rows(); ++r)
      if (param(r, z) != target(r, inst.column_of_var[z])) {
        chk.columns_match = false;
        break;
      }

  FractionMatrix d = inst.grading.dense();
  chk.grading_independent = rank(d) == d.rows();

  // Grading restricted to each factor's columns lies in that factor's rowspan.
  FractionMatrix d_b(f.classes, f.b.cols()), d_c(f.classes, f.c.cols());
  for (std::size_t n = 0; n < f.b.cols(); ++n) d_b(f.b_class[n], n) = Fraction(1);
  for (std::size_t n = 0; n < f.c.cols(); ++n) d_c(f.c_class[n], n) = Fraction(1);
  RowspaceBasis rb(f.b), rc(f.c);
  chk.multihomogeneous = true;
  for (std::size_t t = 0; t < f.classes && chk.multihomogeneous; ++t)
    chk.multihomogeneous = rb.contains(d_b.row(t)).has_value() && rc.contains(d_c.row(t)).has_value();

  if (chk.bijection) {
    FractionMatrix permuted = target.select_columns(inst.column_of_var);
    chk.rowspan_equal = pmle::rowspan_equal(param, permuted);
  }
  return chk;
}

inline bool verify_tfp_equality(const MultipartitionMatrix& mat, const GripReport& rep, std::size_t level) {
  return check_tfp_instance(mat, build_tfp_instance(mat, rep, level)).ok();
}
inline bool verify_tfp_equality(const MultipartitionMatrix& mat, std::size_t level) {
  return verify_tfp_equality(mat, grip_check(mat), level);
}

struct GeneratorSet {
  std::vector<Binomial> quads, lifts_b, lifts_c;
  std::size_t size() const { return quads.size() + lifts_b.size() + lifts_c.size(); }
};

// Quad plus the lifts of each factor's kernel lattice basis.
inline GeneratorSet tfp_generators(const TfpFactors& f, std::size_t limit = kDefaultGeneratorLimit) {
  GeneratorSet g;
  g.quads = quad_generators(f, limit);
  auto push = [&](std::vector<Binomial>& dst, Side side, const FractionMatrix& m) {
    for (const auto& fb : factor_binomials(m)) {
      auto lifted = lift_binomial(f, side, fb, limit);
      if (g.size() + lifted.size() > limit) throw GeneratorLimitExceeded("generators exceed " + std::to_string(limit));
      dst.insert(dst.end(), lifted.begin(), lifted.end());
    }
  };
  push(g.lifts_b, Side::B, f.b);
  push(g.lifts_c, Side::C, f.c);
  return g;
}

}  // namespace pmle
