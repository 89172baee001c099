#pragma once

// Closed-form MLEs for GRIP matrices and exact certification of MLE claims.

#include <cstddef>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"
#include "pmle/grip.hpp"
#include "pmle/ips.hpp"
#include "pmle/linalg.hpp"

namespace pmle {

struct MleFactor {
  Fraction numerator;    // alpha^l_{S(l,j)}(d)
  Fraction denominator;  // sum of alpha(d) over the floret of S(l,j)
  Fraction ratio;
};

struct MleResult {
  FractionVector p_star;
  std::vector<std::vector<MleFactor>> factors;  // [j][l]
  std::vector<long> c;
};

namespace detail {

inline void require_grip(const GripReport& rep) {
  if (!rep.overall) throw GripRequired("matrix does not satisfy GRIP");
}

// Floret sums per level under the single-root convention.
inline std::vector<std::vector<Fraction>> floret_sums(const MultipartitionMatrix& mat, const GripReport& rep,
                                                      const std::vector<std::vector<Fraction>>& marg) {
  auto fl = florets_by_level(mat, rep);
  std::vector<std::vector<Fraction>> out(mat.k());
  for (std::size_t l = 0; l < mat.k(); ++l) {
    std::size_t nf = 0;
    for (std::size_t t : fl[l])
      if (t != kNoFloret) nf = std::max(nf, t + 1);
    std::vector<Fraction> fs(nf);
    for (std::size_t i = 0; i < fl[l].size(); ++i)
      if (fl[l][i] != kNoFloret) fs[fl[l][i]] += marg[l][i];
    std::vector<Fraction> per_row(fl[l].size());
    for (std::size_t i = 0; i < fl[l].size(); ++i)
      if (fl[l][i] != kNoFloret) per_row[i] = fs[fl[l][i]];
    out[l] = std::move(per_row);
  }
  return out;
}

// s^l_i(d) = alpha^l_i(d) / (sum over the floret of row i), rows with empty
// support get 0.
inline std::vector<std::vector<Fraction>> floret_normalized(const MultipartitionMatrix& mat, const GripReport& rep,
                                                            std::span<const Fraction> d) {
  auto marg = block_marginals<Fraction>(mat, d);
  auto fs = floret_sums(mat, rep, marg);
  std::vector<std::vector<Fraction>> s(mat.k());
  for (std::size_t l = 0; l < mat.k(); ++l) {
    s[l].resize(marg[l].size());
    for (std::size_t i = 0; i < marg[l].size(); ++i)
      if (!fs[l][i].is_zero()) s[l][i] = marg[l][i] / fs[l][i];
  }
  return s;
}

}  // namespace detail

inline MleResult closed_form_mle(const MultipartitionMatrix& mat, std::span<const Fraction> d, const GripReport& rep) {
  detail::require_grip(rep);
  detail::check_data(mat, d);
  auto marg = block_marginals<Fraction>(mat, d);
  auto fs = detail::floret_sums(mat, rep, marg);
  MleResult res;
  res.c = column_weights(mat);
  res.p_star.resize(mat.m());
  res.factors.resize(mat.m());
  for (std::size_t j = 0; j < mat.m(); ++j) {
    Fraction p(1, res.c[j]);
    for (std::size_t l = 0; l < mat.k(); ++l) {
      std::size_t i = mat.block(l).row_of(j);
      MleFactor f{marg[l][i], fs[l][i], marg[l][i] / fs[l][i]};
      p *= f.ratio;
      res.factors[j].push_back(std::move(f));
    }
    res.p_star[j] = std::move(p);
  }
  return res;
}
inline MleResult closed_form_mle(const MultipartitionMatrix& mat, std::span<const Fraction> d) {
  return closed_form_mle(mat, d, grip_check(mat));
}
inline MleResult closed_form_mle(const MultipartitionMatrix& mat, const FractionVector& d) {
  return closed_form_mle(mat, std::span<const Fraction>(d));
}

// The (u, v, s) coordinates of the columns at a level: u is the cup row of the
// prefix, v the row of the next block, s counts earlier columns of type (u,v).
struct TfpIndex {
  std::size_t u, v, s;
  std::size_t s1, s2;  // s = s1 * y_v + s2
};

inline std::vector<TfpIndex> tfp_indexing(const LevelReport& lv, const PartitionMatrix& c) {
  if (!lv.omega) throw IndexingUndefined("no omega table at level " + std::to_string(lv.level + 1));
  const auto& om = *lv.omega;
  std::vector<std::vector<std::size_t>> seen(lv.b.rows(), std::vector<std::size_t>(c.rows(), 0));
  std::vector<TfpIndex> idx;
  idx.reserve(c.cols());
  for (std::size_t j = 0; j < c.cols(); ++j) {
    std::size_t u = lv.b.row_of(j), v = c.row_of(j);
    std::size_t s = seen[u][v]++;
    auto y = static_cast<std::size_t>(om.y[v]);
    idx.push_back({u, v, s, s / y, s % y});
  }
  return idx;
}

// level is the number of prefix blocks (1 <= level < k); the omega table of the
// pair (cup of the prefix, next block) drives the indexing.
inline const LevelReport& level_report(const GripReport& rep, std::size_t level) {
  if (level == 0 || level > rep.levels.size())
    throw IndexingUndefined("no level pair with a prefix of " + std::to_string(level) + " blocks");
  const auto& lv = rep.levels[level - 1];
  if (!lv.omega) throw IndexingUndefined("florets or omega undefined at prefix " + std::to_string(level));
  return lv;
}

// d~ indexed in the order of compression(prefix, x): (u, s1) for s1 < x_u.
inline FractionVector compressed_data(const MultipartitionMatrix& mat, std::span<const Fraction> d,
                                      const GripReport& rep, std::size_t level) {
  const auto& lv = level_report(rep, level);
  if (d.size() != mat.m()) throw DimensionMismatch("compressed_data: data length mismatch");
  auto idx = tfp_indexing(lv, mat.block(level));
  const auto& x = lv.omega->x;
  std::vector<std::size_t> offset(x.size() + 1, 0);
  for (std::size_t u = 0; u < x.size(); ++u) offset[u + 1] = offset[u] + static_cast<std::size_t>(x[u]);
  FractionVector out(offset.back());
  for (std::size_t j = 0; j < mat.m(); ++j) out[offset[idx[j].u] + idx[j].s1] += d[j];
  return out;
}

// Entry (u, s1) is Y_u times the prefix MLE at any column of class u.
inline FractionVector compressed_mle(const MultipartitionMatrix& mat, std::span<const Fraction> d,
                                     const GripReport& rep, std::size_t level) {
  const auto& lv = level_report(rep, level);
  auto prefix = mat.prefix(level);
  auto pre_rep = grip_check(prefix);
  detail::require_grip(pre_rep);
  auto pstar = closed_form_mle(prefix, d, pre_rep).p_star;
  auto lab = column_labeling(prefix);
  const auto& om = *lv.omega;
  FractionVector out;
  for (std::size_t u = 0; u < lab.beta; ++u) {
    Fraction q = Fraction(om.Y[u]) * pstar[lab.classes[u].front()];
    for (long s = 0; s < om.x[u]; ++s) out.push_back(q);
  }
  return out;
}

// The matrix with only the first copy of every distinct column.
inline MultipartitionMatrix deduplicate(const MultipartitionMatrix& mat, std::vector<std::size_t>* kept = nullptr) {
  auto lab = column_labeling(mat);
  std::vector<std::size_t> cols;
  for (const auto& cls : lab.classes) cols.push_back(cls.front());
  if (kept) *kept = cols;
  return mat.select_columns(cols);
}

// MLE over the distinct columns, d_bar indexed like deduplicate(mat).
inline FractionVector dedup_mle(const MultipartitionMatrix& mat, std::span<const Fraction> d_bar,
                                const GripReport& rep) {
  detail::require_grip(rep);
  auto bar = deduplicate(mat);
  detail::check_data(bar, d_bar);
  // Florets of the deduplicated matrix coincide with those of mat row by row.
  auto s = detail::floret_normalized(bar, rep, d_bar);
  FractionVector t;
  for (const auto& level : s) t.insert(t.end(), level.begin(), level.end());
  return monomial_map<Fraction>(bar, std::span<const Fraction>(t));
}
inline FractionVector dedup_mle(const MultipartitionMatrix& mat, std::span<const Fraction> d_bar) {
  return dedup_mle(mat, d_bar, grip_check(mat));
}

// Kernel relations prod p^{b+} = prod p^{b-}, kept for repeated queries.
class ModelPointChecker {
 public:
  explicit ModelPointChecker(const MultipartitionMatrix& mat)
      : m_(mat.m()), kernel_(integer_kernel_basis(mat.stacked())) {}

  const std::vector<IntegerVector>& kernel() const { return kernel_; }

  bool operator()(std::span<const Fraction> p) const {
    if (p.size() != m_) throw DimensionMismatch("model point: length mismatch");
    for (const auto& b : kernel_) {
      Fraction lhs(1), rhs(1);
      for (std::size_t j = 0; j < m_; ++j) {
        int s = sgn(b[j]);
        if (s == 0) continue;
        Fraction f = pow(p[j], b[j] < 0 ? -b[j].get_si() : b[j].get_si());
        (s > 0 ? lhs : rhs) *= f;
      }
      if (lhs != rhs) return false;
    }
    return true;
  }

 private:
  std::size_t m_;
  std::vector<IntegerVector> kernel_;
};

inline bool verify_model_point(const MultipartitionMatrix& mat, std::span<const Fraction> p) {
  return ModelPointChecker(mat)(p);
}

struct MleVerdict {
  bool birch_ok = false;
  bool model_ok = false;
  bool ok() const { return birch_ok && model_ok; }
};

inline MleVerdict verify_mle(const MultipartitionMatrix& mat, std::span<const Fraction> p, std::span<const Fraction> d) {
  return {birch_residual<Fraction>(mat, p, d).is_zero(), verify_model_point(mat, p)};
}

// Both sides of the identity behind the one-cycle argument, for row i of the
// last block: sum over I^k_i of (1/c^{k-1}_j) prod_{l<k} s^l, and
// C^k_i times the floret sum of row i.
inline std::pair<Fraction, Fraction> last_block_identity(const MultipartitionMatrix& mat, const GripReport& rep,
                                                         std::span<const Fraction> d, std::size_t i) {
  detail::require_grip(rep);
  const std::size_t k = mat.k();
  auto marg = block_marginals<Fraction>(mat, d);
  auto fs = detail::floret_sums(mat, rep, marg);
  auto c_prev = column_weights(mat, k - 1);
  Fraction lhs;
  for (std::size_t j : mat.block(k - 1).support(i)) {
    Fraction term(1, c_prev[j]);
    for (std::size_t l = 0; l + 1 < k; ++l) {
      std::size_t r = mat.block(l).row_of(j);
      term *= marg[l][r] / fs[l][r];
    }
    lhs += term;
  }
  Fraction rhs = rep.ratios.ratio[k - 1][i] * fs[k - 1][i];
  return {lhs, rhs};
}

// p* = phi_A(s^l_i(d) / C^l_i); rows with empty support map to 0.
inline FractionVector mle_via_monomial_map(const MultipartitionMatrix& mat, std::span<const Fraction> d,
                                           const GripReport& rep) {
  detail::require_grip(rep);
  auto s = detail::floret_normalized(mat, rep, d);
  FractionVector t;
  for (std::size_t l = 0; l < mat.k(); ++l)
    for (std::size_t i = 0; i < s[l].size(); ++i) {
      const auto& r = rep.ratios.ratio[l][i];
      t.push_back(r.is_zero() ? Fraction(0) : s[l][i] / r);
    }
  return monomial_map<Fraction>(mat, std::span<const Fraction>(t));
}

}  // namespace pmle
