#pragma once

// Exact rational elimination: rank, rowspan membership with certificates and
// integer kernel bases. Pivots are the first nonzero entry in column order.

#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"

namespace pmle {

struct Rref {
  FractionMatrix reduced;            // rank rows, reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each row
  std::size_t rank() const { return pivots.size(); }
};

inline Rref rref(const FractionMatrix& input) {
  FractionMatrix a = input;
  std::size_t rows = a.rows(), cols = a.cols();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c).is_zero()) ++p;
    if (p == rows) continue;
    if (p != r)
      for (std::size_t cc = 0; cc < cols; ++cc) std::swap(a(p, cc), a(r, cc));
    Fraction inv = Fraction(1) / a(r, c);
    for (std::size_t cc = c; cc < cols; ++cc) a(r, cc) *= inv;
    for (std::size_t rr = 0; rr < rows; ++rr) {
      if (rr == r || a(rr, c).is_zero()) continue;
      Fraction f = a(rr, c);
      for (std::size_t cc = c; cc < cols; ++cc)
        if (!a(r, cc).is_zero()) a(rr, cc) -= f * a(r, cc);
    }
    pivots.push_back(c);
    ++r;
  }
  FractionMatrix reduced(r, cols);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t c = 0; c < cols; ++c) reduced(i, c) = a(i, c);
  return {std::move(reduced), std::move(pivots)};
}

inline std::size_t rank(const FractionMatrix& m) { return rref(m).rank(); }

// Reduced basis of a rowspace that also remembers how each basis row arises
// from the original rows, so membership queries can return coefficients.
class RowspaceBasis {
 public:
  explicit RowspaceBasis(const FractionMatrix& m) : n_rows_(m.rows()), n_cols_(m.cols()) {
    FractionMatrix aug(m.rows(), m.cols() + m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
      aug(r, m.cols() + r) = Fraction(1);
    }
    // Eliminate on the left part only.
    std::size_t rows = aug.rows(), cols = aug.cols(), r = 0;
    for (std::size_t c = 0; c < n_cols_ && r < rows; ++c) {
      std::size_t p = r;
      while (p < rows && aug(p, c).is_zero()) ++p;
      if (p == rows) continue;
      if (p != r)
        for (std::size_t cc = 0; cc < cols; ++cc) std::swap(aug(p, cc), aug(r, cc));
      Fraction inv = Fraction(1) / aug(r, c);
      for (std::size_t cc = 0; cc < cols; ++cc)
        if (!aug(r, cc).is_zero()) aug(r, cc) *= inv;
      for (std::size_t rr = 0; rr < rows; ++rr) {
        if (rr == r || aug(rr, c).is_zero()) continue;
        Fraction f = aug(rr, c);
        for (std::size_t cc = 0; cc < cols; ++cc)
          if (!aug(r, cc).is_zero()) aug(rr, cc) -= f * aug(r, cc);
      }
      pivots_.push_back(c);
      ++r;
    }
    basis_ = FractionMatrix(r, n_cols_);
    transform_ = FractionMatrix(r, n_rows_);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t c = 0; c < n_cols_; ++c) basis_(i, c) = aug(i, c);
      for (std::size_t c = 0; c < n_rows_; ++c) transform_(i, c) = aug(i, n_cols_ + c);
    }
  }

  std::size_t rank() const { return pivots_.size(); }
  std::size_t cols() const { return n_cols_; }

  // Coefficients over the original rows, or nullopt if v is not in the span.
  std::optional<FractionVector> contains(std::span<const Fraction> v) const {
    if (v.size() != n_cols_) throw DimensionMismatch("rowspan: vector length mismatch");
    FractionVector residual(v.begin(), v.end());
    FractionVector coef(n_rows_);
    for (std::size_t i = 0; i < pivots_.size(); ++i) {
      Fraction a = residual[pivots_[i]];
      if (a.is_zero()) continue;
      for (std::size_t c = 0; c < n_cols_; ++c)
        if (!basis_(i, c).is_zero()) residual[c] -= a * basis_(i, c);
      for (std::size_t c = 0; c < n_rows_; ++c)
        if (!transform_(i, c).is_zero()) coef[c] += a * transform_(i, c);
    }
    for (const auto& x : residual)
      if (!x.is_zero()) return std::nullopt;
    return coef;
  }

 private:
  std::size_t n_rows_, n_cols_;
  std::vector<std::size_t> pivots_;
  FractionMatrix basis_;
  FractionMatrix transform_;
};

inline std::optional<FractionVector> rowspan_contains(const FractionMatrix& m, std::span<const Fraction> v) {
  return RowspaceBasis(m).contains(v);
}

inline bool rowspan_equal(const FractionMatrix& a, const FractionMatrix& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("rowspan_equal: column count mismatch");
  std::size_t ra = rank(a), rb = rank(b);
  if (ra != rb) return false;
  return rank(a.stacked(b)) == ra;
}

using IntegerVector = std::vector<Integer>;

// Primitive integer vector: denominators cleared, content divided out, first
// nonzero entry positive.
inline IntegerVector primitive(std::span<const Fraction> v) {
  Integer l = 1;
  for (const auto& x : v) {
    Integer d = x.denominator();
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  IntegerVector out;
  out.reserve(v.size());
  Integer g = 0;
  for (const auto& x : v) {
    Integer n = x.numerator() * (l / x.denominator());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    out.push_back(n);
  }
  if (g == 0) return out;
  int s = 0;
  for (const auto& n : out)
    if (n != 0) {
      s = sgn(n);
      break;
    }
  if (s < 0) g = -g;
  for (auto& n : out) n /= g;
  return out;
}

inline std::vector<IntegerVector> integer_kernel_basis(const FractionMatrix& m) {
  Rref r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<IntegerVector> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    FractionVector x(m.cols());
    x[f] = Fraction(1);
    for (std::size_t i = 0; i < r.rank(); ++i) x[r.pivots[i]] = -r.reduced(i, f);
    basis.push_back(primitive(x));
  }
  return basis;
}

inline bool in_integer_kernel(const FractionMatrix& m, std::span<const Integer> v) {
  if (v.size() != m.cols()) throw DimensionMismatch("kernel check: length mismatch");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Fraction s;
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (v[c] != 0 && !m(r, c).is_zero()) s += m(r, c) * Fraction(v[c]);
    if (!s.is_zero()) return false;
  }
  return true;
}

}  // namespace pmle
