#pragma once

// Exact rational scalars, vectors and dense matrices.
//
// Fraction wraps a GMP rational and keeps it canonical (reduced, positive
// denominator) after every operation, so equality is plain value equality.

#include <gmpxx.h>

#include <cstddef>
#include <cctype>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pmle/errors.hpp"

namespace pmle {

using Integer = mpz_class;

class Fraction {
 public:
  Fraction() : v_(0) {}
  Fraction(long n) : v_(n) {}  // NOLINT(google-explicit-constructor)
  Fraction(int n) : v_(static_cast<long>(n)) {}  // NOLINT
  explicit Fraction(const Integer& n) : v_(n) {}
  Fraction(const Integer& num, const Integer& den) {
    if (den == 0) throw DivisionByZero("Fraction with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  Fraction(long num, long den) : Fraction(Integer(num), Integer(den)) {}
  explicit Fraction(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

  // Accepts "n", "n/d" and finite decimals such as "-0.125" or "3.5e-2".
  // Decimals are converted exactly from their base-10 expansion.
  static Fraction parse(std::string_view text);

  Integer numerator() const { return v_.get_num(); }
  Integer denominator() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  double to_double() const { return v_.get_d(); }
  std::string to_string() const { return v_.get_str(); }  // "n" or "n/d"
  int sign() const { return sgn(v_); }
  bool is_zero() const { return sgn(v_) == 0; }

  Fraction& operator+=(const Fraction& o) { v_ += o.v_; return *this; }
  Fraction& operator-=(const Fraction& o) { v_ -= o.v_; return *this; }
  Fraction& operator*=(const Fraction& o) { v_ *= o.v_; return *this; }
  Fraction& operator/=(const Fraction& o) {
    if (o.is_zero()) throw DivisionByZero("Fraction division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Fraction operator+(Fraction a, const Fraction& b) { return a += b; }
  friend Fraction operator-(Fraction a, const Fraction& b) { return a -= b; }
  friend Fraction operator*(Fraction a, const Fraction& b) { return a *= b; }
  friend Fraction operator/(Fraction a, const Fraction& b) { return a /= b; }
  friend Fraction operator-(const Fraction& a) { return Fraction(mpq_class(-a.v_)); }

  friend bool operator==(const Fraction& a, const Fraction& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Fraction& a, const Fraction& b) { return a.v_ != b.v_; }
  friend bool operator<(const Fraction& a, const Fraction& b) { return a.v_ < b.v_; }
  friend bool operator>(const Fraction& a, const Fraction& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Fraction& a, const Fraction& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Fraction& a, const Fraction& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Fraction& f) {
    return os << f.to_string();
  }

 private:
  mpq_class v_;
};

inline Fraction abs(const Fraction& f) { return f.sign() < 0 ? -f : f; }

// Integer power with a signed exponent; 0^negative throws.
inline Fraction pow(const Fraction& base, long exponent) {
  if (exponent < 0) return Fraction(1) / pow(base, -exponent);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.raw().get_num_mpz_t(), static_cast<unsigned long>(exponent));
  mpz_pow_ui(den.get_mpz_t(), base.raw().get_den_mpz_t(), static_cast<unsigned long>(exponent));
  return Fraction(num, den);
}

inline Fraction Fraction::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) throw ParseError("empty rational literal");

  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    std::string str(s);
    if (!str.empty() && str.front() == '+') str.erase(0, 1);
    mpz_class z;
    if (str.empty() || z.set_str(str, 10) != 0) {
      throw ParseError("invalid integer literal '" + std::string(s) + "'");
    }
    return z;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_int(text.substr(0, slash));
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Fraction(num, den);
  }

  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::string_view mantissa = text;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    std::string es(text.substr(e + 1));
    try {
      std::size_t used = 0;
      exp10 = std::stol(es, &used);
      if (used != es.size()) throw ParseError("bad exponent");
    } catch (const std::exception&) {
      throw ParseError("invalid exponent in '" + std::string(text) + "'");
    }
  }
  std::string digits;
  bool negative = false;
  std::size_t pos = 0;
  if (pos < mantissa.size() && (mantissa[pos] == '-' || mantissa[pos] == '+')) {
    negative = mantissa[pos] == '-';
    ++pos;
  }
  long frac_digits = 0;
  bool seen_point = false;
  for (; pos < mantissa.size(); ++pos) {
    char c = mantissa[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      throw ParseError("invalid rational literal '" + std::string(text) + "'");
    }
  }
  if (digits.empty()) throw ParseError("invalid rational literal '" + std::string(text) + "'");
  Integer num(digits, 10);
  if (negative) num = -num;
  long shift = exp10 - frac_digits;
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  return shift >= 0 ? Fraction(Integer(num * scale)) : Fraction(num, scale);
}

using FractionVector = std::vector<Fraction>;

inline Fraction sum(std::span<const Fraction> v) {
  Fraction s;
  for (const auto& x : v) s += x;
  return s;
}

inline Fraction dot(std::span<const Fraction> a, std::span<const Fraction> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  Fraction s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Dense row-major matrix. Used with Fraction for exact linear algebra and
// with double where the float IPS path needs it.
template <typename T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static DenseMatrix from_rows(const std::vector<std::vector<T>>& rows) {
    DenseMatrix m;
    m.rows_ = rows.size();
    m.cols_ = rows.empty() ? 0 : rows.front().size();
    m.data_.reserve(m.rows_ * m.cols_);
    for (const auto& row : rows) {
      if (row.size() != m.cols_) throw DimensionMismatch("ragged matrix rows");
      m.data_.insert(m.data_.end(), row.begin(), row.end());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void append_row(std::span<const T> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_) throw DimensionMismatch("append_row: width mismatch");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }

  // Rows of *this followed by rows of other.
  DenseMatrix stacked(const DenseMatrix& other) const {
    if (rows_ == 0) return other;
    if (other.rows_ == 0) return *this;
    if (other.cols_ != cols_) throw DimensionMismatch("stack: column count mismatch");
    DenseMatrix out = *this;
    out.data_.insert(out.data_.end(), other.data_.begin(), other.data_.end());
    out.rows_ += other.rows_;
    return out;
  }

  DenseMatrix select_columns(std::span<const std::size_t> cols) const {
    DenseMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = (*this)(r, cols[c]);
    return out;
  }

  std::vector<T> multiply(std::span<const T> x) const {
    if (x.size() != cols_) throw DimensionMismatch("matrix-vector: length mismatch");
    std::vector<T> y(rows_, T());
    for (std::size_t r = 0; r < rows_; ++r) {
      T acc = T();
      for (std::size_t c = 0; c < cols_; ++c) {
        if ((*this)(r, c) != T()) acc += (*this)(r, c) * x[c];
      }
      y[r] = acc;
    }
    return y;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator!=(const DenseMatrix& a, const DenseMatrix& b) { return !(a == b); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using FractionMatrix = DenseMatrix<Fraction>;

}  // namespace pmle

template <>
struct std::hash<pmle::Fraction> {
  std::size_t operator()(const pmle::Fraction& f) const noexcept {
    return std::hash<std::string>{}(f.to_string());
  }
};
