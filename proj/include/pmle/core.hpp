#pragma once

// Partition and multipartition matrices.
//
// All indices in the C++ API are 0-based: block l, row i, column j. A block is
// stored as its row count plus, for each column, the row holding its unit
// entry. Rows may be empty (no columns), which a 0/1 partition allows.

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"

namespace pmle {

// Dense 0/1 input as read from a file, before validation.
struct RawMatrix {
  std::vector<std::vector<std::vector<int>>> blocks;  // block -> row -> entries
};

struct Violation {
  enum class Kind { ColumnSum, Width, Empty };
  Kind kind;
  std::size_t block = 0;
  std::size_t column = 0;
  long sum = 0;

  std::string describe() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::ColumnSum:
        os << "block " << block + 1 << ", column " << column + 1 << ": column sum " << sum
           << " (expected 1)";
        break;
      case Kind::Width:
        os << "block " << block + 1 << ": " << sum << " columns, expected " << column;
        break;
      case Kind::Empty:
        os << "matrix has no blocks or no columns";
        break;
    }
    return os.str();
  }
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Throws EntryNotBinary on entries outside {0,1} and DimensionMismatch on ragged
// rows inside a block. Everything else is reported as a violation.
inline ValidationReport validate(const RawMatrix& raw) {
  ValidationReport rep;
  if (raw.blocks.empty()) {
    rep.violations.push_back({Violation::Kind::Empty});
    return rep;
  }
  std::size_t m = 0;
  bool have_m = false;
  for (std::size_t b = 0; b < raw.blocks.size(); ++b) {
    const auto& block = raw.blocks[b];
    if (block.empty()) continue;
    std::size_t w = block.front().size();
    for (std::size_t r = 0; r < block.size(); ++r) {
      if (block[r].size() != w) {
        throw DimensionMismatch("block " + std::to_string(b + 1) + ", row " + std::to_string(r + 1) +
                                ": expected " + std::to_string(w) + " entries, got " +
                                std::to_string(block[r].size()));
      }
      for (std::size_t c = 0; c < w; ++c) {
        int e = block[r][c];
        if (e != 0 && e != 1) {
          throw EntryNotBinary("block " + std::to_string(b + 1) + ", row " + std::to_string(r + 1) +
                               ", column " + std::to_string(c + 1) + ": entry " + std::to_string(e));
        }
      }
    }
    if (!have_m) {
      m = w;
      have_m = true;
    }
  }
  if (!have_m || m == 0) {
    rep.violations.push_back({Violation::Kind::Empty});
    return rep;
  }
  for (std::size_t b = 0; b < raw.blocks.size(); ++b) {
    const auto& block = raw.blocks[b];
    std::size_t w = block.empty() ? m : block.front().size();
    if (w != m) {
      rep.violations.push_back({Violation::Kind::Width, b, m, static_cast<long>(w)});
      continue;
    }
    for (std::size_t c = 0; c < m; ++c) {
      long s = 0;
      for (const auto& row : block) s += row[c];
      if (s != 1) rep.violations.push_back({Violation::Kind::ColumnSum, b, c, s});
    }
  }
  return rep;
}

class PartitionMatrix {
 public:
  PartitionMatrix() = default;
  PartitionMatrix(std::size_t n_rows, std::vector<std::size_t> row_of)
      : n_rows_(n_rows), row_of_(std::move(row_of)) {
    for (std::size_t r : row_of_)
      if (r >= n_rows_) throw IndexError("partition row index out of range");
  }

  static PartitionMatrix identity(std::size_t m) {
    std::vector<std::size_t> r(m);
    for (std::size_t j = 0; j < m; ++j) r[j] = j;
    return {m, std::move(r)};
  }

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return row_of_.size(); }
  std::size_t row_of(std::size_t j) const { return row_of_.at(j); }
  const std::vector<std::size_t>& row_map() const { return row_of_; }
  int entry(std::size_t i, std::size_t j) const { return row_of_.at(j) == i ? 1 : 0; }

  std::vector<std::size_t> support(std::size_t i) const {
    if (i >= n_rows_) throw IndexError("row " + std::to_string(i) + " out of range");
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < row_of_.size(); ++j)
      if (row_of_[j] == i) s.push_back(j);
    return s;
  }

  std::vector<int> row(std::size_t i) const {
    std::vector<int> out(cols(), 0);
    for (std::size_t j : support(i)) out[j] = 1;
    return out;
  }

  template <typename T = Fraction>
  DenseMatrix<T> dense() const {
    DenseMatrix<T> out(n_rows_, cols(), T(0));
    for (std::size_t j = 0; j < cols(); ++j) out(row_of_[j], j) = T(1);
    return out;
  }

  PartitionMatrix select_columns(std::span<const std::size_t> cols) const {
    std::vector<std::size_t> r;
    r.reserve(cols.size());
    for (std::size_t j : cols) r.push_back(row_of_.at(j));
    return {n_rows_, std::move(r)};
  }

  friend bool operator==(const PartitionMatrix&, const PartitionMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::vector<std::size_t> row_of_;
};

struct ColumnLabeling {
  std::vector<std::size_t> label;               // column -> class in [0, beta)
  std::size_t beta = 0;
  std::vector<std::vector<std::size_t>> classes;  // class -> columns, ascending

  std::size_t size_of(std::size_t j) const { return classes[label[j]].size(); }
};

// Labels in first-appearance order; key(j) must be comparable.
template <typename KeyFn>
ColumnLabeling label_by_key(std::size_t m, KeyFn key) {
  using Key = decltype(key(std::size_t{0}));
  std::map<Key, std::size_t> seen;
  ColumnLabeling out;
  out.label.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    auto [it, fresh] = seen.try_emplace(key(j), out.beta);
    if (fresh) {
      ++out.beta;
      out.classes.emplace_back();
    }
    out.label[j] = it->second;
    out.classes[it->second].push_back(j);
  }
  return out;
}

template <typename T>
ColumnLabeling column_labeling(const DenseMatrix<T>& mat) {
  return label_by_key(mat.cols(), [&](std::size_t j) {
    std::vector<std::string> col;
    col.reserve(mat.rows());
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      std::ostringstream os;
      os << mat(r, j);
      col.push_back(os.str());
    }
    return col;
  });
}

inline ColumnLabeling column_labeling(std::span<const PartitionMatrix> blocks) {
  std::size_t m = blocks.empty() ? 0 : blocks.front().cols();
  for (const auto& b : blocks)
    if (b.cols() != m) throw DimensionMismatch("blocks have different column counts");
  return label_by_key(m, [&](std::size_t j) {
    std::vector<std::size_t> sig;
    sig.reserve(blocks.size());
    for (const auto& b : blocks) sig.push_back(b.row_of(j));
    return sig;
  });
}

class MultipartitionMatrix {
 public:
  MultipartitionMatrix() = default;
  explicit MultipartitionMatrix(std::vector<PartitionMatrix> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw DimensionMismatch("multipartition matrix needs at least one block");
    std::size_t m = blocks_.front().cols();
    if (m == 0) throw DimensionMismatch("multipartition matrix needs at least one column");
    for (const auto& b : blocks_)
      if (b.cols() != m) throw DimensionMismatch("blocks have different column counts");
  }

  // Validates first; throws DimensionMismatch listing the violations.
  static MultipartitionMatrix from_raw(const RawMatrix& raw) {
    auto rep = validate(raw);
    if (!rep.ok()) {
      std::string msg = "not a multipartition matrix";
      for (const auto& v : rep.violations) msg += "; " + v.describe();
      throw DimensionMismatch(msg);
    }
    std::vector<PartitionMatrix> blocks;
    for (const auto& block : raw.blocks) {
      std::size_t m = block.front().size();
      std::vector<std::size_t> row_of(m);
      for (std::size_t r = 0; r < block.size(); ++r)
        for (std::size_t c = 0; c < m; ++c)
          if (block[r][c]) row_of[c] = r;
      blocks.emplace_back(block.size(), std::move(row_of));
    }
    return MultipartitionMatrix(std::move(blocks));
  }

  static MultipartitionMatrix from_dense(const std::vector<std::vector<std::vector<int>>>& blocks) {
    return from_raw(RawMatrix{blocks});
  }

  std::size_t k() const { return blocks_.size(); }
  std::size_t m() const { return blocks_.front().cols(); }
  const PartitionMatrix& block(std::size_t l) const {
    if (l >= blocks_.size()) throw IndexError("block " + std::to_string(l) + " out of range");
    return blocks_[l];
  }
  const std::vector<PartitionMatrix>& blocks() const { return blocks_; }
  std::span<const PartitionMatrix> prefix_blocks(std::size_t levels) const {
    return std::span<const PartitionMatrix>(blocks_).first(levels);
  }

  std::size_t total_rows(std::size_t levels) const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < levels; ++l) n += blocks_[l].rows();
    return n;
  }
  std::size_t total_rows() const { return total_rows(k()); }
  std::size_t row_offset(std::size_t l) const { return total_rows(l); }

  MultipartitionMatrix prefix(std::size_t levels) const {
    if (levels == 0 || levels > k()) throw IndexError("prefix length out of range");
    return MultipartitionMatrix(std::vector<PartitionMatrix>(blocks_.begin(), blocks_.begin() + levels));
  }

  MultipartitionMatrix select_columns(std::span<const std::size_t> cols) const {
    std::vector<PartitionMatrix> out;
    for (const auto& b : blocks_) out.push_back(b.select_columns(cols));
    return MultipartitionMatrix(std::move(out));
  }

  // Stacked rows of the first `levels` blocks.
  template <typename T = Fraction>
  DenseMatrix<T> stacked(std::size_t levels) const {
    DenseMatrix<T> out(total_rows(levels), m(), T(0));
    std::size_t off = 0;
    for (std::size_t l = 0; l < levels; ++l) {
      for (std::size_t j = 0; j < m(); ++j) out(off + blocks_[l].row_of(j), j) = T(1);
      off += blocks_[l].rows();
    }
    return out;
  }
  template <typename T = Fraction>
  DenseMatrix<T> stacked() const {
    return stacked<T>(k());
  }

  RawMatrix to_raw() const {
    RawMatrix raw;
    for (const auto& b : blocks_) {
      std::vector<std::vector<int>> rows;
      for (std::size_t i = 0; i < b.rows(); ++i) rows.push_back(b.row(i));
      raw.blocks.push_back(std::move(rows));
    }
    return raw;
  }

  friend bool operator==(const MultipartitionMatrix&, const MultipartitionMatrix&) = default;

 private:
  std::vector<PartitionMatrix> blocks_;
};

inline std::vector<std::size_t> index_set(const MultipartitionMatrix& mat, std::size_t l, std::size_t i) {
  return mat.block(l).support(i);
}

inline std::size_t row_selector(const MultipartitionMatrix& mat, std::size_t l, std::size_t j) {
  if (j >= mat.m()) throw IndexError("column " + std::to_string(j) + " out of range");
  return mat.block(l).row_of(j);
}

inline ColumnLabeling column_labeling(const MultipartitionMatrix& mat, std::size_t levels) {
  if (levels > mat.k()) throw IndexError("level out of range");
  return column_labeling(mat.prefix_blocks(levels));
}
inline ColumnLabeling column_labeling(const MultipartitionMatrix& mat) {
  return column_labeling(mat, mat.k());
}

// c^levels_j: multiplicity of column j among the columns of the first `levels`
// blocks. levels = 0 gives all ones.
inline std::vector<long> column_weights(const MultipartitionMatrix& mat, std::size_t levels) {
  std::vector<long> c(mat.m(), 1);
  if (levels == 0) return c;
  auto lab = column_labeling(mat, levels);
  for (std::size_t j = 0; j < mat.m(); ++j) c[j] = static_cast<long>(lab.size_of(j));
  return c;
}
inline std::vector<long> column_weights(const MultipartitionMatrix& mat) {
  return column_weights(mat, mat.k());
}

// phi_A(t): entry j is the product over blocks of the parameter of the row
// holding column j. t is indexed by stacked row.
template <typename T>
std::vector<T> monomial_map(const MultipartitionMatrix& mat, std::span<const T> t) {
  if (t.size() != mat.total_rows()) throw DimensionMismatch("monomial_map: parameter count mismatch");
  std::vector<T> out(mat.m(), T(1));
  std::size_t off = 0;
  for (const auto& b : mat.blocks()) {
    for (std::size_t j = 0; j < mat.m(); ++j) out[j] *= t[off + b.row_of(j)];
    off += b.rows();
  }
  return out;
}
template <typename T>
std::vector<T> monomial_map(const MultipartitionMatrix& mat, const std::vector<T>& t) {
  return monomial_map<T>(mat, std::span<const T>(t));
}

// Row sums alpha . d grouped per block: out[l][i] = sum of d over I^l_i.
template <typename T>
std::vector<std::vector<T>> block_marginals(const MultipartitionMatrix& mat, std::span<const T> d) {
  if (d.size() != mat.m()) throw DimensionMismatch("data length does not match column count");
  std::vector<std::vector<T>> out;
  out.reserve(mat.k());
  for (const auto& b : mat.blocks()) {
    std::vector<T> s(b.rows(), T(0));
    for (std::size_t j = 0; j < mat.m(); ++j) s[b.row_of(j)] += d[j];
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace pmle
