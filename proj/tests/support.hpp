#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/fraction.hpp"
#include "pmle/matrix_io.hpp"

namespace testing_support {

using namespace pmle;

inline std::string data_path(const std::string& name) { return std::string(PMLE_DATA_DIR) + "/" + name; }

inline MultipartitionMatrix load(const std::string& name) { return load_matrix(data_path(name)); }

// Positive integer weights normalized to sum 1.
inline FractionVector random_dist(std::size_t m, std::mt19937_64& rng, long max_weight = 1000) {
  std::uniform_int_distribution<long> w(1, max_weight);
  std::vector<long> ws(m);
  long total = 0;
  for (auto& x : ws) total += (x = w(rng));
  FractionVector d;
  for (long x : ws) d.emplace_back(x, total);
  return d;
}

inline std::vector<double> as_doubles(const FractionVector& v) {
  std::vector<double> out;
  for (const auto& x : v) out.push_back(x.to_double());
  return out;
}

// k blocks over m columns; every row of every block has nonempty support.
inline MultipartitionMatrix random_matrix(std::mt19937_64& rng, std::size_t k, std::size_t m, std::size_t max_rows) {
  std::vector<PartitionMatrix> blocks;
  for (std::size_t l = 0; l < k; ++l) {
    std::size_t rows = std::uniform_int_distribution<std::size_t>(1, std::min(max_rows, m))(rng);
    std::vector<std::size_t> row_of(m);
    std::uniform_int_distribution<std::size_t> pick(0, rows - 1);
    for (auto& r : row_of) r = pick(rng);
    // Relabel rows densely in first-appearance order.
    std::vector<std::size_t> remap(rows, rows);
    std::size_t next = 0;
    for (auto& r : row_of) {
      if (remap[r] == rows) remap[r] = next++;
      r = remap[r];
    }
    blocks.emplace_back(next, std::move(row_of));
  }
  return MultipartitionMatrix(std::move(blocks));
}

inline FractionMatrix random_fraction_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, long span = 3) {
  std::uniform_int_distribution<long> v(-span, span);
  FractionMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = Fraction(v(rng));
  return out;
}

// Column j as its tuple of row indices, one per block.
inline std::vector<std::size_t> column_key(const MultipartitionMatrix& mat, std::size_t j, std::size_t levels) {
  std::vector<std::size_t> key;
  for (std::size_t l = 0; l < levels; ++l) key.push_back(mat.block(l).row_of(j));
  return key;
}

// Number of columns equal to column j in the first `levels` blocks, by direct comparison.
inline long brute_weight(const MultipartitionMatrix& mat, std::size_t j, std::size_t levels) {
  long n = 0;
  auto kj = column_key(mat, j, levels);
  for (std::size_t q = 0; q < mat.m(); ++q)
    if (column_key(mat, q, levels) == kj) ++n;
  return n;
}

inline Fraction sum_over(const FractionVector& d, std::initializer_list<std::size_t> one_based) {
  Fraction s;
  for (std::size_t j : one_based) s += d.at(j - 1);
  return s;
}

}  // namespace testing_support
