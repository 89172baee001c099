#pragma once

// Cup and cap operations, floret decompositions, connection ratios, the
// omega = x y factorization, compressions and the GRIP verdict.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"
#include "pmle/linalg.hpp"

namespace pmle {

inline constexpr std::size_t kNoFloret = std::numeric_limits<std::size_t>::max();

// Rows of the cup are the distinct stacked columns, in first-appearance order.
inline PartitionMatrix cup(std::span<const PartitionMatrix> blocks) {
  auto lab = column_labeling(blocks);
  return {lab.beta, lab.label};
}
inline PartitionMatrix cup(const MultipartitionMatrix& mat, std::size_t levels) {
  return cup(mat.prefix_blocks(levels));
}

inline bool connected(std::span<const int> row_b, std::span<const int> row_c) {
  if (row_b.size() != row_c.size()) throw DimensionMismatch("connected: row length mismatch");
  for (std::size_t j = 0; j < row_b.size(); ++j)
    if (row_b[j] && row_c[j]) return true;
  return false;
}

struct FloretDecomposition {
  std::vector<std::vector<std::size_t>> florets_b;  // floret -> B rows
  std::vector<std::vector<std::size_t>> florets_c;  // floret -> C rows
  std::vector<std::size_t> t_of_b;                  // B row -> floret or kNoFloret
  std::vector<std::size_t> t_of_c;                  // C row -> floret or kNoFloret
  std::size_t size() const { return florets_c.size(); }
};

// Two B rows whose connected C rows overlap without being equal.
struct FloretWitness {
  std::size_t u, u2;
  std::vector<std::size_t> neighbors_u, neighbors_u2;
};

using FloretResult = std::variant<FloretDecomposition, FloretWitness>;

inline FloretResult floret_condition(const PartitionMatrix& b, const PartitionMatrix& c) {
  if (b.cols() != c.cols()) throw DimensionMismatch("floret_condition: column count mismatch");
  std::size_t nb = b.rows(), nc = c.rows();
  std::vector<std::set<std::size_t>> nbr_b(nb), nbr_c(nc);
  for (std::size_t j = 0; j < b.cols(); ++j) {
    nbr_b[b.row_of(j)].insert(c.row_of(j));
    nbr_c[c.row_of(j)].insert(b.row_of(j));
  }

  // Union-find over B rows and C rows (offset nb).
  std::vector<std::size_t> parent(nb + nc);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t u = 0; u < nb; ++u)
    for (std::size_t v : nbr_b[u]) parent[find(u)] = find(nb + v);

  FloretDecomposition dec;
  dec.t_of_b.assign(nb, kNoFloret);
  dec.t_of_c.assign(nc, kNoFloret);
  std::vector<std::size_t> comp_id(nb + nc, kNoFloret);
  for (std::size_t v = 0; v < nc; ++v) {
    if (nbr_c[v].empty()) continue;
    std::size_t r = find(nb + v);
    if (comp_id[r] == kNoFloret) {
      comp_id[r] = dec.florets_c.size();
      dec.florets_c.emplace_back();
      dec.florets_b.emplace_back();
    }
    dec.t_of_c[v] = comp_id[r];
    dec.florets_c[comp_id[r]].push_back(v);
  }
  for (std::size_t u = 0; u < nb; ++u) {
    if (nbr_b[u].empty()) continue;
    std::size_t t = comp_id[find(u)];
    dec.t_of_b[u] = t;
    dec.florets_b[t].push_back(u);
  }

  // Complete bipartite check: every B row sees every C row of its floret.
  for (std::size_t t = 0; t < dec.size(); ++t) {
    std::set<std::size_t> all(dec.florets_c[t].begin(), dec.florets_c[t].end());
    for (std::size_t u : dec.florets_b[t]) {
      if (nbr_b[u] == all) continue;
      for (std::size_t u2 : dec.florets_b[t]) {
        if (nbr_b[u2] == nbr_b[u]) continue;
        bool overlap = std::any_of(nbr_b[u].begin(), nbr_b[u].end(),
                                   [&](std::size_t v) { return nbr_b[u2].count(v) > 0; });
        if (overlap) {
          std::size_t a = std::min(u, u2), z = std::max(u, u2);
          return FloretWitness{a, z, {nbr_b[a].begin(), nbr_b[a].end()},
                               {nbr_b[z].begin(), nbr_b[z].end()}};
        }
      }
    }
  }
  return dec;
}

// Column j goes to the floret of its C row.
inline PartitionMatrix cap(const PartitionMatrix& b, const PartitionMatrix& c, const FloretDecomposition& dec) {
  if (b.cols() != c.cols()) throw DimensionMismatch("cap: column count mismatch");
  std::vector<std::size_t> row_of(c.cols());
  for (std::size_t j = 0; j < c.cols(); ++j) {
    std::size_t t = dec.t_of_c.at(c.row_of(j));
    if (t == kNoFloret || dec.t_of_b.at(b.row_of(j)) != t)
      throw IndexError("cap: decomposition does not match the blocks");
    row_of[j] = t;
  }
  return {dec.size(), std::move(row_of)};
}

// ratio[l][i] = C^l_i. Level 0 holds |I^0_i|; empty rows hold 0.
struct ConnectionRatios {
  std::vector<std::vector<Fraction>> ratio;
};

struct WellConnectedWitness {
  std::size_t level, row, j, j2;
  Fraction ratio_j, ratio_j2;
};

struct LevelRatios {
  std::vector<Fraction> ratios;
  std::optional<WellConnectedWitness> witness;
};

inline LevelRatios level_ratios(const MultipartitionMatrix& mat, std::size_t l,
                                const std::vector<long>& c_prev, const std::vector<long>& c_cur) {
  const auto& blk = mat.block(l);
  LevelRatios out;
  out.ratios.assign(blk.rows(), Fraction(0));
  std::vector<bool> set(blk.rows(), false);
  std::vector<std::size_t> first(blk.rows(), 0);
  for (std::size_t j = 0; j < mat.m(); ++j) {
    std::size_t i = blk.row_of(j);
    Fraction r(c_cur[j], c_prev[j]);
    if (!set[i]) {
      out.ratios[i] = r;
      set[i] = true;
      first[i] = j;
    } else if (r != out.ratios[i] && !out.witness) {
      out.witness = WellConnectedWitness{l, i, first[i], j, out.ratios[i], r};
    }
  }
  return out;
}

// Ratios for every block, or the first violation (by level, then column).
inline std::variant<ConnectionRatios, WellConnectedWitness> well_connected(const MultipartitionMatrix& mat) {
  ConnectionRatios cr;
  std::vector<long> prev = column_weights(mat, 0);
  for (std::size_t l = 0; l < mat.k(); ++l) {
    std::vector<long> cur = column_weights(mat, l + 1);
    auto lr = level_ratios(mat, l, prev, cur);
    if (lr.witness) return *lr.witness;
    cr.ratio.push_back(std::move(lr.ratios));
    prev = std::move(cur);
  }
  return cr;
}

// omega(u,v) counts columns j with B row u and C row v. Within a floret
// omega = x_u y_v with y primitive; rows outside every floret get x or y = 0.
struct OmegaTable {
  std::vector<std::vector<long>> omega;  // [u][v]
  std::vector<long> x;
  std::vector<long> y;
  std::vector<long> X;  // X_v = sum of x over the floret of v
  std::vector<long> Y;  // Y_u = sum of y over the floret of u
};

inline OmegaTable factor_omega(const PartitionMatrix& b, const PartitionMatrix& c, const FloretDecomposition& dec) {
  OmegaTable om;
  om.omega.assign(b.rows(), std::vector<long>(c.rows(), 0));
  for (std::size_t j = 0; j < b.cols(); ++j) ++om.omega[b.row_of(j)][c.row_of(j)];
  om.x.assign(b.rows(), 0);
  om.y.assign(c.rows(), 0);
  om.X.assign(c.rows(), 0);
  om.Y.assign(b.rows(), 0);
  for (std::size_t t = 0; t < dec.size(); ++t) {
    const auto& fb = dec.florets_b[t];
    const auto& fc = dec.florets_c[t];
    std::size_t u0 = fb.front(), v0 = fc.front();
    long g = 0;
    for (std::size_t v : fc) g = std::gcd(g, om.omega[u0][v]);
    if (g == 0) throw RankOneViolation("empty reference row in floret " + std::to_string(t));
    for (std::size_t v : fc) om.y[v] = om.omega[u0][v] / g;
    for (std::size_t u : fb) {
      if (om.omega[u][v0] % om.y[v0] != 0)
        throw RankOneViolation("omega is not integrally rank one in floret " + std::to_string(t));
      om.x[u] = om.omega[u][v0] / om.y[v0];
    }
    long xs = 0, ys = 0;
    for (std::size_t u : fb) xs += om.x[u];
    for (std::size_t v : fc) ys += om.y[v];
    for (std::size_t u : fb) {
      om.Y[u] = ys;
      for (std::size_t v : fc)
        if (om.omega[u][v] != om.x[u] * om.y[v])
          throw RankOneViolation("omega(" + std::to_string(u) + "," + std::to_string(v) + ") = " +
                                 std::to_string(om.omega[u][v]) + " is not x_u y_v");
    }
    for (std::size_t v : fc) om.X[v] = xs;
  }
  return om;
}

// x[u] copies of each distinct column class u of the prefix, ordered by
// (u, copy). source[n] is the original column behind copy n.
struct Compression {
  MultipartitionMatrix matrix;
  std::vector<std::size_t> source;
  std::vector<std::pair<std::size_t, std::size_t>> index;  // (u, copy)
};

inline Compression compression(std::span<const PartitionMatrix> prefix, std::span<const long> counts) {
  auto lab = column_labeling(prefix);
  if (counts.size() != lab.beta) throw DimensionMismatch("compression: one count per column class expected");
  Compression out;
  for (std::size_t u = 0; u < lab.beta; ++u) {
    if (counts[u] < 1)
      throw CountExceedsMultiplicity("compression: class " + std::to_string(u + 1) + " needs at least one copy");
    if (static_cast<std::size_t>(counts[u]) > lab.classes[u].size())
      throw CountExceedsMultiplicity("compression: class " + std::to_string(u + 1) + " has multiplicity " +
                                     std::to_string(lab.classes[u].size()) + ", asked for " +
                                     std::to_string(counts[u]));
    for (long s = 0; s < counts[u]; ++s) {
      out.source.push_back(lab.classes[u][s]);
      out.index.emplace_back(u, static_cast<std::size_t>(s));
    }
  }
  std::vector<PartitionMatrix> blocks;
  for (const auto& b : prefix) blocks.push_back(b.select_columns(out.source));
  out.matrix = MultipartitionMatrix(std::move(blocks));
  return out;
}

struct LevelReport {
  std::size_t level = 0;  // pair (cup of blocks 0..level, block level+1)
  bool well_connected = false;
  bool floret_condition = false;
  bool rowspan = false;
  std::optional<WellConnectedWitness> wc_witness;
  std::optional<FloretWitness> floret_witness;
  std::optional<std::size_t> rowspan_failed_row;      // cap row outside the prefix rowspan
  std::vector<FractionVector> rowspan_certificates;   // per cap row, coefficients over prefix rows
  PartitionMatrix b;                                  // cup of the prefix
  std::optional<FloretDecomposition> decomposition;
  std::optional<PartitionMatrix> cap;
  std::optional<OmegaTable> omega;
  bool ok() const { return well_connected && floret_condition && rowspan; }
};

struct GripReport {
  bool overall = false;
  std::vector<LevelReport> levels;
  // Ratios per block; ratio_valid[l] is false when block l is not well-connected.
  ConnectionRatios ratios;
  std::vector<bool> ratio_valid;
};

inline GripReport grip_check(const MultipartitionMatrix& mat) {
  GripReport rep;
  std::vector<std::vector<long>> c(mat.k() + 1);
  for (std::size_t l = 0; l <= mat.k(); ++l) c[l] = column_weights(mat, l);
  for (std::size_t l = 0; l < mat.k(); ++l) {
    auto lr = level_ratios(mat, l, c[l], c[l + 1]);
    rep.ratios.ratio.push_back(lr.ratios);
    rep.ratio_valid.push_back(!lr.witness.has_value());
    if (l == 0) continue;
    LevelReport lv;
    lv.level = l - 1;
    lv.well_connected = !lr.witness;
    lv.wc_witness = lr.witness;
    lv.b = cup(mat, l);
    const auto& cblk = mat.block(l);
    auto fr = floret_condition(lv.b, cblk);
    if (auto* dec = std::get_if<FloretDecomposition>(&fr)) {
      lv.floret_condition = true;
      lv.decomposition = *dec;
      lv.cap = cap(lv.b, cblk, *dec);
      RowspaceBasis basis(mat.stacked(l));
      FractionMatrix capm = lv.cap->dense();
      lv.rowspan = true;
      for (std::size_t t = 0; t < capm.rows(); ++t) {
        auto cert = basis.contains(capm.row(t));
        if (!cert) {
          lv.rowspan = false;
          lv.rowspan_failed_row = t;
          lv.rowspan_certificates.clear();
          break;
        }
        lv.rowspan_certificates.push_back(std::move(*cert));
      }
      if (lv.well_connected) {
        try {
          lv.omega = factor_omega(lv.b, cblk, *dec);
        } catch (const RankOneViolation&) {
          lv.well_connected = false;
        }
      }
    } else {
      lv.floret_witness = std::get<FloretWitness>(fr);
    }
    rep.levels.push_back(std::move(lv));
  }
  rep.overall = std::all_of(rep.levels.begin(), rep.levels.end(), [](const LevelReport& l) { return l.ok(); });
  return rep;
}

enum class RootFlorets { SingleRoot, PerRow };

// floret[l][i]: floret id of row i of block l. Level 0 follows `root`.
inline std::vector<std::vector<std::size_t>> florets_by_level(const MultipartitionMatrix& mat, const GripReport& rep,
                                                              RootFlorets root = RootFlorets::SingleRoot) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> first(mat.block(0).rows(), 0);
  if (root == RootFlorets::PerRow) std::iota(first.begin(), first.end(), 0);
  out.push_back(std::move(first));
  for (std::size_t l = 1; l < mat.k(); ++l) {
    const auto& lv = rep.levels.at(l - 1);
    if (!lv.decomposition)
      throw FloretsUndefined("floret condition fails between blocks " + std::to_string(l) + " and " +
                             std::to_string(l + 1));
    out.push_back(lv.decomposition->t_of_c);
  }
  return out;
}

}  // namespace pmle
