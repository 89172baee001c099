#pragma once

// Simplicial complexes, hierarchical-model matrices, running intersection
// orderings and decomposability.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"

namespace pmle {

inline constexpr std::size_t kMaxSearchFacets = 8;

// Vertices are 0-based; facets are sorted vertex lists.
struct SimplicialComplex {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> facets;
  std::vector<std::size_t> states;  // |R_f| per vertex

  SimplicialComplex() = default;
  SimplicialComplex(std::size_t ground, std::vector<std::vector<std::size_t>> fs, std::vector<std::size_t> st = {})
      : n(ground), facets(std::move(fs)), states(std::move(st)) {
    if (states.empty()) states.assign(n, 2);
    for (auto& f : facets) std::sort(f.begin(), f.end());
    validate();
  }

  // From 1-based facet lists such as {{1,2,3},{3,4,5}}.
  static SimplicialComplex from_one_based(const std::vector<std::vector<std::size_t>>& fs,
                                          std::vector<std::size_t> st = {}) {
    std::size_t n = st.size();
    std::vector<std::vector<std::size_t>> zero;
    for (const auto& f : fs) {
      std::vector<std::size_t> z;
      for (std::size_t v : f) {
        if (v == 0) throw InvalidComplex("vertex numbering starts at 1");
        z.push_back(v - 1);
        n = std::max(n, v);
      }
      zero.push_back(std::move(z));
    }
    return {n, std::move(zero), std::move(st)};
  }

  void validate() const {
    if (facets.empty()) throw InvalidComplex("complex has no facets");
    if (states.size() != n) throw InvalidComplex("need one state count per vertex");
    for (std::size_t s : states)
      if (s == 0) throw InvalidComplex("state counts must be positive");
    std::vector<bool> covered(n, false);
    for (const auto& f : facets) {
      if (f.empty()) throw InvalidComplex("empty facet");
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] >= n) throw InvalidComplex("vertex " + std::to_string(f[i] + 1) + " outside the ground set");
        if (i && f[i] == f[i - 1]) throw InvalidComplex("repeated vertex in a facet");
        covered[f[i]] = true;
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (!covered[v]) throw InvalidComplex("vertex " + std::to_string(v + 1) + " lies in no facet");
    for (std::size_t a = 0; a < facets.size(); ++a)
      for (std::size_t b = 0; b < facets.size(); ++b)
        if (a != b && std::includes(facets[b].begin(), facets[b].end(), facets[a].begin(), facets[a].end()))
          throw InvalidComplex("facet " + std::to_string(a + 1) + " is contained in facet " + std::to_string(b + 1));
  }

  std::string describe() const {
    std::string s;
    for (const auto& f : facets) {
      s += "[";
      for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + std::to_string(f[i] + 1);
      s += "]";
    }
    return s;
  }
};

// One facet per line as 1-based vertices; optional "states: n1 n2 ..." line.
inline SimplicialComplex parse_complex(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::vector<std::size_t>> facets;
  std::vector<std::size_t> states;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string body = line.substr(first);
    bool header = body.rfind("states:", 0) == 0;
    if (header) body = body.substr(7);
    std::istringstream toks(body);
    std::vector<std::size_t> vals;
    std::string tok;
    while (toks >> tok) {
      if (tok.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("line " + std::to_string(lineno) + ": unexpected token '" + tok + "'");
      vals.push_back(std::stoul(tok));
    }
    if (header) {
      if (!states.empty()) throw ParseError("line " + std::to_string(lineno) + ": repeated states header");
      states = std::move(vals);
    } else {
      facets.push_back(std::move(vals));
    }
  }
  if (!states.empty()) {
    for (const auto& f : facets)
      for (std::size_t v : f)
        if (v > states.size()) throw ParseError("vertex " + std::to_string(v) + " has no state count");
  }
  return SimplicialComplex::from_one_based(facets, states);
}

inline std::vector<std::size_t> identity_order(const SimplicialComplex& cx) {
  std::vector<std::size_t> o(cx.facets.size());
  std::iota(o.begin(), o.end(), 0);
  return o;
}

inline void check_order(const SimplicialComplex& cx, const std::vector<std::size_t>& order) {
  std::vector<std::size_t> s = order;
  std::sort(s.begin(), s.end());
  if (s != identity_order(cx)) throw InvalidFacetOrder("facet order is not a permutation of the facets");
}

// Columns: joint states of all vertices, vertex 1 most significant. Block i:
// joint states of facet order[i], same convention.
inline MultipartitionMatrix matrix_from_complex(const SimplicialComplex& cx, const std::vector<std::size_t>& order) {
  check_order(cx, order);
  std::size_t m = 1;
  for (std::size_t s : cx.states) m *= s;
  std::vector<std::vector<std::size_t>> state(m, std::vector<std::size_t>(cx.n));
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t r = j;
    for (std::size_t v = cx.n; v-- > 0;) {
      state[j][v] = r % cx.states[v];
      r /= cx.states[v];
    }
  }
  std::vector<PartitionMatrix> blocks;
  for (std::size_t f : order) {
    const auto& facet = cx.facets[f];
    std::size_t rows = 1;
    for (std::size_t v : facet) rows *= cx.states[v];
    std::vector<std::size_t> row_of(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::size_t idx = 0;
      for (std::size_t v : facet) idx = idx * cx.states[v] + state[j][v];
      row_of[j] = idx;
    }
    blocks.emplace_back(rows, std::move(row_of));
  }
  return MultipartitionMatrix(std::move(blocks));
}
inline MultipartitionMatrix matrix_from_complex(const SimplicialComplex& cx) {
  return matrix_from_complex(cx, identity_order(cx));
}

struct RipResult {
  bool ok = true;
  std::optional<std::size_t> failing_r;          // position r (1-based count of earlier facets)
  std::vector<std::size_t> intersection;         // (union of first r) cap F_{r+1}
  std::vector<std::size_t> k;                    // k_r per position, facet positions 0-based
};

inline RipResult rip_check(const SimplicialComplex& cx, const std::vector<std::size_t>& order) {
  check_order(cx, order);
  RipResult res;
  std::vector<bool> in_union(cx.n, false);
  for (std::size_t v : cx.facets[order[0]]) in_union[v] = true;
  for (std::size_t r = 1; r < order.size(); ++r) {
    const auto& next = cx.facets[order[r]];
    std::vector<std::size_t> h;
    for (std::size_t v : next)
      if (in_union[v]) h.push_back(v);
    std::optional<std::size_t> kr;
    for (std::size_t q = 0; q < r && !kr; ++q) {
      const auto& f = cx.facets[order[q]];
      if (std::includes(f.begin(), f.end(), h.begin(), h.end())) kr = q;
    }
    if (!kr) {
      res.ok = false;
      res.failing_r = r;
      res.intersection = h;
      return res;
    }
    res.k.push_back(*kr);
    for (std::size_t v : next) in_union[v] = true;
  }
  return res;
}

// Lexicographically first RIP ordering, or nullopt if none exists.
inline std::optional<std::vector<std::size_t>> rip_order_search(const SimplicialComplex& cx) {
  if (cx.facets.size() > kMaxSearchFacets)
    throw FacetCountTooLarge(std::to_string(cx.facets.size()) + " facets exceeds the search bound of " +
                             std::to_string(kMaxSearchFacets));
  auto order = identity_order(cx);
  do {
    if (rip_check(cx, order).ok) return order;
  } while (std::next_permutation(order.begin(), order.end()));
  return std::nullopt;
}

// A set of facets is decomposable if it is a single facet, or splits into two
// decomposable parts whose vertex unions meet in F1 cap F2 for some facets F1,
// F2 taken one from each part.
inline bool is_decomposable(const SimplicialComplex& cx) {
  const std::size_t s = cx.facets.size();
  if (s > kMaxSearchFacets)
    throw FacetCountTooLarge(std::to_string(s) + " facets exceeds the search bound of " +
                             std::to_string(kMaxSearchFacets));
  std::vector<std::uint64_t> vmask(s, 0);
  for (std::size_t f = 0; f < s; ++f)
    for (std::size_t v : cx.facets[f]) vmask[f] |= std::uint64_t{1} << v;
  if (cx.n > 64) throw FacetCountTooLarge("ground set too large for the decomposability search");
  std::map<std::uint32_t, bool> memo;
  auto union_of = [&](std::uint32_t set) {
    std::uint64_t u = 0;
    for (std::size_t f = 0; f < s; ++f)
      if (set >> f & 1u) u |= vmask[f];
    return u;
  };
  std::function<bool(std::uint32_t)> dec = [&](std::uint32_t set) -> bool {
    if ((set & (set - 1)) == 0) return true;
    if (auto it = memo.find(set); it != memo.end()) return it->second;
    bool result = false;
    std::uint32_t low = set & (~set + 1);
    // Enumerate splits with the lowest facet in part 1 to visit each split once.
    for (std::uint32_t a = (set - 1) & set; a && !result; a = (a - 1) & set) {
      if (!(a & low)) continue;
      std::uint32_t b = set & ~a;
      std::uint64_t meet = union_of(a) & union_of(b);
      bool witnessed = false;
      for (std::size_t f1 = 0; f1 < s && !witnessed; ++f1) {
        if (!(a >> f1 & 1u)) continue;
        for (std::size_t f2 = 0; f2 < s && !witnessed; ++f2)
          if ((b >> f2 & 1u) && (vmask[f1] & vmask[f2]) == meet) witnessed = true;
      }
      if (witnessed && dec(a) && dec(b)) result = true;
    }
    memo[set] = result;
    return result;
  };
  return dec(static_cast<std::uint32_t>((std::uint64_t{1} << s) - 1));
}

}  // namespace pmle
