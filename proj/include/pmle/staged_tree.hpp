#pragma once

// Labelled rooted trees, the staged and stratified predicates, interpolating
// polynomials, the balanced test and conversions to and from multipartition
// matrices.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "pmle/core.hpp"
#include "pmle/errors.hpp"
#include "pmle/fraction.hpp"

namespace pmle {

struct TreeLabel {
  std::size_t level;  // level of the edge's target vertex, >= 1
  std::string name;
};

struct TreeEdge {
  std::size_t label;
  std::size_t child;
};

struct TreeVertex {
  std::size_t parent = 0;
  std::size_t level = 0;
  std::vector<TreeEdge> out;  // sorted by label id
  long multiplicity = 1;      // leaves only: repeated matrix columns
};

// Unvalidated labelled tree. Vertex 0 is the root.
class TreeBuilder {
 public:
  TreeBuilder() { vertices_.push_back({}); }

  std::size_t add_label(std::size_t level, std::string name = {}) {
    if (name.empty()) name = "l" + std::to_string(labels_.size());
    labels_.push_back({level, std::move(name)});
    return labels_.size() - 1;
  }

  std::size_t add_child(std::size_t parent, std::size_t label) {
    if (parent >= vertices_.size()) throw IndexError("no vertex " + std::to_string(parent));
    if (label >= labels_.size()) throw IndexError("no label " + std::to_string(label));
    TreeVertex v;
    v.parent = parent;
    v.level = vertices_[parent].level + 1;
    vertices_.push_back(v);
    vertices_[parent].out.push_back({label, vertices_.size() - 1});
    return vertices_.size() - 1;
  }

  void set_multiplicity(std::size_t v, long n) { vertices_.at(v).multiplicity = n; }

  std::vector<TreeVertex>& vertices() { return vertices_; }
  std::vector<TreeLabel>& labels() { return labels_; }

 private:
  std::vector<TreeVertex> vertices_;
  std::vector<TreeLabel> labels_;
};

struct NotStaged {
  enum class Kind { RepeatedLabel, OverlappingFlorets } kind;
  std::size_t v, w;  // for RepeatedLabel, w is the repeated label
};

class StagedTree;
std::variant<StagedTree, NotStaged> make_staged_tree(TreeBuilder builder);

class StagedTree {
 public:
  std::size_t root() const { return 0; }
  std::size_t size() const { return vertices_.size(); }
  const TreeVertex& vertex(std::size_t v) const { return vertices_.at(v); }
  const std::vector<TreeVertex>& vertices() const { return vertices_; }
  const std::vector<TreeLabel>& labels() const { return labels_; }
  bool is_leaf(std::size_t v) const { return vertices_.at(v).out.empty(); }

  std::vector<std::size_t> floret(std::size_t v) const {
    std::vector<std::size_t> f;
    for (const auto& e : vertices_.at(v).out) f.push_back(e.label);
    return f;
  }

  std::optional<std::size_t> child_by_label(std::size_t v, std::size_t label) const {
    for (const auto& e : vertices_.at(v).out)
      if (e.label == label) return e.child;
    return std::nullopt;
  }

  // Internal vertices grouped by floret; stage ids follow the least vertex.
  const std::vector<std::vector<std::size_t>>& stages() const { return stages_; }
  std::optional<std::size_t> stage_of(std::size_t v) const {
    return stage_of_[v] == kNone ? std::nullopt : std::optional<std::size_t>(stage_of_[v]);
  }

  std::vector<std::size_t> leaves() const {
    std::vector<std::size_t> out;
    std::function<void(std::size_t)> walk = [&](std::size_t v) {
      if (is_leaf(v)) out.push_back(v);
      for (const auto& e : vertices_[v].out) walk(e.child);
    };
    walk(0);
    return out;
  }

  std::vector<std::size_t> path_labels(std::size_t v) const {
    std::vector<std::size_t> path;
    while (v != 0) {
      std::size_t p = vertices_[v].parent;
      for (const auto& e : vertices_[p].out)
        if (e.child == v) path.push_back(e.label);
      v = p;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::string vertex_name(std::size_t v) const {
    if (v == 0) return "v0";
    std::string s = "v(";
    bool first = true;
    for (std::size_t l : path_labels(v)) {
      s += (first ? "" : ",") + labels_[l].name;
      first = false;
    }
    return s + ")";
  }

 private:
  friend std::variant<StagedTree, NotStaged> make_staged_tree(TreeBuilder builder);
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::vector<TreeVertex> vertices_;
  std::vector<TreeLabel> labels_;
  std::vector<std::vector<std::size_t>> stages_;
  std::vector<std::size_t> stage_of_;
};

inline std::variant<StagedTree, NotStaged> make_staged_tree(TreeBuilder builder) {
  StagedTree t;
  t.vertices_ = std::move(builder.vertices());
  t.labels_ = std::move(builder.labels());
  for (auto& v : t.vertices_)
    std::sort(v.out.begin(), v.out.end(), [](const TreeEdge& a, const TreeEdge& b) {
      return a.label != b.label ? a.label < b.label : a.child < b.child;
    });
  // Label -> owning floret, by its least vertex.
  std::map<std::size_t, std::size_t> owner;
  std::map<std::vector<std::size_t>, std::size_t> stage_ids;
  t.stage_of_.assign(t.vertices_.size(), StagedTree::kNone);
  for (std::size_t v = 0; v < t.vertices_.size(); ++v) {
    const auto& out = t.vertices_[v].out;
    for (std::size_t e = 1; e < out.size(); ++e)
      if (out[e].label == out[e - 1].label) return NotStaged{NotStaged::Kind::RepeatedLabel, v, out[e].label};
    if (out.empty()) continue;
    auto f = t.floret(v);
    auto [it, fresh] = stage_ids.try_emplace(f, t.stages_.size());
    if (fresh) {
      for (std::size_t l : f) {
        auto [o, ins] = owner.try_emplace(l, v);
        if (!ins) return NotStaged{NotStaged::Kind::OverlappingFlorets, o->second, v};
      }
      t.stages_.emplace_back();
    }
    t.stages_[it->second].push_back(v);
    t.stage_of_[v] = it->second;
  }
  return t;
}

inline StagedTree staged_or_throw(TreeBuilder builder) {
  auto r = make_staged_tree(std::move(builder));
  if (auto* nt = std::get_if<NotStaged>(&r))
    throw DimensionMismatch("labelled tree is not staged at vertices " + std::to_string(nt->v) + ", " +
                            std::to_string(nt->w));
  return std::get<StagedTree>(std::move(r));
}

inline bool is_stratified(const StagedTree& t) {
  std::optional<std::size_t> leaf_level;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (!t.is_leaf(v)) continue;
    if (leaf_level && *leaf_level != t.vertex(v).level) return false;
    leaf_level = t.vertex(v).level;
  }
  for (const auto& stage : t.stages())
    for (std::size_t v : stage)
      if (t.vertex(v).level != t.vertex(stage.front()).level) return false;
  return true;
}

// Sparse polynomial in label symbols; monomials are sorted label multisets.
class LabelPolynomial {
 public:
  using Monomial = std::vector<std::size_t>;

  static LabelPolynomial one() {
    LabelPolynomial p;
    p.terms_[{}] = 1;
    return p;
  }
  static LabelPolynomial symbol(std::size_t label) {
    LabelPolynomial p;
    p.terms_[{label}] = 1;
    return p;
  }

  const std::map<Monomial, Integer>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  LabelPolynomial& operator+=(const LabelPolynomial& o) {
    for (const auto& [m, c] : o.terms_) terms_[m] += c;
    return *this;
  }

  friend LabelPolynomial operator*(const LabelPolynomial& a, const LabelPolynomial& b) {
    LabelPolynomial r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m;
        m.reserve(ma.size() + mb.size());
        std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(m));
        r.terms_[m] += ca * cb;
      }
    return r;
  }

  friend bool operator==(const LabelPolynomial& a, const LabelPolynomial& b) { return a.terms_ == b.terms_; }

  Fraction evaluate(const std::vector<Fraction>& value_of_label) const {
    Fraction s;
    for (const auto& [m, c] : terms_) {
      Fraction t(c);
      for (std::size_t l : m) t *= value_of_label.at(l);
      s += t;
    }
    return s;
  }

  std::string to_string(const std::vector<TreeLabel>& labels) const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      os << (first ? "" : " + ");
      first = false;
      if (c != 1 || m.empty()) os << c;
      for (std::size_t i = 0; i < m.size(); ++i) os << (i || c != 1 ? "*" : "") << labels[m[i]].name;
    }
    return first ? "0" : os.str();
  }

 private:
  std::map<Monomial, Integer> terms_;
};

// t(v) for every vertex, children before parents.
inline std::vector<LabelPolynomial> interpolating_polynomials(const StagedTree& t) {
  std::vector<LabelPolynomial> poly(t.size());
  std::vector<std::size_t> order;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (const auto& e : t.vertex(v).out) stack.push_back(e.child);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t v = *it;
    if (t.is_leaf(v)) {
      poly[v] = LabelPolynomial::one();
      continue;
    }
    LabelPolynomial s;
    for (const auto& e : t.vertex(v).out) s += LabelPolynomial::symbol(e.label) * poly[e.child];
    poly[v] = std::move(s);
  }
  return poly;
}

inline LabelPolynomial interpolating_polynomial(const StagedTree& t, std::size_t v) {
  return interpolating_polynomials(t).at(v);
}

struct BalanceWitness {
  std::size_t v, w, v1, v2, w1, w2;
};

// nullopt when balanced.
inline std::optional<BalanceWitness> balance_violation(const StagedTree& t) {
  auto poly = interpolating_polynomials(t);
  for (const auto& stage : t.stages()) {
    for (std::size_t a = 0; a < stage.size(); ++a)
      for (std::size_t b = a + 1; b < stage.size(); ++b) {
        const auto& ov = t.vertex(stage[a]).out;
        const auto& ow = t.vertex(stage[b]).out;
        for (std::size_t x = 0; x < ov.size(); ++x)
          for (std::size_t y = x + 1; y < ov.size(); ++y) {
            std::size_t v1 = ov[x].child, v2 = ov[y].child, w1 = ow[x].child, w2 = ow[y].child;
            if (!(poly[v1] * poly[w2] == poly[w1] * poly[v2]))
              return BalanceWitness{stage[a], stage[b], v1, v2, w1, w2};
          }
      }
  }
  return std::nullopt;
}

inline bool is_balanced(const StagedTree& t) { return !balance_violation(t).has_value(); }

// Vertices at level l are the distinct columns of the first l blocks; the edge
// into a level-l vertex carries the label of its row in block l. Label ids are
// stacked row indices. Leaf multiplicities record repeated columns.
inline std::variant<StagedTree, NotStaged> tree_from_matrix(const MultipartitionMatrix& mat) {
  TreeBuilder b;
  for (std::size_t l = 0; l < mat.k(); ++l)
    for (std::size_t i = 0; i < mat.block(l).rows(); ++i)
      b.add_label(l + 1, "s^" + std::to_string(l + 1) + "_" + std::to_string(i + 1));
  std::vector<std::size_t> vertex_of_col(mat.m(), 0);
  for (std::size_t l = 0; l < mat.k(); ++l) {
    auto lab = column_labeling(mat, l + 1);
    std::vector<std::size_t> vertex_of_class(lab.beta, std::size_t(-1));
    std::size_t off = mat.row_offset(l);
    for (std::size_t j = 0; j < mat.m(); ++j) {
      std::size_t cls = lab.label[j];
      if (vertex_of_class[cls] == std::size_t(-1))
        vertex_of_class[cls] = b.add_child(vertex_of_col[j], off + mat.block(l).row_of(j));
      vertex_of_col[j] = vertex_of_class[cls];
    }
    if (l + 1 == mat.k())
      for (std::size_t u = 0; u < lab.beta; ++u)
        b.set_multiplicity(vertex_of_class[u], static_cast<long>(lab.classes[u].size()));
  }
  return make_staged_tree(std::move(b));
}

// Rows per level in label id order, columns in depth-first path order. With
// expand, each leaf contributes its multiplicity in copies.
inline MultipartitionMatrix matrix_from_tree(const StagedTree& t, bool expand = false) {
  if (!is_stratified(t)) throw NotStratified("tree is not stratified");
  auto leaves = t.leaves();
  std::size_t k = t.vertex(leaves.front()).level;
  if (k == 0) throw NotStratified("tree has no edges");
  std::vector<std::vector<std::size_t>> level_labels(k);
  std::vector<bool> used(t.labels().size(), false);
  for (const auto& v : t.vertices())
    for (const auto& e : v.out) used[e.label] = true;
  std::vector<std::size_t> row_of_label(t.labels().size(), 0);
  for (std::size_t l = 0; l < t.labels().size(); ++l) {
    if (!used[l]) continue;
    std::size_t lev = t.labels()[l].level;
    if (lev == 0 || lev > k) throw NotStratified("label level out of range");
    row_of_label[l] = level_labels[lev - 1].size();
    level_labels[lev - 1].push_back(l);
  }
  std::vector<std::vector<std::size_t>> row_of(k);
  for (std::size_t leaf : leaves) {
    auto path = t.path_labels(leaf);
    long copies = expand ? t.vertex(leaf).multiplicity : 1;
    for (long c = 0; c < copies; ++c)
      for (std::size_t l = 0; l < k; ++l) {
        if (t.labels()[path[l]].level != l + 1) throw NotStratified("edge label level mismatch");
        row_of[l].push_back(row_of_label[path[l]]);
      }
  }
  std::vector<PartitionMatrix> blocks;
  for (std::size_t l = 0; l < k; ++l) blocks.emplace_back(level_labels[l].size(), std::move(row_of[l]));
  return MultipartitionMatrix(std::move(blocks));
}

// Children sorted by (label level, rank of label within its level, subtree).
inline std::string canonical_form(const StagedTree& t, bool with_multiplicity = false) {
  std::map<std::size_t, std::vector<std::size_t>> by_level;
  std::vector<bool> used(t.labels().size(), false);
  for (const auto& v : t.vertices())
    for (const auto& e : v.out) used[e.label] = true;
  for (std::size_t l = 0; l < t.labels().size(); ++l)
    if (used[l]) by_level[t.labels()[l].level].push_back(l);
  std::vector<std::string> key(t.labels().size());
  for (const auto& [lev, ls] : by_level)
    for (std::size_t r = 0; r < ls.size(); ++r) key[ls[r]] = std::to_string(lev) + "." + std::to_string(r);
  std::function<std::string(std::size_t)> rec = [&](std::size_t v) {
    std::vector<std::pair<std::string, std::string>> kids;
    for (const auto& e : t.vertex(v).out) kids.emplace_back(key[e.label], rec(e.child));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& [k, sub] : kids) s += k + sub;
    if (with_multiplicity && t.is_leaf(v)) s += "x" + std::to_string(t.vertex(v).multiplicity);
    return s + ")";
  };
  return rec(0);
}

struct GeneratorConfig {
  std::size_t levels = 3;
  std::size_t max_branching = 3;
  double stage_merge_prob = 0.5;
  double single_child_prob = 0.1;
  long max_leaf_multiplicity = 1;
};

// Vertices are expanded from stage types: every type owns fresh labels and
// fixes the type of each child, so vertices of one stage get identical
// subtrees. Leaf types may carry a multiplicity.
inline StagedTree generate_balanced_stratified(std::uint64_t seed, const GeneratorConfig& cfg) {
  if (cfg.levels < 1) throw IndexError("generator needs at least one level");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Type {
    std::vector<std::size_t> child_types;
    long multiplicity = 1;
  };
  std::vector<std::vector<Type>> types(cfg.levels + 1);  // types[level]
  std::size_t max_b = std::max<std::size_t>(1, cfg.max_branching);

  std::function<std::size_t(std::size_t)> make_type = [&](std::size_t level) -> std::size_t {
    Type ty;
    if (level == cfg.levels) {
      if (cfg.max_leaf_multiplicity > 1)
        ty.multiplicity = std::uniform_int_distribution<long>(1, cfg.max_leaf_multiplicity)(rng);
      types[level].push_back(ty);
      return types[level].size() - 1;
    }
    std::size_t b = 1;
    if (max_b > 1 && unit(rng) >= cfg.single_child_prob) b = std::uniform_int_distribution<std::size_t>(2, max_b)(rng);
    for (std::size_t e = 0; e < b; ++e) {
      auto& next = types[level + 1];
      if (!next.empty() && unit(rng) < cfg.stage_merge_prob) {
        ty.child_types.push_back(std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(rng));
      } else {
        ty.child_types.push_back(make_type(level + 1));
      }
    }
    types[level].push_back(ty);
    return types[level].size() - 1;
  };
  std::size_t root_type = make_type(0);

  TreeBuilder b;
  // Fresh labels per type, in creation order within each level.
  std::vector<std::vector<std::vector<std::size_t>>> type_labels(cfg.levels + 1);
  for (std::size_t lev = 0; lev < cfg.levels; ++lev) {
    std::size_t counter = 0;
    for (const auto& ty : types[lev]) {
      std::vector<std::size_t> ls;
      for (std::size_t e = 0; e < ty.child_types.size(); ++e)
        ls.push_back(b.add_label(lev + 1, "s^" + std::to_string(lev + 1) + "_" + std::to_string(++counter)));
      type_labels[lev].push_back(std::move(ls));
    }
  }
  std::function<void(std::size_t, std::size_t, std::size_t)> expand = [&](std::size_t v, std::size_t lev,
                                                                          std::size_t ty) {
    const Type& T = types[lev][ty];
    if (lev == cfg.levels) {
      b.set_multiplicity(v, T.multiplicity);
      return;
    }
    for (std::size_t e = 0; e < T.child_types.size(); ++e) {
      std::size_t c = b.add_child(v, type_labels[lev][ty][e]);
      expand(c, lev + 1, T.child_types[e]);
    }
  };
  expand(0, 0, root_type);
  return staged_or_throw(std::move(b));
}

inline std::string to_dot(const StagedTree& t) {
  static const char* palette[] = {"#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462",
                                  "#b3de69", "#fccde5", "#d9d9d9", "#bc80bd", "#ccebc5", "#ffed6f"};
  std::ostringstream os;
  os << "digraph staged_tree {\n  rankdir=LR;\n  node [shape=circle, style=filled, label=\"\"];\n";
  for (std::size_t v = 0; v < t.size(); ++v) {
    os << "  \"" << t.vertex_name(v) << "\" [";
    if (auto s = t.stage_of(v)) {
      os << "fillcolor=\"" << palette[*s % std::size(palette)] << "\", tooltip=\"stage " << *s << "\"";
    } else {
      os << "fillcolor=\"white\"";
    }
    if (t.is_leaf(v)) os << ", xlabel=\"x" << t.vertex(v).multiplicity << "\"";
    os << "];\n";
  }
  for (std::size_t v = 0; v < t.size(); ++v)
    for (const auto& e : t.vertex(v).out)
      os << "  \"" << t.vertex_name(v) << "\" -> \"" << t.vertex_name(e.child) << "\" [label=\""
         << t.labels()[e.label].name << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace pmle
