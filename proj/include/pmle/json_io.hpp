#pragma once

// JSON views of reports. Indices are 1-based; rationals are "num/den" strings.

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pmle/core.hpp"
#include "pmle/fraction.hpp"
#include "pmle/grip.hpp"
#include "pmle/ips.hpp"
#include "pmle/mle.hpp"
#include "pmle/tfp.hpp"

namespace pmle {

using json = nlohmann::json;

inline json to_json(const Fraction& f) { return f.to_string(); }

inline json to_json(const FractionVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

inline json one_based(const std::vector<std::size_t>& v) {
  json a = json::array();
  for (auto x : v) a.push_back(x + 1);
  return a;
}

inline json to_json(const ValidationReport& rep) {
  json out{{"ok", rep.ok()}, {"violations", json::array()}};
  for (const auto& v : rep.violations) {
    json e{{"message", v.describe()}};
    switch (v.kind) {
      case Violation::Kind::ColumnSum:
        e["kind"] = "column_sum";
        e["block"] = v.block + 1;
        e["column"] = v.column + 1;
        e["sum"] = v.sum;
        break;
      case Violation::Kind::Width:
        e["kind"] = "width";
        e["block"] = v.block + 1;
        break;
      case Violation::Kind::Empty:
        e["kind"] = "empty";
        break;
    }
    out["violations"].push_back(std::move(e));
  }
  return out;
}

inline json counterexample(const LevelReport& lv) {
  if (lv.wc_witness) {
    const auto& w = *lv.wc_witness;
    return {{"kind", "well_connected"},
            {"block", w.level + 1},
            {"row", w.row + 1},
            {"columns", {w.j + 1, w.j2 + 1}},
            {"ratios", {w.ratio_j.to_string(), w.ratio_j2.to_string()}}};
  }
  if (!lv.well_connected) return {{"kind", "rank_one"}};
  if (lv.floret_witness) {
    const auto& w = *lv.floret_witness;
    return {{"kind", "floret"},
            {"rows", {w.u + 1, w.u2 + 1}},
            {"neighbors", {one_based(w.neighbors_u), one_based(w.neighbors_u2)}}};
  }
  if (lv.rowspan_failed_row) return {{"kind", "rowspan"}, {"cap_row", *lv.rowspan_failed_row + 1}};
  return nullptr;
}

inline json to_json(const GripReport& rep) {
  json out;
  out["overall"] = rep.overall;
  json ratios = json::array();
  for (const auto& blk : rep.ratios.ratio) ratios.push_back(to_json(blk));
  out["connection_ratios"] = ratios;
  // Block 1 as a single root floret, and as one floret per row.
  if (!rep.ratios.ratio.empty()) {
    std::size_t n = rep.ratios.ratio.front().size();
    out["level1_florets"] = {{"single_root", std::vector<std::size_t>(n, 1)},
                             {"per_row", [&] {
                                json a = json::array();
                                for (std::size_t i = 0; i < n; ++i) a.push_back(i + 1);
                                return a;
                              }()}};
  }
  json levels = json::array();
  for (const auto& lv : rep.levels) {
    json e;
    e["blocks"] = {lv.level + 1, lv.level + 2};
    e["well_connected"] = lv.well_connected;
    e["floret_condition"] = lv.floret_condition;
    e["rowspan"] = lv.rowspan;
    e["ok"] = lv.ok();
    e["connection_ratios"] = ratios.at(lv.level + 1);
    if (lv.decomposition) {
      json fl = json::array();
      for (std::size_t t = 0; t < lv.decomposition->size(); ++t)
        fl.push_back({{"b_rows", one_based(lv.decomposition->florets_b[t])},
                      {"c_rows", one_based(lv.decomposition->florets_c[t])}});
      e["florets"] = fl;
    }
    if (lv.omega) e["omega"] = {{"x", lv.omega->x}, {"y", lv.omega->y}};
    if (!lv.ok()) e["counterexample"] = counterexample(lv);
    levels.push_back(std::move(e));
  }
  out["levels"] = levels;
  return out;
}

inline json to_json(const MleResult& res, bool explain = false) {
  json out{{"p_star", to_json(res.p_star)}, {"c", res.c}};
  if (explain) {
    json fs = json::array();
    for (const auto& col : res.factors) {
      json a = json::array();
      for (std::size_t l = 0; l < col.size(); ++l)
        a.push_back({{"block", l + 1},
                     {"numerator", col[l].numerator.to_string()},
                     {"denominator", col[l].denominator.to_string()},
                     {"ratio", col[l].ratio.to_string()}});
      fs.push_back(a);
    }
    out["factors"] = fs;
  }
  return out;
}

inline json to_json(const std::vector<IpsHistoryEntry>& h) {
  json a = json::array();
  for (const auto& e : h) a.push_back({{"step", e.step}, {"max_delta", e.max_delta}, {"kl_to_data", e.kl_to_data}});
  return a;
}

inline json to_json(const IpsResult<Fraction>& r) {
  json out{{"mode", "exact"},
           {"final", to_json(r.final)},
           {"steps_taken", r.steps_taken},
           {"cycles_taken", r.cycles_taken.to_string()},
           {"converged", r.converged},
           {"birch_residual", r.birch_residual.to_string()},
           {"one_cycle_exact", r.one_cycle_exact}};
  if (!r.history.empty()) out["history"] = to_json(r.history);
  return out;
}

inline json to_json(const IpsResult<double>& r) {
  json out{{"mode", "float"},
           {"final", r.final},
           {"steps_taken", r.steps_taken},
           {"cycles_taken", r.cycles_taken.to_string()},
           {"converged", r.converged},
           {"birch_residual", r.birch_residual}};
  if (!r.history.empty()) out["history"] = to_json(r.history);
  return out;
}

using VarKey = std::function<std::string(std::size_t)>;

inline json to_json(const Binomial& b, const VarKey& key) {
  json plus = json::object(), minus = json::object();
  for (const auto& [z, e] : b.plus) plus[key(z)] = e;
  for (const auto& [z, e] : b.minus) minus[key(z)] = e;
  return {plus, minus};
}

inline json to_json(const std::vector<Binomial>& bs, const VarKey& key) {
  json a = json::array();
  for (const auto& b : bs) a.push_back(to_json(b, key));
  return a;
}

inline VarKey tfp_key(const TfpInstance& inst) {
  return [&inst](std::size_t z) { return inst.var_key(z); };
}

// "i,j,k" for z^i_{jk} of generic factors.
inline VarKey factor_key(const TfpFactors& f) {
  return [&f](std::size_t z) {
    const auto& v = f.vars.at(z);
    return std::to_string(v.i + 1) + "," + std::to_string(v.j + 1) + "," + std::to_string(v.k + 1);
  };
}

}  // namespace pmle
