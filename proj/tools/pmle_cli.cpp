#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmle/core.hpp"
#include "pmle/grip.hpp"
#include "pmle/hierarchical.hpp"
#include "pmle/ips.hpp"
#include "pmle/json_io.hpp"
#include "pmle/matrix_io.hpp"
#include "pmle/mle.hpp"
#include "pmle/staged_tree.hpp"
#include "pmle/tfp.hpp"

using namespace pmle;

namespace {

constexpr const char* kVersionHeader = "# partition-mle v0.1";

enum Exit { kOk = 0, kInvalid = 1, kPrecondition = 2, kResource = 3 };

struct Options {
  std::string format = "json";
  std::string output;
};

Options opts;

std::ostream& out_stream() {
  static std::ofstream file;
  if (opts.output.empty()) return std::cout;
  if (!file.is_open()) {
    file.open(opts.output, std::ios::binary);
    if (!file) throw ParseError("cannot write '" + opts.output + "'");
  }
  return file;
}

void write_text(std::ostream& os, const json& j) {
  os << kVersionHeader << '\n';
  for (const auto& [key, val] : j.items()) {
    if (val.is_string()) {
      os << key << ": " << val.get<std::string>() << '\n';
    } else {
      os << key << ": " << val.dump() << '\n';
    }
  }
}

void emit(const json& j) {
  auto& os = out_stream();
  if (opts.format == "text") {
    write_text(os, j);
  } else {
    os << j.dump(2) << '\n';
  }
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << body;
}

// --- validate -------------------------------------------------------------

int cmd_validate(const std::string& path) {
  auto raw = parse_matrix_raw(read_file(path));
  auto rep = validate(raw);
  json j = to_json(rep);
  j["file"] = path;
  emit(j);
  if (!rep.ok())
    for (const auto& v : rep.violations) std::cerr << path << ": " << v.describe() << '\n';
  return rep.ok() ? kOk : kInvalid;
}

// --- grip -----------------------------------------------------------------

int cmd_grip(const std::string& path) {
  auto mat = load_matrix(path);
  auto rep = grip_check(mat);
  emit(to_json(rep));
  return rep.overall ? kOk : kPrecondition;
}

// --- mle ------------------------------------------------------------------

int cmd_mle(const std::string& path, const std::string& data, bool explain) {
  auto mat = load_matrix(path);
  auto d = load_data(data);
  auto rep = grip_check(mat);
  if (!rep.overall) {
    for (const auto& lv : rep.levels)
      if (!lv.ok())
        std::cerr << "GRIP fails between blocks " << lv.level + 1 << " and " << lv.level + 2 << ": "
                  << counterexample(lv).dump() << '\n';
    throw GripRequired("closed-form MLE needs a GRIP matrix");
  }
  auto res = closed_form_mle(mat, std::span<const Fraction>(d), rep);
  emit(to_json(res, explain));
  return kOk;
}

// --- ips ------------------------------------------------------------------

std::vector<double> to_float_data(const FractionVector& d) {
  Fraction total;
  for (const auto& x : d) total += x;
  std::vector<double> out;
  for (const auto& x : d) out.push_back(x.to_double());
  if (total != Fraction(1) && !total.is_zero()) {
    std::cerr << "warning: data sums to " << total.to_string() << ", normalizing\n";
    for (std::size_t j = 0; j < d.size(); ++j) out[j] = (d[j] / total).to_double();
  }
  return out;
}

int cmd_ips(const std::string& path, const std::string& data, const std::string& mode, double tol,
            std::size_t max_cycles, bool history) {
  auto mat = load_matrix(path);
  auto d = load_data(data);
  IpsConfig cfg;
  cfg.max_cycles = max_cycles;
  cfg.float_tolerance = tol;
  cfg.record_history = history;
  if (mode == "exact") {
    cfg.mode = IpsMode::Exact;
    auto r = ips_run<Fraction>(mat, std::span<const Fraction>(d), cfg);
    emit(to_json(r));
  } else {
    cfg.mode = IpsMode::Float;
    auto fd = to_float_data(d);
    auto r = ips_run<double>(mat, std::span<const double>(fd), cfg);
    emit(to_json(r));
  }
  return kOk;
}

// --- experiment -----------------------------------------------------------

int cmd_experiment(const std::string& path, std::size_t trials, double tol, std::uint64_t seed,
                   std::size_t max_cycles, unsigned threads) {
  auto mat = load_matrix(path);
  ExperimentConfig cfg;
  cfg.trials = trials;
  cfg.tolerance = tol;
  cfg.seed = seed;
  cfg.max_cycles = max_cycles;
  cfg.threads = threads;
  auto st = iteration_experiment(mat, cfg);
  auto& os = out_stream();
  os << "trial,steps,final_birch_residual\n";
  char buf[64];
  for (const auto& t : st.trials) {
    std::snprintf(buf, sizeof buf, "%.6e", t.final_birch_residual);
    os << t.trial + 1 << ',' << t.steps << ',' << buf << '\n';
  }
  std::ostringstream summary;
  summary << "mean=" << st.mean << " min=" << st.min << " max=" << st.max;
  if (opts.output.empty()) {
    std::cout << summary.str() << '\n';
  } else {
    std::cout << kVersionHeader << '\n' << summary.str() << '\n';
  }
  return kOk;
}

// --- tree -----------------------------------------------------------------

int cmd_tree(const std::string& path, const std::string& dot) {
  auto mat = load_matrix(path);
  auto r = tree_from_matrix(mat);
  json j;
  if (auto* ns = std::get_if<NotStaged>(&r)) {
    j["staged"] = false;
    j["stratified"] = false;
    j["balanced"] = false;
    j["reason"] = ns->kind == NotStaged::Kind::RepeatedLabel ? "repeated_label" : "overlapping_florets";
    emit(j);
    return kPrecondition;
  }
  const auto& t = std::get<StagedTree>(r);
  bool strat = is_stratified(t);
  auto viol = balance_violation(t);
  j["staged"] = true;
  j["stratified"] = strat;
  j["balanced"] = !viol;
  j["vertices"] = t.size();
  j["stages"] = t.stages().size();
  if (viol)
    j["balance_violation"] = {{"v", t.vertex_name(viol->v)}, {"w", t.vertex_name(viol->w)}};
  if (!dot.empty()) write_file(dot, to_dot(t));
  emit(j);
  return strat && !viol ? kOk : kPrecondition;
}

// --- hier -----------------------------------------------------------------

std::vector<std::size_t> parse_order(const std::string& s, std::size_t facets) {
  std::vector<std::size_t> order;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      throw InvalidFacetOrder("bad facet index '" + tok + "'");
    std::size_t v = std::stoul(tok);
    if (v == 0 || v > facets) throw InvalidFacetOrder("facet index " + tok + " out of range");
    order.push_back(v - 1);
  }
  return order;
}

int cmd_hier(const std::string& path, const std::string& order_s, bool find, const std::string& emit_path,
             bool decomposable) {
  auto cx = parse_complex(read_file(path));
  json j;
  j["complex"] = cx.describe();
  std::vector<std::size_t> order = identity_order(cx);
  int code = kOk;
  if (find) {
    auto found = rip_order_search(cx);
    j["rip_order"] = found ? one_based(*found) : json(nullptr);
    if (found) {
      order = *found;
    } else {
      code = kPrecondition;
    }
  } else if (!order_s.empty()) {
    order = parse_order(order_s, cx.facets.size());
  }
  auto rip = rip_check(cx, order);
  j["order"] = one_based(order);
  j["rip"] = rip.ok;
  if (!rip.ok) {
    j["failing_position"] = *rip.failing_r + 1;
    j["intersection"] = one_based(rip.intersection);
    code = kPrecondition;
  }
  if (decomposable) j["decomposable"] = is_decomposable(cx);
  auto mat = matrix_from_complex(cx, order);
  j["grip"] = grip_check(mat).overall;
  if (!emit_path.empty()) write_file(emit_path, format_matrix(mat, "hierarchical model " + cx.describe()));
  emit(j);
  return code;
}

// --- tfp ------------------------------------------------------------------

int cmd_tfp(const std::string& path, std::size_t level, bool generators, std::size_t limit) {
  auto mat = load_matrix(path);
  auto rep = grip_check(mat);
  if (!rep.overall) throw GripRequired("toric fiber product split needs a GRIP matrix");
  std::vector<std::size_t> levels;
  if (level) {
    levels.push_back(level);
  } else {
    for (std::size_t l = 1; l < mat.k(); ++l) levels.push_back(l);
  }
  json j;
  json arr = json::array();
  bool all = true;
  for (std::size_t l : levels) {
    auto inst = build_tfp_instance(mat, rep, l);
    auto chk = check_tfp_instance(mat, inst);
    json e{{"level", l},
           {"equal", chk.ok()},
           {"bijection", chk.bijection},
           {"grading_independent", chk.grading_independent},
           {"multihomogeneous", chk.multihomogeneous},
           {"rowspan_equal", chk.rowspan_equal},
           {"variables", inst.factors.vars.size()}};
    all = all && chk.ok();
    if (generators) {
      auto gens = tfp_generators(inst.factors, limit);
      auto param = tfp_parametrization_matrix(inst.factors);
      bool in_kernel = true;
      for (const auto* fam : {&gens.quads, &gens.lifts_b, &gens.lifts_c})
        for (const auto& b : *fam) in_kernel = in_kernel && binomial_in_kernel(param, b);
      auto key = tfp_key(inst);
      e["generators"] = {{"quad", to_json(gens.quads, key)},
                         {"lift_b", to_json(gens.lifts_b, key)},
                         {"lift_c", to_json(gens.lifts_c, key)},
                         {"in_kernel", in_kernel}};
      all = all && in_kernel;
    }
    arr.push_back(std::move(e));
  }
  j["levels"] = arr;
  j["equal"] = all;
  emit(j);
  return all ? kOk : kPrecondition;
}

// --- roundtrip ------------------------------------------------------------

bool same_up_to_column_order(const MultipartitionMatrix& a, const MultipartitionMatrix& b) {
  if (a.k() != b.k() || a.m() != b.m()) return false;
  auto cols = [](const MultipartitionMatrix& m) {
    std::vector<std::vector<std::size_t>> c(m.m());
    for (std::size_t j = 0; j < m.m(); ++j)
      for (std::size_t l = 0; l < m.k(); ++l) c[j].push_back(m.block(l).row_of(j));
    std::sort(c.begin(), c.end());
    return c;
  };
  return cols(a) == cols(b);
}

int cmd_roundtrip(const std::string& path) {
  auto mat = load_matrix(path);
  auto bar = deduplicate(mat);
  bool grip = grip_check(mat).overall;
  bool grip_bar = grip_check(bar).overall;
  json j{{"grip", grip}, {"grip_distinct_columns", grip_bar}};
  auto r = tree_from_matrix(mat);
  bool tree_ok = false;
  bool chain = true;
  if (auto* t = std::get_if<StagedTree>(&r)) {
    bool strat = is_stratified(*t), bal = is_balanced(*t);
    tree_ok = strat && bal;
    j["staged"] = true;
    j["stratified"] = strat;
    j["balanced"] = bal;
    if (strat) {
      auto back = matrix_from_tree(*t);
      auto back_full = matrix_from_tree(*t, true);
      bool same = same_up_to_column_order(back_full, mat);
      bool back_grip = grip_check(back).overall;
      auto again = tree_from_matrix(back_full);
      bool tree_same = std::holds_alternative<StagedTree>(again) &&
                       canonical_form(std::get<StagedTree>(again), true) == canonical_form(*t, true);
      j["tree_matrix_matches"] = same;
      j["tree_matrix_grip"] = back_grip;
      j["tree_roundtrip"] = tree_same;
      chain = same && tree_same && (!tree_ok || back_grip);
    }
  } else {
    j["staged"] = false;
    j["stratified"] = false;
    j["balanced"] = false;
  }
  bool consistent = chain && grip_bar == tree_ok && (!grip || tree_ok);
  j["consistent"] = consistent;
  emit(j);
  return consistent ? kOk : kPrecondition;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const FacetCountTooLarge*>(&e) || dynamic_cast<const GeneratorLimitExceeded*>(&e))
    return kResource;
  if (dynamic_cast<const GripRequired*>(&e) || dynamic_cast<const FloretsUndefined*>(&e) ||
      dynamic_cast<const IndexingUndefined*>(&e) || dynamic_cast<const ZeroMarginal*>(&e) ||
      dynamic_cast<const NotStratified*>(&e) || dynamic_cast<const RankOneViolation*>(&e) ||
      dynamic_cast<const NotMultihomogeneous*>(&e))
    return kPrecondition;
  return kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition models: GRIP checks, closed-form MLEs and iterative proportional scaling"};
  app.require_subcommand(1, 1);
  app.add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("-o,--output", opts.output, "Write the main output to this file");

  std::string file, data, mode = "exact", dot, order, emit_matrix;
  double tol = 1e-8;
  std::size_t max_cycles = 50, trials = 1000, level = 0, limit = kDefaultGeneratorLimit;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool explain = false, history = false, find_rip = false, generators = false, decomposable = false;

  auto* validate_cmd = app.add_subcommand("validate", "Check the partition structure of a matrix file");
  validate_cmd->add_option("file", file)->required();

  auto* grip_cmd = app.add_subcommand("grip", "GRIP report");
  grip_cmd->add_option("file", file)->required();

  auto* mle_cmd = app.add_subcommand("mle", "Closed-form MLE");
  mle_cmd->add_option("file", file)->required();
  mle_cmd->add_option("--data", data)->required();
  mle_cmd->add_flag("--explain", explain, "Per-column factor breakdown");

  auto* ips_cmd = app.add_subcommand("ips", "Iterative proportional scaling");
  ips_cmd->add_option("file", file)->required();
  ips_cmd->add_option("--data", data)->required();
  ips_cmd->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
  ips_cmd->add_option("--tol", tol);
  ips_cmd->add_option("--max-cycles", max_cycles);
  ips_cmd->add_flag("--history", history);

  auto* exp_cmd = app.add_subcommand("experiment", "Step counts of float IPS on random data");
  exp_cmd->add_option("file", file)->required();
  exp_cmd->add_option("--trials", trials);
  exp_cmd->add_option("--tol", tol);
  exp_cmd->add_option("--seed", seed);
  exp_cmd->add_option("--max-cycles", max_cycles)->default_val(1'000'000);
  exp_cmd->add_option("--threads", threads);

  auto* tree_cmd = app.add_subcommand("tree", "Staged tree of a matrix");
  tree_cmd->add_option("file", file)->required();
  tree_cmd->add_option("--dot", dot);

  auto* hier_cmd = app.add_subcommand("hier", "Hierarchical model of a simplicial complex");
  hier_cmd->add_option("file", file)->required();
  hier_cmd->add_option("--order", order, "Comma separated 1-based facet order");
  hier_cmd->add_flag("--find-rip", find_rip);
  hier_cmd->add_option("--emit-matrix", emit_matrix);
  hier_cmd->add_flag("--decomposable", decomposable);

  auto* tfp_cmd = app.add_subcommand("tfp", "Toric fiber product split at a level");
  tfp_cmd->add_option("file", file)->required();
  tfp_cmd->add_option("--level", level, "Number of prefix blocks; all levels if omitted");
  tfp_cmd->add_flag("--generators", generators);
  tfp_cmd->add_option("--limit", limit);

  auto* rt_cmd = app.add_subcommand("roundtrip", "matrix -> staged tree -> matrix consistency");
  rt_cmd->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(file);
    if (*grip_cmd) return cmd_grip(file);
    if (*mle_cmd) return cmd_mle(file, data, explain);
    if (*ips_cmd) return cmd_ips(file, data, mode, tol, max_cycles, history);
    if (*exp_cmd) return cmd_experiment(file, trials, tol, seed, max_cycles, threads);
    if (*tree_cmd) return cmd_tree(file, dot);
    if (*hier_cmd) return cmd_hier(file, order, find_rip, emit_matrix, decomposable);
    if (*tfp_cmd) return cmd_tfp(file, level, generators, limit);
    if (*rt_cmd) return cmd_roundtrip(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kInvalid;
}
