#include <gtest/gtest.h>

#include "pmle/json_io.hpp"
#include "support.hpp"

using namespace pmle;
using namespace testing_support;

TEST(Json, FractionsAsStrings) {
  EXPECT_EQ(to_json(Fraction(3, 6)).dump(), "\"1/2\"");
  EXPECT_EQ(to_json(Fraction(2)).dump(), "\"2\"");
  EXPECT_EQ(to_json(FractionVector{Fraction(1, 3), Fraction(-1, 4)}).dump(), "[\"1/3\",\"-1/4\"]");
  EXPECT_EQ(one_based({0, 4}).dump(), "[1,5]");
}

TEST(Json, Validation) {
  auto rep = validate(parse_matrix_raw(read_file(data_path("bad_colsum.txt"))));
  auto j = to_json(rep);
  EXPECT_FALSE(j["ok"].get<bool>());
  ASSERT_FALSE(j["violations"].empty());
  const auto& v = j["violations"][0];
  EXPECT_EQ(v["kind"], "column_sum");
  EXPECT_EQ(v["block"], 1);
  EXPECT_EQ(v["column"], 2);
  EXPECT_TRUE(v.contains("message"));
  EXPECT_TRUE(to_json(validate(load("twobytwo.txt").to_raw()))["ok"].get<bool>());
}

TEST(Json, GripReportShape) {
  auto j = to_json(grip_check(load("fourteen.txt")));
  EXPECT_TRUE(j["overall"].get<bool>());
  ASSERT_EQ(j["levels"].size(), 2u);
  const auto& l2 = j["levels"][0];
  EXPECT_EQ(l2["blocks"].dump(), "[1,2]");
  EXPECT_FALSE(l2.contains("counterexample"));
  EXPECT_EQ(l2["omega"]["x"].dump(), "[1,1]");
  EXPECT_EQ(l2["omega"]["y"].dump(), "[3,4]");
  const auto& l3 = j["levels"][1];
  EXPECT_EQ(l3["florets"].size(), 2u);
  EXPECT_EQ(l3["florets"][0]["c_rows"].dump(), "[1,2,3]");
  EXPECT_EQ(l3["florets"][1]["c_rows"].dump(), "[4,5]");
  EXPECT_EQ(j["connection_ratios"].size(), 3u);
  EXPECT_EQ(j["level1_florets"]["single_root"].dump(), "[1,1]");
  EXPECT_EQ(j["level1_florets"]["per_row"].dump(), "[1,2]");
  // Keys come out sorted.
  std::string s = l2.dump();
  EXPECT_LT(s.find("\"blocks\""), s.find("\"connection_ratios\""));
  EXPECT_LT(s.find("\"floret_condition\""), s.find("\"ok\""));
  EXPECT_LT(s.find("\"rowspan\""), s.find("\"well_connected\""));
}

TEST(Json, WellConnectedCounterexample) {
  auto j = to_json(grip_check(load("twobytwo_dup.txt")));
  EXPECT_FALSE(j["overall"].get<bool>());
  const auto& ce = j["levels"][0]["counterexample"];
  EXPECT_EQ(ce["kind"], "well_connected");
  EXPECT_EQ(ce["block"], 2);
  EXPECT_EQ(ce["row"], 1);
  EXPECT_EQ(ce["columns"].dump(), "[1,3]");
  EXPECT_EQ(ce["ratios"].dump(), "[\"1/2\",\"1/3\"]");
}

TEST(Json, FloretCounterexample) {
  auto ja = to_json(grip_check(load("diffrep_a.txt")));
  const auto& wc = ja["levels"][0]["counterexample"];
  EXPECT_EQ(wc["kind"], "well_connected");
  EXPECT_EQ(wc["row"], 2);
  EXPECT_EQ(wc["columns"].dump(), "[2,3]");
  EXPECT_EQ(wc["ratios"].dump(), "[\"1/2\",\"1\"]");

  MultipartitionMatrix m({PartitionMatrix(2, {0, 0, 1, 1}), PartitionMatrix(3, {0, 1, 1, 2})});
  auto lv = to_json(grip_check(m))["levels"][0];
  EXPECT_TRUE(lv["well_connected"].get<bool>());
  EXPECT_FALSE(lv["floret_condition"].get<bool>());
  EXPECT_EQ(lv["counterexample"]["kind"], "floret");
  EXPECT_EQ(lv["counterexample"]["rows"].dump(), "[1,2]");
  EXPECT_EQ(lv["counterexample"]["neighbors"].dump(), "[[1,2],[2,3]]");
  EXPECT_FALSE(lv.contains("omega"));
}

TEST(Json, Mle) {
  auto mat = load("twobytwo.txt");
  auto res = closed_form_mle(mat, load_data(data_path("twobytwo_d.txt")));
  auto j = to_json(res);
  EXPECT_EQ(j["p_star"].dump(), "[\"3/25\",\"9/50\",\"7/25\",\"21/50\"]");
  EXPECT_EQ(j["c"].dump(), "[1,1,1,1]");
  EXPECT_FALSE(j.contains("factors"));
  auto e = to_json(res, true);
  ASSERT_EQ(e["factors"].size(), 4u);
  EXPECT_EQ(e["factors"][0][0]["block"], 1);
  EXPECT_EQ(e["factors"][0][0]["ratio"], "3/10");
  EXPECT_EQ(e["factors"][0][1]["ratio"], "2/5");
}

TEST(Json, Ips) {
  auto mat = load("twobytwo.txt");
  auto d = load_data(data_path("twobytwo_d.txt"));
  IpsConfig cfg;
  cfg.record_history = true;
  auto j = to_json(ips_run<Fraction>(mat, d, cfg));
  EXPECT_EQ(j["mode"], "exact");
  EXPECT_EQ(j["steps_taken"], 2);
  EXPECT_EQ(j["cycles_taken"], "1");
  EXPECT_EQ(j["birch_residual"], "0");
  EXPECT_TRUE(j["one_cycle_exact"].get<bool>());
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_FALSE(j["history"].empty());
  EXPECT_TRUE(j["history"][0].contains("kl_to_data"));
  cfg.mode = IpsMode::Float;
  cfg.record_history = false;
  auto jf = to_json(ips_run<double>(mat, as_doubles(d), cfg));
  EXPECT_EQ(jf["mode"], "float");
  EXPECT_FALSE(jf.contains("one_cycle_exact"));
  EXPECT_FALSE(jf.contains("history"));
  EXPECT_NEAR(jf["final"][0].get<double>(), 0.12, 1e-12);
}

TEST(Json, BinomialKeys) {
  auto mat = load("twobytwo.txt");
  auto inst = build_tfp_instance(mat, grip_check(mat), 1);
  auto q = quad_generators(inst.factors);
  ASSERT_EQ(q.size(), 1u);
  auto j = to_json(q, tfp_key(inst));
  ASSERT_EQ(j.size(), 1u);
  ASSERT_EQ(j[0].size(), 2u);
  EXPECT_EQ(j[0][0].size(), 2u);
  for (auto& [k, v] : j[0][0].items()) {
    EXPECT_EQ(std::count(k.begin(), k.end(), ','), 2);
    EXPECT_EQ(v, 1);
  }
  TfpFactors f;
  f.b = FractionMatrix(1, 2);
  f.b(0, 0) = f.b(0, 1) = Fraction(1);
  f.c = FractionMatrix(1, 1);
  f.c(0, 0) = Fraction(1);
  f.b_class = {0, 0};
  f.c_class = {0};
  f.classes = 1;
  f.index();
  Binomial b;
  b.plus[f.z(0, 0, 0)] = 1;
  b.minus[f.z(0, 1, 0)] = 1;
  EXPECT_EQ(to_json(b, factor_key(f)).dump(), "[{\"1,1,1\":1},{\"1,2,1\":1}]");
}
