#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace hgest;

namespace {

std::string strip_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

}  // namespace

TEST(Csv, GoldenHeaderAndRow) {
  EXPECT_STREQ(csv_header(),
               "experiment,family,n,k,alpha,eps,delta,profile,seed,estimate,exact,within_eps,total_cost,queries,runtime_ms");
  ExperimentRecord r;
  r.experiment = "accuracy";
  r.family = "er(n=8;k=2;p=0.5)";
  r.n = 8;
  r.k = 2;
  r.alpha = 1;
  r.eps = "1/2";
  r.delta = 0.1;
  r.profile = "fast";
  r.seed = 7;
  r.exact = 12;
  r.total_cost = 30;
  r.queries = 4;
  r.runtime_ms = 1.5;
  EXPECT_EQ(to_csv_row(r), "accuracy,er(n=8;k=2;p=0.5),8,2,1,1/2,0.1,fast,7,RTE,12,0,30,4,1.5");
}

TEST(Csv, EmptyFamilyListGivesHeaderOnly) {
  AccuracyConfig cfg;
  auto rows = run_accuracy_suite(cfg);
  EXPECT_TRUE(rows.empty());
  std::ostringstream os;
  write_csv(os, rows);
  EXPECT_EQ(os.str(), std::string(csv_header()) + "\n");
}

TEST(WithinEps, Definition) {
  EXPECT_TRUE(within_eps(15.0, 10.0, 0.5));
  EXPECT_TRUE(within_eps(5.0, 10.0, 0.5));
  EXPECT_FALSE(within_eps(15.5, 10.0, 0.5));
  EXPECT_TRUE(within_eps(0.0, 0.0, 0.5));
  EXPECT_FALSE(within_eps(1.0, 0.0, 0.5));
  EXPECT_FALSE(within_eps(std::nullopt, 10.0, 0.5));
}

TEST(Slope, TopHalfFit) {
  std::vector<double> x, y;
  for (int i = 6; i <= 11; ++i) {
    x.push_back(std::ldexp(1.0, i));
    y.push_back(3 * std::pow(x.back(), 1.5));
  }
  auto s = top_half_slope(x, y);
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s, 1.5, 1e-9);
  EXPECT_FALSE(top_half_slope({64}, {10}));
  EXPECT_FALSE(top_half_slope({64, 128}, {10, 20}));
}

TEST(Scaling, SingleSizeHasNoSlope) {
  ScalingConfig cfg;
  cfg.ns = {64};
  cfg.trials = 3;
  auto r = run_cost_scaling(cfg);
  for (double a : cfg.alphas) {
    EXPECT_FALSE(r.slopes.at(a));
    ASSERT_EQ(r.medians.at(a).size(), 1u);
  }
  EXPECT_EQ(r.records.size(), 6u);
  cfg.ns = {48};
  EXPECT_THROW(run_cost_scaling(cfg), PreconditionError);
}

TEST(Accuracy, DeterministicAcrossThreadCounts) {
  AccuracyConfig cfg;
  cfg.families = {FamilySpec{"er", 64, 2, 0.2, 0, {}, {}}, FamilySpec{"empty", 64, 3, 0, 0, {}, {}}};
  cfg.trials = 4;
  std::ostringstream a, b;
  write_csv(a, run_accuracy_suite(cfg));
  cfg.threads = 2;
  write_csv(b, run_accuracy_suite(cfg));
  EXPECT_EQ(strip_runtime(a.str()), strip_runtime(b.str()));
}

TEST(Accuracy, ExactColumnUsesColourfulCountForPartitionedFamilies) {
  AccuracyConfig cfg;
  cfg.estimator = EstimatorKind::fine;
  cfg.families = {FamilySpec{"er-partite", 48, 3, 0.01, 0, {}, {}}};
  cfg.trials = 2;
  auto rows = run_accuracy_suite(cfg);
  ASSERT_EQ(rows.size(), 2u);
  RngStream gr = RngStream(cfg.seed).child(0).child(0);
  Instance inst = make_instance(cfg.families[0], gr);
  ASSERT_TRUE(inst.classes);
  EXPECT_EQ(rows[0].exact, static_cast<double>(colourful_edge_count(inst.g, *inst.classes)));
}

TEST(Families, LabelsAndRejections) {
  EXPECT_EQ((FamilySpec{"er-m", 64, 2, 0, 64, {}, {}}).label(), "er-m(n=64;k=2;m=64)");
  RngStream r(1);
  EXPECT_THROW(make_instance(FamilySpec{"bogus", 8, 2, 0, 0, {}, {}}, r), PreconditionError);
  EXPECT_THROW(parse_estimator("nope"), PreconditionError);
}
