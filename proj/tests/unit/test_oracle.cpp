#include <gtest/gtest.h>

#include <cmath>

#include "draf/fairness.hpp"
#include "draf/oracle.hpp"
#include "fixtures.hpp"

using namespace draf;
using model::ObjectiveKind;

TEST(Oracle, IdentitySuitePassesAndControlFails) {
  const auto r = oracle::verify_identity_suite(200, 1);
  EXPECT_TRUE(r.passed) << oracle::to_text(r);
  EXPECT_EQ(r.instances + r.skipped, 200u);
  EXPECT_GE(r.instances, 190u);
  EXPECT_LE(r.max_abs_err, 1e-10);
  const auto bad = oracle::verify_identity_suite(200, 1, 1e-6);
  EXPECT_FALSE(bad.passed);
  EXPECT_GE(bad.max_abs_err, 1e-7);
}

TEST(Oracle, BoundHoldsOnRandomScoresAndControlFails) {
  const fairness::Grid grid{-50, 50, -50, 50, 21, 21};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = fx::random_dataset(64, 1, 3, seed);
    const auto coll = subsets::build_collection(ds, {0.0, {1, 2}, {}});
    const auto c = subsets::membership(ds, coll);
    const auto scores = fx::uniform_scores(64, seed + 9);
    const auto chk = oracle::verify_ipm_bound(scores, c, grid);
    EXPECT_TRUE(chk.report.passed) << oracle::to_text(chk.report);
    EXPECT_LE(chk.sup_ipm_grid, chk.vertex_floor + 1e-9);
    EXPECT_LE(chk.vertex_floor, chk.ascent_floor + 1e-9);
    EXPECT_FALSE(oracle::verify_ipm_bound(scores, c, grid, 1e-3).report.passed);
  }
}

TEST(Oracle, FiniteDifferencesPassAndControlFails) {
  const auto inst = oracle::make_fd_instance(16, 2, 2, 6, 11);
  for (auto kind : {ObjectiveKind::classification, ObjectiveKind::dr_squared, ObjectiveKind::z_dr}) {
    const model::Objective obj{kind, 0.0, 1e-6};
    EXPECT_TRUE(oracle::finite_diff_check(obj, inst).passed);
    EXPECT_FALSE(oracle::finite_diff_check(obj, inst, 1e-5, 1e-2).passed);
  }
}

TEST(Oracle, GapScalingOnSmallSimulation) {
  oracle::GapScalingConfig cfg;
  cfg.replications = 300;
  cfg.reference = 200000;
  const auto r = oracle::gap_scaling_check(cfg);
  EXPECT_TRUE(r.report.passed) << r.report.detail;
  EXPECT_NEAR(r.shrink, std::sqrt(2.0), 0.3 * std::sqrt(2.0));
  EXPECT_LE(r.exceedance, r.allowed);
  EXPECT_NEAR(r.log_factor, std::sqrt(std::log(32.0) / std::log(2.0)), 1e-15);
  EXPECT_FALSE(oracle::gap_scaling_check(cfg, 0.5).report.passed);
}

TEST(Oracle, GapScalingWithConstantScoresHasNoGap) {
  oracle::GapScalingConfig cfg;
  cfg.effect = 0.0;
  cfg.x_scale = 0.0;
  cfg.replications = 20;
  cfg.reference = 1000;
  const auto r = oracle::gap_scaling_check(cfg);
  EXPECT_EQ(r.q_n, 0.0);
  EXPECT_EQ(r.q_2n, 0.0);
  EXPECT_EQ(r.exceedance, 0.0);
  EXPECT_TRUE(r.report.passed);
}

TEST(Oracle, ReportsCsv) {
  oracle::OracleReport a{"x", 1e-12, 1e-10, 3, 0, false, ""};
  oracle::finalize(a);
  EXPECT_TRUE(a.passed);
  oracle::OracleReport b{"y", NAN, 1e-10, 1, 0, true, ""};
  oracle::finalize(b);
  EXPECT_FALSE(b.passed);
  const std::vector<oracle::OracleReport> both{a, b};
  const auto csv = oracle::reports_csv(both);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), oracle::kReportHeader);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
