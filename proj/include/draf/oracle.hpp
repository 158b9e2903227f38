#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "draf/data.hpp"
#include "draf/fairness.hpp"
#include "draf/model.hpp"
#include "draf/subsets.hpp"

// Brute-force verifiers. None of them reuse the main-path formula they check;
// each accepts a `corruption` that must make it fail (negative control).
namespace draf::oracle {

struct OracleReport {
  std::string name;
  double max_abs_err = 0.0;
  double tolerance = 0.0;
  std::size_t instances = 0;
  std::size_t skipped = 0;
  bool passed = false;
  std::string detail;
};

/// passed = max_abs_err <= tolerance (and the error is not NaN).
void finalize(OracleReport& report);

std::string to_text(const OracleReport& report);
inline constexpr const char* kReportHeader = "name,max_abs_err,tolerance,instances,skipped,passed";
std::string reports_csv(std::span<const OracleReport> reports);

/// Random instances (n <= 64, g in [-2, 2], +-1 columns) comparing R~^2 with
/// a direct group-mean gap and DR^2(e_m) with R~^2_m. Instance 0 is the
/// 4-row hand fixture. Random columns always carry both signs; hand fixture
/// columns with a single sign are skipped and counted.
OracleReport verify_identity_suite(std::size_t trials, std::uint64_t seed,
                                   double corruption = 0.0);

struct BoundCheck {
  OracleReport report;
  double sup_ipm_grid = 0.0;  // main-path grid kernel
  double vertex_floor = 0.0;  // max over grid of max_m |DR^2(e_m, g)|
  double ascent_floor = 0.0;  // max over grid of the v-ascent value
};

/// Per grid discriminator: max_m |group gap_m| (brute force) must equal
/// max_m |DR^2(e_m)|, and v-ascent on the sphere seeded at the argmax vertex
/// must not fall below it. Globally the main-path grid supIPM must not exceed
/// the vertex floor. Tolerance 1e-9.
BoundCheck verify_ipm_bound(std::span<const double> scores, const subsets::MembershipMatrix& c,
                            const fairness::Grid& grid, double corruption = 0.0);

/// Small random problem for gradient checks.
struct FdInstance {
  data::Dataset ds;
  subsets::MembershipMatrix c;
  model::PredictionModel f;
  model::Discriminator g;
  model::WeightVector v;
};

/// Draws an instance away from ReLU kinks, the |DR^2| kink and the z clamp;
/// resamples internally until one qualifies.
FdInstance make_fd_instance(std::size_t n, std::size_t d, std::size_t q, std::size_t hidden,
                            std::uint64_t seed);

/// Central differences over theta, (scale, offset) and v against
/// model::backward. Error per coordinate is |a - b| / max(|a|, |b|, 1e-3),
/// i.e. 1e-4 relative with a 1e-7 absolute floor; tolerance 1e-4.
/// `corruption` is added to one analytic coordinate.
OracleReport finite_diff_check(const model::Objective& objective, const FdInstance& instance,
                               double step = 1e-5, double corruption = 0.0);

/// Scaling simulation for the finite-sample supIPM bound. Population:
/// `attributes` iid fair coins, x ~ N(0, 1), f = sigmoid(x_scale x +
/// effect (2 s_0 - 1)); W = the first `subsets` order-1 marginals.
struct GapScalingConfig {
  std::size_t n = 400;
  std::size_t attributes = 16;
  std::size_t replications = 1000;
  std::size_t reference = 1000000;
  double effect = 0.25;
  double x_scale = 1.0;
  double quantile = 0.9;
  std::uint64_t seed = 0;
  fairness::Grid grid{-10.0, 10.0, -10.0, 10.0, 7, 7};
};

struct GapScalingResult {
  OracleReport report;
  double q_n = 0.0;          // gap quantile at n, |W| = attributes
  double q_2n = 0.0;         // same at 2n
  double shrink = 0.0;       // q_n / q_2n, expected ~ sqrt(2)
  double q_w1 = 0.0;         // gap quantile at n, |W| = 1
  double inflate = 0.0;      // q_n / q_w1
  double log_factor = 0.0;   // sqrt(log(2 |W|) / log 2)
  double fitted_c = 0.0;     // (1 - 1/n) quantile of the normalised gap
  double exceedance = 0.0;   // fresh replications above the fitted bound
  double allowed = 0.0;      // 1/n + 0.02
  double reference_gap = 0.0;
};

/// `corruption` scales the fitted constant down by that fraction.
GapScalingResult gap_scaling_check(const GapScalingConfig& config, double corruption = 0.0);

}  // namespace draf::oracle
