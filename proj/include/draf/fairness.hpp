#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "draf/model.hpp"
#include "draf/subsets.hpp"

namespace draf::fairness {

// Single-subset quantities. `y` holds +-1 subset indicators (both signs
// required, otherwise std::invalid_argument) and `g` the discriminator
// outputs g(f_i).

/// 1 - sum (y - g)^2 / sum (y - ybar)^2.
double r_squared(std::span<const double> y, std::span<const double> g);

/// R^2 plus sum (g - ybar)^2 / sum (y - ybar)^2. Equals group_mean_gap(y, g)
/// identically; the identity is checked against brute force in the oracle
/// suite.
double r_tilde_squared(std::span<const double> y, std::span<const double> g);

/// mean of g over y = +1 minus mean of g over y = -1.
double group_mean_gap(std::span<const double> y, std::span<const double> g);

inline constexpr double kDegenerateVariance = 1e-12;

/// Doubly regressing R^2 at weight vector v:
///   1 - [sum (v'c_i - g_i)^2 - sum (g_i - mu_v)^2] / sum (v'c_i - mu_v)^2.
/// Returns 0 when the denominator is below 1e-12.
double dr_squared(const subsets::MembershipMatrix& c, std::span<const double> v,
                  std::span<const double> g);

struct DrSquaredGrad {
  double value = 0.0;
  std::vector<double> d_g;  // d DR^2 / d g_i
  std::vector<double> d_v;  // d DR^2 / d v
  bool degenerate = false;
};

DrSquaredGrad dr_squared_grad(const subsets::MembershipMatrix& c, std::span<const double> v,
                              std::span<const double> g);

/// log((1 + t) / (1 - t)) with t = min(|dr2| / 2, 1 - eps).
double z_dr_squared(double dr2, double eps = 1e-6);
/// d z / d dr2; zero at dr2 = 0 and inside the clamp.
double z_dr_derivative(double dr2, double eps = 1e-6);

struct ZDrGrad {
  double dr2 = 0.0;
  double z = 0.0;
  std::vector<double> d_scores;  // dz / d f_i
  double d_scale = 0.0;
  double d_offset = 0.0;
  std::vector<double> d_v;
};

/// z-DR^2 of fixed scores under (g, v) with gradients for every argument.
ZDrGrad z_dr_grad(std::span<const double> scores, const subsets::MembershipMatrix& c,
                  const model::Discriminator& g, std::span<const double> v,
                  double eps = 1e-6);

/// 1 for columns of C kept by a greedy pass that skips any column whose
/// centred version lies in the span of the columns kept before it.
///
/// With dependent columns, v on S^M can approach a direction where
/// sum (v'c_i - mu_v)^2 -> 0 while the numerator does not vanish, so
/// sup |DR^2| is unbounded. Ascent is therefore confined to the coordinate
/// sub-sphere of the kept columns, on which that variance is bounded below.
std::vector<std::uint8_t> independent_columns(const subsets::MembershipMatrix& c,
                                              double tolerance = 1e-9);

/// One ascent step on (phi, v): phi += lr_g * grad, then v moves along the
/// gradient and is projected onto the unit sphere restricted to the
/// coordinates flagged in `active` (all coordinates when empty).
void ascent_step(std::span<const double> scores, const subsets::MembershipMatrix& c,
                 model::Discriminator& g, model::WeightVector& v, double lr_g, double lr_v,
                 double eps = 1e-6, std::span<const std::uint8_t> active = {});

/// Uniform point on the sub-sphere of `active` coordinates.
model::WeightVector uniform_active(std::span<const std::uint8_t> active);

struct DrGapOptions {
  std::size_t steps = 50;
  double lr_g = 0.05;
  double lr_v = 0.05;
  std::size_t restarts = 3;
  std::uint64_t seed = 0;
  double clamp_eps = 1e-6;
  std::optional<model::Discriminator> init_g;  // restart 0 start point
  std::optional<model::WeightVector> init_v;
};

struct DrGapResult {
  double value = 0.0;         // max(ascent_value, vertex_floor)
  double ascent_value = 0.0;  // best z-DR^2 seen along all ascent paths
  double vertex_floor = 0.0;  // max_m z(|R~^2_m|) at the returned g
  model::Discriminator g;
  model::WeightVector v;
};

/// Multi-restart alternating ascent for sup over (g, v) of z-DR^2. Local
/// search: the value is a lower bound on the true supremum.
DrGapResult dr_gap(std::span<const double> scores, const subsets::MembershipMatrix& c,
                   const DrGapOptions& options);

/// Evenly spaced (scale, offset) lattice of sigmoid discriminators.
struct Grid {
  double a_min = -50.0;
  double a_max = 50.0;
  double b_min = -50.0;
  double b_max = 50.0;
  std::size_t a_steps = 101;
  std::size_t b_steps = 101;

  std::size_t size() const { return a_steps * b_steps; }
  double a(std::size_t i) const;
  double b(std::size_t j) const;
  model::Discriminator at(std::size_t index) const;
};

enum class Execution { serial, parallel };

/// max over grid discriminators g and subsets m of |group mean gap of g(f)|.
double sup_ipm_grid(std::span<const double> scores, const subsets::MembershipMatrix& c,
                    const Grid& grid, Execution exec = Execution::parallel);

/// Exact W1 between two empirical measures.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

struct FairnessEval {
  double dr2 = 0.0;
  double z_dr2 = 0.0;
  std::vector<double> per_subset_rtilde;
  double sup_ipm_grid = 0.0;
  double dr_gap = 0.0;
};

FairnessEval evaluate(std::span<const double> scores, const subsets::MembershipMatrix& c,
                      const DrGapOptions& gap_options, const Grid& grid);

/// DR^2 at v = e_m for every m, i.e. R~^2 of each column.
std::vector<double> per_subset_rtilde(std::span<const double> gvals,
                                      const subsets::MembershipMatrix& c);

}  // namespace draf::fairness
