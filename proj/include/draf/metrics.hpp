#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "draf/data.hpp"
#include "draf/fairness.hpp"
#include "draf/model.hpp"
#include "draf/subsets.hpp"

namespace draf::metrics {

/// Predictions are 1(score >= 1/2) throughout.
inline constexpr double kThreshold = 0.5;

struct MetricsReport {
  double acc = 0.0;
  double sp = 0.0;
  std::map<int, double> mp;  // order l -> MP^(l)
  double wmp = 0.0;
  double zdr = 0.0;
  double supipm = 0.0;
  std::size_t n_eval = 0;

  bool operator==(const MetricsReport&) const = default;
};

double accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// max_s (n_s / n) |p_s - p| over nonempty subgroups.
double sp(std::span<const double> scores, const data::Dataset& ds);

/// max over |L| = l of sum_a (n_L^a / n) |p_L^a - p|. Throws
/// std::invalid_argument unless 1 <= l <= q.
double mp_l(std::span<const double> scores, const data::Dataset& ds, int l);

/// max over attributes j and sides a of (n_j^a / n) W1(P_{f|j=a}, P_f).
double wmp(std::span<const double> scores, const data::Dataset& ds);

struct PositiveRate {
  std::size_t count = 0;
  double rate = 0.0;
};

std::map<data::SubgroupKey, PositiveRate> positive_rate_table(std::span<const double> scores,
                                                              const data::Dataset& ds);

struct ParetoPoint {
  double fairness = 0.0;  // lower is better
  double acc = 0.0;       // higher is better

  bool operator==(const ParetoPoint&) const = default;
};

/// Nondominated points sorted by fairness ascending.
std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points);

inline fairness::DrGapOptions default_eval_gap() {
  fairness::DrGapOptions gap;
  gap.steps = 50;
  gap.lr_g = 0.05;
  gap.lr_v = 0.05;
  gap.restarts = 8;
  return gap;
}

struct EvalOptions {
  subsets::BuildOptions collection{.gamma = 0.01, .orders = {1, 2}, .custom = {}};
  fairness::DrGapOptions gap = default_eval_gap();
  fairness::Grid grid;
};

/// Full report for fixed scores. The DR gap and grid supIPM use a collection
/// built on `ds` itself; both are 0 when that collection comes out empty.
MetricsReport evaluate_scores(std::span<const double> scores, const data::Dataset& ds,
                              const EvalOptions& options);
MetricsReport evaluate_model(const model::PredictionModel& f, const data::Dataset& ds,
                             const EvalOptions& options);

}  // namespace draf::metrics
