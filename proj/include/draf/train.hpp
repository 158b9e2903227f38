#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "draf/data.hpp"
#include "draf/losses.hpp"
#include "draf/metrics.hpp"
#include "draf/model.hpp"
#include "draf/subsets.hpp"

namespace draf::train {

enum class Method { draf, reg, gf, none };

std::string to_string(Method method);
Method parse_method(const std::string& text);

struct TrainConfig {
  Method method = Method::draf;
  double lambda = 0.0;  // DR multiplier; reused as C_REG / C_GF
  double lr_cls = 0.01;
  double lr_g = 0.05;
  double lr_v = 0.05;
  std::size_t epochs = 200;
  std::size_t batch = 0;  // 0 = full batch
  std::size_t hidden = 64;
  double gamma = 0.01;
  std::set<int> orders = {1, 2};
  std::uint64_t seed = 0;
  double gf_temperature = 20.0;
  double clamp_eps = 1e-6;
  std::size_t adversary_steps = 1;

  void validate() const;
};

struct EpochRecord {
  double ce = 0.0;
  double penalty = 0.0;  // z-DR^2 for DRAF, DP_marg for REG/none, softmax DP for GF
  double valid_acc = 0.0;
  std::uint64_t theta_digest = 0;  // hash of theta bits after the update

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  model::PredictionModel model;
  model::Discriminator discriminator;
  model::WeightVector weights;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::vector<std::string> warnings;
};

struct PenaltyGrad {
  double value = 0.0;
  std::vector<double> d_scores;
};

/// sum_l | mean(f) - mean_{s_l = 1}(f) |. Attributes with n_l in {0, n} are
/// skipped and reported through `skipped`.
PenaltyGrad reg_penalty(std::span<const double> scores, const data::Dataset& ds,
                        std::vector<std::size_t>* skipped = nullptr);

/// sum_s softmax(tau * w)_s * w_s with w_s = (n_s / n) |mean_s(f) - mean(f)|.
/// Throws DataError with fewer than two nonempty subgroups.
PenaltyGrad gf_penalty(std::span<const double> scores, const data::Dataset& ds,
                       double temperature);

std::uint64_t digest(std::span<const double> values);

TrainResult train_draf(const data::Dataset& train, const data::Dataset& valid,
                       const subsets::SubsetCollection& coll, const TrainConfig& cfg);
TrainResult train_reg(const data::Dataset& train, const data::Dataset& valid,
                      const TrainConfig& cfg);
TrainResult train_gf(const data::Dataset& train, const data::Dataset& valid,
                     const TrainConfig& cfg);
TrainResult train_unconstrained(const data::Dataset& train, const data::Dataset& valid,
                                const TrainConfig& cfg);

/// Dispatch on cfg.method; DRAF builds its collection on `train` from
/// cfg.gamma / cfg.orders plus `custom`.
TrainResult train_model(const data::Dataset& train, const data::Dataset& valid,
                        const TrainConfig& cfg,
                        const std::vector<subsets::SubgroupSubset>& custom = {});

enum class SplitName { train, valid, test };
std::string to_string(SplitName split);

struct SweepEntry {
  Method method = Method::draf;
  double lambda = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::array<metrics::MetricsReport, 3> reports;  // train, valid, test
  double final_train_zdr = 0.0;                   // penalty of the last epoch
  model::Checkpoint checkpoint;
};

/// One run per (lambda, seed), lambda-major. Runs fan out over `workers`
/// threads (0 = all); output order does not depend on scheduling.
std::vector<SweepEntry> sweep_lambda(const data::Splits& splits, const TrainConfig& base,
                                     std::span<const double> lambdas,
                                     std::span<const std::uint64_t> seeds,
                                     const metrics::EvalOptions& eval, std::size_t workers = 0,
                                     const std::vector<subsets::SubgroupSubset>& custom = {});

/// The 17-point multiplier grid 0, 0.1, ..., 1, 2, 3, 4, 5, 10, 20.
std::vector<double> default_lambda_grid();
std::vector<double> default_gamma_grid();

inline constexpr const char* kMetricsHeader =
    "method,lambda,gamma,seed,split,acc,sp,mp1,mp2,wmp,zdr,supipm";

std::string metrics_row(Method method, double lambda, double gamma, std::uint64_t seed,
                        SplitName split, const metrics::MetricsReport& r);
std::string metrics_csv(std::span<const SweepEntry> entries);

struct MetricsRow {
  std::string method;
  double lambda = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string split;
  double acc = 0.0, sp = 0.0, mp1 = 0.0, mp2 = 0.0, wmp = 0.0, zdr = 0.0, supipm = 0.0;
};

std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

/// Normalised trapezoid area of the Pareto front (acc integrated over the
/// fairness range, divided by that range); 0 for a single-point front.
double front_area(std::span<const metrics::ParetoPoint> points);

/// argmax of front_area; ties go to the smaller gamma.
double select_gamma(const std::map<double, std::vector<metrics::ParetoPoint>>& sweeps);

}  // namespace draf::train
