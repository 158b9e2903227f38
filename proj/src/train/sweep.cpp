#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <omp.h>

#include "draf/error.hpp"
#include "draf/train.hpp"

namespace draf::train {

std::string to_string(SplitName split) {
  switch (split) {
    case SplitName::train: return "train";
    case SplitName::valid: return "valid";
    case SplitName::test: return "test";
  }
  return "unknown";
}

std::vector<double> default_lambda_grid() {
  return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0};
}

std::vector<double> default_gamma_grid() { return {0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.30}; }

std::vector<SweepEntry> sweep_lambda(const data::Splits& splits, const TrainConfig& base,
                                     std::span<const double> lambdas,
                                     std::span<const std::uint64_t> seeds,
                                     const metrics::EvalOptions& eval, std::size_t workers,
                                     const std::vector<subsets::SubgroupSubset>& custom) {
  if (lambdas.empty() || seeds.empty()) throw std::invalid_argument("sweep grids must be nonempty");
  const std::size_t runs = lambdas.size() * seeds.size();
  std::vector<SweepEntry> entries(runs);
  const int threads = workers == 0 ? omp_get_max_threads() : static_cast<int>(workers);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long k = 0; k < static_cast<long long>(runs); ++k) {
    auto& e = entries[static_cast<std::size_t>(k)];
    TrainConfig cfg = base;
    cfg.lambda = lambdas[static_cast<std::size_t>(k) / seeds.size()];
    cfg.seed = seeds[static_cast<std::size_t>(k) % seeds.size()];
    e.method = cfg.method;
    e.lambda = cfg.lambda;
    e.gamma = cfg.gamma;
    e.seed = cfg.seed;
    try {
      auto result = train_model(splits.train, splits.valid, cfg, custom);
      e.final_train_zdr = result.history.back().penalty;
      e.reports[0] = metrics::evaluate_model(result.model, splits.train, eval);
      e.reports[1] = metrics::evaluate_model(result.model, splits.valid, eval);
      e.reports[2] = metrics::evaluate_model(result.model, splits.test, eval);
      e.checkpoint = {splits.train.d(), splits.train.q(),
                      {result.model, result.discriminator, result.weights}};
    } catch (const std::exception& ex) {
      e.failed = true;
      e.error = ex.what();
    }
  }
  return entries;
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string metrics_row(Method method, double lambda, double gamma, std::uint64_t seed,
                        SplitName split, const metrics::MetricsReport& r) {
  const auto mp = [&](int l) { auto it = r.mp.find(l); return it == r.mp.end() ? 0.0 : it->second; };
  std::ostringstream out;
  out << to_string(method) << ',' << fmt(lambda) << ',' << fmt(gamma) << ',' << seed << ','
      << to_string(split) << ',' << fmt(r.acc) << ',' << fmt(r.sp) << ',' << fmt(mp(1)) << ','
      << fmt(mp(2)) << ',' << fmt(r.wmp) << ',' << fmt(r.zdr) << ',' << fmt(r.supipm);
  return out.str();
}

std::string metrics_csv(std::span<const SweepEntry> entries) {
  std::string out = std::string(kMetricsHeader) + "\n";
  const SplitName names[] = {SplitName::train, SplitName::valid, SplitName::test};
  for (const auto& e : entries) {
    for (int s = 0; s < 3; ++s) {
      metrics::MetricsReport r = e.reports[s];
      if (e.failed) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r = {nan, nan, {{1, nan}, {2, nan}}, nan, nan, nan, 0};
      }
      out += metrics_row(e.method, e.lambda, e.gamma, e.seed, names[s], r) + "\n";
    }
  }
  return out;
}

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw DataError("metrics CSV header must be '" + std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::vector<std::string> f;
    std::string field;
    while (std::getline(fields, field, ',')) f.push_back(field);
    if (f.size() != 12) throw DataError("metrics CSV row has " + std::to_string(f.size()) + " fields");
    try {
      MetricsRow r;
      r.method = f[0];
      r.lambda = std::stod(f[1]);
      r.gamma = std::stod(f[2]);
      r.seed = std::stoull(f[3]);
      r.split = f[4];
      double* vals[] = {&r.acc, &r.sp, &r.mp1, &r.mp2, &r.wmp, &r.zdr, &r.supipm};
      for (int k = 0; k < 7; ++k) *vals[k] = std::stod(f[5 + k]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw DataError("malformed metrics CSV row: " + line);
    }
  }
  return rows;
}

double front_area(std::span<const metrics::ParetoPoint> points) {
  const auto front = metrics::pareto_front(points);
  if (front.size() < 2) return 0.0;
  const double range = front.back().fairness - front.front().fairness;
  if (!(range > 0.0)) return 0.0;
  double area = 0.0;
  for (std::size_t k = 1; k < front.size(); ++k) {
    area += 0.5 * (front[k].acc + front[k - 1].acc) * (front[k].fairness - front[k - 1].fairness);
  }
  return area / range;
}

double select_gamma(const std::map<double, std::vector<metrics::ParetoPoint>>& sweeps) {
  if (sweeps.empty()) throw std::invalid_argument("select_gamma needs at least one gamma");
  double best_gamma = sweeps.begin()->first;
  double best_area = -std::numeric_limits<double>::infinity();
  for (const auto& [gamma, points] : sweeps) {  // ascending gamma: strict > keeps the smaller on ties
    if (points.size() < 2) throw std::invalid_argument("each gamma needs at least two points");
    const double area = front_area(points);
    if (area > best_area) {
      best_area = area;
      best_gamma = gamma;
    }
  }
  return best_gamma;
}

}  // namespace draf::train
