#include "draf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "draf/error.hpp"

namespace draf::metrics {
namespace {

std::vector<std::uint8_t> predictions(std::span<const double> scores) {
  std::vector<std::uint8_t> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] >= kThreshold ? 1 : 0;
  return out;
}

void check_lengths(std::span<const double> scores, const data::Dataset& ds) {
  if (scores.size() != ds.n()) throw std::invalid_argument("scores length != dataset size");
}

double overall_rate(std::span<const std::uint8_t> pred) {
  double pos = 0.0;
  for (auto p : pred) pos += p;
  return pos / static_cast<double>(pred.size());
}

}  // namespace

double accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.empty()) throw std::invalid_argument("accuracy of an empty sample");
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    hits += (scores[i] >= kThreshold ? 1 : 0) == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

std::map<data::SubgroupKey, PositiveRate> positive_rate_table(std::span<const double> scores,
                                                              const data::Dataset& ds) {
  check_lengths(scores, ds);
  std::map<data::SubgroupKey, std::pair<std::size_t, std::size_t>> tally;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    auto& [count, pos] = tally[ds.key(i)];
    ++count;
    pos += scores[i] >= kThreshold;
  }
  std::map<data::SubgroupKey, PositiveRate> out;
  for (const auto& [key, cp] : tally) {
    out[key] = {cp.first, static_cast<double>(cp.second) / static_cast<double>(cp.first)};
  }
  return out;
}

double sp(std::span<const double> scores, const data::Dataset& ds) {
  check_lengths(scores, ds);
  const double p = overall_rate(predictions(scores));
  const double n = static_cast<double>(ds.n());
  double worst = 0.0;
  for (const auto& [key, pr] : positive_rate_table(scores, ds)) {
    worst = std::max(worst, static_cast<double>(pr.count) / n * std::abs(pr.rate - p));
  }
  return worst;
}

double mp_l(std::span<const double> scores, const data::Dataset& ds, int l) {
  check_lengths(scores, ds);
  const int q = static_cast<int>(ds.q());
  if (l < 1 || l > q) {
    throw std::invalid_argument("marginal order l=" + std::to_string(l) + " outside [1, q]");
  }
  const auto pred = predictions(scores);
  const double p = overall_rate(pred);
  const double n = static_cast<double>(ds.n());

  // Enumerate attribute subsets of size l as increasing index tuples.
  std::vector<int> attrs(l);
  for (int k = 0; k < l; ++k) attrs[k] = k;
  const std::size_t cells = std::size_t{1} << l;
  std::vector<std::size_t> count(cells);
  std::vector<std::size_t> pos(cells);
  double worst = 0.0;
  while (true) {
    std::fill(count.begin(), count.end(), 0);
    std::fill(pos.begin(), pos.end(), 0);
    for (std::size_t i = 0; i < ds.n(); ++i) {
      std::size_t cell = 0;
      for (int k = 0; k < l; ++k) cell |= std::size_t{ds.key(i).has(attrs[k])} << k;
      ++count[cell];
      pos[cell] += pred[i];
    }
    double total = 0.0;
    for (std::size_t a = 0; a < cells; ++a) {
      if (count[a] == 0) continue;
      const double rate = static_cast<double>(pos[a]) / static_cast<double>(count[a]);
      total += static_cast<double>(count[a]) / n * std::abs(rate - p);
    }
    worst = std::max(worst, total);

    int k = l - 1;
    while (k >= 0 && attrs[k] == q - l + k) --k;
    if (k < 0) break;
    ++attrs[k];
    for (int r = k + 1; r < l; ++r) attrs[r] = attrs[r - 1] + 1;
  }
  return worst;
}

double wmp(std::span<const double> scores, const data::Dataset& ds) {
  check_lengths(scores, ds);
  const double n = static_cast<double>(ds.n());
  double worst = 0.0;
  std::vector<double> side;
  for (std::size_t j = 0; j < ds.q(); ++j) {
    for (int a = 0; a < 2; ++a) {
      side.clear();
      for (std::size_t i = 0; i < ds.n(); ++i) {
        if (ds.key(i).has(j) == static_cast<bool>(a)) side.push_back(scores[i]);
      }
      if (side.empty()) continue;
      const double w = static_cast<double>(side.size()) / n * fairness::wasserstein_1d(side, scores);
      worst = std::max(worst, w);
    }
  }
  return worst;
}

std::vector<ParetoPoint> pareto_front(std::span<const ParetoPoint> points) {
  std::vector<ParetoPoint> out;
  for (const auto& p : points) {
    const bool dominated = std::any_of(points.begin(), points.end(), [&](const ParetoPoint& o) {
      return (o.fairness < p.fairness && o.acc >= p.acc) ||
             (o.fairness == p.fairness && o.acc > p.acc);
    });
    if (!dominated) out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& l, const auto& r) { return l.fairness < r.fairness; });
  return out;
}

MetricsReport evaluate_scores(std::span<const double> scores, const data::Dataset& ds,
                              const EvalOptions& options) {
  check_lengths(scores, ds);
  MetricsReport r;
  r.n_eval = ds.n();
  r.acc = accuracy(scores, ds.labels());
  r.sp = sp(scores, ds);
  r.mp[1] = mp_l(scores, ds, 1);
  r.mp[2] = ds.q() >= 2 ? mp_l(scores, ds, 2) : 0.0;
  r.wmp = wmp(scores, ds);
  try {
    const auto coll = subsets::build_collection(ds, options.collection);
    const auto c = subsets::membership(ds, coll);
    r.zdr = fairness::dr_gap(scores, c, options.gap).value;
    r.supipm = fairness::sup_ipm_grid(scores, c, options.grid);
  } catch (const DataError&) {
    r.zdr = 0.0;
    r.supipm = 0.0;
  }
  return r;
}

MetricsReport evaluate_model(const model::PredictionModel& f, const data::Dataset& ds,
                             const EvalOptions& options) {
  return evaluate_scores(model::predict_scores(f, ds), ds, options);
}

}  // namespace draf::metrics
