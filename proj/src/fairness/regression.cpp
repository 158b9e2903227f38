#include <stdexcept>

#include "draf/fairness.hpp"

namespace draf::fairness {
namespace {

struct Moments {
  double mean = 0.0;
  double total_ss = 0.0;  // sum (y - ybar)^2
};

Moments indicator_moments(std::span<const double> y, std::span<const double> g) {
  if (y.size() != g.size()) throw std::invalid_argument("indicator/discriminator length mismatch");
  bool pos = false;
  bool neg = false;
  double sum = 0.0;
  for (double yi : y) {
    if (yi > 0) pos = true; else neg = true;
    sum += yi;
  }
  if (!pos || !neg) throw std::invalid_argument("degenerate subset: indicator has a single sign");
  Moments m;
  m.mean = sum / static_cast<double>(y.size());
  for (double yi : y) m.total_ss += (yi - m.mean) * (yi - m.mean);
  return m;
}

}  // namespace

double r_squared(std::span<const double> y, std::span<const double> g) {
  const auto m = indicator_moments(y, g);
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - g[i]) * (y[i] - g[i]);
  return 1.0 - rss / m.total_ss;
}

double r_tilde_squared(std::span<const double> y, std::span<const double> g) {
  const auto m = indicator_moments(y, g);
  double extra = 0.0;
  for (double gi : g) extra += (gi - m.mean) * (gi - m.mean);
  return r_squared(y, g) + extra / m.total_ss;
}

double group_mean_gap(std::span<const double> y, std::span<const double> g) {
  indicator_moments(y, g);
  double in_sum = 0.0;
  double out_sum = 0.0;
  std::size_t in_n = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0) {
      in_sum += g[i];
      ++in_n;
    } else {
      out_sum += g[i];
    }
  }
  return in_sum / static_cast<double>(in_n) - out_sum / static_cast<double>(y.size() - in_n);
}

}  // namespace draf::fairness
