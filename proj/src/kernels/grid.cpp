#include <algorithm>
#include <cmath>
#include <map>

#include "draf/kernels.hpp"

namespace draf::kernels {
namespace {

inline double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double sup_ipm_grid_serial(std::span<const double> scores, const subsets::MembershipMatrix& c,
                           const GridSpec& grid) {
  const std::size_t n = c.rows();
  const std::size_t m_count = c.cols();
  double best = 0.0;
  std::vector<double> gvals(n);
  for (std::size_t k = 0; k < grid.scales.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) gvals[i] = logistic(grid.scales[k] * scores[i] + grid.offsets[k]);
    for (std::size_t m = 0; m < m_count; ++m) {
      double in_sum = 0.0;
      double out_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (c(i, m) > 0) in_sum += gvals[i]; else out_sum += gvals[i];
      }
      const double n_in = static_cast<double>(c.positives(m));
      const double gap = in_sum / n_in - out_sum / (static_cast<double>(n) - n_in);
      best = std::max(best, std::abs(gap));
    }
  }
  return best;
}

double sup_ipm_grid_omp(std::span<const double> scores, const subsets::MembershipMatrix& c,
                        const GridSpec& grid) {
  const std::size_t n = c.rows();
  const std::size_t m_count = c.cols();

  // Distinct membership rows; gaps only need per-pattern sums of g.
  std::map<std::vector<std::int8_t>, std::size_t> index;
  std::vector<std::size_t> row_pattern(n);
  std::vector<std::int8_t> patterns;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::int8_t> key(c.row(i).begin(), c.row(i).end());
    auto [it, inserted] = index.emplace(std::move(key), index.size());
    if (inserted) patterns.insert(patterns.end(), c.row(i).begin(), c.row(i).end());
    row_pattern[i] = it->second;
  }
  const std::size_t k_count = index.size();
  std::vector<double> inv_in(m_count);
  std::vector<double> inv_out(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    inv_in[m] = 1.0 / static_cast<double>(c.positives(m));
    inv_out[m] = 1.0 / static_cast<double>(n - c.positives(m));
  }

  const auto points = static_cast<long long>(grid.scales.size());
  double best = 0.0;
#pragma omp parallel reduction(max : best)
  {
    std::vector<double> pattern_sum(k_count);
#pragma omp for schedule(static)
    for (long long k = 0; k < points; ++k) {
      std::fill(pattern_sum.begin(), pattern_sum.end(), 0.0);
      double total = 0.0;
      const double a = grid.scales[k];
      const double b = grid.offsets[k];
      for (std::size_t i = 0; i < n; ++i) {
        const double g = logistic(a * scores[i] + b);
        pattern_sum[row_pattern[i]] += g;
        total += g;
      }
      for (std::size_t m = 0; m < m_count; ++m) {
        double in_sum = 0.0;
        for (std::size_t p = 0; p < k_count; ++p) {
          if (patterns[p * m_count + m] > 0) in_sum += pattern_sum[p];
        }
        const double gap = in_sum * inv_in[m] - (total - in_sum) * inv_out[m];
        best = std::max(best, std::abs(gap));
      }
    }
  }
  return best;
}

}  // namespace draf::kernels
