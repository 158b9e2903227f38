#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "draf/oracle.hpp"
#include "draf/rng.hpp"

namespace draf::oracle {
namespace {

// Mean of g where y = +1 minus mean where y = -1, by plain accumulation.
double direct_gap(const std::vector<double>& y, const std::vector<double>& g) {
  double pos = 0.0, neg = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0) {
      pos += g[i];
      ++n_pos;
    } else {
      neg += g[i];
      ++n_neg;
    }
  }
  return pos / static_cast<double>(n_pos) - neg / static_cast<double>(n_neg);
}

struct Instance {
  std::vector<std::vector<double>> columns;
  std::vector<double> g;
};

Instance hand_fixture() {
  return {{{1.0, 1.0, -1.0, -1.0}}, {0.8, 0.6, 0.2, 0.4}};
}

bool has_both_signs(const std::vector<double>& y) {
  const bool pos = std::any_of(y.begin(), y.end(), [](double x) { return x > 0; });
  const bool neg = std::any_of(y.begin(), y.end(), [](double x) { return x < 0; });
  return pos && neg;
}

// Single-sign columns are redrawn, so every instance is checkable.
Instance random_instance(std::uint64_t seed, std::size_t trial) {
  auto rng = make_rng(seed, 1000 + trial);
  std::uniform_int_distribution<std::size_t> n_dist(2, 64);
  std::uniform_int_distribution<std::size_t> m_dist(1, 6);
  std::uniform_real_distribution<double> g_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> p_dist(0.05, 0.95);
  const std::size_t n = n_dist(rng);
  const std::size_t m = m_dist(rng);
  Instance inst;
  inst.g.resize(n);
  for (double& x : inst.g) x = g_dist(rng);
  for (std::size_t k = 0; k < m; ++k) {
    std::bernoulli_distribution coin(p_dist(rng));
    std::vector<double> y(n);
    do {
      for (double& x : y) x = coin(rng) ? 1.0 : -1.0;
    } while (!has_both_signs(y));
    inst.columns.push_back(std::move(y));
  }
  return inst;
}

}  // namespace

OracleReport verify_identity_suite(std::size_t trials, std::uint64_t seed, double corruption) {
  OracleReport report;
  report.name = "identities";
  report.tolerance = 1e-10;
  if (trials == 0) {
    report.detail = "no trials";
    finalize(report);
    return report;
  }

  std::vector<double> errors(trials, 0.0);
  std::vector<std::size_t> checked(trials, 0), skipped(trials, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t t = 0; t < trials; ++t) {
    const Instance inst = t == 0 ? hand_fixture() : random_instance(seed, t);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < inst.columns.size(); ++k) {
      if (has_both_signs(inst.columns[k])) keep.push_back(k);
    }
    if (keep.empty()) {
      skipped[t] = 1;
      continue;
    }
    const std::size_t n = inst.g.size();
    const std::size_t m = keep.size();
    std::vector<std::int8_t> entries(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        entries[i * m + k] = static_cast<std::int8_t>(inst.columns[keep[k]][i]);
      }
    }
    const subsets::MembershipMatrix c(std::move(entries), n, m);
    double err = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto& y = inst.columns[keep[k]];
      double gap = direct_gap(y, inst.g);
      if (t == trials - 1 && k == 0) gap += corruption;
      const double rt = fairness::r_tilde_squared(y, inst.g);
      std::vector<double> e(m, 0.0);
      e[k] = 1.0;
      const double dr = fairness::dr_squared(c, e, inst.g);
      err = std::max({err, std::abs(rt - gap), std::abs(dr - gap)});
    }
    errors[t] = err;
    checked[t] = 1;
  }

  for (std::size_t t = 0; t < trials; ++t) {
    report.max_abs_err = std::max(report.max_abs_err, errors[t]);
    report.instances += checked[t];
    report.skipped += skipped[t];
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "hand fixture error %.3g", errors[0]);
  report.detail = buf;
  finalize(report);
  return report;
}

}  // namespace draf::oracle
