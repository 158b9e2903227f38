#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "draf/oracle.hpp"
#include "draf/rng.hpp"

namespace draf::oracle {
namespace {

FdInstance draw_instance(std::size_t n, std::size_t d, std::size_t q, std::size_t hidden,
                         Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(n * d);
  for (double& v : x) v = gauss(rng);
  std::vector<std::uint8_t> s(n * q), y(n);
  for (auto& v : s) v = coin(rng);
  for (auto& v : y) v = coin(rng);

  FdInstance inst;
  inst.ds = data::Dataset(std::move(x), std::move(s), std::move(y), d, q);

  // Columns: each attribute as a marginal plus two random subsets, all with
  // both signs present.
  const std::size_t m = q + 2;
  std::vector<std::int8_t> entries(n * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (;;) {
      std::size_t pos = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool in = k < q ? inst.ds.key(i).has(k) : coin(rng);
        entries[i * m + k] = in ? 1 : -1;
        pos += in;
      }
      if (pos > 0 && pos < n) break;
      if (k < q) {  // constant attribute: fall back to a random subset
        for (std::size_t i = 0; i < n; ++i) entries[i * m + k] = (i % 2) ? 1 : -1;
        break;
      }
    }
  }
  inst.c = subsets::MembershipMatrix(std::move(entries), n, m);

  inst.f = model::PredictionModel(d + q, hidden);
  std::normal_distribution<double> weight(0.0, 0.5);
  for (double& w : inst.f.theta()) w = weight(rng);
  std::uniform_real_distribution<double> scale(0.5, 3.0), offset(-1.0, 1.0);
  inst.g = {scale(rng), offset(rng)};
  std::vector<double> v(m);
  for (double& w : v) w = gauss(rng);
  inst.v = model::project_sphere(v);
  return inst;
}

// Distance of every ReLU pre-activation from zero.
double min_preactivation(const FdInstance& inst) {
  const auto& f = inst.f;
  double best = INFINITY;
  for (std::size_t i = 0; i < inst.ds.n(); ++i) {
    const auto x = inst.ds.features(i);
    const auto s = inst.ds.sensitive(i);
    for (std::size_t u = 0; u < f.hidden(); ++u) {
      double a = f.b1(u);
      for (std::size_t j = 0; j < x.size(); ++j) a += f.w1(u, j) * x[j];
      for (std::size_t j = 0; j < s.size(); ++j) a += f.w1(u, x.size() + j) * s[j];
      best = std::min(best, std::abs(a));
    }
  }
  return best;
}

}  // namespace

FdInstance make_fd_instance(std::size_t n, std::size_t d, std::size_t q, std::size_t hidden,
                            std::uint64_t seed) {
  auto rng = make_rng(seed, 77);
  for (;;) {
    auto inst = draw_instance(n, d, q, hidden, rng);
    if (min_preactivation(inst) < 1e-3) continue;
    const model::Objective dr{model::ObjectiveKind::dr_squared, 0.0, 1e-6};
    const double value = model::objective_value(inst.f, inst.g, inst.v, inst.ds, inst.c, dr);
    if (std::abs(value) < 1e-8 || std::abs(value) > 1.9) continue;
    return inst;
  }
}

OracleReport finite_diff_check(const model::Objective& objective, const FdInstance& instance,
                               double step, double corruption) {
  OracleReport report;
  const char* names[] = {"fd_ce", "fd_dr2", "fd_zdr2", "fd_combined"};
  report.name = names[static_cast<int>(objective.kind)];
  report.tolerance = 1e-4;

  auto analytic = model::backward(instance.f, instance.g, instance.v, instance.ds, instance.c,
                                   objective);
  if (!analytic.d_theta.empty()) analytic.d_theta[0] += corruption;

  auto f = instance.f;
  auto g = instance.g;
  auto v = instance.v;
  const auto eval = [&] {
    return model::objective_value(f, g, v, instance.ds, instance.c, objective);
  };
  const auto central = [&](double& slot) {
    const double keep = slot;
    slot = keep + step;
    const double up = eval();
    slot = keep - step;
    const double down = eval();
    slot = keep;
    return (up - down) / (2.0 * step);
  };
  const auto compare = [&](double a, double numeric) {
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-3});
    report.max_abs_err = std::max(report.max_abs_err, err);
    ++report.instances;
  };

  auto theta = f.theta();
  const std::size_t n_theta = analytic.d_theta.empty() ? 0 : theta.size();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    compare(k < n_theta ? analytic.d_theta[k] : 0.0, central(theta[k]));
  }
  compare(analytic.d_scale, central(g.scale));
  compare(analytic.d_offset, central(g.offset));
  for (std::size_t k = 0; k < v.v.size(); ++k) {
    compare(k < analytic.d_v.size() ? analytic.d_v[k] : 0.0, central(v.v[k]));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu coordinates, step %.0e", report.instances, step);
  report.detail = buf;
  finalize(report);
  return report;
}

}  // namespace draf::oracle
