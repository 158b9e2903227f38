#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "draf/oracle.hpp"

namespace draf::oracle {
namespace {

// |DR^2(v)| through the quadratic-form identity DR^2 = 2 v'p / v'Sv with
// p = Ctilde' g and S = Ctilde' Ctilde (Ctilde: column-centred C).
struct QuadraticForm {
  std::vector<double> p;
  const std::vector<double>* s = nullptr;
  std::size_t m = 0;

  double value(const std::vector<double>& v, double* num, double* den,
               std::vector<double>* sv) const {
    double vp = 0.0, vsv = 0.0;
    sv->assign(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      vp += v[a] * p[a];
      for (std::size_t b = 0; b < m; ++b) (*sv)[a] += (*s)[a * m + b] * v[b];
    }
    for (std::size_t a = 0; a < m; ++a) vsv += v[a] * (*sv)[a];
    *num = vp;
    *den = vsv;
    return vsv < 1e-12 ? 0.0 : 2.0 * vp / vsv;
  }
};

// Normalised-gradient ascent of |DR^2| on the sphere; returns the best value
// seen, including the start.
double sphere_ascent(const QuadraticForm& qf, std::vector<double> v, std::size_t steps,
                     double lr) {
  std::vector<double> sv;
  double num = 0.0, den = 0.0;
  double best = std::abs(qf.value(v, &num, &den, &sv));
  for (std::size_t step = 0; step < steps; ++step) {
    if (den < 1e-12) break;
    const double val = 2.0 * num / den;
    const double sign = val >= 0 ? 1.0 : -1.0;
    std::vector<double> grad(qf.m);
    double norm = 0.0;
    for (std::size_t a = 0; a < qf.m; ++a) {
      grad[a] = sign * (2.0 * qf.p[a] / den - 4.0 * num * sv[a] / (den * den));
      norm += grad[a] * grad[a];
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) break;
    double vn = 0.0;
    for (std::size_t a = 0; a < qf.m; ++a) {
      v[a] += lr * grad[a] / norm;
      vn += v[a] * v[a];
    }
    vn = std::sqrt(vn);
    for (double& x : v) x /= vn;
    best = std::max(best, std::abs(qf.value(v, &num, &den, &sv)));
  }
  return best;
}

}  // namespace

BoundCheck verify_ipm_bound(std::span<const double> scores, const subsets::MembershipMatrix& c,
                            const fairness::Grid& grid, double corruption) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (scores.size() != n) throw std::invalid_argument("scores length != n");
  BoundCheck out;
  out.report.name = "ipm_bound";
  out.report.tolerance = 1e-9;

  std::vector<double> centred(n * m);
  std::vector<double> n_pos(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      if (c(i, k) > 0) n_pos[k] += 1.0;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double mean = (2.0 * n_pos[k] - static_cast<double>(n)) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) centred[i * m + k] = c(i, k) - mean;
  }
  std::vector<double> s(m * m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) s[a * m + b] += centred[i * m + a] * centred[i * m + b];
    }
  }

  const std::size_t points = grid.size();
  double identity_err = 0.0, ascent_err = 0.0, vertex_floor = 0.0, ascent_floor = 0.0;
#pragma omp parallel for schedule(dynamic, 16) \
    reduction(max : identity_err, ascent_err, vertex_floor, ascent_floor)
  for (std::size_t k = 0; k < points; ++k) {
    const auto disc = grid.at(k);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = 1.0 / (1.0 + std::exp(-(disc.scale * scores[i] + disc.offset)));
    }
    // Direct group-mean gaps.
    double brute = 0.0;
    for (std::size_t col = 0; col < m; ++col) {
      double pos = 0.0, neg = 0.0;
      for (std::size_t i = 0; i < n; ++i) (c(i, col) > 0 ? pos : neg) += g[i];
      const double gap = pos / n_pos[col] - neg / (static_cast<double>(n) - n_pos[col]);
      brute = std::max(brute, std::abs(gap));
    }
    // Main-path DR^2 at every vertex.
    double vertex = 0.0;
    std::size_t arg = 0;
    std::vector<double> e(m, 0.0);
    for (std::size_t col = 0; col < m; ++col) {
      e[col] = 1.0;
      const double dr = std::abs(fairness::dr_squared(c, e, g));
      e[col] = 0.0;
      if (dr > vertex) {
        vertex = dr;
        arg = col;
      }
    }
    if (k == points - 1) vertex += corruption;
    identity_err = std::max(identity_err, std::abs(brute - vertex));

    QuadraticForm qf;
    qf.m = m;
    qf.s = &s;
    qf.p.assign(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t col = 0; col < m; ++col) qf.p[col] += centred[i * m + col] * g[i];
    }
    e[arg] = 1.0;
    const double ascent = sphere_ascent(qf, e, 25, 0.1);
    ascent_err = std::max(ascent_err, vertex - ascent);
    vertex_floor = std::max(vertex_floor, vertex);
    ascent_floor = std::max(ascent_floor, ascent);
  }

  out.sup_ipm_grid = fairness::sup_ipm_grid(scores, c, grid);
  out.vertex_floor = vertex_floor;
  out.ascent_floor = ascent_floor;
  out.report.instances = points;
  out.report.max_abs_err =
      std::max({identity_err, ascent_err, out.sup_ipm_grid - vertex_floor, 0.0});
  char buf[160];
  std::snprintf(buf, sizeof buf, "supIPM %.6g <= vertex floor %.6g <= ascent %.6g",
                out.sup_ipm_grid, vertex_floor, ascent_floor);
  out.report.detail = buf;
  finalize(out.report);
  return out;
}

}  // namespace draf::oracle
