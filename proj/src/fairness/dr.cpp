#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "draf/fairness.hpp"

namespace draf::fairness {
namespace {

std::vector<double> projected_targets(const subsets::MembershipMatrix& c, std::span<const double> v,
                                      double& mu) {
  if (v.size() != c.cols()) throw std::invalid_argument("weight vector length != M");
  std::vector<double> t(c.rows());
  double sum = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto row = c.row(i);
    double acc = 0.0;
    for (std::size_t m = 0; m < v.size(); ++m) acc += v[m] * row[m];
    t[i] = acc;
    sum += acc;
  }
  mu = sum / static_cast<double>(c.rows());
  return t;
}

}  // namespace

double dr_squared(const subsets::MembershipMatrix& c, std::span<const double> v,
                  std::span<const double> g) {
  if (g.size() != c.rows()) throw std::invalid_argument("discriminator outputs length != n");
  double mu = 0.0;
  const auto t = projected_targets(c, v, mu);
  double resid = 0.0;
  double spread = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    resid += (t[i] - g[i]) * (t[i] - g[i]);
    spread += (g[i] - mu) * (g[i] - mu);
    denom += (t[i] - mu) * (t[i] - mu);
  }
  if (denom < kDegenerateVariance) return 0.0;
  return 1.0 - (resid - spread) / denom;
}

// The numerator reduces to sum (t - mu)^2 - 2 sum (t - mu) g, so
// DR^2 = 2 <t - mu, g> / |t - mu|^2; gradients are taken from that form.
DrSquaredGrad dr_squared_grad(const subsets::MembershipMatrix& c, std::span<const double> v,
                              std::span<const double> g) {
  if (g.size() != c.rows()) throw std::invalid_argument("discriminator outputs length != n");
  const std::size_t n = c.rows();
  double mu = 0.0;
  const auto t = projected_targets(c, v, mu);
  double denom = 0.0;
  double cross = 0.0;
  double g_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    denom += (t[i] - mu) * (t[i] - mu);
    cross += (t[i] - mu) * g[i];
    g_mean += g[i];
  }
  g_mean /= static_cast<double>(n);

  DrSquaredGrad out;
  out.d_g.assign(n, 0.0);
  out.d_v.assign(v.size(), 0.0);
  if (denom < kDegenerateVariance) {
    out.degenerate = true;
    return out;
  }
  out.value = dr_squared(c, v, g);
  for (std::size_t i = 0; i < n; ++i) {
    out.d_g[i] = 2.0 * (t[i] - mu) / denom;
    const double d_t = 2.0 * (g[i] - g_mean) / denom - 4.0 * cross * (t[i] - mu) / (denom * denom);
    auto row = c.row(i);
    for (std::size_t m = 0; m < v.size(); ++m) out.d_v[m] += d_t * row[m];
  }
  return out;
}

double z_dr_squared(double dr2, double eps) {
  const double t = std::min(std::abs(dr2) / 2.0, 1.0 - eps);
  return std::log1p(t) - std::log1p(-t);
}

double z_dr_derivative(double dr2, double eps) {
  const double half = std::abs(dr2) / 2.0;
  if (dr2 == 0.0 || half >= 1.0 - eps) return 0.0;
  const double sign = dr2 > 0 ? 1.0 : -1.0;
  return sign / (1.0 - half * half);
}

ZDrGrad z_dr_grad(std::span<const double> scores, const subsets::MembershipMatrix& c,
                  const model::Discriminator& g, std::span<const double> v, double eps) {
  const auto gvals = model::discriminate(g, scores);
  const auto dr = dr_squared_grad(c, v, gvals);
  ZDrGrad out;
  out.dr2 = dr.value;
  out.z = z_dr_squared(dr.value, eps);
  out.d_scores.assign(scores.size(), 0.0);
  out.d_v.assign(v.size(), 0.0);
  const double outer = z_dr_derivative(dr.value, eps);
  if (dr.degenerate || outer == 0.0) return out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double dpre = outer * dr.d_g[i] * gvals[i] * (1.0 - gvals[i]);
    out.d_scale += dpre * scores[i];
    out.d_offset += dpre;
    out.d_scores[i] = dpre * g.scale;
  }
  for (std::size_t m = 0; m < v.size(); ++m) out.d_v[m] = outer * dr.d_v[m];
  return out;
}

std::vector<std::uint8_t> independent_columns(const subsets::MembershipMatrix& c,
                                              double tolerance) {
  const std::size_t n = c.rows();
  const std::size_t m_count = c.cols();
  const auto& means = c.column_means();
  // Orthonormal basis of the kept centred columns (modified Gram-Schmidt).
  std::vector<std::vector<double>> basis;
  std::vector<std::uint8_t> keep(m_count, 0);
  std::vector<double> col(n);
  for (std::size_t m = 0; m < m_count; ++m) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = c(i, m) - means[m];
      norm2 += col[i] * col[i];
    }
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += b[i] * col[i];
      for (std::size_t i = 0; i < n; ++i) col[i] -= dot * b[i];
    }
    double resid2 = 0.0;
    for (double x : col) resid2 += x * x;
    if (resid2 <= tolerance * norm2) continue;
    const double inv = 1.0 / std::sqrt(resid2);
    for (double& x : col) x *= inv;
    basis.push_back(col);
    keep[m] = 1;
  }
  return keep;
}

model::WeightVector uniform_active(std::span<const std::uint8_t> active) {
  std::vector<double> v(active.size());
  for (std::size_t m = 0; m < v.size(); ++m) v[m] = active[m] ? 1.0 : 0.0;
  return model::project_sphere(v);
}

void ascent_step(std::span<const double> scores, const subsets::MembershipMatrix& c,
                 model::Discriminator& g, model::WeightVector& v, double lr_g, double lr_v,
                 double eps, std::span<const std::uint8_t> active) {
  const auto grad = z_dr_grad(scores, c, g, v.v, eps);
  g.scale += lr_g * grad.d_scale;
  g.offset += lr_g * grad.d_offset;
  std::vector<double> moved(v.v);
  for (std::size_t m = 0; m < moved.size(); ++m) {
    moved[m] += lr_v * grad.d_v[m];
    if (!active.empty() && !active[m]) moved[m] = 0.0;
  }
  double norm2 = 0.0;
  for (double x : moved) norm2 += x * x;
  if (!active.empty() && !(std::sqrt(norm2) > 1e-12)) {
    v = uniform_active(active);
    return;
  }
  v = model::project_sphere(moved);
}

std::vector<double> per_subset_rtilde(std::span<const double> gvals,
                                      const subsets::MembershipMatrix& c) {
  std::vector<double> out(c.cols());
  for (std::size_t m = 0; m < c.cols(); ++m) out[m] = r_tilde_squared(c.column(m), gvals);
  return out;
}

}  // namespace draf::fairness
