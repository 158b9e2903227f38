#include <cmath>
#include <string>

#include "draf/error.hpp"
#include "draf/fairness.hpp"
#include "draf/losses.hpp"
#include "draf/model.hpp"

namespace draf::model {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite ") + what);
  }
}

}  // namespace

double objective_value(const PredictionModel& f, const Discriminator& g, const WeightVector& v,
                       const data::Dataset& ds, const subsets::MembershipMatrix& c,
                       const Objective& objective) {
  const auto pass = forward(f, ds);
  const auto ce = [&] { return train::cross_entropy(pass.scores, ds.labels()); };
  const auto dr2 = [&] { return fairness::dr_squared(c, v.v, discriminate(g, pass.scores)); };
  switch (objective.kind) {
    case ObjectiveKind::classification: return ce();
    case ObjectiveKind::dr_squared: return dr2();
    case ObjectiveKind::z_dr: return fairness::z_dr_squared(dr2(), objective.clamp_eps);
    case ObjectiveKind::combined:
      return ce() + objective.lambda * fairness::z_dr_squared(dr2(), objective.clamp_eps);
  }
  return 0.0;
}

GradientBundle backward(const PredictionModel& f, const Discriminator& g, const WeightVector& v,
                        const data::Dataset& ds, const subsets::MembershipMatrix& c,
                        const Objective& objective) {
  require_finite(f.theta(), "model parameter");
  require_finite(v.v, "weight vector");
  if (!std::isfinite(g.scale) || !std::isfinite(g.offset)) {
    throw NumericalError("non-finite discriminator parameter");
  }
  const auto pass = forward(f, ds);
  require_finite(pass.logits, "logit");
  const std::size_t n = ds.n();

  GradientBundle out;
  out.d_v.assign(v.size(), 0.0);
  std::vector<double> d_logits(n, 0.0);

  if (objective.kind == ObjectiveKind::classification ||
      objective.kind == ObjectiveKind::combined) {
    d_logits = train::cross_entropy_logit_grad(pass.scores, ds.labels());
  }

  if (objective.kind != ObjectiveKind::classification) {
    const auto gvals = discriminate(g, pass.scores);
    const auto dr = fairness::dr_squared_grad(c, v.v, gvals);
    double outer = 1.0;  // d objective / d DR^2
    if (objective.kind == ObjectiveKind::z_dr) {
      outer = fairness::z_dr_derivative(dr.value, objective.clamp_eps);
    } else if (objective.kind == ObjectiveKind::combined) {
      outer = objective.lambda * fairness::z_dr_derivative(dr.value, objective.clamp_eps);
    }
    if (outer != 0.0 && !dr.degenerate) {
      for (std::size_t i = 0; i < n; ++i) {
        const double gi = gvals[i];
        const double dpre = outer * dr.d_g[i] * gi * (1.0 - gi);  // d/d(a f_i + b)
        out.d_scale += dpre * pass.scores[i];
        out.d_offset += dpre;
        const double p = pass.scores[i];
        d_logits[i] += dpre * g.scale * p * (1.0 - p);
      }
      for (std::size_t m = 0; m < v.size(); ++m) out.d_v[m] = outer * dr.d_v[m];
    }
  }

  out.d_theta = backprop_logits(f, ds, pass, d_logits);
  require_finite(out.d_theta, "theta gradient");
  require_finite(out.d_v, "weight gradient");
  if (!std::isfinite(out.d_scale) || !std::isfinite(out.d_offset)) {
    throw NumericalError("non-finite discriminator gradient");
  }
  return out;
}

}  // namespace draf::model
