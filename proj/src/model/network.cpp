#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "draf/kernels.hpp"
#include "draf/model.hpp"
#include "draf/rng.hpp"

namespace draf::model {

PredictionModel::PredictionModel(std::size_t input_dim, std::size_t hidden)
    : input_dim_(input_dim), hidden_(hidden), theta_(hidden * (input_dim + 2) + 1, 0.0) {
  if (input_dim == 0 || hidden == 0) {
    throw std::invalid_argument("model needs input_dim >= 1 and hidden >= 1");
  }
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Discriminator::operator()(double z) const { return sigmoid(scale * z + offset); }

namespace {

std::vector<double> stacked_inputs(const PredictionModel& f, const data::Dataset& ds) {
  if (ds.d() + ds.q() != f.input_dim()) {
    throw std::invalid_argument("model expects input width " + std::to_string(f.input_dim()) +
                                ", dataset has d+q=" + std::to_string(ds.d() + ds.q()));
  }
  const std::size_t width = f.input_dim();
  std::vector<double> in(ds.n() * width);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    double* row = in.data() + i * width;
    auto x = ds.features(i);
    auto s = ds.sensitive(i);
    for (std::size_t j = 0; j < x.size(); ++j) row[j] = x[j];
    for (std::size_t j = 0; j < s.size(); ++j) row[x.size() + j] = s[j];
  }
  return in;
}

}  // namespace

ForwardPass forward(const PredictionModel& f, const data::Dataset& ds) {
  const auto in = stacked_inputs(f, ds);
  ForwardPass pass;
  pass.hidden.resize(ds.n() * f.hidden());
  pass.logits.resize(ds.n());
  kernels::mlp_forward_serial(in, ds.n(), f.input_dim(), f.theta(), f.hidden(), pass.hidden,
                              pass.logits);
  pass.scores.resize(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) pass.scores[i] = sigmoid(pass.logits[i]);
  return pass;
}

std::vector<double> predict_scores(const PredictionModel& f, const data::Dataset& ds) {
  const auto in = stacked_inputs(f, ds);
  std::vector<double> hidden(ds.n() * f.hidden());
  std::vector<double> scores(ds.n());
  kernels::mlp_forward_omp(in, ds.n(), f.input_dim(), f.theta(), f.hidden(), hidden, scores);
  for (double& s : scores) s = sigmoid(s);
  return scores;
}

std::vector<double> backprop_logits(const PredictionModel& f, const data::Dataset& ds,
                                    const ForwardPass& pass, std::span<const double> d_logits) {
  const auto in = stacked_inputs(f, ds);
  const std::size_t width = f.input_dim();
  const std::size_t h = f.hidden();
  const double* w2 = f.theta().data() + f.w2_offset();
  std::vector<double> grad(f.parameter_count(), 0.0);
  std::vector<double> w1t(width * h, 0.0);  // input-major first-layer gradient
  double* g_b1 = grad.data() + f.b1_offset();
  double* g_w2 = grad.data() + f.w2_offset();
  std::vector<double> d_hidden(h);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const double dl = d_logits[i];
    if (dl == 0.0) continue;
    const double* act = pass.hidden.data() + i * h;
    const double* x = in.data() + i * width;
    grad[f.b2_offset()] += dl;
    for (std::size_t u = 0; u < h; ++u) {
      g_w2[u] += dl * act[u];
      d_hidden[u] = act[u] > 0.0 ? dl * w2[u] : 0.0;
      g_b1[u] += d_hidden[u];
    }
    for (std::size_t j = 0; j < width; ++j) {
      const double xj = x[j];
      double* g = w1t.data() + j * h;
      for (std::size_t u = 0; u < h; ++u) g[u] += d_hidden[u] * xj;
    }
  }
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t j = 0; j < width; ++j) grad[u * width + j] = w1t[j * h + u];
  }
  return grad;
}

std::vector<double> discriminate(const Discriminator& g, std::span<const double> scores) {
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) out[i] = g(scores[i]);
  return out;
}

WeightVector uniform_weights(std::size_t m) {
  if (m == 0) throw std::invalid_argument("weight vector needs M >= 1");
  return WeightVector{std::vector<double>(m, 1.0 / std::sqrt(static_cast<double>(m)))};
}

WeightVector project_sphere(std::span<const double> v) {
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (!(norm > 1e-12) || !std::isfinite(norm)) return uniform_weights(v.size());
  WeightVector out{std::vector<double>(v.begin(), v.end())};
  for (double& x : out.v) x /= norm;
  return out;
}

Parameters init_params(const Dims& dims, std::uint64_t seed) {
  if (dims.hidden == 0 || dims.subsets == 0 || dims.d + dims.q == 0) {
    throw std::invalid_argument("init_params needs hidden >= 1, M >= 1 and a nonempty input");
  }
  Parameters p{PredictionModel(dims.d + dims.q, dims.hidden), Discriminator{},
               uniform_weights(dims.subsets)};
  auto rng = make_rng(seed, streams::kInit);
  auto theta = p.model.theta();
  const double in_bound = 1.0 / std::sqrt(static_cast<double>(dims.d + dims.q));
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  std::uniform_real_distribution<double> first(-in_bound, in_bound);
  std::uniform_real_distribution<double> second(-out_bound, out_bound);
  for (std::size_t k = 0; k < p.model.w2_offset(); ++k) theta[k] = first(rng);
  for (std::size_t k = p.model.w2_offset(); k < theta.size(); ++k) theta[k] = second(rng);
  return p;
}

}  // namespace draf::model
