#include "draf/kernels.hpp"

#include <vector>

namespace draf::kernels {
namespace {

// First-layer weights transposed to input-major so the hidden loop vectorizes.
std::vector<double> transpose_w1(std::span<const double> theta, std::size_t in_dim,
                                 std::size_t hidden) {
  std::vector<double> t(in_dim * hidden);
  for (std::size_t u = 0; u < hidden; ++u) {
    for (std::size_t j = 0; j < in_dim; ++j) t[j * hidden + u] = theta[u * in_dim + j];
  }
  return t;
}

inline void forward_row(const double* x, std::size_t in_dim, const double* w1t,
                        std::span<const double> theta, std::size_t hidden, double* act,
                        double* logit) {
  const double* b1 = theta.data() + hidden * in_dim;
  const double* w2 = b1 + hidden;
  for (std::size_t u = 0; u < hidden; ++u) act[u] = b1[u];
  for (std::size_t j = 0; j < in_dim; ++j) {
    const double xj = x[j];
    const double* w = w1t + j * hidden;
    for (std::size_t u = 0; u < hidden; ++u) act[u] += w[u] * xj;
  }
  double out = theta[theta.size() - 1];
  for (std::size_t u = 0; u < hidden; ++u) {
    act[u] = act[u] > 0.0 ? act[u] : 0.0;
    out += w2[u] * act[u];
  }
  *logit = out;
}

}  // namespace

void mlp_forward_serial(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                        std::span<const double> theta, std::size_t hidden,
                        std::span<double> hidden_out, std::span<double> logits) {
  const auto w1t = transpose_w1(theta, in_dim, hidden);
  for (std::size_t i = 0; i < n; ++i) {
    forward_row(inputs.data() + i * in_dim, in_dim, w1t.data(), theta, hidden, hidden_out.data() + i * hidden,
                logits.data() + i);
  }
}

void mlp_forward_omp(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                     std::span<const double> theta, std::size_t hidden,
                     std::span<double> hidden_out, std::span<double> logits) {
  const auto w1t = transpose_w1(theta, in_dim, hidden);
  const auto rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    forward_row(inputs.data() + r * in_dim, in_dim, w1t.data(), theta, hidden, hidden_out.data() + r * hidden,
                logits.data() + r);
  }
}

}  // namespace draf::kernels
