#include <cmath>
#include <random>

#include "draf/data.hpp"
#include "draf/error.hpp"
#include "draf/rng.hpp"

namespace draf::data {

Dataset generate_gerrymandered(const GerrymanderSpec& spec) {
  if (spec.n < 8) throw DataError("generator needs n >= 8");
  if (spec.q < 2 || spec.q > kMaxAttributes) throw DataError("generator needs 2 <= q <= 30");
  if (spec.d < 1) throw DataError("generator needs d >= 1");
  if (!(spec.mu >= 0.0)) throw DataError("generator needs mu >= 0");
  if (!(spec.noise > 0.0)) throw DataError("generator needs noise > 0");

  auto rng = make_rng(spec.seed, streams::kGenerate);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> gauss(0.0, spec.noise);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> x(spec.n * spec.d);
  std::vector<std::uint8_t> s(spec.n * spec.q);
  std::vector<std::uint8_t> y(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < spec.q; ++j) s[i * spec.q + j] = coin(rng) ? 1 : 0;
    const double sign = (s[i * spec.q] ^ s[i * spec.q + 1]) ? 1.0 : -1.0;
    for (std::size_t j = 0; j < spec.d; ++j) x[i * spec.d + j] = gauss(rng);
    x[i * spec.d] += spec.mu * sign;

    double logit = spec.aligned_weight * x[i * spec.d];
    if (spec.d >= 2) logit += spec.free_weight * x[i * spec.d + 1];
    const double p = 1.0 / (1.0 + std::exp(-logit));
    y[i] = unit(rng) < p ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(s), std::move(y), spec.d, spec.q);
}

}  // namespace draf::data
