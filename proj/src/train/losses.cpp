#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "draf/losses.hpp"

namespace draf::train {

double cross_entropy(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  if (scores.empty()) throw std::invalid_argument("cross-entropy of an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double p = std::clamp(scores[i], kProbClamp, 1.0 - kProbClamp);
    total += labels[i] ? std::log(p) : std::log1p(-p);
  }
  return -total / static_cast<double>(scores.size());
}

std::vector<double> cross_entropy_logit_grad(std::span<const double> scores,
                                             std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  const double inv_n = 1.0 / static_cast<double>(scores.size());
  std::vector<double> grad(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) grad[i] = (scores[i] - labels[i]) * inv_n;
  return grad;
}

}  // namespace draf::train
