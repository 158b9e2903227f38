#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace draf::train {

inline constexpr double kProbClamp = 1e-12;

/// Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
double cross_entropy(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// d(mean CE)/d(logit_i) = (p_i - y_i) / n.
std::vector<double> cross_entropy_logit_grad(std::span<const double> scores,
                                             std::span<const std::uint8_t> labels);

}  // namespace draf::train
