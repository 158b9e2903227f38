#pragma once

// Data-parallel kernels. Each has a plain serial reference next to the
// OpenMP version; tests pin the two together and bench/ compares them.

#include <cstddef>
#include <span>
#include <vector>

#include "draf/subsets.hpp"

namespace draf::kernels {

struct GridSpec {
  std::span<const double> scales;
  std::span<const double> offsets;
};

/// Direct O(grid * n * M) evaluation, row by row.
double sup_ipm_grid_serial(std::span<const double> scores, const subsets::MembershipMatrix& c,
                           const GridSpec& grid);

/// Rows are grouped by membership pattern first, so each grid point costs
/// n sigmoids plus (#patterns * M); grid points run in parallel.
double sup_ipm_grid_omp(std::span<const double> scores, const subsets::MembershipMatrix& c,
                        const GridSpec& grid);

/// Dense layer + ReLU + output for a batch of rows (row-major inputs).
void mlp_forward_serial(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                        std::span<const double> theta, std::size_t hidden,
                        std::span<double> hidden_out, std::span<double> logits);
void mlp_forward_omp(std::span<const double> inputs, std::size_t n, std::size_t in_dim,
                     std::span<const double> theta, std::size_t hidden,
                     std::span<double> hidden_out, std::span<double> logits);

}  // namespace draf::kernels
