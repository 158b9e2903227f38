#include <algorithm>
#include <cmath>
#include <random>

#include "draf/error.hpp"
#include "draf/fairness.hpp"
#include "draf/kernels.hpp"
#include "draf/rng.hpp"

namespace draf::fairness {

DrGapResult dr_gap(std::span<const double> scores, const subsets::MembershipMatrix& c,
                   const DrGapOptions& options) {
  if (options.steps == 0) throw std::invalid_argument("dr_gap needs at least one step");
  if (scores.size() != c.rows()) throw std::invalid_argument("scores length != n");
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  auto rng = make_rng(options.seed, streams::kRestarts);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> slope(-20.0, 20.0);
  std::uniform_int_distribution<std::size_t> pick(0, scores.size() - 1);

  const auto active = independent_columns(c);
  DrGapResult best;
  best.ascent_value = -1.0;
  for (std::size_t r = 0; r < restarts; ++r) {
    model::Discriminator g;
    model::WeightVector v;
    if (r == 0) {
      g = options.init_g.value_or(model::Discriminator{});
      v = options.init_v ? model::project_sphere(options.init_v->v) : uniform_active(active);
    } else {
      // Random sigmoid centred on an observed score, random direction on the sphere.
      g.scale = slope(rng);
      g.offset = -g.scale * scores[pick(rng)];
      std::vector<double> raw(c.cols());
      for (std::size_t m = 0; m < raw.size(); ++m) raw[m] = active[m] ? gauss(rng) : 0.0;
      v = model::project_sphere(raw);
    }
    for (std::size_t step = 0; step <= options.steps; ++step) {
      const double z = z_dr_squared(dr_squared(c, v.v, discriminate(g, scores)), options.clamp_eps);
      if (!std::isfinite(z) || !std::isfinite(g.scale) || !std::isfinite(g.offset)) {
        throw NumericalError("dr_gap: non-finite objective");
      }
      if (z > best.ascent_value) {
        best.ascent_value = z;
        best.g = g;
        best.v = v;
      }
      if (step < options.steps) {
        ascent_step(scores, c, g, v, options.lr_g, options.lr_v, options.clamp_eps, active);
      }
    }
  }

  const auto rtilde = per_subset_rtilde(discriminate(best.g, scores), c);
  std::size_t arg = 0;
  for (std::size_t m = 0; m < rtilde.size(); ++m) {
    const double z = z_dr_squared(rtilde[m], options.clamp_eps);
    if (z > best.vertex_floor) {
      best.vertex_floor = z;
      arg = m;
    }
  }
  best.value = std::max(best.ascent_value, best.vertex_floor);
  if (best.vertex_floor > best.ascent_value) {
    best.v.v.assign(c.cols(), 0.0);
    best.v.v[arg] = 1.0;
  }
  return best;
}

double Grid::a(std::size_t i) const {
  return a_steps <= 1 ? a_min : a_min + (a_max - a_min) * static_cast<double>(i) / (a_steps - 1);
}

double Grid::b(std::size_t j) const {
  return b_steps <= 1 ? b_min : b_min + (b_max - b_min) * static_cast<double>(j) / (b_steps - 1);
}

model::Discriminator Grid::at(std::size_t index) const {
  return {a(index / b_steps), b(index % b_steps)};
}

double sup_ipm_grid(std::span<const double> scores, const subsets::MembershipMatrix& c,
                    const Grid& grid, Execution exec) {
  if (grid.size() == 0) throw std::invalid_argument("grid is empty");
  if (scores.size() != c.rows()) throw std::invalid_argument("scores length != n");
  std::vector<double> scales(grid.size());
  std::vector<double> offsets(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto g = grid.at(k);
    scales[k] = g.scale;
    offsets[k] = g.offset;
  }
  const kernels::GridSpec spec{scales, offsets};
  return exec == Execution::serial ? kernels::sup_ipm_grid_serial(scores, c, spec)
                                   : kernels::sup_ipm_grid_omp(scores, c, spec);
}

FairnessEval evaluate(std::span<const double> scores, const subsets::MembershipMatrix& c,
                      const DrGapOptions& gap_options, const Grid& grid) {
  FairnessEval out;
  const auto gap = dr_gap(scores, c, gap_options);
  const auto gvals = discriminate(gap.g, scores);
  out.dr2 = dr_squared(c, gap.v.v, gvals);
  out.z_dr2 = z_dr_squared(out.dr2, gap_options.clamp_eps);
  out.per_subset_rtilde = per_subset_rtilde(gvals, c);
  out.sup_ipm_grid = sup_ipm_grid(scores, c, grid);
  out.dr_gap = gap.value;
  return out;
}

}  // namespace draf::fairness
