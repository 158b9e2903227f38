#include <benchmark/benchmark.h>

#include <random>

#include "draf/fairness.hpp"
#include "draf/kernels.hpp"

using namespace draf;

namespace {

struct GridInput {
  std::vector<double> scores;
  subsets::MembershipMatrix c;
  std::vector<double> scales, offsets;
};

GridInput grid_input(std::size_t n, std::size_t m, std::size_t steps) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GridInput in;
  in.scores.resize(n);
  for (double& s : in.scores) s = u(rng);
  std::vector<std::int8_t> entries(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto key = rng() % 4;  // four subgroups, columns are unions of them
    for (std::size_t k = 0; k < m; ++k) entries[i * m + k] = ((key + k) % 3 == 0) ? 1 : -1;
  }
  in.c = subsets::MembershipMatrix(std::move(entries), n, m);
  const fairness::Grid grid{-50, 50, -50, 50, steps, steps};
  for (std::size_t a = 0; a < steps; ++a) {
    for (std::size_t b = 0; b < steps; ++b) {
      in.scales.push_back(grid.a(a));
      in.offsets.push_back(grid.b(b));
    }
  }
  return in;
}

void BM_SupIpmSerial(benchmark::State& state) {
  const auto in = grid_input(static_cast<std::size_t>(state.range(0)), 6, 41);
  const kernels::GridSpec spec{in.scales, in.offsets};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sup_ipm_grid_serial(in.scores, in.c, spec));
}

void BM_SupIpmOmp(benchmark::State& state) {
  const auto in = grid_input(static_cast<std::size_t>(state.range(0)), 6, 41);
  const kernels::GridSpec spec{in.scales, in.offsets};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sup_ipm_grid_omp(in.scores, in.c, spec));
}

struct MlpInput {
  std::size_t n, in_dim = 6, hidden = 64;
  std::vector<double> inputs, theta, act, logits;
};

MlpInput mlp_input(std::size_t n) {
  MlpInput in{n};
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss;
  in.inputs.resize(n * in.in_dim);
  in.theta.resize(in.hidden * (in.in_dim + 2) + 1);
  for (double& x : in.inputs) x = gauss(rng);
  for (double& t : in.theta) t = gauss(rng);
  in.act.resize(n * in.hidden);
  in.logits.resize(n);
  return in;
}

void BM_MlpForwardSerial(benchmark::State& state) {
  auto in = mlp_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::mlp_forward_serial(in.inputs, in.n, in.in_dim, in.theta, in.hidden, in.act, in.logits);
    benchmark::ClobberMemory();
  }
}

void BM_MlpForwardOmp(benchmark::State& state) {
  auto in = mlp_input(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::mlp_forward_omp(in.inputs, in.n, in.in_dim, in.theta, in.hidden, in.act, in.logits);
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(BM_SupIpmSerial)->Arg(800)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SupIpmOmp)->Arg(800)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MlpForwardSerial)->Arg(2400)->Arg(20000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MlpForwardOmp)->Arg(2400)->Arg(20000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
