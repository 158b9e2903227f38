#include <cmath>
#include <numeric>
#include <random>

#include "draf/data.hpp"
#include "draf/error.hpp"
#include "draf/rng.hpp"

namespace draf::data {

Splits split(const Dataset& ds, const SplitSpec& spec) {
  const double fracs[] = {spec.train_frac, spec.valid_frac, spec.test_frac};
  for (double f : fracs) {
    if (!(f > 0.0 && f < 1.0)) throw DataError("split fractions must lie in (0, 1)");
  }
  if (std::abs(spec.train_frac + spec.valid_frac + spec.test_frac - 1.0) > 1e-9) {
    throw DataError("split fractions must sum to 1");
  }
  const std::size_t n = ds.n();
  if (n < 5) throw DataError("need at least 5 rows to split");

  const auto n_valid = static_cast<std::size_t>(std::llround(n * spec.valid_frac));
  const auto n_test = static_cast<std::size_t>(std::llround(n * spec.test_frac));
  if (n_valid == 0 || n_test == 0 || n_valid + n_test >= n) {
    throw DataError("split produces an empty part for n=" + std::to_string(n));
  }
  const std::size_t n_train = n - n_valid - n_test;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto rng = make_rng(spec.seed, streams::kSplit);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }

  Splits out;
  out.train_rows.assign(perm.begin(), perm.begin() + n_train);
  out.valid_rows.assign(perm.begin() + n_train, perm.begin() + n_train + n_valid);
  out.test_rows.assign(perm.begin() + n_train + n_valid, perm.end());
  out.train = ds.select(out.train_rows);
  out.valid = ds.select(out.valid_rows);
  out.test = ds.select(out.test_rows);
  return out;
}

}  // namespace draf::data
