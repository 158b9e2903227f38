#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "draf/data.hpp"

namespace draf::fx {

// The 40-row worked example: attributes (a, b) packed as a + 2b, ten rows per
// subgroup, positive rate 0.9 when a = 0 and 0.1 when a = 1.
inline data::Dataset golden_dataset() {
  std::vector<double> x;
  std::vector<std::uint8_t> s, y;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      for (int k = 0; k < 10; ++k) {
        x.push_back(static_cast<double>(k));
        s.push_back(static_cast<std::uint8_t>(a));
        s.push_back(static_cast<std::uint8_t>(b));
        y.push_back(static_cast<std::uint8_t>(k % 2));
      }
    }
  }
  return data::Dataset(std::move(x), std::move(s), std::move(y), 1, 2, {"x"}, {"a", "b"});
}

// Scores giving 9 positives out of 10 when a = 0 and 1 out of 10 when a = 1.
inline std::vector<double> golden_scores(const data::Dataset& ds) {
  std::vector<double> scores(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.sensitive(i);
    const int k = static_cast<int>(ds.features(i)[0]);
    const bool positive = row[0] == 0 ? k < 9 : k < 1;
    scores[i] = positive ? 0.8 : 0.2;
  }
  return scores;
}

// Dataset with the given sensitive rows (q attributes each) and one feature.
inline data::Dataset from_rows(const std::vector<std::vector<std::uint8_t>>& rows,
                               std::vector<std::uint8_t> labels = {}) {
  const std::size_t q = rows.front().size();
  std::vector<double> x;
  std::vector<std::uint8_t> s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    x.push_back(static_cast<double>(i));
    s.insert(s.end(), rows[i].begin(), rows[i].end());
  }
  if (labels.empty()) labels.assign(rows.size(), 0);
  return data::Dataset(std::move(x), std::move(s), std::move(labels), 1, q);
}

inline data::Dataset random_dataset(std::size_t n, std::size_t d, std::size_t q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(n * d);
  std::vector<std::uint8_t> s(n * q), y(n);
  for (auto& v : x) v = gauss(rng);
  for (auto& v : s) v = coin(rng);
  for (auto& v : y) v = coin(rng);
  return data::Dataset(std::move(x), std::move(s), std::move(y), d, q);
}

inline std::vector<double> uniform_scores(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

}  // namespace draf::fx
