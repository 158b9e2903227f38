#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "draf/metrics.hpp"
#include "fixtures.hpp"

using namespace draf;
using metrics::ParetoPoint;

namespace {

data::Dataset one_attribute(const std::vector<std::uint8_t>& s) {
  std::vector<std::vector<std::uint8_t>> rows;
  for (auto v : s) rows.push_back({v});
  return fx::from_rows(rows);
}

data::Dataset duplicated(const data::Dataset& ds) {
  std::vector<std::size_t> rows(2 * ds.n());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i % ds.n();
  return ds.select(rows);
}

}  // namespace

TEST(Metrics, Accuracy) {
  EXPECT_NEAR(metrics::accuracy(std::vector<double>{0.9, 0.2, 0.7}, std::vector<std::uint8_t>{1, 1, 1}),
              2.0 / 3.0, 1e-15);
  const std::vector<std::uint8_t> labels{1, 0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(metrics::accuracy(std::vector<double>(5, 0.5), labels), 0.6);
  const std::vector<double> scores{0.1, 0.8, 0.3, 0.9, 0.45};
  std::vector<std::uint8_t> flipped;
  for (auto y : labels) flipped.push_back(1 - y);
  EXPECT_DOUBLE_EQ(metrics::accuracy(scores, flipped), 1.0 - metrics::accuracy(scores, labels));
  EXPECT_THROW(metrics::accuracy(std::vector<double>{}, std::vector<std::uint8_t>{}),
               std::invalid_argument);
  EXPECT_THROW(metrics::accuracy(scores, std::vector<std::uint8_t>{1}), std::invalid_argument);
}

TEST(Metrics, GoldenFixture) {
  const auto ds = fx::golden_dataset();
  const auto scores = fx::golden_scores(ds);
  EXPECT_NEAR(metrics::sp(scores, ds), 0.1, 1e-15);
  EXPECT_NEAR(metrics::mp_l(scores, ds, 1), 0.4, 1e-15);
  EXPECT_NEAR(metrics::mp_l(scores, ds, 2), 0.4, 1e-15);

  const auto table = metrics::positive_rate_table(scores, ds);
  ASSERT_EQ(table.size(), 4u);
  const double expected[] = {0.9, 0.1, 0.9, 0.1};  // keys a + 2b
  std::size_t total = 0;
  for (const auto& [key, pr] : table) {
    EXPECT_EQ(pr.count, 10u);
    EXPECT_NEAR(pr.rate, expected[key.bits], 1e-15);
    total += pr.count;
  }
  EXPECT_EQ(total, ds.n());
}

// The order-2 value from the marginal-parity formula evaluated directly on positive
// counts, and the order-1 value for each attribute separately.
TEST(Metrics, GoldenMarginalParityByDirectCounting) {
  const auto ds = fx::golden_dataset();
  const auto scores = fx::golden_scores(ds);
  const double n = static_cast<double>(ds.n());
  double positives = 0.0;
  std::array<double, 4> cell_pos{}, cell_n{};
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const bool yhat = scores[i] >= 0.5;
    positives += yhat;
    cell_pos[ds.key(i).bits] += yhat;
    cell_n[ds.key(i).bits] += 1;
  }
  const double p = positives / n;
  double order2 = 0.0;
  for (int k = 0; k < 4; ++k) order2 += cell_n[k] / n * std::abs(cell_pos[k] / cell_n[k] - p);
  std::array<double, 2> order1{};
  for (int j = 0; j < 2; ++j) {
    for (int a = 0; a < 2; ++a) {
      double pos = 0.0, cnt = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (((k >> j) & 1) == a) {
          pos += cell_pos[k];
          cnt += cell_n[k];
        }
      }
      order1[j] += cnt / n * std::abs(pos / cnt - p);
    }
  }
  EXPECT_NEAR(order1[0], 0.4, 1e-15);
  EXPECT_NEAR(order1[1], 0.0, 1e-15);
  EXPECT_NEAR(metrics::mp_l(scores, ds, 1), std::max(order1[0], order1[1]), 1e-15);
  EXPECT_NEAR(metrics::mp_l(scores, ds, 2), order2, 1e-15);
}

TEST(Metrics, ParityEdgeCases) {
  const auto ds = fx::golden_dataset();
  const std::vector<double> constant(ds.n(), 0.7);
  EXPECT_EQ(metrics::sp(constant, ds), 0.0);
  EXPECT_EQ(metrics::mp_l(constant, ds, 1), 0.0);
  EXPECT_EQ(metrics::mp_l(constant, ds, 2), 0.0);
  EXPECT_THROW(metrics::mp_l(constant, ds, 0), std::invalid_argument);
  EXPECT_THROW(metrics::mp_l(constant, ds, 3), std::invalid_argument);

  const auto single = fx::from_rows({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
  EXPECT_EQ(metrics::sp(std::vector<double>{0.9, 0.1, 0.8, 0.2}, single), 0.0);

  const auto all_positive = metrics::positive_rate_table(std::vector<double>(ds.n(), 0.9), ds);
  for (const auto& [key, pr] : all_positive) EXPECT_EQ(pr.rate, 1.0);
}

TEST(Metrics, WmpExamples) {
  const auto ds = one_attribute({1, 1, 0, 0});
  EXPECT_NEAR(metrics::wmp(std::vector<double>{1, 1, 0, 0}, ds), 0.25, 1e-15);
  EXPECT_EQ(metrics::wmp(std::vector<double>(4, 0.3), ds), 0.0);
}

TEST(Metrics, WmpVanishesWhenScoresIgnoreAttribute) {
  std::mt19937_64 rng(1);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::uint8_t> s(10000);
  std::vector<double> scores(10000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = coin(rng);
    scores[i] = u(rng);
  }
  EXPECT_LT(metrics::wmp(scores, one_attribute(s)), 0.02);
}

TEST(Metrics, InvariantUnderPermutationAndDuplication) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto ds = fx::random_dataset(60, 1, 3, seed);
    const auto scores = fx::uniform_scores(ds.n(), seed + 7);
    std::vector<std::size_t> perm(ds.n());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(seed));
    const auto shuffled = ds.select(perm);
    std::vector<double> shuffled_scores;
    for (auto r : perm) shuffled_scores.push_back(scores[r]);
    const auto twice = duplicated(ds);
    std::vector<double> twice_scores(scores);
    twice_scores.insert(twice_scores.end(), scores.begin(), scores.end());

    const auto check = [&](const data::Dataset& other, const std::vector<double>& sc) {
      EXPECT_NEAR(metrics::accuracy(sc, other.labels()), metrics::accuracy(scores, ds.labels()), 1e-15);
      EXPECT_NEAR(metrics::sp(sc, other), metrics::sp(scores, ds), 1e-15);
      for (int l = 1; l <= 3; ++l) EXPECT_NEAR(metrics::mp_l(sc, other, l), metrics::mp_l(scores, ds, l), 1e-15);
      EXPECT_NEAR(metrics::wmp(sc, other), metrics::wmp(scores, ds), 1e-14);
    };
    check(shuffled, shuffled_scores);
    check(twice, twice_scores);
  }
}

TEST(Metrics, ParetoFrontDominance) {
  // (0.1, 0.9) is fairer and more accurate, so (0.2, 0.8) drops out.
  const std::vector<ParetoPoint> pair{{0.1, 0.9}, {0.2, 0.8}};
  EXPECT_EQ(metrics::pareto_front(pair), (std::vector<ParetoPoint>{{0.1, 0.9}}));
  const std::vector<ParetoPoint> incomparable{{0.2, 0.9}, {0.1, 0.8}};
  EXPECT_EQ(metrics::pareto_front(incomparable),
            (std::vector<ParetoPoint>{{0.1, 0.8}, {0.2, 0.9}}));
}

TEST(Metrics, ParetoFrontExamples) {
  const std::vector<ParetoPoint> three{{0.1, 0.9}, {0.2, 0.85}, {0.15, 0.95}};
  EXPECT_EQ(metrics::pareto_front(three), (std::vector<ParetoPoint>{{0.1, 0.9}, {0.15, 0.95}}));
  const std::vector<ParetoPoint> one{{0.3, 0.7}};
  EXPECT_EQ(metrics::pareto_front(one), one);
  const std::vector<ParetoPoint> tie{{0.2, 0.7}, {0.2, 0.8}};
  EXPECT_EQ(metrics::pareto_front(tie), (std::vector<ParetoPoint>{{0.2, 0.8}}));
}

TEST(Metrics, ParetoFrontIsNondominatedAndSorted) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<ParetoPoint> pts(1 + t % 20);
    for (auto& p : pts) p = {std::round(u(rng) * 10) / 10, std::round(u(rng) * 10) / 10};
    const auto front = metrics::pareto_front(pts);
    ASSERT_FALSE(front.empty());
    for (std::size_t k = 1; k < front.size(); ++k) EXPECT_LE(front[k - 1].fairness, front[k].fairness);
    for (const auto& p : pts) {
      const bool dominated = std::any_of(pts.begin(), pts.end(), [&](const ParetoPoint& o) {
        return (o.fairness < p.fairness && o.acc >= p.acc) || (o.fairness == p.fairness && o.acc > p.acc);
      });
      EXPECT_EQ(std::count(front.begin(), front.end(), p) > 0, !dominated);
    }
  }
}

TEST(Metrics, EvaluateScoresOnConstantScores) {
  const auto ds = fx::random_dataset(80, 1, 2, 3);
  const std::vector<double> constant(ds.n(), 0.35);
  metrics::EvalOptions opt;
  opt.grid = {-10, 10, -10, 10, 11, 11};
  const auto r = metrics::evaluate_scores(constant, ds, opt);
  EXPECT_EQ(r.sp, 0.0);
  EXPECT_EQ(r.mp.at(1), 0.0);
  EXPECT_EQ(r.mp.at(2), 0.0);
  EXPECT_EQ(r.wmp, 0.0);
  EXPECT_NEAR(r.supipm, 0.0, 1e-12);
  EXPECT_LE(r.zdr, 1e-6);
  EXPECT_EQ(r.n_eval, ds.n());
}

TEST(Metrics, EvaluateModelMatchesEvaluateScores) {
  const auto ds = fx::random_dataset(80, 2, 2, 4);
  const auto params = model::init_params({2, 2, 8, 1}, 5);
  metrics::EvalOptions opt;
  opt.grid = {-10, 10, -10, 10, 11, 11};
  EXPECT_EQ(metrics::evaluate_model(params.model, ds, opt),
            metrics::evaluate_scores(model::predict_scores(params.model, ds), ds, opt));
}
