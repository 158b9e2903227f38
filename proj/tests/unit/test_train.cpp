#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "draf/config.hpp"
#include "draf/error.hpp"
#include "draf/train.hpp"
#include "fixtures.hpp"

using namespace draf;
using metrics::ParetoPoint;
using train::Method;

namespace {

struct Small {
  data::Splits splits;
  train::TrainConfig cfg;
};

Small small_problem(std::uint64_t seed = 0) {
  data::GerrymanderSpec spec;
  spec.n = 300;
  spec.q = 3;
  spec.seed = seed;
  Small s{data::split(data::generate_gerrymandered(spec), {0.6, 0.2, 0.2, seed}), {}};
  s.cfg.epochs = 25;
  s.cfg.hidden = 8;
  s.cfg.lr_cls = 0.1;
  s.cfg.seed = seed;
  return s;
}

// Weighted softmax disparity straight from its definition.
double softmax_penalty(const std::vector<double>& scores, const data::Dataset& ds, double tau) {
  std::map<std::uint32_t, std::pair<double, double>> groups;
  double mean = 0.0;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    groups[ds.key(i).bits].first += 1.0;
    groups[ds.key(i).bits].second += scores[i];
    mean += scores[i];
  }
  const double n = static_cast<double>(ds.n());
  mean /= n;
  std::vector<double> w;
  for (const auto& [k, cs] : groups) w.push_back(cs.first / n * std::abs(cs.second / cs.first - mean));
  double z = 0.0, num = 0.0;
  for (double x : w) {
    z += std::exp(tau * x);
    num += std::exp(tau * x) * x;
  }
  return num / z;
}

metrics::EvalOptions quick_eval() {
  metrics::EvalOptions ev;
  ev.grid = {-10, 10, -10, 10, 5, 5};
  ev.gap.steps = 5;
  ev.gap.restarts = 1;
  return ev;
}

}  // namespace

TEST(Train, CrossEntropyExamples) {
  const std::vector<std::uint8_t> y{1, 0, 1};
  EXPECT_NEAR(train::cross_entropy(std::vector<double>(3, 0.5), y), std::log(2.0), 1e-15);
  EXPECT_NEAR(train::cross_entropy(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0}),
              -std::log(0.9), 1e-15);
  EXPECT_NEAR(train::cross_entropy(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{1, 0}),
              0.105361, 1e-6);
  const double perfect = train::cross_entropy(std::vector<double>{1.0, 0.0}, std::vector<std::uint8_t>{1, 0});
  EXPECT_GT(perfect, 0.0);
  EXPECT_LT(perfect, 1e-11);
  EXPECT_THROW(train::cross_entropy(std::vector<double>{0.5}, y), std::invalid_argument);
}

TEST(Train, CrossEntropyLogitGradient) {
  const std::vector<double> p{0.2, 0.7, 0.9};
  const std::vector<std::uint8_t> y{1, 0, 1};
  const auto g = train::cross_entropy_logit_grad(p, y);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], (p[i] - y[i]) / 3.0, 1e-16);
}

TEST(Train, RegPenalty) {
  const auto ds = fx::from_rows({{1}, {0}});
  const auto pen = train::reg_penalty(std::vector<double>{0.8, 0.2}, ds);
  EXPECT_NEAR(pen.value, 0.3, 1e-15);
  EXPECT_EQ(train::reg_penalty(std::vector<double>(2, 0.4), ds).value, 0.0);

  const auto flat = fx::from_rows({{1, 0}, {0, 0}, {1, 0}});
  std::vector<std::size_t> skipped;
  train::reg_penalty(std::vector<double>{0.1, 0.5, 0.9}, flat, &skipped);
  EXPECT_EQ(skipped, (std::vector<std::size_t>{1}));
}

TEST(Train, RegPenaltyGradientMatchesDifferences) {
  const auto ds = fx::random_dataset(30, 1, 3, 2);
  auto scores = fx::uniform_scores(30, 3);
  const auto pen = train::reg_penalty(scores, ds);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double keep = scores[i], h = 1e-7;
    scores[i] = keep + h;
    const double up = train::reg_penalty(scores, ds).value;
    scores[i] = keep - h;
    const double down = train::reg_penalty(scores, ds).value;
    scores[i] = keep;
    EXPECT_NEAR(pen.d_scores[i], (up - down) / (2 * h), 1e-6);
  }
}

TEST(Train, GfPenalty) {
  const auto two = fx::from_rows({{1}, {1}, {0}, {0}});
  EXPECT_NEAR(train::gf_penalty(std::vector<double>{0.9, 0.9, 0.1, 0.1}, two, 20.0).value, 0.2, 1e-15);
  EXPECT_NEAR(train::gf_penalty(std::vector<double>{0.3, 0.7, 0.6, 0.4}, two, 20.0).value, 0.0, 1e-15);
  EXPECT_THROW(train::gf_penalty(std::vector<double>{0.1, 0.2}, fx::from_rows({{1}, {1}}), 20.0),
               DataError);

  // Three subgroups with unequal weighted disparities (0.2, 0.1, 0.1).
  const auto three = fx::from_rows({{0, 0}, {0, 0}, {1, 0}, {0, 1}});
  const std::vector<double> scores{0.9, 0.9, 0.1, 0.1};
  for (double tau : {1.0, 20.0, 1000.0}) {
    EXPECT_NEAR(train::gf_penalty(scores, three, tau).value, softmax_penalty(scores, three, tau), 1e-14);
  }
  EXPECT_NEAR(train::gf_penalty(scores, three, 1000.0).value, 0.2, 1e-3);
  EXPECT_LT(train::gf_penalty(scores, three, 1.0).value, 0.2 - 1e-3);
}

TEST(Train, GfPenaltyGradientMatchesDifferences) {
  const auto ds = fx::random_dataset(40, 1, 2, 4);
  auto scores = fx::uniform_scores(40, 5);
  const auto pen = train::gf_penalty(scores, ds, 20.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double keep = scores[i], h = 1e-7;
    scores[i] = keep + h;
    const double up = train::gf_penalty(scores, ds, 20.0).value;
    scores[i] = keep - h;
    const double down = train::gf_penalty(scores, ds, 20.0).value;
    scores[i] = keep;
    EXPECT_NEAR(pen.d_scores[i], (up - down) / (2 * h), 1e-6);
  }
}

TEST(Train, ZeroMultiplierReducesToUnconstrained) {
  auto s = small_problem(3);
  const auto plain = train::train_unconstrained(s.splits.train, s.splits.valid, s.cfg);
  for (Method m : {Method::draf, Method::reg, Method::gf}) {
    auto cfg = s.cfg;
    cfg.method = m;
    const auto r = train::train_model(s.splits.train, s.splits.valid, cfg);
    ASSERT_EQ(r.history.size(), plain.history.size());
    for (std::size_t e = 0; e < r.history.size(); ++e) {
      EXPECT_EQ(r.history[e].theta_digest, plain.history[e].theta_digest) << train::to_string(m);
      EXPECT_EQ(r.history[e].ce, plain.history[e].ce);
    }
    EXPECT_EQ(r.model, plain.model);
  }
}

TEST(Train, Deterministic) {
  auto s = small_problem(1);
  for (Method m : {Method::draf, Method::reg, Method::gf, Method::none}) {
    auto cfg = s.cfg;
    cfg.method = m;
    cfg.lambda = 0.5;
    const auto a = train::train_model(s.splits.train, s.splits.valid, cfg);
    const auto b = train::train_model(s.splits.train, s.splits.valid, cfg);
    EXPECT_EQ(a.history, b.history);
    EXPECT_EQ(a.model, b.model);
    EXPECT_EQ(a.best_epoch, b.best_epoch);
  }
}

TEST(Train, CheckpointHasBestValidationAccuracy) {
  auto s = small_problem(2);
  for (Method m : {Method::draf, Method::reg, Method::gf, Method::none}) {
    auto cfg = s.cfg;
    cfg.method = m;
    cfg.lambda = 1.0;
    const auto r = train::train_model(s.splits.train, s.splits.valid, cfg);
    ASSERT_EQ(r.history.size(), cfg.epochs);
    double best = 0.0;
    for (const auto& h : r.history) best = std::max(best, h.valid_acc);
    EXPECT_EQ(r.history[r.best_epoch].valid_acc, best);
    EXPECT_EQ(metrics::accuracy(model::predict_scores(r.model, s.splits.valid), s.splits.valid.labels()),
              best);
  }
}

TEST(Train, MiniBatchRuns) {
  auto s = small_problem(4);
  s.cfg.batch = 32;
  s.cfg.method = Method::draf;
  s.cfg.lambda = 1.0;
  const auto a = train::train_model(s.splits.train, s.splits.valid, s.cfg);
  const auto b = train::train_model(s.splits.train, s.splits.valid, s.cfg);
  EXPECT_EQ(a.history, b.history);
  s.cfg.batch = 0;
  EXPECT_NE(train::train_model(s.splits.train, s.splits.valid, s.cfg).history, a.history);
}

TEST(Train, UnconstrainedLearnsGerrymanderedData) {
  data::GerrymanderSpec spec;
  spec.n = 2000;
  const auto splits = data::split(data::generate_gerrymandered(spec), {0.6, 0.2, 0.2, 0});
  train::TrainConfig cfg;
  cfg.method = Method::none;
  const auto r = train::train_model(splits.train, splits.valid, cfg);
  EXPECT_GT(r.history[r.best_epoch].valid_acc, 0.6);
}

TEST(Train, ConfigValidation) {
  auto s = small_problem();
  auto bad = s.cfg;
  bad.lr_cls = 0.0;
  EXPECT_THROW(train::train_model(s.splits.train, s.splits.valid, bad), std::invalid_argument);
  bad = s.cfg;
  bad.epochs = 0;
  EXPECT_THROW(train::train_model(s.splits.train, s.splits.valid, bad), std::invalid_argument);
  bad = s.cfg;
  bad.lambda = -1.0;
  EXPECT_THROW(train::train_model(s.splits.train, s.splits.valid, bad), std::invalid_argument);
}

TEST(Train, DivergenceRaisesNumericalError) {
  auto s = small_problem();
  s.cfg.lr_cls = 1e300;
  s.cfg.method = Method::reg;
  s.cfg.lambda = 1.0;
  EXPECT_THROW(train::train_model(s.splits.train, s.splits.valid, s.cfg), NumericalError);
}

TEST(Sweep, SingleRunMatchesUnconstrained) {
  auto s = small_problem(5);
  s.cfg.method = Method::draf;
  const std::vector<double> lambdas{0.0};
  const std::vector<std::uint64_t> seeds{5};
  const auto ev = quick_eval();
  const auto rows = train::sweep_lambda(s.splits, s.cfg, lambdas, seeds, ev, 1);
  ASSERT_EQ(rows.size(), 1u);
  const auto plain = train::train_unconstrained(s.splits.train, s.splits.valid, s.cfg);
  EXPECT_EQ(rows[0].reports[2], metrics::evaluate_model(plain.model, s.splits.test, ev));
  EXPECT_EQ(rows[0].checkpoint.params.model, plain.model);
}

TEST(Sweep, CartesianProductInFixedOrder) {
  auto s = small_problem(6);
  s.cfg.method = Method::reg;
  const std::vector<double> lambdas{0.0, 2.0};
  const std::vector<std::uint64_t> seeds{7, 3};
  const auto ev = quick_eval();
  const auto a = train::sweep_lambda(s.splits, s.cfg, lambdas, seeds, ev, 0);
  const auto b = train::sweep_lambda(s.splits, s.cfg, lambdas, seeds, ev, 1);
  ASSERT_EQ(a.size(), 4u);
  const std::pair<double, std::uint64_t> expected[] = {{0.0, 7}, {0.0, 3}, {2.0, 7}, {2.0, 3}};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(a[k].lambda, expected[k].first);
    EXPECT_EQ(a[k].seed, expected[k].second);
    EXPECT_FALSE(a[k].failed);
  }
  EXPECT_EQ(train::metrics_csv(a), train::metrics_csv(b));
}

TEST(Sweep, FailedRunsAreFlagged) {
  auto s = small_problem(7);
  s.cfg.method = Method::reg;
  s.cfg.lr_cls = 1e300;
  const std::vector<double> lambdas{0.0, 1.0};
  const std::vector<std::uint64_t> seeds{0};
  const auto rows = train::sweep_lambda(s.splits, s.cfg, lambdas, seeds, quick_eval(), 1);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.failed);
    EXPECT_FALSE(r.error.empty());
  }
}

TEST(Sweep, DefaultGrid) {
  const auto grid = train::default_lambda_grid();
  ASSERT_EQ(grid.size(), 17u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 20.0);
  EXPECT_NEAR(grid[3], 0.3, 1e-15);
  EXPECT_EQ(grid[14], 5.0);
}

TEST(Sweep, MetricsCsvRoundTrip) {
  metrics::MetricsReport r;
  r.acc = 0.8125;
  r.sp = 1.0 / 3.0;
  r.mp = {{1, 0.1}, {2, 0.2}};
  r.wmp = 0.05;
  r.zdr = 0.7;
  r.supipm = 0.3;
  const auto row = train::metrics_row(Method::gf, 0.3, 0.05, 9, train::SplitName::valid, r);
  const auto parsed = train::parse_metrics_csv(std::string(train::kMetricsHeader) + "\n" + row + "\n");
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0].method, "gf");
  EXPECT_EQ(parsed[0].lambda, 0.3);
  EXPECT_EQ(parsed[0].gamma, 0.05);
  EXPECT_EQ(parsed[0].seed, 9u);
  EXPECT_EQ(parsed[0].split, "valid");
  EXPECT_EQ(parsed[0].sp, 1.0 / 3.0);
  EXPECT_EQ(parsed[0].mp2, 0.2);
  EXPECT_THROW(train::parse_metrics_csv("bad,header\n"), DataError);
}

TEST(Gamma, TrapezoidArea) {
  const std::vector<ParetoPoint> front{{0.0, 0.6}, {0.1, 0.8}, {0.2, 0.9}};
  // Independent evaluation of the normalised trapezoid rule.
  double area = 0.0;
  for (std::size_t k = 1; k < front.size(); ++k) {
    area += 0.5 * (front[k].acc + front[k - 1].acc) * (front[k].fairness - front[k - 1].fairness);
  }
  area /= front.back().fairness - front.front().fairness;
  EXPECT_NEAR(area, 0.775, 1e-12);
  EXPECT_NEAR(train::front_area(front), 0.775, 1e-12);
  EXPECT_EQ(train::front_area(std::vector<ParetoPoint>{{0.1, 0.9}}), 0.0);
}

TEST(Gamma, SelectsDominantFront) {
  std::map<double, std::vector<ParetoPoint>> sweeps{
      {0.01, {{0.1, 0.7}, {0.2, 0.8}}},
      {0.05, {{0.1, 0.8}, {0.2, 0.9}}},
  };
  EXPECT_EQ(train::select_gamma(sweeps), 0.05);
  sweeps[0.01] = sweeps[0.05];
  EXPECT_EQ(train::select_gamma(sweeps), 0.01);  // tie goes to the smaller gamma
}

TEST(Config, ParseAndRoundTrip) {
  const auto rc = parse_config(
      "# scenario\nmethod = reg\nlambda = 2.5  # inline\nepochs=7\norders = 1\nlambdas = 0,1\n"
      "seeds = 3,4\ngammas = 0.01,0.05\ngen_free_weight = 2.75\n");
  EXPECT_EQ(rc.train.method, Method::reg);
  EXPECT_EQ(rc.train.lambda, 2.5);
  EXPECT_EQ(rc.train.epochs, 7u);
  EXPECT_EQ(rc.train.orders, (std::set<int>{1}));
  EXPECT_EQ(rc.lambdas, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(rc.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(rc.gammas, (std::vector<double>{0.01, 0.05}));
  EXPECT_EQ(rc.generator.free_weight, 2.75);
  EXPECT_EQ(parse_config(rc.to_text()).to_text(), rc.to_text());
  EXPECT_THROW(parse_config("no_such_key = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("epochs = many\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("method = svm\n"), std::invalid_argument);
  EXPECT_THROW(parse_config("just text\n"), std::invalid_argument);
}
