#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "draf/error.hpp"
#include "draf/model.hpp"
#include "draf/oracle.hpp"
#include "fixtures.hpp"

using namespace draf;
using model::ObjectiveKind;

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double norm(const std::vector<double>& v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

}  // namespace

TEST(Model, ParameterCountAndZeroWeights) {
  const model::PredictionModel f(5, 7);
  EXPECT_EQ(f.parameter_count(), 7u * (5 + 1) + (7 + 1));
  const auto ds = fx::random_dataset(9, 3, 2, 1);
  for (double s : model::predict_scores(f, ds)) EXPECT_EQ(s, 0.5);

  auto biased = f;
  biased.theta()[biased.b2_offset()] = 1.5;
  for (double s : model::predict_scores(biased, ds)) EXPECT_DOUBLE_EQ(s, logistic(1.5));
}

TEST(Model, HandEvaluatedSingleUnit) {
  // Input (x, s) with d = 1, q = 1; one ReLU unit.
  const data::Dataset ds({0.5, -2.0}, {1, 0}, {1, 0}, 1, 1);
  model::PredictionModel f(2, 1);
  auto t = f.theta();
  t[0] = 0.7;   // w1 on x
  t[1] = -0.3;  // w1 on s
  t[2] = 0.1;   // b1
  t[3] = 1.9;   // w2
  t[4] = -0.4;  // b2
  const auto scores = model::predict_scores(f, ds);
  const double h0 = std::max(0.0, 0.7 * 0.5 - 0.3 * 1.0 + 0.1);
  const double h1 = std::max(0.0, 0.7 * -2.0 + 0.1);
  EXPECT_NEAR(scores[0], logistic(1.9 * h0 - 0.4), 1e-12);
  EXPECT_NEAR(scores[1], logistic(1.9 * h1 - 0.4), 1e-12);
}

TEST(Model, ScoresFollowRowPermutation) {
  const auto ds = fx::random_dataset(30, 3, 2, 4);
  const auto params = model::init_params({3, 2, 8, 1}, 3);
  const auto scores = model::predict_scores(params.model, ds);
  std::vector<std::size_t> rows(ds.n());
  std::iota(rows.rbegin(), rows.rend(), 0);
  const auto reversed = model::predict_scores(params.model, ds.select(rows));
  for (std::size_t i = 0; i < ds.n(); ++i) EXPECT_EQ(reversed[i], scores[ds.n() - 1 - i]);
  EXPECT_EQ(model::predict_scores(params.model, ds), scores);
  for (double s : scores) {
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
  }
}

TEST(Model, DimensionMismatchThrows) {
  const model::PredictionModel f(4, 3);
  EXPECT_THROW(model::predict_scores(f, fx::random_dataset(5, 2, 1, 0)), std::invalid_argument);
}

TEST(Model, Discriminate) {
  const std::vector<double> z{-3.0, 0.0, 1.0, 8.0};
  for (double v : model::discriminate({0.0, 0.7}, z)) EXPECT_DOUBLE_EQ(v, logistic(0.7));
  EXPECT_DOUBLE_EQ(model::discriminate({1.0, 0.0}, std::vector<double>{0.0})[0], 0.5);
  EXPECT_NEAR(model::discriminate({2.0, -1.0}, std::vector<double>{1.0})[0], 0.731059, 1e-6);
  EXPECT_DOUBLE_EQ((model::Discriminator{2.0, -1.0}(1.0)), logistic(1.0));
}

TEST(Model, InitParams) {
  const model::Dims dims{3, 2, 6, 4};
  const auto a = model::init_params(dims, 17);
  const auto b = model::init_params(dims, 17);
  EXPECT_EQ(a.model, b.model);
  EXPECT_NE(a.model, model::init_params(dims, 18).model);
  EXPECT_EQ(a.discriminator, (model::Discriminator{1.0, 0.0}));
  EXPECT_EQ(a.weights.v, (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  // Layer bounds: 1/sqrt(d + q) for the first layer, 1/sqrt(h) for the second.
  const auto& f = a.model;
  for (std::size_t k = 0; k < f.w2_offset(); ++k) {
    EXPECT_LE(std::abs(f.theta()[k]), 1.0 / std::sqrt(5.0));
  }
  for (std::size_t k = f.w2_offset(); k < f.parameter_count(); ++k) {
    EXPECT_LE(std::abs(f.theta()[k]), 1.0 / std::sqrt(6.0));
  }
  EXPECT_THROW(model::init_params({3, 2, 0, 4}, 0), std::invalid_argument);
  EXPECT_THROW(model::init_params({3, 2, 6, 0}, 0), std::invalid_argument);
}

TEST(Model, ProjectSphere) {
  EXPECT_EQ(model::project_sphere(std::vector<double>{3.0, 4.0}).v, (std::vector<double>{0.6, 0.8}));
  const std::vector<double> unit{0.0, 1.0, 0.0};
  EXPECT_EQ(model::project_sphere(unit).v, unit);
  EXPECT_EQ(model::project_sphere(std::vector<double>(4, 0.0)).v,
            (std::vector<double>{0.5, 0.5, 0.5, 0.5}));
  EXPECT_EQ(model::project_sphere(std::vector<double>{1e-13, 0.0}).v,
            model::uniform_weights(2).v);
}

TEST(Model, ProjectSphereIdempotentOnRandomVectors) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 10.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(1 + t % 9);
    for (double& x : v) x = gauss(rng);
    const auto p = model::project_sphere(v);
    EXPECT_NEAR(norm(p.v), 1.0, 1e-12);
    const auto pp = model::project_sphere(p.v);
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_NEAR(pp.v[k], p.v[k], 1e-15);
  }
}

TEST(Model, CrossEntropyBiasGradientVanishesOnSymmetricProblem) {
  const data::Dataset ds({1.0, -1.0, 2.0, -2.0}, {0, 1, 0, 1}, {1, 0, 0, 1}, 1, 1);
  const model::PredictionModel f(2, 3);  // all-zero weights: every score 0.5
  const subsets::MembershipMatrix c({1, -1, 1, -1}, 4, 1);
  const auto grad = model::backward(f, {}, model::uniform_weights(1), ds, c,
                                    {ObjectiveKind::classification, 0.0, 1e-6});
  EXPECT_NEAR(grad.d_theta[f.b2_offset()], 0.0, 1e-15);
}

TEST(Model, FlatDiscriminatorOffsetGradientMatchesDifferences) {
  const auto inst = oracle::make_fd_instance(16, 3, 2, 5, 8);
  const model::Objective z{ObjectiveKind::z_dr, 0.0, 1e-6};
  const model::Discriminator flat{0.0, 0.3};
  const auto grad = model::backward(inst.f, flat, inst.v, inst.ds, inst.c, z);
  const double h = 1e-5;
  const double up = model::objective_value(inst.f, {0.0, 0.3 + h}, inst.v, inst.ds, inst.c, z);
  const double down = model::objective_value(inst.f, {0.0, 0.3 - h}, inst.v, inst.ds, inst.c, z);
  const double numeric = (up - down) / (2 * h);
  EXPECT_LE(std::abs(grad.d_offset - numeric), 1e-6 * std::max(1.0, std::abs(numeric)));
}

TEST(Model, GradientsMatchFiniteDifferencesOnSmallInstances) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = oracle::make_fd_instance(16, 3, 2, 4, seed);  // M = q + 2 = 4
    for (auto kind : {ObjectiveKind::classification, ObjectiveKind::dr_squared,
                      ObjectiveKind::z_dr, ObjectiveKind::combined}) {
      const auto r = oracle::finite_diff_check({kind, 0.7, 1e-6}, inst);
      EXPECT_TRUE(r.passed) << oracle::to_text(r);
    }
  }
}

TEST(Model, BackwardThrowsOnNonFiniteParameters) {
  auto inst = oracle::make_fd_instance(16, 2, 2, 4, 1);
  inst.f.theta()[0] = NAN;
  EXPECT_THROW(model::backward(inst.f, inst.g, inst.v, inst.ds, inst.c,
                               {ObjectiveKind::combined, 1.0, 1e-6}),
               NumericalError);
}

TEST(Model, CheckpointRoundTrip) {
  auto params = model::init_params({3, 2, 5, 4}, 9);
  params.discriminator = {1.2345678901234567, -0.1};
  params.weights = model::project_sphere(std::vector<double>{1, 2, 3, 4});
  const model::Checkpoint ckpt{3, 2, params};
  const auto text = model::to_text(ckpt);
  EXPECT_EQ(text.substr(0, text.find('\n')), "3,2,5,4");
  EXPECT_EQ(model::parse_checkpoint(text), ckpt);
  const auto path = std::filesystem::temp_directory_path() / "draf_test_ckpt.txt";
  model::save_checkpoint(ckpt, path);
  EXPECT_EQ(model::load_checkpoint(path), ckpt);
  EXPECT_THROW(model::parse_checkpoint("3,2,5\n1\n"), DataError);
  EXPECT_THROW(model::parse_checkpoint(text.substr(0, text.size() / 2)), DataError);
  EXPECT_THROW(model::load_checkpoint("/nonexistent/ckpt.txt"), DataError);
}
