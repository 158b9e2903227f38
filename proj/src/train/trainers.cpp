#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

#include "draf/error.hpp"
#include "draf/fairness.hpp"
#include "draf/rng.hpp"
#include "draf/train.hpp"

namespace draf::train {

std::string to_string(Method method) {
  switch (method) {
    case Method::draf: return "draf";
    case Method::reg: return "reg";
    case Method::gf: return "gf";
    case Method::none: return "none";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "draf") return Method::draf;
  if (text == "reg") return Method::reg;
  if (text == "gf") return Method::gf;
  if (text == "none") return Method::none;
  throw std::invalid_argument("unknown method '" + text + "' (draf|reg|gf|none)");
}

void TrainConfig::validate() const {
  if (!(lr_cls > 0 && lr_g > 0 && lr_v > 0)) throw std::invalid_argument("learning rates must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (!(lambda >= 0)) throw std::invalid_argument("lambda must be >= 0");
  if (hidden == 0) throw std::invalid_argument("hidden width must be >= 1");
  if (!(gf_temperature > 0)) throw std::invalid_argument("gf_temperature must be positive");
  if (adversary_steps == 0) throw std::invalid_argument("adversary_steps must be >= 1");
}

std::uint64_t digest(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double x : values) {
    h ^= std::bit_cast<std::uint64_t>(x);
    h *= 1099511628211ULL;
    h ^= h >> 29;
  }
  return h;
}

PenaltyGrad reg_penalty(std::span<const double> scores, const data::Dataset& ds,
                        std::vector<std::size_t>* skipped) {
  const std::size_t n = ds.n();
  if (scores.size() != n) throw std::invalid_argument("scores length != dataset size");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double mean = std::accumulate(scores.begin(), scores.end(), 0.0) * inv_n;
  PenaltyGrad out;
  out.d_scores.assign(n, 0.0);
  for (std::size_t l = 0; l < ds.q(); ++l) {
    std::size_t n_l = 0;
    double sum_l = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ds.key(i).has(l)) {
        ++n_l;
        sum_l += scores[i];
      }
    }
    if (n_l == 0 || n_l == n) {
      if (skipped) skipped->push_back(l);
      continue;
    }
    const double diff = mean - sum_l / static_cast<double>(n_l);
    out.value += std::abs(diff);
    const double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
    if (sign == 0.0) continue;
    const double inv_l = 1.0 / static_cast<double>(n_l);
    for (std::size_t i = 0; i < n; ++i) {
      out.d_scores[i] += sign * (inv_n - (ds.key(i).has(l) ? inv_l : 0.0));
    }
  }
  return out;
}

PenaltyGrad gf_penalty(std::span<const double> scores, const data::Dataset& ds,
                       double temperature) {
  const std::size_t n = ds.n();
  if (scores.size() != n) throw std::invalid_argument("scores length != dataset size");
  const double dn = static_cast<double>(n);
  std::map<data::SubgroupKey, std::pair<std::size_t, double>> groups;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& [count, sum] = groups[ds.key(i)];
    ++count;
    sum += scores[i];
    mean += scores[i];
  }
  mean /= dn;
  if (groups.size() < 2) throw DataError("GF penalty needs at least two nonempty subgroups");

  struct Cell {
    double weight;  // n_s / n
    double w;       // weighted disparity
    double sign;
    double soft;
  };
  std::map<data::SubgroupKey, Cell> cells;
  double top = -1.0;
  for (const auto& [key, cs] : groups) {
    const double weight = static_cast<double>(cs.first) / dn;
    const double diff = cs.second / static_cast<double>(cs.first) - mean;
    Cell cell{weight, weight * std::abs(diff), diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0), 0.0};
    top = std::max(top, cell.w);
    cells.emplace(key, cell);
  }
  double z = 0.0;
  for (auto& [key, cell] : cells) {
    cell.soft = std::exp(temperature * (cell.w - top));
    z += cell.soft;
  }
  PenaltyGrad out;
  for (auto& [key, cell] : cells) {
    cell.soft /= z;
    out.value += cell.soft * cell.w;
  }
  // dP/dw_s = p_s (1 + tau (w_s - P)); dw_s/df_i = (n_s/n) sign_s (1{i in s}/n_s - 1/n).
  double shared = 0.0;
  std::map<data::SubgroupKey, double> own;
  for (const auto& [key, cell] : cells) {
    const double d_w = cell.soft * (1.0 + temperature * (cell.w - out.value));
    own[key] = d_w * cell.sign / dn;
    shared += d_w * cell.weight * cell.sign / dn;
  }
  out.d_scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.d_scores[i] = own[ds.key(i)] - shared;
  return out;
}

namespace {

// One epoch's fairness term: value for the history and d(value)/d(score_i).
using PenaltyStep = std::function<PenaltyGrad(std::span<const double> scores)>;

void check_finite(std::span<const double> values, std::size_t epoch, const char* what) {
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw NumericalError(std::string("non-finite ") + what + " at epoch " + std::to_string(epoch));
    }
  }
}

std::vector<double> to_logit_grad(std::span<const double> d_scores, std::span<const double> scores,
                                  double scale) {
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = scale * d_scores[i] * scores[i] * (1.0 - scores[i]);
  }
  return out;
}

// Shared loop: theta <- theta - lr (grad CE + lambda grad penalty). With
// lambda == 0 the penalty never touches theta, so every method reduces to the
// same trajectory.
TrainResult run_loop(const data::Dataset& train, const data::Dataset& valid, const TrainConfig& cfg,
                     std::size_t subsets_count, const PenaltyStep& penalty,
                     const std::function<void(TrainResult&)>& snapshot_adversary) {
  cfg.validate();
  auto params = model::init_params({train.d(), train.q(), cfg.hidden, subsets_count}, cfg.seed);
  TrainResult result;
  result.model = params.model;
  result.discriminator = params.discriminator;
  result.weights = params.weights;
  auto& f = params.model;
  auto theta = f.theta();
  auto batch_rng = make_rng(cfg.seed, streams::kBatch);
  std::vector<std::size_t> order(train.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best_acc = -1.0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto pass = model::forward(f, train);
    check_finite(pass.logits, epoch, "logit");
    EpochRecord rec;
    rec.ce = cross_entropy(pass.scores, train.labels());
    const auto pen = penalty(pass.scores);
    rec.penalty = pen.value;
    if (!std::isfinite(rec.ce) || !std::isfinite(rec.penalty)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
    }

    if (cfg.batch == 0 || cfg.batch >= train.n()) {
      auto d_logits = cross_entropy_logit_grad(pass.scores, train.labels());
      if (cfg.lambda != 0.0) {
        const auto fair = to_logit_grad(pen.d_scores, pass.scores, cfg.lambda);
        for (std::size_t i = 0; i < d_logits.size(); ++i) d_logits[i] += fair[i];
      }
      const auto grad = model::backprop_logits(f, train, pass, d_logits);
      check_finite(grad, epoch, "gradient");
      for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.lr_cls * grad[k];
    } else {
      // Fairness term stays full-batch; cross-entropy steps run over shuffled batches.
      if (cfg.lambda != 0.0) {
        const auto fair = to_logit_grad(pen.d_scores, pass.scores, cfg.lambda);
        const auto grad = model::backprop_logits(f, train, pass, fair);
        check_finite(grad, epoch, "gradient");
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.lr_cls * grad[k];
      }
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(order[i], order[pick(batch_rng)]);
      }
      for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
        const std::size_t end = std::min(order.size(), start + cfg.batch);
        const std::span<const std::size_t> rows(order.data() + start, end - start);
        const auto batch = train.select(rows);
        const auto bpass = model::forward(f, batch);
        const auto d_logits = cross_entropy_logit_grad(bpass.scores, batch.labels());
        const auto grad = model::backprop_logits(f, batch, bpass, d_logits);
        check_finite(grad, epoch, "gradient");
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= cfg.lr_cls * grad[k];
      }
    }

    rec.valid_acc = metrics::accuracy(model::predict_scores(f, valid), valid.labels());
    rec.theta_digest = digest(theta);
    result.history.push_back(rec);
    if (rec.valid_acc > best_acc) {
      best_acc = rec.valid_acc;
      result.best_epoch = epoch;
      result.model = f;
      snapshot_adversary(result);
    }
  }
  return result;
}

}  // namespace

TrainResult train_draf(const data::Dataset& train, const data::Dataset& valid,
                       const subsets::SubsetCollection& coll, const TrainConfig& cfg) {
  const auto c = subsets::membership(train, coll);
  auto adversary = model::init_params({train.d(), train.q(), cfg.hidden, coll.size()}, cfg.seed);
  model::Discriminator& g = adversary.discriminator;
  model::WeightVector& v = adversary.weights;
  const auto active = fairness::independent_columns(c);
  v = fairness::uniform_active(active);
  const PenaltyStep step = [&](std::span<const double> scores) {
    for (std::size_t k = 0; k < cfg.adversary_steps; ++k) {
      fairness::ascent_step(scores, c, g, v, cfg.lr_g, cfg.lr_v, cfg.clamp_eps, active);
    }
    auto grad = fairness::z_dr_grad(scores, c, g, v.v, cfg.clamp_eps);
    return PenaltyGrad{grad.z, std::move(grad.d_scores)};
  };
  auto result = run_loop(train, valid, cfg, coll.size(), step, [&](TrainResult& r) {
    r.discriminator = g;
    r.weights = v;
  });
  return result;
}

TrainResult train_reg(const data::Dataset& train, const data::Dataset& valid,
                      const TrainConfig& cfg) {
  std::vector<std::size_t> skipped;
  bool first = true;
  const PenaltyStep step = [&](std::span<const double> scores) {
    auto pen = reg_penalty(scores, train, first ? &skipped : nullptr);
    first = false;
    return pen;
  };
  auto result = run_loop(train, valid, cfg, 1, step, [](TrainResult&) {});
  for (auto l : skipped) {
    result.warnings.push_back("attribute " + std::to_string(l) +
                              " is constant in the training data; REG term skipped");
  }
  return result;
}

TrainResult train_gf(const data::Dataset& train, const data::Dataset& valid,
                     const TrainConfig& cfg) {
  const PenaltyStep step = [&](std::span<const double> scores) {
    return gf_penalty(scores, train, cfg.gf_temperature);
  };
  return run_loop(train, valid, cfg, 1, step, [](TrainResult&) {});
}

TrainResult train_unconstrained(const data::Dataset& train, const data::Dataset& valid,
                                const TrainConfig& cfg) {
  TrainConfig plain = cfg;
  plain.lambda = 0.0;
  return train_reg(train, valid, plain);
}

TrainResult train_model(const data::Dataset& train, const data::Dataset& valid,
                        const TrainConfig& cfg,
                        const std::vector<subsets::SubgroupSubset>& custom) {
  switch (cfg.method) {
    case Method::draf: {
      const auto coll = subsets::build_collection(train, {cfg.gamma, cfg.orders, custom});
      return train_draf(train, valid, coll, cfg);
    }
    case Method::reg: return train_reg(train, valid, cfg);
    case Method::gf: return train_gf(train, valid, cfg);
    case Method::none: return train_unconstrained(train, valid, cfg);
  }
  throw std::invalid_argument("unknown method");
}

}  // namespace draf::train
