#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "draf/data.hpp"
#include "draf/subsets.hpp"

namespace draf::model {

/// One-hidden-layer ReLU network on the concatenated input (x_i, s_i) with a
/// sigmoid output. Parameters live in one flat vector laid out as
/// [W1 (hidden x input, row-major) | b1 | w2 | b2].
class PredictionModel {
 public:
  PredictionModel() = default;
  PredictionModel(std::size_t input_dim, std::size_t hidden);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t parameter_count() const { return theta_.size(); }

  std::span<double> theta() { return theta_; }
  std::span<const double> theta() const { return theta_; }

  double w1(std::size_t unit, std::size_t in) const { return theta_[unit * input_dim_ + in]; }
  double b1(std::size_t unit) const { return theta_[hidden_ * input_dim_ + unit]; }
  double w2(std::size_t unit) const { return theta_[hidden_ * (input_dim_ + 1) + unit]; }
  double b2() const { return theta_.back(); }

  std::size_t b1_offset() const { return hidden_ * input_dim_; }
  std::size_t w2_offset() const { return hidden_ * (input_dim_ + 1); }
  std::size_t b2_offset() const { return theta_.size() - 1; }

  bool operator==(const PredictionModel&) const = default;

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> theta_;
};

/// g(z) = sigmoid(scale * z + offset); bounded in (0, 1).
struct Discriminator {
  double scale = 1.0;
  double offset = 0.0;

  double operator()(double z) const;
  bool operator==(const Discriminator&) const = default;
};

/// Point on the unit sphere S^M.
struct WeightVector {
  std::vector<double> v;

  std::size_t size() const { return v.size(); }
  bool operator==(const WeightVector&) const = default;
};

struct GradientBundle {
  std::vector<double> d_theta;
  double d_scale = 0.0;
  double d_offset = 0.0;
  std::vector<double> d_v;
};

double sigmoid(double z);

/// Hidden activations (n x hidden), logits and scores of one forward pass.
struct ForwardPass {
  std::vector<double> hidden;
  std::vector<double> logits;
  std::vector<double> scores;
};

/// Throws std::invalid_argument when d + q differs from the model input width.
ForwardPass forward(const PredictionModel& f, const data::Dataset& ds);
std::vector<double> predict_scores(const PredictionModel& f, const data::Dataset& ds);

/// Accumulates d(objective)/d(theta) given d(objective)/d(logit_i).
std::vector<double> backprop_logits(const PredictionModel& f, const data::Dataset& ds,
                                    const ForwardPass& pass, std::span<const double> d_logits);

std::vector<double> discriminate(const Discriminator& g, std::span<const double> scores);

struct Dims {
  std::size_t d = 1;
  std::size_t q = 1;
  std::size_t hidden = 64;
  std::size_t subsets = 1;
};

struct Parameters {
  PredictionModel model;
  Discriminator discriminator;
  WeightVector weights;

  bool operator==(const Parameters&) const = default;
};

/// theta ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)); phi = (1, 0); v uniform.
Parameters init_params(const Dims& dims, std::uint64_t seed);

/// v / |v|, or the uniform point when |v| <= 1e-12.
WeightVector project_sphere(std::span<const double> v);
WeightVector uniform_weights(std::size_t m);

enum class ObjectiveKind { classification, dr_squared, z_dr, combined };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::classification;
  double lambda = 0.0;     // combined: CE + lambda * z-DR^2
  double clamp_eps = 1e-6;
};

/// Scalar value of the selected objective at (f, g, v).
double objective_value(const PredictionModel& f, const Discriminator& g, const WeightVector& v,
                       const data::Dataset& ds, const subsets::MembershipMatrix& c,
                       const Objective& objective);

/// Analytic gradients of the selected objective; throws NumericalError on a
/// non-finite intermediate.
GradientBundle backward(const PredictionModel& f, const Discriminator& g, const WeightVector& v,
                        const data::Dataset& ds, const subsets::MembershipMatrix& c,
                        const Objective& objective);

/// Text checkpoint: "d,q,h,M" header, then theta, scale, offset and v, one
/// value per line with 17 significant digits.
struct Checkpoint {
  std::size_t d = 0;
  std::size_t q = 0;
  Parameters params;

  bool operator==(const Checkpoint&) const = default;
};

std::string to_text(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace draf::model
