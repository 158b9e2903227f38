#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace draf::data {

inline constexpr std::size_t kMaxAttributes = 30;

/// Sensitive-attribute vector packed into an integer, bit j = attribute j.
struct SubgroupKey {
  std::uint32_t bits = 0;

  bool has(std::size_t attribute) const { return (bits >> attribute) & 1U; }
  auto operator<=>(const SubgroupKey&) const = default;
};

/// Feature matrix X (n x d, row-major), binary sensitive matrix S (n x q)
/// and binary labels. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::vector<std::uint8_t> sensitive,
          std::vector<std::uint8_t> labels, std::size_t d, std::size_t q,
          std::vector<std::string> feature_names = {},
          std::vector<std::string> sensitive_names = {});

  std::size_t n() const { return labels_.size(); }
  std::size_t d() const { return d_; }
  std::size_t q() const { return q_; }

  std::span<const double> features(std::size_t i) const {
    return {features_.data() + i * d_, d_};
  }
  std::span<const std::uint8_t> sensitive(std::size_t i) const {
    return {sensitive_.data() + i * q_, q_};
  }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  SubgroupKey key(std::size_t i) const { return keys_[i]; }
  std::span<const SubgroupKey> keys() const { return keys_; }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& sensitive_names() const { return sensitive_names_; }

  /// Rows `rows` in the given order.
  Dataset select(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<double> features_;
  std::vector<std::uint8_t> sensitive_;
  std::vector<std::uint8_t> labels_;
  std::vector<SubgroupKey> keys_;
  std::size_t d_ = 0;
  std::size_t q_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> sensitive_names_;
};

/// Bounds-checked key lookup; throws std::out_of_range.
SubgroupKey subgroup_key(const Dataset& ds, std::size_t i);

/// Nonempty subgroups only; counts sum to n.
std::map<SubgroupKey, std::size_t> subgroup_counts(const Dataset& ds);

/// Reads the `x_*` / `s_*` / `y` CSV layout. Throws DataError.
Dataset load_csv(const std::filesystem::path& path, std::size_t q);
/// Same, with q taken from the number of `s_` columns.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, std::size_t q);
void save_csv(const Dataset& ds, const std::filesystem::path& path);
std::string to_csv(const Dataset& ds);

struct SplitSpec {
  double train_frac = 0.6;
  double valid_frac = 0.2;
  double test_frac = 0.2;
  std::uint64_t seed = 0;
};

struct Splits {
  Dataset train;
  Dataset valid;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> valid_rows;
  std::vector<std::size_t> test_rows;
};

/// Seeded Fisher-Yates shuffle, then contiguous slices (train, valid, test).
/// valid and test sizes are rounded; train takes the remainder.
Splits split(const Dataset& ds, const SplitSpec& spec);

struct GerrymanderSpec {
  std::size_t n = 4000;
  std::size_t d = 4;
  std::size_t q = 4;
  double mu = 2.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
  // Label logit = aligned_weight * x_0 + free_weight * x_1 (x_1 carries no
  // group signal; only used when d >= 2).
  double aligned_weight = 1.0;
  double free_weight = 0.0;
};

/// Synthetic data whose group signal lives on s_0 XOR s_1: every first-order
/// marginal is balanced while the four (s_0, s_1) cells are separated by
/// +-mu along feature 0.
Dataset generate_gerrymandered(const GerrymanderSpec& spec);

}  // namespace draf::data
