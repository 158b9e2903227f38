#include "draf/data.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "draf/error.hpp"

namespace draf::data {

Dataset::Dataset(std::vector<double> features, std::vector<std::uint8_t> sensitive,
                 std::vector<std::uint8_t> labels, std::size_t d, std::size_t q,
                 std::vector<std::string> feature_names,
                 std::vector<std::string> sensitive_names)
    : features_(std::move(features)),
      sensitive_(std::move(sensitive)),
      labels_(std::move(labels)),
      d_(d),
      q_(q),
      feature_names_(std::move(feature_names)),
      sensitive_names_(std::move(sensitive_names)) {
  const std::size_t rows = labels_.size();
  if (rows == 0) throw DataError("dataset must contain at least one row");
  if (d_ == 0) throw DataError("dataset needs at least one feature column");
  if (q_ == 0 || q_ > kMaxAttributes) {
    throw DataError("number of sensitive attributes must be in [1, 30], got " +
                    std::to_string(q_));
  }
  if (features_.size() != rows * d_ || sensitive_.size() != rows * q_) {
    throw DataError("dataset matrices do not match n x d / n x q");
  }
  for (double x : features_) {
    if (!std::isfinite(x)) throw DataError("non-finite feature value");
  }
  for (auto s : sensitive_) {
    if (s > 1) throw DataError("non-binary sensitive attribute");
  }
  for (auto y : labels_) {
    if (y > 1) throw DataError("non-binary label");
  }
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < d_; ++j) feature_names_.push_back("x" + std::to_string(j));
  }
  if (sensitive_names_.empty()) {
    for (std::size_t j = 0; j < q_; ++j) sensitive_names_.push_back("a" + std::to_string(j));
  }
  if (feature_names_.size() != d_ || sensitive_names_.size() != q_) {
    throw DataError("column name count does not match d / q");
  }

  keys_.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    std::uint32_t bits = 0;
    for (std::size_t j = 0; j < q_; ++j) {
      bits |= static_cast<std::uint32_t>(sensitive_[i * q_ + j]) << j;
    }
    keys_[i] = SubgroupKey{bits};
  }
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  std::vector<double> x;
  std::vector<std::uint8_t> s;
  std::vector<std::uint8_t> y;
  x.reserve(rows.size() * d_);
  s.reserve(rows.size() * q_);
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= n()) throw std::out_of_range("row index out of range");
    auto xr = features(r);
    auto sr = sensitive(r);
    x.insert(x.end(), xr.begin(), xr.end());
    s.insert(s.end(), sr.begin(), sr.end());
    y.push_back(labels_[r]);
  }
  return Dataset(std::move(x), std::move(s), std::move(y), d_, q_, feature_names_,
                 sensitive_names_);
}

SubgroupKey subgroup_key(const Dataset& ds, std::size_t i) {
  if (i >= ds.n()) {
    throw std::out_of_range("row " + std::to_string(i) + " out of range for n=" +
                            std::to_string(ds.n()));
  }
  return ds.key(i);
}

std::map<SubgroupKey, std::size_t> subgroup_counts(const Dataset& ds) {
  std::map<SubgroupKey, std::size_t> counts;
  for (auto k : ds.keys()) ++counts[k];
  return counts;
}

}  // namespace draf::data
