#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "draf/data.hpp"

namespace draf::subsets {

enum class SubsetKind { active_subgroup, marginal_order1, marginal_order2, custom };

std::string to_string(SubsetKind kind);

/// A union of subgroups W; fairness is compared between W and its complement.
struct SubgroupSubset {
  std::vector<data::SubgroupKey> members;  // sorted, unique (realised keys for marginals)
  SubsetKind kind = SubsetKind::custom;
  // Marginal subsets match by rule, (bits & mask) == value, so they transfer
  // to samples containing keys unseen at build time.
  std::optional<std::pair<std::uint32_t, std::uint32_t>> pattern;
  std::size_t count = 0;                   // in-sample rows with s in members
  std::string label;

  bool contains(data::SubgroupKey key) const;
};

struct SubsetCollection {
  std::vector<SubgroupSubset> subsets;
  std::size_t n = 0;      // sample size the collection was built on
  std::size_t n_min = 0;  // min over m of min(n_W, n - n_W)
  double gamma = 0.0;

  std::size_t size() const { return subsets.size(); }
};

struct BuildOptions {
  double gamma = 0.0;
  std::set<int> orders = {1};
  std::vector<SubgroupSubset> custom;
};

/// Marginal order-1 subsets first, then order-2, then active singletons by
/// descending size, then custom. Equal or complementary membership vectors
/// keep the first occurrence. Throws DataError when nothing survives.
SubsetCollection build_collection(const data::Dataset& ds, const BuildOptions& options);

/// Re-counts an existing collection on another sample and drops subsets that
/// are constant there.
SubsetCollection restrict_to(const SubsetCollection& coll, const data::Dataset& ds);

/// C[i][m] = +1 if s_i is in W_m, -1 otherwise. Row-major n x M.
class MembershipMatrix {
 public:
  MembershipMatrix() = default;
  MembershipMatrix(std::vector<std::int8_t> entries, std::size_t n, std::size_t m);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return m_; }
  std::int8_t operator()(std::size_t i, std::size_t m) const { return entries_[i * m_ + m]; }
  std::span<const std::int8_t> row(std::size_t i) const { return {entries_.data() + i * m_, m_}; }
  const std::vector<double>& column_means() const { return means_; }
  /// Number of +1 entries in column m.
  std::size_t positives(std::size_t m) const { return positives_[m]; }
  std::vector<double> column(std::size_t m) const;

 private:
  std::vector<std::int8_t> entries_;
  std::vector<double> means_;
  std::vector<std::size_t> positives_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
};

/// Throws std::logic_error on a constant column.
MembershipMatrix membership(const data::Dataset& ds, const SubsetCollection& coll);

std::string collection_report(const SubsetCollection& coll);

/// One subset per line, comma-separated subgroup bitmasks.
std::vector<SubgroupSubset> load_custom_subsets(const std::filesystem::path& path);
std::vector<SubgroupSubset> parse_custom_subsets(const std::string& text);

}  // namespace draf::subsets
