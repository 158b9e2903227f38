#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "draf/error.hpp"
#include "draf/subsets.hpp"

namespace draf::subsets {

std::string to_string(SubsetKind kind) {
  switch (kind) {
    case SubsetKind::active_subgroup: return "active-subgroup";
    case SubsetKind::marginal_order1: return "marginal-order-1";
    case SubsetKind::marginal_order2: return "marginal-order-2";
    case SubsetKind::custom: return "custom";
  }
  return "unknown";
}

bool SubgroupSubset::contains(data::SubgroupKey key) const {
  if (pattern) return (key.bits & pattern->first) == pattern->second;
  return std::binary_search(members.begin(), members.end(), key);
}

namespace {

// Packed membership bits, oriented so that row 0 is "in"; equal strings mean
// equal-or-complementary subsets.
std::string canonical_signature(const std::vector<bool>& in) {
  const bool flip = !in.empty() && !in[0];
  std::string sig((in.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] != flip) sig[i / 8] = static_cast<char>(sig[i / 8] | (1 << (i % 8)));
  }
  return sig;
}

struct Candidate {
  SubgroupSubset subset;
  bool gamma_filtered = true;
};

}  // namespace

SubsetCollection build_collection(const data::Dataset& ds, const BuildOptions& options) {
  if (!(options.gamma >= 0.0 && options.gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  if (options.orders.empty()) throw std::invalid_argument("at least one marginal order is required");
  for (int o : options.orders) {
    if (o != 1 && o != 2) throw std::invalid_argument("marginal orders must be 1 or 2");
  }
  const std::size_t n = ds.n();
  const std::size_t q = ds.q();
  const auto counts = data::subgroup_counts(ds);
  const double threshold = options.gamma * static_cast<double>(n);

  std::vector<Candidate> candidates;
  if (options.orders.contains(1)) {
    for (std::size_t j = 0; j < q; ++j) {
      SubgroupSubset w;
      w.kind = SubsetKind::marginal_order1;
      w.label = ds.sensitive_names()[j] + "=1";
      w.pattern = {1U << j, 1U << j};
      for (const auto& [k, c] : counts) {
        if (k.has(j)) w.members.push_back(k);
      }
      candidates.push_back({std::move(w), false});
    }
  }
  if (options.orders.contains(2)) {
    for (std::size_t j = 0; j < q; ++j) {
      for (std::size_t k = j + 1; k < q; ++k) {
        for (int a = 0; a < 4; ++a) {
          const bool aj = a & 1;
          const bool ak = a & 2;
          SubgroupSubset w;
          w.kind = SubsetKind::marginal_order2;
          w.label = ds.sensitive_names()[j] + "=" + std::to_string(int(aj)) + "," +
                    ds.sensitive_names()[k] + "=" + std::to_string(int(ak));
          const std::uint32_t mask = (1U << j) | (1U << k);
          w.pattern = {mask, (aj ? 1U << j : 0U) | (ak ? 1U << k : 0U)};
          for (const auto& [key, c] : counts) {
            if (key.has(j) == aj && key.has(k) == ak) w.members.push_back(key);
          }
          candidates.push_back({std::move(w), true});
        }
      }
    }
  }
  {
    std::vector<std::pair<data::SubgroupKey, std::size_t>> active(counts.begin(), counts.end());
    std::stable_sort(active.begin(), active.end(),
                     [](const auto& l, const auto& r) { return l.second > r.second; });
    for (const auto& [key, c] : active) {
      SubgroupSubset w;
      w.kind = SubsetKind::active_subgroup;
      w.members = {key};
      w.label = "s=" + std::to_string(key.bits);
      candidates.push_back({std::move(w), true});
    }
  }
  for (auto w : options.custom) {
    std::sort(w.members.begin(), w.members.end());
    w.members.erase(std::unique(w.members.begin(), w.members.end()), w.members.end());
    w.kind = SubsetKind::custom;
    if (w.label.empty()) {
      w.label = "custom{";
      for (std::size_t i = 0; i < w.members.size(); ++i) {
        w.label += (i ? " " : "") + std::to_string(w.members[i].bits);
      }
      w.label += "}";
    }
    candidates.push_back({std::move(w), false});
  }

  SubsetCollection coll;
  coll.n = n;
  coll.gamma = options.gamma;
  std::unordered_set<std::string> seen;
  std::vector<bool> in(n);
  for (auto& cand : candidates) {
    auto& w = cand.subset;
    std::size_t count = 0;
    for (const auto& [key, c] : counts) {
      if (w.contains(key)) count += c;
    }
    w.count = count;
    const std::size_t smaller = std::min(count, n - count);
    if (smaller == 0) continue;
    if (cand.gamma_filtered && static_cast<double>(smaller) < threshold) continue;
    for (std::size_t i = 0; i < n; ++i) in[i] = w.contains(ds.key(i));
    if (!seen.insert(canonical_signature(in)).second) continue;
    coll.subsets.push_back(std::move(w));
  }
  if (coll.subsets.empty()) {
    throw DataError("subset collection is empty after filtering (gamma=" +
                    std::to_string(options.gamma) + ")");
  }
  coll.n_min = n;
  for (const auto& w : coll.subsets) coll.n_min = std::min({coll.n_min, w.count, n - w.count});
  return coll;
}

SubsetCollection restrict_to(const SubsetCollection& coll, const data::Dataset& ds) {
  const auto counts = data::subgroup_counts(ds);
  const std::size_t n = ds.n();
  SubsetCollection out;
  out.n = n;
  out.gamma = coll.gamma;
  out.n_min = n;
  for (auto w : coll.subsets) {
    std::size_t count = 0;
    for (const auto& [key, c] : counts) {
      if (w.contains(key)) count += c;
    }
    if (count == 0 || count == n) continue;
    w.count = count;
    out.n_min = std::min({out.n_min, count, n - count});
    out.subsets.push_back(std::move(w));
  }
  if (out.subsets.empty()) out.n_min = 0;
  return out;
}

MembershipMatrix::MembershipMatrix(std::vector<std::int8_t> entries, std::size_t n, std::size_t m)
    : entries_(std::move(entries)), means_(m, 0.0), positives_(m, 0), n_(n), m_(m) {
  if (entries_.size() != n * m) throw std::invalid_argument("membership matrix shape mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      const auto e = entries_[i * m + c];
      if (e != 1 && e != -1) throw std::invalid_argument("membership entries must be +-1");
      if (e == 1) ++positives_[c];
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    if (positives_[c] == 0 || positives_[c] == n) {
      throw std::logic_error("membership column " + std::to_string(c) + " is constant");
    }
    means_[c] = (2.0 * static_cast<double>(positives_[c]) - static_cast<double>(n)) /
                static_cast<double>(n);
  }
}

std::vector<double> MembershipMatrix::column(std::size_t m) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = entries_[i * m_ + m];
  return out;
}

MembershipMatrix membership(const data::Dataset& ds, const SubsetCollection& coll) {
  const std::size_t n = ds.n();
  const std::size_t m = coll.size();
  std::vector<std::int8_t> entries(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < m; ++c) {
      entries[i * m + c] = coll.subsets[c].contains(ds.key(i)) ? 1 : -1;
    }
  }
  return MembershipMatrix(std::move(entries), n, m);
}

std::string collection_report(const SubsetCollection& coll) {
  std::ostringstream out;
  for (std::size_t m = 0; m < coll.size(); ++m) {
    const auto& w = coll.subsets[m];
    out << m << '\t' << to_string(w.kind) << '\t' << w.label << "\tsize=" << w.count
        << "\tcomplement=" << coll.n - w.count << '\n';
  }
  out << "n_min=" << coll.n_min << '\n';
  return out.str();
}

std::vector<SubgroupSubset> parse_custom_subsets(const std::string& text) {
  std::vector<SubgroupSubset> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    SubgroupSubset w;
    w.kind = SubsetKind::custom;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        std::size_t used = 0;
        const unsigned long bits = std::stoul(field, &used);
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
        if (bits >= (1UL << data::kMaxAttributes)) throw std::out_of_range("");
        w.members.push_back(data::SubgroupKey{static_cast<std::uint32_t>(bits)});
      } catch (const std::exception&) {
        throw DataError("subset file line " + std::to_string(line_no) + ": bad bitmask '" +
                        field + "'");
      }
    }
    std::sort(w.members.begin(), w.members.end());
    w.members.erase(std::unique(w.members.begin(), w.members.end()), w.members.end());
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<SubgroupSubset> load_custom_subsets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_custom_subsets(buf.str());
}

}  // namespace draf::subsets
