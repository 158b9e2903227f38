#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "draf/data.hpp"
#include "draf/metrics.hpp"
#include "draf/train.hpp"

namespace draf {

/// Everything a CLI run needs. Text form is `key = value` per line; `#`
/// starts a comment and unknown keys are rejected.
struct RunConfig {
  train::TrainConfig train;
  metrics::EvalOptions eval;
  data::GerrymanderSpec generator;
  data::SplitSpec split;
  std::string data_path;     // empty: use the generator
  std::string subsets_path;  // optional custom subset file
  std::vector<double> lambdas = train::default_lambda_grid();
  std::vector<std::uint64_t> seeds = {0};
  std::vector<double> gammas = {};
  std::size_t workers = 0;

  /// Throws std::invalid_argument on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  std::string to_text() const;
};

RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace draf
