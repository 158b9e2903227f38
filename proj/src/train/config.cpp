#include "draf/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "draf/error.hpp"

namespace draf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("");
    auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  return out.str();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"method", [](RunConfig& c, auto&, auto& v) { c.train.method = train::parse_method(v); }},
      {"lambda", [](RunConfig& c, auto& k, auto& v) { c.train.lambda = to_double(k, v); }},
      {"lr_cls", [](RunConfig& c, auto& k, auto& v) { c.train.lr_cls = to_double(k, v); }},
      {"lr_g", [](RunConfig& c, auto& k, auto& v) { c.train.lr_g = to_double(k, v); }},
      {"lr_v", [](RunConfig& c, auto& k, auto& v) { c.train.lr_v = to_double(k, v); }},
      {"epochs", [](RunConfig& c, auto& k, auto& v) { c.train.epochs = to_uint(k, v); }},
      {"batch", [](RunConfig& c, auto& k, auto& v) { c.train.batch = to_uint(k, v); }},
      {"hidden", [](RunConfig& c, auto& k, auto& v) { c.train.hidden = to_uint(k, v); }},
      {"gamma", [](RunConfig& c, auto& k, auto& v) {
         c.train.gamma = to_double(k, v);
         c.eval.collection.gamma = c.train.gamma;
       }},
      {"orders", [](RunConfig& c, auto& k, auto& v) {
         std::set<int> orders;
         for (const auto& o : split_list(v)) orders.insert(static_cast<int>(to_uint(k, o)));
         c.train.orders = orders;
         c.eval.collection.orders = orders;
       }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.train.seed = to_uint(k, v); }},
      {"gf_temperature", [](RunConfig& c, auto& k, auto& v) { c.train.gf_temperature = to_double(k, v); }},
      {"clamp_eps", [](RunConfig& c, auto& k, auto& v) {
         c.train.clamp_eps = to_double(k, v);
         c.eval.gap.clamp_eps = c.train.clamp_eps;
       }},
      {"adversary_steps", [](RunConfig& c, auto& k, auto& v) { c.train.adversary_steps = to_uint(k, v); }},
      {"data", [](RunConfig& c, auto&, auto& v) { c.data_path = v; }},
      {"subsets", [](RunConfig& c, auto&, auto& v) { c.subsets_path = v; }},
      {"train_frac", [](RunConfig& c, auto& k, auto& v) { c.split.train_frac = to_double(k, v); }},
      {"valid_frac", [](RunConfig& c, auto& k, auto& v) { c.split.valid_frac = to_double(k, v); }},
      {"test_frac", [](RunConfig& c, auto& k, auto& v) { c.split.test_frac = to_double(k, v); }},
      {"split_seed", [](RunConfig& c, auto& k, auto& v) { c.split.seed = to_uint(k, v); }},
      {"gen_n", [](RunConfig& c, auto& k, auto& v) { c.generator.n = to_uint(k, v); }},
      {"gen_d", [](RunConfig& c, auto& k, auto& v) { c.generator.d = to_uint(k, v); }},
      {"gen_q", [](RunConfig& c, auto& k, auto& v) { c.generator.q = to_uint(k, v); }},
      {"gen_mu", [](RunConfig& c, auto& k, auto& v) { c.generator.mu = to_double(k, v); }},
      {"gen_noise", [](RunConfig& c, auto& k, auto& v) { c.generator.noise = to_double(k, v); }},
      {"gen_seed", [](RunConfig& c, auto& k, auto& v) { c.generator.seed = to_uint(k, v); }},
      {"gen_aligned_weight", [](RunConfig& c, auto& k, auto& v) { c.generator.aligned_weight = to_double(k, v); }},
      {"gen_free_weight", [](RunConfig& c, auto& k, auto& v) { c.generator.free_weight = to_double(k, v); }},
      {"eval_steps", [](RunConfig& c, auto& k, auto& v) { c.eval.gap.steps = to_uint(k, v); }},
      {"eval_lr_g", [](RunConfig& c, auto& k, auto& v) { c.eval.gap.lr_g = to_double(k, v); }},
      {"eval_lr_v", [](RunConfig& c, auto& k, auto& v) { c.eval.gap.lr_v = to_double(k, v); }},
      {"eval_restarts", [](RunConfig& c, auto& k, auto& v) { c.eval.gap.restarts = to_uint(k, v); }},
      {"eval_seed", [](RunConfig& c, auto& k, auto& v) { c.eval.gap.seed = to_uint(k, v); }},
      {"grid_a_min", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.a_min = to_double(k, v); }},
      {"grid_a_max", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.a_max = to_double(k, v); }},
      {"grid_b_min", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.b_min = to_double(k, v); }},
      {"grid_b_max", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.b_max = to_double(k, v); }},
      {"grid_a_steps", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.a_steps = to_uint(k, v); }},
      {"grid_b_steps", [](RunConfig& c, auto& k, auto& v) { c.eval.grid.b_steps = to_uint(k, v); }},
      {"lambdas", [](RunConfig& c, auto& k, auto& v) {
         c.lambdas.clear();
         for (const auto& x : split_list(v)) c.lambdas.push_back(to_double(k, x));
       }},
      {"seeds", [](RunConfig& c, auto& k, auto& v) {
         c.seeds.clear();
         for (const auto& x : split_list(v)) c.seeds.push_back(to_uint(k, x));
       }},
      {"gammas", [](RunConfig& c, auto& k, auto& v) {
         c.gammas.clear();
         for (const auto& x : split_list(v)) c.gammas.push_back(to_double(k, x));
       }},
      {"workers", [](RunConfig& c, auto& k, auto& v) { c.workers = to_uint(k, v); }},
  };
  return table;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument("unknown config key '" + key + "'");
  it->second(*this, key, value);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << std::setprecision(17);
  std::vector<int> orders(train.orders.begin(), train.orders.end());
  out << "method = " << train::to_string(train.method) << '\n'
      << "lambda = " << train.lambda << '\n'
      << "lr_cls = " << train.lr_cls << '\n'
      << "lr_g = " << train.lr_g << '\n'
      << "lr_v = " << train.lr_v << '\n'
      << "epochs = " << train.epochs << '\n'
      << "batch = " << train.batch << '\n'
      << "hidden = " << train.hidden << '\n'
      << "gamma = " << train.gamma << '\n'
      << "orders = " << join(orders) << '\n'
      << "seed = " << train.seed << '\n'
      << "gf_temperature = " << train.gf_temperature << '\n'
      << "clamp_eps = " << train.clamp_eps << '\n'
      << "adversary_steps = " << train.adversary_steps << '\n'
      << "data = " << data_path << '\n'
      << "subsets = " << subsets_path << '\n'
      << "train_frac = " << split.train_frac << '\n'
      << "valid_frac = " << split.valid_frac << '\n'
      << "test_frac = " << split.test_frac << '\n'
      << "split_seed = " << split.seed << '\n'
      << "gen_n = " << generator.n << '\n'
      << "gen_d = " << generator.d << '\n'
      << "gen_q = " << generator.q << '\n'
      << "gen_mu = " << generator.mu << '\n'
      << "gen_noise = " << generator.noise << '\n'
      << "gen_seed = " << generator.seed << '\n'
      << "gen_aligned_weight = " << generator.aligned_weight << '\n'
      << "gen_free_weight = " << generator.free_weight << '\n'
      << "eval_steps = " << eval.gap.steps << '\n'
      << "eval_lr_g = " << eval.gap.lr_g << '\n'
      << "eval_lr_v = " << eval.gap.lr_v << '\n'
      << "eval_restarts = " << eval.gap.restarts << '\n'
      << "eval_seed = " << eval.gap.seed << '\n'
      << "grid_a_min = " << eval.grid.a_min << '\n'
      << "grid_a_max = " << eval.grid.a_max << '\n'
      << "grid_b_min = " << eval.grid.b_min << '\n'
      << "grid_b_max = " << eval.grid.b_max << '\n'
      << "grid_a_steps = " << eval.grid.a_steps << '\n'
      << "grid_b_steps = " << eval.grid.b_steps << '\n'
      << "lambdas = " << join(lambdas) << '\n'
      << "seeds = " << join(seeds) << '\n'
      << "gammas = " << join(gammas) << '\n'
      << "workers = " << workers << '\n';
  return out.str();
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

}  // namespace draf
