#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <cmath>
#include <sstream>

#include "draf/cli.hpp"
#include "draf/config.hpp"
#include "draf/error.hpp"
#include "draf/oracle.hpp"
#include "draf/rng.hpp"

namespace draf::cli {
namespace fs = std::filesystem;
namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // flag name -> raw text
  std::string checkpoint;
  std::string fixed_scores;
  std::string split = "test";
  std::string metrics;
  std::string suite = "all";
  std::size_t trials = 1000;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path.string());
  f << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Flags that map straight onto config keys; `sweep_key` applies to the sweep
// verb, where single values become one-element grids.
struct FlagKey {
  const char* flag;
  const char* key;
  const char* sweep_key;
  const char* help;
};

constexpr FlagKey kFlagKeys[] = {
    {"--seed", "seed", "seeds", "training seed (sweep: comma list of seeds)"},
    {"--method", "method", "method", "draf | reg | gf | none"},
    {"--lambda", "lambda", "lambdas", "fairness multiplier (sweep: comma list)"},
    {"--gamma", "gamma", "gammas", "admission fraction (sweep: comma list)"},
    {"--orders", "orders", "orders", "marginal orders, e.g. 1,2"},
    {"--epochs", "epochs", "epochs", "training epochs"},
    {"--workers", "workers", "workers", "sweep worker threads (0 = all)"},
    {"--n", "gen_n", "gen_n", "generator sample size"},
    {"--q", "gen_q", "gen_q", "generator attribute count"},
    {"--mu", "gen_mu", "gen_mu", "generator separation"},
    {"--data", "data", "data", "dataset CSV (default: generate)"},
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "key = value config file");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--set", flags.sets, "config override key=value (repeatable)");
  for (const auto& fk : kFlagKeys) cmd->add_option(fk.flag, flags.values[fk.flag], fk.help);
}

RunConfig resolve(const CLI::App* cmd, const Flags& flags, const std::string& verb) {
  RunConfig rc;
  if (!flags.config.empty()) rc = load_config(flags.config);
  for (const auto& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    rc.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& fk : kFlagKeys) {
    if (cmd->count(fk.flag) == 0) continue;
    std::string key = verb == "sweep" ? fk.sweep_key : fk.key;
    if (verb == "generate" && std::string(fk.flag) == "--seed") key = "gen_seed";
    rc.set(key, flags.values.at(fk.flag));
  }
  return rc;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::invalid_argument("output directory not writable: " + dir);
  return dir;
}

data::Dataset load_dataset(const RunConfig& rc) {
  if (!rc.data_path.empty()) return data::load_csv(rc.data_path);
  return data::generate_gerrymandered(rc.generator);
}

std::vector<subsets::SubgroupSubset> custom_subsets(const RunConfig& rc) {
  if (rc.subsets_path.empty()) return {};
  return subsets::load_custom_subsets(rc.subsets_path);
}

train::SplitName parse_split(const std::string& s) {
  if (s == "train") return train::SplitName::train;
  if (s == "valid") return train::SplitName::valid;
  if (s == "test") return train::SplitName::test;
  throw std::invalid_argument("--split must be train, valid or test");
}

std::string short_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int do_generate(const RunConfig& rc, const fs::path& out_dir, std::ostream& out) {
  const auto ds = data::generate_gerrymandered(rc.generator);
  data::save_csv(ds, out_dir / "data.csv");
  out << "wrote " << ds.n() << " rows to " << (out_dir / "data.csv").string() << '\n';
  return exit_code::kOk;
}

int do_train(const RunConfig& rc, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(rc);
  const auto splits = data::split(ds, rc.split);
  const auto result = train::train_model(splits.train, splits.valid, rc.train, custom_subsets(rc));
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  const model::Checkpoint ckpt{ds.d(), ds.q(), {result.model, result.discriminator, result.weights}};
  model::save_checkpoint(ckpt, out_dir / "checkpoint.txt");

  std::string csv = std::string(train::kMetricsHeader) + '\n';
  const std::pair<train::SplitName, const data::Dataset*> parts[] = {
      {train::SplitName::train, &splits.train},
      {train::SplitName::valid, &splits.valid},
      {train::SplitName::test, &splits.test}};
  for (const auto& [name, part] : parts) {
    const auto report = metrics::evaluate_model(result.model, *part, rc.eval);
    csv += train::metrics_row(rc.train.method, rc.train.lambda, rc.train.gamma, rc.train.seed, name,
                              report) + '\n';
  }
  write_file(out_dir / "metrics.csv", csv);

  std::string history = "epoch,ce,penalty,valid_acc\n";
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    const auto& h = result.history[e];
    history += std::to_string(e) + ',' + format_double(h.ce) + ',' + format_double(h.penalty) + ',' +
               format_double(h.valid_acc) + '\n';
  }
  write_file(out_dir / "history.csv", history);
  out << "best epoch " << result.best_epoch << " (valid acc "
      << result.history[result.best_epoch].valid_acc << ")\n"
      << csv;
  return exit_code::kOk;
}

std::vector<double> read_scores(const fs::path& path, std::size_t n) {
  std::istringstream in(read_file(path));
  std::vector<double> scores;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const double x = std::stod(line, &used);
      if (used != line.size()) throw std::invalid_argument("trailing text");
      if (!(x >= 0.0 && x <= 1.0)) throw DataError("score outside [0, 1]: " + line);
      scores.push_back(x);
    } catch (const std::logic_error&) {
      if (!first) throw DataError("bad score line: " + line);  // only a header may be non-numeric
    }
    first = false;
  }
  if (scores.size() != n) {
    throw DataError("fixed scores: " + std::to_string(scores.size()) + " values for " +
                    std::to_string(n) + " rows");
  }
  return scores;
}

int do_evaluate(const RunConfig& rc, const Flags& flags, const fs::path& out_dir,
                std::ostream& out) {
  if (flags.checkpoint.empty() == flags.fixed_scores.empty()) {
    throw std::invalid_argument("evaluate needs exactly one of --checkpoint or --fixed-scores");
  }
  const auto ds = load_dataset(rc);
  std::vector<double> scores;
  if (!flags.fixed_scores.empty()) {
    scores = read_scores(flags.fixed_scores, ds.n());
  } else {
    const auto ckpt = model::load_checkpoint(flags.checkpoint);
    if (ckpt.d != ds.d() || ckpt.q != ds.q()) {
      throw DataError("checkpoint dims d=" + std::to_string(ckpt.d) + ", q=" + std::to_string(ckpt.q) +
                      " do not match dataset d=" + std::to_string(ds.d()) + ", q=" +
                      std::to_string(ds.q()));
    }
    scores = model::predict_scores(ckpt.params.model, ds);
  }
  const auto report = metrics::evaluate_scores(scores, ds, rc.eval);
  const auto row = train::metrics_row(rc.train.method, rc.train.lambda, rc.train.gamma, rc.train.seed,
                                      parse_split(flags.split), report);
  write_file(out_dir / "evaluate.csv", std::string(train::kMetricsHeader) + '\n' + row + '\n');
  out << train::kMetricsHeader << '\n' << row << '\n';
  return exit_code::kOk;
}

std::string pareto_csv(std::span<const train::SweepEntry> entries) {
  std::map<std::pair<std::string, double>, std::vector<metrics::ParetoPoint>> groups;
  for (const auto& e : entries) {
    if (e.failed) continue;
    const auto& test = e.reports[2];
    groups[{train::to_string(e.method), e.gamma}].push_back({test.sp, test.acc});
  }
  std::string csv = "method,gamma,fairness,acc\n";
  for (const auto& [key, points] : groups) {
    for (const auto& p : metrics::pareto_front(points)) {
      csv += key.first + ',' + format_double(key.second) + ',' + format_double(p.fairness) + ',' +
             format_double(p.acc) + '\n';
    }
  }
  return csv;
}

int do_sweep(const RunConfig& rc, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const auto ds = load_dataset(rc);
  const auto splits = data::split(ds, rc.split);
  data::save_csv(splits.train, out_dir / "train.csv");
  data::save_csv(splits.valid, out_dir / "valid.csv");
  data::save_csv(splits.test, out_dir / "test.csv");
  const auto custom = custom_subsets(rc);

  std::vector<double> gammas = rc.gammas;
  if (gammas.empty()) gammas.push_back(rc.train.gamma);
  std::vector<train::SweepEntry> all;
  for (double gamma : gammas) {
    auto base = rc.train;
    base.gamma = gamma;
    auto entries = train::sweep_lambda(splits, base, rc.lambdas, rc.seeds, rc.eval, rc.workers, custom);
    all.insert(all.end(), std::make_move_iterator(entries.begin()),
               std::make_move_iterator(entries.end()));
  }

  const fs::path ckpt_dir = out_dir / "checkpoints";
  fs::create_directories(ckpt_dir);
  std::size_t failed = 0;
  for (const auto& e : all) {
    if (e.failed) {
      ++failed;
      err << "run failed: method=" << train::to_string(e.method) << " lambda=" << e.lambda
          << " gamma=" << e.gamma << " seed=" << e.seed << ": " << e.error << '\n';
      continue;
    }
    const std::string name = train::to_string(e.method) + "_l" + short_double(e.lambda) + "_g" +
                             short_double(e.gamma) + "_s" + std::to_string(e.seed) + ".txt";
    model::save_checkpoint(e.checkpoint, ckpt_dir / name);
  }
  write_file(out_dir / "metrics.csv", train::metrics_csv(all));
  write_file(out_dir / "pareto.csv", pareto_csv(all));
  out << all.size() << " runs, " << failed << " failed; metrics in "
      << (out_dir / "metrics.csv").string() << '\n';
  return failed == all.size() ? exit_code::kNumerical : exit_code::kOk;
}

int do_select_gamma(const RunConfig& rc, const Flags& flags, const fs::path& out_dir,
                    std::ostream& out) {
  const fs::path path = flags.metrics.empty() ? out_dir / "metrics.csv" : fs::path(flags.metrics);
  const auto rows = train::parse_metrics_csv(read_file(path));
  const std::string method = train::to_string(rc.train.method);
  std::map<double, std::vector<metrics::ParetoPoint>> sweeps;
  for (const auto& r : rows) {
    if (r.method != method || r.split != flags.split) continue;
    if (std::isnan(r.sp) || std::isnan(r.acc)) continue;
    sweeps[r.gamma].push_back({r.sp, r.acc});
  }
  if (sweeps.empty()) throw DataError("no " + method + " rows on split " + flags.split + " in " + path.string());
  const double chosen = train::select_gamma(sweeps);
  std::string csv = "gamma,area,selected\n";
  for (const auto& [gamma, points] : sweeps) {
    const auto front = metrics::pareto_front(points);
    csv += format_double(gamma) + ',' + format_double(train::front_area(front)) + ',' +
           (gamma == chosen ? "1" : "0") + '\n';
  }
  write_file(out_dir / "gamma_selection.csv", csv);
  out << csv << "selected gamma = " << chosen << '\n';
  return exit_code::kOk;
}

std::vector<oracle::OracleReport> run_oracles(const RunConfig& rc, const Flags& flags) {
  const std::string& suite = flags.suite;
  const bool all = suite == "all";
  if (!all && suite != "identities" && suite != "bound" && suite != "gradients" && suite != "scaling") {
    throw std::invalid_argument("--suite must be identities, bound, gradients, scaling or all");
  }
  const std::uint64_t seed = rc.train.seed;
  std::vector<oracle::OracleReport> reports;
  if (all || suite == "identities") {
    reports.push_back(oracle::verify_identity_suite(flags.trials, seed));
  }
  if (all || suite == "bound") {
    // Random small gerrymandered instances with random scores.
    oracle::OracleReport merged{"ipm_bound", 0.0, 1e-9, 0, 0, true, ""};
    const std::size_t count = std::max<std::size_t>(1, std::min<std::size_t>(flags.trials, 50));
    fairness::Grid grid{-50.0, 50.0, -50.0, 50.0, 21, 21};
    for (std::size_t t = 0; t < count; ++t) {
      data::GerrymanderSpec spec;
      spec.n = 64;
      spec.q = 3;
      spec.d = 2;
      spec.seed = mix_seed(seed, t);
      const auto ds = data::generate_gerrymandered(spec);
      auto rng = make_rng(seed, 500 + t);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> scores(ds.n());
      for (double& s : scores) s = u(rng);
      const auto coll = subsets::build_collection(ds, {0.05, {1, 2}, {}});
      const auto check = oracle::verify_ipm_bound(scores, subsets::membership(ds, coll), grid);
      merged.max_abs_err = std::max(merged.max_abs_err, check.report.max_abs_err);
      merged.instances += 1;
    }
    oracle::finalize(merged);
    merged.detail = std::to_string(count) + " random instances, 21x21 grid";
    reports.push_back(merged);
  }
  if (all || suite == "gradients") {
    const std::size_t count = std::max<std::size_t>(1, std::min<std::size_t>(flags.trials, 100));
    const char* names[] = {"fd_ce", "fd_dr2", "fd_zdr2"};
    for (int kind = 0; kind < 3; ++kind) {
      oracle::OracleReport merged{names[kind], 0.0, 1e-4, 0, 0, true, ""};
      for (std::size_t t = 0; t < count; ++t) {
        const auto inst = oracle::make_fd_instance(16, 2, 2, 6, mix_seed(seed, t));
        const auto r = oracle::finite_diff_check({static_cast<model::ObjectiveKind>(kind), 0.0, 1e-6}, inst);
        merged.max_abs_err = std::max(merged.max_abs_err, r.max_abs_err);
        merged.instances += 1;
      }
      oracle::finalize(merged);
      merged.detail = std::to_string(count) + " random instances";
      reports.push_back(merged);
    }
  }
  if (all || suite == "scaling") {
    oracle::GapScalingConfig cfg;
    cfg.seed = seed;
    reports.push_back(oracle::gap_scaling_check(cfg).report);
  }
  return reports;
}

int do_oracle(const RunConfig& rc, const Flags& flags, const fs::path& out_dir, std::ostream& out) {
  const auto reports = run_oracles(rc, flags);
  std::string text;
  bool ok = true;
  for (const auto& r : reports) {
    text += oracle::to_text(r) + '\n';
    ok = ok && r.passed;
  }
  write_file(out_dir / "oracle_report.txt", text);
  write_file(out_dir / "oracle.csv", oracle::reports_csv(reports));
  out << text;
  return ok ? exit_code::kOk : exit_code::kOracle;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Doubly regressing adversarial fairness: data, training, evaluation, oracles"};
  app.require_subcommand(1);
  Flags flags;
  const char* verbs[] = {"generate", "train", "evaluate", "sweep", "select-gamma", "oracle"};
  std::map<std::string, CLI::App*> cmds;
  for (const char* verb : verbs) {
    auto* cmd = app.add_subcommand(verb);
    add_common(cmd, flags);
    cmds[verb] = cmd;
  }
  cmds["generate"]->description("write a synthetic gerrymandered dataset CSV");
  cmds["train"]->description("train one model; writes checkpoint, metrics and history");
  cmds["evaluate"]->description("metrics for a checkpoint or fixed scores on a dataset");
  cmds["sweep"]->description("lambda x seed (x gamma) sweep with checkpoints and Pareto CSV");
  cmds["select-gamma"]->description("pick gamma by Pareto-front area from a sweep metrics CSV");
  cmds["oracle"]->description("run brute-force verification suites");
  cmds["evaluate"]->add_option("--checkpoint", flags.checkpoint, "checkpoint file");
  cmds["evaluate"]->add_option("--fixed-scores", flags.fixed_scores,
                               "one score per line, in dataset row order");
  cmds["evaluate"]->add_option("--split", flags.split, "split label for the output row");
  cmds["select-gamma"]->add_option("--metrics", flags.metrics, "sweep metrics CSV");
  cmds["select-gamma"]->add_option("--split", flags.split, "split used for selection")->default_val("valid");
  cmds["oracle"]->add_option("--suite", flags.suite, "identities | bound | gradients | scaling | all");
  cmds["oracle"]->add_option("--trials", flags.trials, "instances per suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::kOk : exit_code::kUsage;
  }

  std::string verb;
  const CLI::App* cmd = nullptr;
  for (const auto& [name, c] : cmds) {
    if (c->parsed()) {
      verb = name;
      cmd = c;
    }
  }
  try {
    const RunConfig rc = resolve(cmd, flags, verb);
    const fs::path out_dir = prepare_out(flags.out);
    const std::string resolved = rc.to_text();
    write_file(out_dir / (verb + "_config.txt"), resolved);
    out << "# resolved config\n" << resolved;
    if (verb == "generate") return do_generate(rc, out_dir, out);
    if (verb == "train") return do_train(rc, out_dir, out, err);
    if (verb == "evaluate") return do_evaluate(rc, flags, out_dir, out);
    if (verb == "sweep") return do_sweep(rc, out_dir, out, err);
    if (verb == "select-gamma") return do_select_gamma(rc, flags, out_dir, out);
    return do_oracle(rc, flags, out_dir, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return exit_code::kData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return exit_code::kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::kUsage;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace draf::cli
