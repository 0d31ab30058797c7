#include "socolab/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "socolab/experiment.hpp"

namespace socolab {

namespace {

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  std::string out_dir;
  std::string format;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "experiment file or manifest")
      ->required();
  cmd->add_option("--seed", o.seed, "master seed override")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--jobs", o.jobs, "parallel run workers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_dir, "output directory override");
  cmd->add_option("--format", o.format, "comma-separated list: csv,svg");
}

ExperimentConfig load_with_overrides(const CommonOpts& o) {
  ExperimentConfig cfg = load_config(o.config_path);
  if (o.seed_set) cfg.master_seed = o.seed;
  if (!o.out_dir.empty()) cfg.output_directory = o.out_dir;
  if (!o.format.empty()) {
    cfg.formats.clear();
    std::string cur;
    for (char c : o.format + ",") {
      if (c == ',') {
        if (!cur.empty()) cfg.formats.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    for (const auto& f : cfg.formats)
      if (f != "csv" && f != "svg")
        throw ConfigError("unknown output format '" + f + "'");
  }
  return cfg;
}

void print_artifacts(const ExperimentArtifacts& art) {
  for (const auto& f : art.files) std::cout << "wrote " << f << "\n";
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"bandit online quadratic optimization lab"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, tune_o;
  CLI::App* run_cmd = app.add_subcommand("run", "regret curves at one horizon");
  add_common(run_cmd, run_o);
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "mean regret across horizons");
  add_common(sweep_cmd, sweep_o);
  CLI::App* tune_cmd =
      app.add_subcommand("tune-c1", "exploration-multiplier line search");
  add_common(tune_cmd, tune_o);

  std::string model_path, estimate_path;
  int rank_hint = 0;
  CLI::App* diag_cmd = app.add_subcommand(
      "diagnose", "spectral error report for a saved estimate");
  diag_cmd->add_option("--model", model_path, "true matrix CSV")->required();
  diag_cmd->add_option("--estimate", estimate_path, "estimate matrix CSV")
      ->required();
  diag_cmd->add_option("--rank", rank_hint, "rank of the true matrix");

  std::vector<std::string> argv_copy = args;
  std::vector<char*> argv;
  argv.reserve(argv_copy.size() + 1);
  static char name[] = "socolab";
  argv.push_back(name);
  for (auto& a : argv_copy) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run_cmd->parsed()) {
      print_artifacts(run_experiment(load_with_overrides(run_o), run_o.jobs));
    } else if (sweep_cmd->parsed()) {
      print_artifacts(
          sweep_experiment(load_with_overrides(sweep_o), sweep_o.jobs));
    } else if (tune_cmd->parsed()) {
      print_artifacts(
          tune_c1_experiment(load_with_overrides(tune_o), tune_o.jobs));
    } else if (diag_cmd->parsed()) {
      std::cout << diagnose_report(model_path, estimate_path, rank_hint);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace socolab
