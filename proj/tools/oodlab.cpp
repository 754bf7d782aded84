#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "oodlab/data.hpp"
#include "oodlab/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

int cmd_run(const std::string& config_path) {
  const auto cfg = oodlab::harness::load_config(config_path);
  const auto report = oodlab::harness::run_experiment(cfg);
  for (const auto& split : report.splits) {
    if (split.record.diverged) {
      std::cerr << "split " << split.seed << ": diverged (non-finite loss)\n";
    }
  }
  std::cout << report.csv_path << "\n";
  return report.any_diverged ? kExitDiverged : 0;
}

int cmd_eval(const std::string& weights_path, const std::string& config_path) {
  const auto cfg = oodlab::harness::load_config(config_path);
  const auto report = oodlab::harness::run_eval(weights_path, cfg);
  std::cout << report.csv_path << "\n";
  return 0;
}

int cmd_gen_fixtures(const std::string& dir) {
  oodlab::data::write_idx_fixtures(dir);
  std::cout << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"out-of-distribution detection laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string weights_path;
  std::string fixtures_dir;

  auto* run = app.add_subcommand("run", "train and evaluate an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();

  auto* eval = app.add_subcommand("eval", "re-score saved weights under a config");
  eval->add_option("weights", weights_path, "weights file from a previous run")
      ->required();
  eval->add_option("config", config_path, "experiment config file")->required();

  auto* gen = app.add_subcommand("gen-fixtures", "emit the hand-built IDX fixtures");
  gen->add_option("dir", fixtures_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (eval->parsed()) return cmd_eval(weights_path, config_path);
    return cmd_gen_fixtures(fixtures_dir);
  } catch (const oodlab::harness::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
