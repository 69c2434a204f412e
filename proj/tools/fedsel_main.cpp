// fedsel: run client-selection experiments on the simulated FL market.
//
//   fedsel --algo mahdrl --seed 0 --seed 1 --out runs/mahdrl
//   fedsel --config exp.json --algo hqfa --episodes 50
//   fedsel --sweep budget=10,15,20 --out runs/budget

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsel/harness/config.hpp"
#include "fedsel/harness/runner.hpp"

namespace {

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  fedsel::harness::tune_allocator();
  CLI::App app{"Multi-service federated-learning client market: MAHDRL and baselines"};

  std::string config_path;
  std::string algo;
  int episodes = 0;
  int steps = 0;
  std::vector<std::uint64_t> seeds;
  std::string oracle;
  std::string oracle_command;
  std::string out;
  std::string checkpoint;
  std::string sweep;
  double budget = 0.0;
  int cores = 0;
  bool trajectory = false;
  bool dump = false;

  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--algo", algo, "mahdrl | lcfa | hqfa | random")
      ->check(CLI::IsMember({"mahdrl", "lcfa", "hqfa", "random"}));
  app.add_option("--episodes", episodes, "episodes per seed")->check(CLI::PositiveNumber);
  app.add_option("--steps", steps, "slots per episode")->check(CLI::PositiveNumber);
  app.add_option("--seed", seeds, "seed (repeatable)")->take_all();
  app.add_option("--oracle", oracle, "surrogate | external")
      ->check(CLI::IsMember({"surrogate", "external"}));
  app.add_option("--oracle-command", oracle_command, "command that starts the external oracle");
  app.add_option("--out", out, "output directory");
  app.add_option("--checkpoint", checkpoint, "checkpoint directory (mahdrl)");
  app.add_option("--budget", budget, "per-slot budget for every service")->check(CLI::PositiveNumber);
  app.add_option("--cores", cores, "cores per client (K)")->check(CLI::PositiveNumber);
  app.add_option("--sweep", sweep, "sensitivity sweep, e.g. budget=10,15,20 or cores=1,2,3");
  app.add_flag("--trajectory", trajectory, "also write per-slot trajectory logs");
  app.add_flag("--dump-config", dump, "print the effective config and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    fedsel::harness::ExperimentConfig config;
    if (!config_path.empty()) config = fedsel::harness::load_config(config_path);
    if (!algo.empty()) config.algorithm = fedsel::harness::parse_algorithm(algo);
    if (episodes > 0) config.episodes = episodes;
    if (steps > 0) config.market.horizon = steps;
    if (!seeds.empty()) config.seeds = seeds;
    if (!oracle.empty()) config.oracle = fedsel::harness::parse_oracle(oracle);
    if (!oracle_command.empty()) config.oracle_command = oracle_command;
    if (!out.empty()) config.output_dir = out;
    if (!checkpoint.empty()) config.checkpoint = checkpoint;
    if (budget > 0.0) config.set_budget(budget);
    if (cores > 0) config.set_cores(cores);
    if (trajectory) config.log_trajectory = true;
    config.validate();

    if (dump) {
      std::cout << fedsel::harness::dump_config(config);
      return 0;
    }

    if (!sweep.empty()) {
      const auto eq = sweep.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("--sweep expects PARAM=v1,v2,...");
      const auto parameter = fedsel::harness::parse_sweep_parameter(sweep.substr(0, eq));
      const auto result =
          fedsel::harness::sensitivity_sweep(config, parameter, parse_values(sweep.substr(eq + 1)));
      std::cout << result.table_file.string() << '\n';
      return 0;
    }

    std::cout << fedsel::harness::run(config).string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "fedsel: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
