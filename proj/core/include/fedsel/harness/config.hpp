#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedsel/agents/hybrid_agent.hpp"
#include "fedsel/env/environment.hpp"

namespace fedsel::harness {

enum class Algorithm { kMahdrl, kLcfa, kHqfa, kRandom };
enum class OracleKind { kSurrogate, kExternal };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);
OracleKind parse_oracle(const std::string& name);
std::string oracle_name(OracleKind kind);

struct ExperimentConfig {
  env::MarketConfig market = env::MarketConfig::defaults();
  agents::AgentConfig agent;
  Algorithm algorithm = Algorithm::kMahdrl;
  int episodes = 200;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::filesystem::path output_dir = "out";
  OracleKind oracle = OracleKind::kSurrogate;
  std::string oracle_command;  // shell command launching the external oracle
  int oracle_epochs = 5;
  std::filesystem::path checkpoint;  // directory; empty disables checkpoints
  bool log_trajectory = false;
  int normalize_window = 10;

  int steps() const { return market.horizon; }
  void set_budget(double budget);
  void set_cores(int cores) { market.cores = cores; }

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
  /// Human-readable notes about defaulted values (e.g. borrowed DQI fits).
  std::vector<std::string> warnings() const;
};

/// Parses a JSON config; absent keys keep their defaults. Throws
/// std::runtime_error with the offending key on parse or type errors.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);
/// The effective config, in the same schema load_config reads.
std::string dump_config(const ExperimentConfig& config);

}  // namespace fedsel::harness
