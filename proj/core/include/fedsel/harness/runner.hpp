#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fedsel/harness/config.hpp"
#include "fedsel/harness/metrics.hpp"

namespace fedsel::harness {

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;  // episode-major, services in id order
  std::filesystem::path metrics_file;

  /// Reward series of one service, one entry per episode.
  std::vector<double> rewards(int service) const;
  /// Mean end-of-episode accuracy over the last `last` episodes.
  double final_accuracy(int service, int last = 20) const;
};

struct RunResult {
  std::vector<SeedRun> seeds;
  std::filesystem::path summary_file;
};

/// Sees every settled slot of every seed; episode is 0-based.
using StepObserver =
    std::function<void(std::uint64_t seed, int episode, const env::StepResult& step)>;

/// Runs the configured algorithm for every seed, writing
/// metrics_seed<S>.csv per seed (plus losses_seed<S>.csv for mahdrl and
/// trajectory_seed<S>.csv when enabled) and a merged summary.csv.
RunResult run_experiment(const ExperimentConfig& config, const StepObserver& observer = {});

/// Training allocates and frees many mid-sized matrices per update. glibc
/// serves those with mmap by default, which costs more in page faults than
/// the arithmetic; raise the thresholds so the heap keeps them. No-op on
/// other C libraries. Call once at program start.
void tune_allocator();

/// Convenience wrapper returning the summary path.
std::filesystem::path run(const ExperimentConfig& config);

enum class SweepParameter { kBudget, kCores };
SweepParameter parse_sweep_parameter(const std::string& name);

struct SweepRow {
  double value = 0.0;
  int service = 0;
  double median_final_accuracy = 0.0;
  double median_slots_to_target = -1.0;  // over seeds that reached it; -1 if none
  double median_plateau_episode = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::filesystem::path table_file;
};

/// One full run per value (into <out>/sweep_<param>_<value>) and a
/// comparison table <out>/sweep_<param>.csv.
SweepResult sensitivity_sweep(const ExperimentConfig& config, SweepParameter parameter,
                              const std::vector<double>& values);

}  // namespace fedsel::harness
