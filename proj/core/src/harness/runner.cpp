#include "fedsel/harness/runner.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>

#include "fedsel/agents/trainer.hpp"
#include "fedsel/baselines/baselines.hpp"
#include "fedsel/env/episode.hpp"
#include "fedsel/env/external_oracle.hpp"
#include "fedsel/seeding.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace fedsel::harness {

namespace fs = std::filesystem;

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

std::vector<double> SeedRun::rewards(int service) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.service == service) out.push_back(r.reward);
  }
  return out;
}

double SeedRun::final_accuracy(int service, int last) const {
  std::vector<double> acc;
  for (const auto& r : rows) {
    if (r.service == service) acc.push_back(r.final_accuracy);
  }
  if (acc.empty()) throw std::invalid_argument("no rows for service " + std::to_string(service));
  const std::size_t n = std::min<std::size_t>(acc.size(), static_cast<std::size_t>(last));
  double sum = 0.0;
  for (std::size_t i = acc.size() - n; i < acc.size(); ++i) sum += acc[i];
  return sum / static_cast<double>(n);
}

namespace {

std::string seed_file(const char* stem, std::uint64_t seed) {
  return std::string(stem) + "_seed" + std::to_string(seed) + ".csv";
}

std::shared_ptr<env::AccuracyOracle> make_oracle(const ExperimentConfig& config,
                                                 std::uint64_t seed) {
  if (config.oracle == OracleKind::kExternal) {
    return std::make_shared<env::ExternalOracle>(
        config.oracle_command, derive_seed(seed, streams::kOracle), config.oracle_epochs);
  }
  return std::make_shared<env::SurrogateOracle>(config.market.services);
}

std::string join_ids(const std::vector<int>& ids) {
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(ids[i]);
  }
  return s;
}

std::string join_values(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ';';
    s += format_double(values[i]);
  }
  return s;
}

class TrajectoryLog {
 public:
  TrajectoryLog(const fs::path& path, std::uint64_t seed)
      : writer_(path, "seed,episode,slot,service,served,payments,spend,accuracy,reward", false),
        seed_(seed) {}

  void append(int episode, const env::StepResult& step) {
    for (std::size_t m = 0; m < step.outcome.services.size(); ++m) {
      const auto& so = step.outcome.services[m];
      if (!so.active) continue;
      writer_.write_line(std::to_string(seed_) + ',' + std::to_string(episode + 1) + ',' +
                         std::to_string(step.outcome.slot) + ',' + std::to_string(m) + ',' +
                         join_ids(so.served) + ',' + join_values(so.payments) + ',' +
                         format_double(so.spend) + ',' + format_double(so.accuracy) + ',' +
                         format_double(so.reward));
    }
  }

 private:
  CsvWriter writer_;
  std::uint64_t seed_;
};

void append_rows(SeedRun& run, CsvWriter& writer, int episode,
                 const std::vector<env::ServiceEpisodeSummary>& summary) {
  for (std::size_t m = 0; m < summary.size(); ++m) {
    MetricsRow row;
    row.seed = run.seed;
    row.episode = episode + 1;
    row.service = static_cast<int>(m);
    row.reward = summary[m].cumulative_reward;
    row.final_accuracy = summary[m].final_accuracy;
    row.slots_to_target = summary[m].slots_to_target;
    row.total_spend = summary[m].total_spend;
    row.clients_per_slot = summary[m].clients_per_slot;
    writer.write_line(to_csv(row));
    run.rows.push_back(row);
  }
}

void save_agents(const fs::path& path, const std::vector<agents::HybridAgent>& agents) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << "fedsel-agents 1 " << agents.size() << '\n';
  for (const auto& a : agents) a.save(out);
}

void load_agents(const fs::path& path, std::vector<agents::HybridAgent>& agents) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  std::string tag;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> tag >> version >> count) || tag != "fedsel-agents" || version != 1 ||
      count != agents.size()) {
    throw std::runtime_error("checkpoint " + path.string() + " does not match this market");
  }
  for (auto& a : agents) a.load(in);
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, const StepObserver& observer) {
  SeedRun run;
  run.seed = seed;
  run.metrics_file = config.output_dir / seed_file("metrics", seed);
  CsvWriter metrics(run.metrics_file, kMetricsHeader);
  std::unique_ptr<TrajectoryLog> trajectory;
  if (config.log_trajectory) {
    trajectory = std::make_unique<TrajectoryLog>(config.output_dir / seed_file("trajectory", seed), seed);
  }

  env::Environment environment(config.market, make_oracle(config, seed));

  if (config.algorithm == Algorithm::kMahdrl) {
    auto learners = agents::make_agents(config.market, config.agent, seed);
    fs::path checkpoint;
    if (!config.checkpoint.empty()) {
      fs::create_directories(config.checkpoint);
      checkpoint = config.checkpoint / ("agents_seed" + std::to_string(seed) + ".ckpt");
      if (fs::exists(checkpoint)) load_agents(checkpoint, learners);
    }
    CsvWriter losses(config.output_dir / seed_file("losses", seed),
                     "seed,episode,slot,service,critic_loss,actor_gradient_norm", false);
    agents::TrainCallbacks callbacks;
    callbacks.on_episode = [&](int ep, const auto& summary) { append_rows(run, metrics, ep, summary); };
    callbacks.on_update = [&](int ep, int slot, int service, const agents::UpdateStats& stats) {
      losses.write_line(std::to_string(seed) + ',' + std::to_string(ep + 1) + ',' +
                        std::to_string(slot) + ',' + std::to_string(service) + ',' +
                        format_double(stats.critic_loss) + ',' +
                        format_double(stats.actor_gradient_norm));
    };
    if (trajectory || observer) {
      callbacks.on_step = [&](int ep, const env::StepResult& step) {
        if (trajectory) trajectory->append(ep, step);
        if (observer) observer(seed, ep, step);
      };
    }
    agents::train(environment, learners, config.episodes, seed, callbacks);
    if (!checkpoint.empty()) save_agents(checkpoint, learners);
    return run;
  }

  baselines::BaselineKind kind = baselines::BaselineKind::kRandom;
  if (config.algorithm == Algorithm::kLcfa) kind = baselines::BaselineKind::kLowCostFirst;
  if (config.algorithm == Algorithm::kHqfa) kind = baselines::BaselineKind::kHighQualityFirst;
  std::vector<baselines::BaselinePolicy> policies;
  for (int m = 0; m < config.market.num_services(); ++m) {
    policies.emplace_back(kind, derive_seed(seed, streams::kBaseline, static_cast<std::uint64_t>(m)));
  }
  for (int ep = 0; ep < config.episodes; ++ep) {
    env::StepFn on_step;
    if (trajectory || observer) {
      on_step = [&](const env::StepResult& step) {
        if (trajectory) trajectory->append(ep, step);
        if (observer) observer(seed, ep, step);
      };
    }
    auto summary = env::run_episode(
        environment, derive_seed(seed, streams::kEnvironment, static_cast<std::uint64_t>(ep)),
        [&](const env::Observation& obs) {
          return policies[static_cast<std::size_t>(obs.service)].act(obs);
        },
        on_step);
    append_rows(run, metrics, ep, summary);
  }
  return run;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const StepObserver& observer) {
  config.validate();
  for (const auto& w : config.warnings()) std::cerr << "warning: " << w << '\n';
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw std::runtime_error("output directory is not writable: " + config.output_dir.string());
  }
  {
    std::ofstream out(config.output_dir / "config.json");
    if (!out) throw std::runtime_error("output directory is not writable: " + config.output_dir.string());
    out << dump_config(config);
  }

  RunResult result;
  for (auto seed : config.seeds) result.seeds.push_back(run_seed(config, seed, observer));

  result.summary_file = config.output_dir / "summary.csv";
  CsvWriter summary(result.summary_file, kMetricsHeader);
  for (const auto& run : result.seeds) {
    for (const auto& row : run.rows) summary.write_line(to_csv(row));
  }
  return result;
}

fs::path run(const ExperimentConfig& config) { return run_experiment(config).summary_file; }

SweepParameter parse_sweep_parameter(const std::string& name) {
  if (name == "budget") return SweepParameter::kBudget;
  if (name == "cores" || name == "K" || name == "k") return SweepParameter::kCores;
  throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

SweepResult sensitivity_sweep(const ExperimentConfig& config, SweepParameter parameter,
                              const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sensitivity_sweep: no values");
  const std::string name = parameter == SweepParameter::kBudget ? "budget" : "cores";
  SweepResult result;
  for (double value : values) {
    ExperimentConfig c = config;
    if (parameter == SweepParameter::kBudget) {
      c.set_budget(value);
    } else {
      c.set_cores(static_cast<int>(value));
    }
    c.output_dir = config.output_dir / ("sweep_" + name + "_" + format_double(value));
    if (!config.checkpoint.empty()) c.checkpoint = c.output_dir / "checkpoints";
    const RunResult run = run_experiment(c);
    for (int m = 0; m < c.market.num_services(); ++m) {
      std::vector<double> finals;
      std::vector<double> plateaus;
      std::vector<double> slots;
      for (const auto& seed_run : run.seeds) {
        finals.push_back(seed_run.final_accuracy(m));
        plateaus.push_back(episodes_to_plateau(seed_run.rewards(m), c.normalize_window));
        std::vector<double> reached;
        for (const auto& row : seed_run.rows) {
          if (row.service == m && row.slots_to_target > 0) reached.push_back(row.slots_to_target);
        }
        if (!reached.empty()) slots.push_back(median(reached));
      }
      SweepRow row;
      row.value = value;
      row.service = m;
      row.median_final_accuracy = median(finals);
      row.median_plateau_episode = median(plateaus);
      row.median_slots_to_target = slots.empty() ? -1.0 : median(slots);
      result.rows.push_back(row);
    }
  }
  result.table_file = config.output_dir / ("sweep_" + name + ".csv");
  fs::create_directories(config.output_dir);
  CsvWriter table(result.table_file,
                  "parameter,value,service,median_final_accuracy,median_slots_to_target,"
                  "median_plateau_episode");
  for (const auto& row : result.rows) {
    table.write_line(name + ',' + format_double(row.value) + ',' + std::to_string(row.service) + ',' +
                     format_double(row.median_final_accuracy) + ',' +
                     format_double(row.median_slots_to_target) + ',' +
                     format_double(row.median_plateau_episode));
  }
  return result;
}

}  // namespace fedsel::harness
