// Acceptance suite: one PASS/FAIL line per criterion.
//
// The training criteria share runs: the default-config MAHDRL run feeds the
// constraint, learning, ranking, budget=20 and K=2 checks. Everything is
// written under --out so the raw metrics can be inspected afterwards.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsel/harness/config.hpp"
#include "fedsel/harness/metrics.hpp"
#include "fedsel/harness/runner.hpp"
#include "fedsel/market/distribution.hpp"
#include "fedsel/market/quality.hpp"
#include "fedsel/numerics/mlp.hpp"
#include "support/gradcheck.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace fedsel;
using harness::Algorithm;

namespace {

struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

class Report {
 public:
  explicit Report(const fs::path& file) : file_(file) {}

  void note(const std::string& line) {
    std::cout << "  " << line << '\n' << std::flush;
    log_ << "  " << line << '\n';
  }

  void add(Verdict v) {
    const std::string line = std::string(v.pass ? "PASS" : "FAIL") + "  " + v.name + ": " + v.detail;
    std::cout << line << '\n' << std::flush;
    log_ << line << '\n';
    verdicts_.push_back(std::move(v));
  }

  int failures() const {
    return static_cast<int>(std::count_if(verdicts_.begin(), verdicts_.end(),
                                          [](const Verdict& v) { return !v.pass; }));
  }

  void write() const {
    std::ofstream out(file_);
    out << log_.str();
  }

 private:
  fs::path file_;
  std::ostringstream log_;
  std::vector<Verdict> verdicts_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict check_formulas() {
  using market::LabelDistribution;
  bool ok = true;
  std::string detail;

  const auto u = LabelDistribution::uniform(10);
  for (std::size_t hot = 0; hot < 10; ++hot) ok &= market::emd(LabelDistribution::one_hot(10, hot), u) == 1.8;
  detail += std::string("emd(one-hot, uniform-10) == 1.8 ") + (ok ? "for all 10 classes" : "MISMATCH");

  const bool bids = market::linear_cost_bid(400, 0.4) == 9.6 && market::linear_cost_bid(100, 1.0) == 1.5 &&
                    market::linear_cost_bid(100, 0.4) == 2.1;
  ok &= bids;
  detail += std::string("; bids {9.6, 1.5, 2.1} ") + (bids ? "exact" : "MISMATCH");

  // Long-double re-derivation plus the 30-digit reference value.
  const auto p = market::DqiParams::emnist();
  const double lib = market::dqi(400, 0.4, p);
  const double gap_oracle = std::fabs(lib - static_cast<double>(testing::oracle_dqi(400.0L, 0.4L, p)));
  const double gap_ref = std::fabs(lib - 0.672946359561575477);
  const bool q = gap_oracle <= 1e-9 && gap_ref <= 1e-9;
  ok &= q;
  detail += "; dqi(400, 0.4) = " + fmt(lib, 12) + " (|diff| " + fmt_e(std::max(gap_oracle, gap_ref)) + " <= 1e-9)";
  return {"formulas", ok, detail};
}

Verdict check_numerics() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) worst = std::max(worst, testing::gradient_check(testing::random_small_spec(rng), rng, 1e-5));
  bool ok = worst < 1e-4;
  std::string detail = "100 random nets, worst gradient rel. error " + fmt_e(worst) + " (< 1e-4)";

  // soft_update: tau = 1 copies, every entry is bit-identical to a scalar evaluation of tau*o + (1-tau)*t, and 500 steps
  // towards a frozen target close the gap geometrically.
  const numerics::MlpSpec spec{{6, 9, 4}, numerics::HiddenActivation::kRelu, numerics::OutputActivation::kIdentity};
  const auto online = numerics::mlp_init(spec, rng);
  bool exact = true;
  auto copy = numerics::mlp_init(spec, rng);
  numerics::soft_update(copy, online, 1.0);
  for (std::size_t l = 0; l < online.weights.size(); ++l) {
    exact &= (copy.weights[l].array() == online.weights[l].array()).all();
    exact &= (copy.biases[l].array() == online.biases[l].array()).all();
  }
  int mismatched = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double tau = trial == 0 ? 0.01 : std::uniform_real_distribution<double>(1e-3, 1.0)(rng);
    auto target = numerics::mlp_init(spec, rng);
    const auto before = target;
    numerics::soft_update(target, online, tau);
    for (std::size_t l = 0; l < target.weights.size(); ++l) {
      for (Eigen::Index i = 0; i < target.weights[l].size(); ++i) {
        const double o = online.weights[l].data()[i];
        const double t = before.weights[l].data()[i];
        const double want = tau * o + (1.0 - tau) * t;
        if (target.weights[l].data()[i] != want) ++mismatched;
      }
    }
  }
  exact &= mismatched == 0;
  auto slow = numerics::MlpParams::zeros(spec);
  for (int i = 0; i < 500; ++i) numerics::soft_update(slow, online, 0.01);
  double geometric = 0.0;
  for (std::size_t l = 0; l < slow.weights.size(); ++l) {
    const Eigen::MatrixXd want = (1.0 - std::pow(0.99, 500)) * online.weights[l];
    geometric = std::max(geometric, (slow.weights[l] - want).cwiseAbs().maxCoeff());
  }
  exact &= geometric <= 1e-12;
  ok &= exact;
  detail += std::string("; soft_update ") + (exact ? "exact" : "MISMATCH") + " (" + std::to_string(mismatched) +
            " entries off the scalar formula, 500-step geometric error " + fmt_e(geometric) + ")";
  return {"numerics", ok, detail};
}

Verdict check_brute_force() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> budget(3.0, 20.0);
  int agree = 0;
  double worst = 0.0;
  const int instances = 200;
  for (int i = 0; i < instances; ++i) {
    const auto config = testing::small_market(4, budget(rng));
    const auto c = testing::brute_force_single_slot(config, static_cast<std::uint64_t>(1000 + i));
    const double gap = std::fabs(c.library_best - c.oracle_best);
    worst = std::max({worst, gap, c.max_subset_gap});
    if (c.affordable_subsets >= 1 && gap <= 1e-12 && c.max_subset_gap <= 1e-12) ++agree;
  }
  return {"brute-force", agree == instances,
          std::to_string(agree) + "/" + std::to_string(instances) +
              " instances (C=4, M=1, K=1, one slot) agree on optimal accuracy; worst |diff| " + fmt_e(worst)};
}

struct ConstraintTally {
  long long slots = 0;
  long long served_pairs = 0;
  long long violations_load = 0;    // more than K services on one client
  long long violations_budget = 0;  // spend over the per-slot budget
  long long violations_price = 0;   // payment below the cost bid
};

harness::StepObserver constraint_observer(const env::MarketConfig& market, ConstraintTally& tally) {
  return [&market, &tally](std::uint64_t, int, const env::StepResult& step) {
    ++tally.slots;
    std::vector<int> load(static_cast<std::size_t>(market.clients), 0);
    for (std::size_t m = 0; m < step.outcome.services.size(); ++m) {
      const auto& so = step.outcome.services[m];
      if (!so.active) continue;
      double spend = 0.0;
      for (std::size_t i = 0; i < so.served.size(); ++i) {
        ++tally.served_pairs;
        ++load[static_cast<std::size_t>(so.served[i])];
        spend += so.payments[i];
        if (!(so.payments[i] >= so.cost_bids[i])) ++tally.violations_price;
      }
      const double budget = market.services[m].budget_per_slot;
      if (!(so.spend <= budget) || !(spend <= budget)) ++tally.violations_budget;
    }
    for (std::size_t c = 0; c < load.size(); ++c) {
      if (load[c] > market.cores || step.outcome.client_load[c] != load[c]) ++tally.violations_load;
    }
  };
}

struct Study {
  harness::ExperimentConfig base;
  fs::path out;
  Report* report = nullptr;
  std::map<std::string, harness::RunResult> runs;
  std::map<std::string, double> seconds;
  ConstraintTally tally;

  harness::RunResult& run(const std::string& key, harness::ExperimentConfig c, bool check_constraints) {
    c.output_dir = out / key;
    const auto t0 = std::chrono::steady_clock::now();
    harness::StepObserver observer;
    if (check_constraints) observer = constraint_observer(c.market, tally);
    auto result = harness::run_experiment(c, observer);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    seconds[key] = s;
    report->note(key + ": " + std::to_string(c.seeds.size()) + " seeds x " + std::to_string(c.episodes) +
                 " episodes in " + fmt(s, 1) + " s");
    return runs[key] = std::move(result);
  }
};

std::vector<double> finals(const harness::RunResult& r, int service) {
  std::vector<double> out;
  for (const auto& s : r.seeds) out.push_back(s.final_accuracy(service));
  return out;
}

double median_final(const harness::RunResult& r, int service) { return harness::median(finals(r, service)); }

double median_plateau(const harness::RunResult& r, int service, int window) {
  std::vector<double> p;
  for (const auto& s : r.seeds) p.push_back(harness::episodes_to_plateau(s.rewards(service), window));
  return harness::median(p);
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t i = from; i < to; ++i) s += v[i];
  return s / static_cast<double>(to - from);
}

}  // namespace

int main(int argc, char** argv) {
  harness::tune_allocator();

  CLI::App app{"Acceptance suite: prints one PASS/FAIL line per criterion"};
  fs::path out = "acceptance_runs";
  int episodes = 200;
  int seed_count = 5;
  bool strict = false;
  app.add_option("--out", out, "directory for run artifacts and the report");
  app.add_option("--episodes", episodes, "episodes per training run")->check(CLI::PositiveNumber);
  app.add_option("--seeds", seed_count, "number of seeds (0..n-1)")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "exit non-zero when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  fs::create_directories(out);
  Report report(out / "acceptance_report.txt");

  try {
    report.add(check_formulas());
    report.add(check_numerics());
    report.add(check_brute_force());

    Study study;
    study.out = out;
    study.report = &report;
    study.base.episodes = episodes;
    study.base.seeds.clear();
    for (int s = 0; s < seed_count; ++s) study.base.seeds.push_back(static_cast<std::uint64_t>(s));
    const int services = study.base.market.num_services();
    const int window = study.base.normalize_window;
    const std::size_t head = static_cast<std::size_t>(std::min(20, episodes));

    auto with = [&](Algorithm algo) {
      auto c = study.base;
      c.algorithm = algo;
      return c;
    };

    // Default market, every algorithm, constraints watched on every slot.
    const auto& mahdrl = study.run("mahdrl", with(Algorithm::kMahdrl), true);
    const auto& lcfa = study.run("lcfa", with(Algorithm::kLcfa), true);
    const auto& hqfa = study.run("hqfa", with(Algorithm::kHqfa), true);
    const auto& random = study.run("random", with(Algorithm::kRandom), true);

    {
      const auto& t = study.tally;
      const long long expected = 4LL * seed_count * episodes * study.base.steps();
      const double per_run = study.seconds["mahdrl"] / seed_count;
      const long long violations = t.violations_load + t.violations_budget + t.violations_price;
      const bool ok = violations == 0 && t.slots == expected && per_run < 600.0;
      report.add({"constraints", ok,
                  std::to_string(t.slots) + "/" + std::to_string(expected) + " slots, " +
                      std::to_string(t.served_pairs) + " served pairs; violations: load " +
                      std::to_string(t.violations_load) + ", budget " + std::to_string(t.violations_budget) +
                      ", price " + std::to_string(t.violations_price) + "; MAHDRL " + fmt(per_run, 1) +
                      " s per run (< 600 s)"});
    }

    {
      bool ok = true;
      std::string detail;
      for (int m = 0; m < services; ++m) {
        std::vector<double> gains;
        for (const auto& s : mahdrl.seeds) {
          const auto n = harness::normalize_rewards(s.rewards(m), window);
          gains.push_back(mean_of(n, n.size() - head, n.size()) / mean_of(n, 0, head) - 1.0);
        }
        const double g = harness::median(gains);
        ok &= g >= 0.30;
        detail += (m ? ", " : "") + std::string("service ") + std::to_string(m) + " " + fmt(100 * g, 1) + "%";
      }
      report.add({"learning-signal", ok, "median last-20 vs first-20 normalised reward gain (need >= 30%): " + detail});
    }

    {
      bool ok = true;
      std::string detail;
      for (int m = 0; m < services; ++m) {
        const double a = median_final(mahdrl, m);
        const double l = median_final(lcfa, m);
        const double h = median_final(hqfa, m);
        const double r = median_final(random, m);
        ok &= a >= l && a >= h && a >= r + 0.01;
        detail += (m ? "; " : "") + std::string("service ") + std::to_string(m) + " mahdrl " + fmt(a) +
                  " lcfa " + fmt(l) + " hqfa " + fmt(h) + " random " + fmt(r);
      }
      report.add({"ranking", ok, "median final accuracy, MAHDRL must lead and beat random by 0.01: " + detail});
    }

    {
      auto at = [&](double budget) {
        auto c = with(Algorithm::kMahdrl);
        c.set_budget(budget);
        return c;
      };
      const auto& b10 = study.run("mahdrl_budget_10", at(10.0), false);
      const auto& b15 = study.run("mahdrl_budget_15", at(15.0), false);
      bool ok = true;
      std::string detail;
      for (int m = 0; m < services; ++m) {
        const double v10 = median_final(b10, m), v15 = median_final(b15, m), v20 = median_final(mahdrl, m);
        ok &= v10 <= v15 && v15 <= v20 && v10 < v20;
        detail += (m ? "; " : "") + std::string("service ") + std::to_string(m) + " " + fmt(v10) + " / " +
                  fmt(v15) + " / " + fmt(v20);
      }
      report.add({"budget-sensitivity", ok, "median final accuracy at budget 10 / 15 / 20: " + detail});
    }

    {
      auto at = [&](int cores) {
        auto c = with(Algorithm::kMahdrl);
        c.set_cores(cores);
        return c;
      };
      const auto& k1 = study.run("mahdrl_cores_1", at(1), false);
      const auto& k3 = study.run("mahdrl_cores_3", at(3), false);
      bool ok = true;
      std::string detail;
      for (int m = 0; m < services; ++m) {
        const double v1 = median_final(k1, m), v2 = median_final(mahdrl, m), v3 = median_final(k3, m);
        const double p2 = median_plateau(mahdrl, m, window), p3 = median_plateau(k3, m, window);
        ok &= v2 >= v1 && std::fabs(v3 - v2) <= 0.01 && p3 >= p2;
        detail += (m ? "; " : "") + std::string("service ") + std::to_string(m) + " acc " + fmt(v1) + " / " +
                  fmt(v2) + " / " + fmt(v3) + ", plateau K2 " + fmt(p2, 1) + " K3 " + fmt(p3, 1);
      }
      report.add({"core-sensitivity", ok, "K = 1 / 2 / 3: " + detail});
    }

    {
      auto once = [&](Algorithm algo) {
        auto c = with(algo);
        c.seeds = {0};
        return c;
      };
      study.run("determinism_mahdrl", once(Algorithm::kMahdrl), false);
      study.run("determinism_random", once(Algorithm::kRandom), false);
      const bool a = slurp(out / "mahdrl" / "metrics_seed0.csv") == slurp(out / "determinism_mahdrl" / "metrics_seed0.csv");
      const bool b = slurp(out / "random" / "metrics_seed0.csv") == slurp(out / "determinism_random" / "metrics_seed0.csv");
      report.add({"determinism", a && b,
                  std::string("repeated seed-0 metrics files: mahdrl ") + (a ? "identical" : "DIFFER") +
                      ", random " + (b ? "identical" : "DIFFER")});
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    report.write();
    return 2;
  }

  report.write();
  std::cout << report.failures() << " criteria failed\n";
  return strict && report.failures() > 0 ? 1 : 0;
}
