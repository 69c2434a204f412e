#include "fedsel/harness/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fedsel::harness {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "mahdrl") return Algorithm::kMahdrl;
  if (name == "lcfa") return Algorithm::kLcfa;
  if (name == "hqfa") return Algorithm::kHqfa;
  if (name == "random") return Algorithm::kRandom;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kMahdrl: return "mahdrl";
    case Algorithm::kLcfa: return "lcfa";
    case Algorithm::kHqfa: return "hqfa";
    case Algorithm::kRandom: return "random";
  }
  return "unknown";
}

OracleKind parse_oracle(const std::string& name) {
  if (name == "surrogate") return OracleKind::kSurrogate;
  if (name == "external") return OracleKind::kExternal;
  throw std::invalid_argument("unknown oracle '" + name + "'");
}

std::string oracle_name(OracleKind kind) {
  return kind == OracleKind::kSurrogate ? "surrogate" : "external";
}

void ExperimentConfig::set_budget(double budget) {
  for (auto& s : market.services) s.budget_per_slot = budget;
}

void ExperimentConfig::validate() const {
  market.validate();
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (normalize_window < 1) throw std::invalid_argument("normalize_window must be >= 1");
  if (oracle == OracleKind::kExternal && oracle_command.empty()) {
    throw std::invalid_argument("external oracle selected but oracle_command is empty");
  }
  if (agent.updates_per_slot < 0) throw std::invalid_argument("updates_per_slot must be >= 0");
  if (agent.batch_size == 0 || agent.replay_capacity == 0) {
    throw std::invalid_argument("batch_size and replay_capacity must be positive");
  }
}

std::vector<std::string> ExperimentConfig::warnings() const {
  std::vector<std::string> out;
  for (const auto& s : market.services) {
    if (s.dataset != "emnist" && s.dqi_params == market::DqiParams::emnist()) {
      out.push_back("service " + std::to_string(s.id) + " (" + s.dataset +
                    ") uses the EMNIST DQI parameters; supply fitted values via config");
    }
  }
  return out;
}

namespace {

// nlohmann's type errors do not say which key was wrong; these do.
template <class T>
T need(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config error at '") + key + "': " + e.what());
  }
}

template <class T>
T read(const json& j, const char* key, const T& fallback) {
  return j.contains(key) ? need<T>(j, key) : fallback;
}

std::string activation_name(numerics::HiddenActivation a) {
  return a == numerics::HiddenActivation::kRelu ? "relu" : "tanh";
}

numerics::HiddenActivation parse_activation(const std::string& s) {
  if (s == "relu") return numerics::HiddenActivation::kRelu;
  if (s == "tanh") return numerics::HiddenActivation::kTanh;
  throw std::invalid_argument("unknown activation '" + s + "'");
}

json schedule_to_json(const agents::LinearSchedule& s) {
  return {{"start", s.start}, {"end", s.end}, {"decay_episodes", s.decay_episodes}};
}

void schedule_from_json(const json& j, agents::LinearSchedule& s) {
  s.start = read(j, "start", s.start);
  s.end = read(j, "end", s.end);
  s.decay_episodes = read(j, "decay_episodes", s.decay_episodes);
}

market::ServiceSpec service_from_json(const json& j, int id) {
  market::ServiceSpec s;
  // Unlisted fields fall back to the default service at the same position.
  const auto defaults = env::MarketConfig::defaults();
  if (static_cast<std::size_t>(id) < defaults.services.size()) {
    s = defaults.services[static_cast<std::size_t>(id)];
  }
  s.id = id;
  s.dataset = read(j, "dataset", s.dataset);
  s.budget_per_slot = read(j, "budget", s.budget_per_slot);
  s.target_accuracy = read(j, "target_accuracy", s.target_accuracy);
  s.reward_base = read(j, "reward_base", s.reward_base);
  if (j.contains("dqi_params")) {
    s.dqi_params = market::DqiParams::from_array(need<std::array<double, 6>>(j, "dqi_params"));
  }
  if (j.contains("reference")) {
    s.reference = market::LabelDistribution(need<std::vector<double>>(j, "reference"));
  }
  return s;
}

ExperimentConfig from_json(const json& root) {
  ExperimentConfig c;
  if (root.contains("market")) {
    const json& m = root.at("market");
    c.market.clients = read(m, "clients", c.market.clients);
    c.market.cores = read(m, "cores", c.market.cores);
    c.market.horizon = read(m, "horizon", c.market.horizon);
    if (m.contains("grids")) {
      const json& g = m.at("grids");
      if (g.contains("sizes")) c.market.grids.sizes = need<std::vector<int>>(g, "sizes");
      if (g.contains("emds")) c.market.grids.emds = need<std::vector<double>>(g, "emds");
    }
    if (m.contains("exit_reward")) {
      const auto mode = need<std::string>(m, "exit_reward");
      if (mode == "once") {
        c.market.exit_reward = env::ExitRewardMode::kOnce;
      } else if (mode == "repeated") {
        c.market.exit_reward = env::ExitRewardMode::kRepeated;
      } else {
        throw std::invalid_argument("market.exit_reward must be 'once' or 'repeated'");
      }
    }
    if (m.contains("services")) {
      c.market.services.clear();
      int id = 0;
      for (const auto& s : m.at("services")) c.market.services.push_back(service_from_json(s, id++));
    }
  }
  if (root.contains("budget")) c.set_budget(need<double>(root, "budget"));
  if (root.contains("agent")) {
    const json& a = root.at("agent");
    auto& ag = c.agent;
    ag.gamma = read(a, "gamma", ag.gamma);
    ag.tau = read(a, "tau", ag.tau);
    if (a.contains("epsilon")) schedule_from_json(a.at("epsilon"), ag.epsilon);
    if (a.contains("payment_noise")) schedule_from_json(a.at("payment_noise"), ag.payment_noise);
    ag.replay_capacity = read(a, "replay_capacity", ag.replay_capacity);
    ag.batch_size = read(a, "batch_size", ag.batch_size);
    ag.actor_learning_rate = read(a, "actor_learning_rate", ag.actor_learning_rate);
    ag.critic_learning_rate = read(a, "critic_learning_rate", ag.critic_learning_rate);
    if (a.contains("hidden_layers")) ag.hidden_layers = need<std::vector<int>>(a, "hidden_layers");
    if (a.contains("hidden_activation")) {
      ag.hidden_activation = parse_activation(need<std::string>(a, "hidden_activation"));
    }
    ag.reward_scale = read(a, "reward_scale", ag.reward_scale);
    ag.learning_enabled = read(a, "learning_enabled", ag.learning_enabled);
    ag.updates_per_slot = read(a, "updates_per_slot", ag.updates_per_slot);
  }
  if (root.contains("algorithm")) c.algorithm = parse_algorithm(need<std::string>(root, "algorithm"));
  c.episodes = read(root, "episodes", c.episodes);
  if (root.contains("steps")) c.market.horizon = need<int>(root, "steps");
  if (root.contains("seeds")) c.seeds = need<std::vector<std::uint64_t>>(root, "seeds");
  if (root.contains("output_dir")) c.output_dir = need<std::string>(root, "output_dir");
  if (root.contains("oracle")) c.oracle = parse_oracle(need<std::string>(root, "oracle"));
  c.oracle_command = read(root, "oracle_command", c.oracle_command);
  c.oracle_epochs = read(root, "oracle_epochs", c.oracle_epochs);
  if (root.contains("checkpoint")) c.checkpoint = need<std::string>(root, "checkpoint");
  c.log_trajectory = read(root, "log_trajectory", c.log_trajectory);
  c.normalize_window = read(root, "normalize_window", c.normalize_window);
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  try {
    ExperimentConfig c = from_json(json::parse(text, nullptr, true, /*ignore_comments=*/true));
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("config error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json services = json::array();
  for (const auto& s : c.market.services) {
    std::vector<double> ref(s.reference.probabilities().begin(), s.reference.probabilities().end());
    services.push_back({{"dataset", s.dataset},
                        {"budget", s.budget_per_slot},
                        {"target_accuracy", s.target_accuracy},
                        {"reward_base", s.reward_base},
                        {"dqi_params", s.dqi_params.as_array()},
                        {"reference", ref}});
  }
  json root = {
      {"market",
       {{"clients", c.market.clients},
        {"cores", c.market.cores},
        {"horizon", c.market.horizon},
        {"grids", {{"sizes", c.market.grids.sizes}, {"emds", c.market.grids.emds}}},
        {"exit_reward", c.market.exit_reward == env::ExitRewardMode::kOnce ? "once" : "repeated"},
        {"services", services}}},
      {"agent",
       {{"gamma", c.agent.gamma},
        {"tau", c.agent.tau},
        {"epsilon", schedule_to_json(c.agent.epsilon)},
        {"payment_noise", schedule_to_json(c.agent.payment_noise)},
        {"replay_capacity", c.agent.replay_capacity},
        {"batch_size", c.agent.batch_size},
        {"actor_learning_rate", c.agent.actor_learning_rate},
        {"critic_learning_rate", c.agent.critic_learning_rate},
        {"hidden_layers", c.agent.hidden_layers},
        {"hidden_activation", activation_name(c.agent.hidden_activation)},
        {"reward_scale", c.agent.reward_scale},
        {"learning_enabled", c.agent.learning_enabled},
        {"updates_per_slot", c.agent.updates_per_slot}}},
      {"algorithm", algorithm_name(c.algorithm)},
      {"episodes", c.episodes},
      {"seeds", c.seeds},
      {"output_dir", c.output_dir.string()},
      {"oracle", oracle_name(c.oracle)},
      {"oracle_command", c.oracle_command},
      {"oracle_epochs", c.oracle_epochs},
      {"checkpoint", c.checkpoint.string()},
      {"log_trajectory", c.log_trajectory},
      {"normalize_window", c.normalize_window},
  };
  return root.dump(2) + "\n";
}

}  // namespace fedsel::harness
