// Copyright 2026 The viewsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "viewsim/run_config.h"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "viewsim/errors.h"

namespace viewsim {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects whatever was not read.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError("'" + Label() + "' must be an object");
  }

  const json* Take(const std::string& key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  std::string KeyPath(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void Double(const std::string& key, double& out) {
    if (const json* v = Take(key)) out = AsDouble(*v, KeyPath(key));
  }

  template <typename Int>
  void Integer(const std::string& key, Int& out) {
    if (const json* v = Take(key)) {
      const int64_t x = AsInt(*v, KeyPath(key));
      if (x < static_cast<int64_t>(std::numeric_limits<Int>::min()) ||
          x > static_cast<int64_t>(std::numeric_limits<Int>::max())) {
        throw ConfigError("'" + KeyPath(key) + "' is out of range");
      }
      out = static_cast<Int>(x);
    }
  }

  void Seed(const std::string& key, uint64_t& out) {
    if (const json* v = Take(key)) out = AsSeed(*v, KeyPath(key));
  }

  void Unit(const std::string& key, UnitInterval& out) {
    if (const json* v = Take(key)) out = AsUnit(*v, KeyPath(key));
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) {
        throw ConfigError("unknown key '" + KeyPath(key) + "'");
      }
    }
  }

  static double AsDouble(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
    return v.get<double>();
  }

  static int64_t AsInt(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) {
      const auto u = v.get<uint64_t>();
      if (u > static_cast<uint64_t>(std::numeric_limits<int64_t>::max())) {
        throw ConfigError("'" + path + "' is out of range");
      }
      return static_cast<int64_t>(u);
    }
    if (!v.is_number_integer()) {
      throw ConfigError("'" + path + "' must be an integer");
    }
    return v.get<int64_t>();
  }

  static uint64_t AsSeed(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<uint64_t>();
    if (v.is_number_integer()) {
      throw ConfigError("'" + path + "' must be a non-negative 64-bit integer");
    }
    throw ConfigError("'" + path + "' must be a 64-bit integer seed");
  }

  static UnitInterval AsUnit(const json& v, const std::string& path) {
    const double x = AsDouble(v, path);
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ConfigError("'" + path + "' must lie in [0, 1]");
    }
    return UnitInterval(x);
  }

 private:
  std::string Label() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const json& RequireArray(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError("'" + path + "' must be an array");
  return v;
}

// Wraps a Validate() call so violations surface as configuration errors.
template <typename Fn>
void Checked(const std::string& section, Fn fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("'" + section + "': " + e.what());
  }
}

void ReadTrainConfig(ObjectReader& parent, const std::string& key,
                     TrainConfig& out) {
  const json* v = parent.Take(key);
  if (!v) return;
  ObjectReader r(*v, parent.KeyPath(key));
  r.Double("learning_rate", out.learning_rate);
  r.Integer("epochs", out.epochs);
  r.Integer("minibatch", out.minibatch);
  r.Double("l2", out.l2);
  r.Seed("seed", out.seed);
  r.Finish();
}

std::vector<GoalChange> ReadSchedule(const json& v, const std::string& path) {
  std::vector<GoalChange> out;
  RequireArray(v, path);
  for (size_t i = 0; i < v.size(); ++i) {
    ObjectReader r(v[i], path + "[" + std::to_string(i) + "]");
    GoalChange change;
    if (!r.Take("interval") || !r.Take("goal")) {
      throw ConfigError("'" + path + "[" + std::to_string(i) +
                        "]' needs 'interval' and 'goal'");
    }
    change.interval = static_cast<int>(
        ObjectReader::AsInt(v[i]["interval"], r.KeyPath("interval")));
    change.goal = ObjectReader::AsUnit(v[i]["goal"], r.KeyPath("goal"));
    r.Finish();
    out.push_back(change);
  }
  return out;
}

void ReadGenerator(const json& v, GeneratorConfig& g) {
  ObjectReader r(v, "generator");
  r.Integer("n_records", g.n_records);
  r.Seed("seed", g.seed);
  if (const json* w = r.Take("true_view_weights")) {
    RequireArray(*w, "generator.true_view_weights");
    if (w->size() != g.true_view_weights.size()) {
      throw ConfigError("'generator.true_view_weights' must have " +
                        std::to_string(g.true_view_weights.size()) +
                        " entries");
    }
    for (size_t i = 0; i < w->size(); ++i) {
      g.true_view_weights[i] = ObjectReader::AsDouble(
          (*w)[i], "generator.true_view_weights[" + std::to_string(i) + "]");
    }
  }
  r.Integer("cost_base_micros", g.cost_base_micros);
  r.Double("cost_view_coupling", g.cost_view_coupling);
  r.Double("cost_lognormal_sigma", g.cost_lognormal_sigma);
  r.Integer("duration_days", g.duration_days);
  r.Integer("start_timestamp", g.start_timestamp);
  r.Integer("n_domains", g.n_domains);
  r.Double("latent_noise_sigma", g.latent_noise_sigma);
  r.Double("click_given_view", g.click_given_view);
  r.Finish();
}

void ReadSim(const json& v, SimSettings& s) {
  ObjectReader r(v, "sim");
  SimConfig& c = s.config;
  r.Integer("n_per_day", c.n_per_day);
  r.Integer("intervals_per_day", c.intervals_per_day);
  r.Unit("goal", c.goal);
  r.Unit("initial_threshold", c.initial_threshold);
  r.Unit("initial_viewability", c.initial_viewability);
  r.Double("reward_exponent", c.reward_exponent);
  r.Seed("seed", c.seed);
  if (const json* g = r.Take("goal_schedule")) {
    c.goal_schedule = ReadSchedule(*g, "sim.goal_schedule");
  }
  if (const json* g = r.Take("rollout_goal_min")) {
    c.rollout_goal_min = ObjectReader::AsUnit(*g, "sim.rollout_goal_min");
  }
  if (const json* g = r.Take("rollout_goal_max")) {
    c.rollout_goal_max = ObjectReader::AsUnit(*g, "sim.rollout_goal_max");
  }
  r.Integer("rollout_episodes", s.rollout_episodes);
  r.Integer("random_episodes", s.random_episodes);
  r.Integer("long_run_intervals", s.long_run_intervals);
  if (const json* g = r.Take("long_run_schedule")) {
    s.long_run_schedule = ReadSchedule(*g, "sim.long_run_schedule");
  }
  r.Finish();
}

void ReadPredictors(const json& v, PredictorSettings& p) {
  ObjectReader r(v, "predictors");
  ReadTrainConfig(r, "view", p.view);
  ReadTrainConfig(r, "bid", p.bid);
  r.Double("train_fraction", p.train_fraction);
  r.Finish();
}

std::vector<NamedAgent> ReadAgents(const json& v) {
  RequireArray(v, "agents");
  std::vector<NamedAgent> out;
  std::set<std::string> names;
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    ObjectReader r(v[i], path);
    const json* name = r.Take("name");
    if (!name || !name->is_string()) {
      throw ConfigError("'" + path + ".name' must be a string");
    }
    NamedAgent agent;
    agent.name = name->get<std::string>();
    if (!names.insert(agent.name).second) {
      throw ConfigError("duplicate agent name '" + agent.name + "'");
    }
    Checked(path, [&] { agent.config = AgentConfigFor(agent.name); });
    AgentConfig& c = agent.config;
    r.Integer("n_actions", c.n_actions);
    r.Double("gamma", c.gamma);
    r.Double("actor_lr", c.actor_lr);
    r.Double("critic_lr", c.critic_lr);
    r.Integer("epochs", c.epochs);
    r.Integer("minibatch", c.minibatch);
    r.Double("tau", c.tau);
    r.Double("policy_noise", c.td3_policy_noise);
    r.Double("noise_clip", c.td3_noise_clip);
    r.Integer("policy_delay", c.td3_policy_delay);
    if (const json* h = r.Take("hidden")) {
      RequireArray(*h, path + ".hidden");
      c.hidden.clear();
      for (size_t k = 0; k < h->size(); ++k) {
        c.hidden.push_back(static_cast<int>(ObjectReader::AsInt(
            (*h)[k], path + ".hidden[" + std::to_string(k) + "]")));
      }
    }
    r.Seed("seed", c.seed);
    r.Finish();
    out.push_back(std::move(agent));
  }
  return out;
}

void ReadPid(const json& v, PidConfig& p) {
  ObjectReader r(v, "pid");
  r.Double("kp", p.kp);
  r.Double("ki", p.ki);
  r.Double("kd", p.kd);
  r.Double("step_clamp", p.step_clamp);
  r.Double("integral_clamp", p.integral_clamp);
  r.Double("threshold_lo", p.threshold_lo);
  r.Double("threshold_hi", p.threshold_hi);
  r.Finish();
}

void ReadBayesopt(const json& v, BayesoptSettings& b) {
  ObjectReader r(v, "bayesopt");
  r.Integer("budget", b.tune.budget);
  r.Integer("init_points", b.tune.init_points);
  r.Seed("seed", b.tune.seed);
  r.Integer("n_candidates", b.tune.n_candidates);
  r.Double("length_scale", b.tune.gp.length_scale);
  r.Double("signal_variance", b.tune.gp.signal_variance);
  r.Double("noise_variance", b.tune.gp.noise_variance);
  r.Integer("random_search_budget", b.random_search_budget);
  if (const json* bounds = r.Take("bounds")) {
    ObjectReader br(*bounds, "bayesopt.bounds");
    for (auto& dim : b.space.dims) {
      const json* range = br.Take(dim.name);
      if (!range) continue;
      const std::string path = br.KeyPath(dim.name);
      if (!range->is_array() || range->size() != 2) {
        throw ConfigError("'" + path + "' must be [lo, hi]");
      }
      dim.lo = ObjectReader::AsDouble((*range)[0], path);
      dim.hi = ObjectReader::AsDouble((*range)[1], path);
    }
    br.Finish();
  }
  r.Finish();
}

}  // namespace

void RunConfig::Validate() const {
  Checked("generator", [&] { generator.Validate(); });
  Checked("sim", [&] {
    sim.config.Validate();
    if (sim.rollout_episodes < 1) {
      throw ConfigError("'sim.rollout_episodes' must be >= 1");
    }
    if (sim.random_episodes < 1) {
      throw ConfigError("'sim.random_episodes' must be >= 1");
    }
    SimConfig long_run = sim.config;
    long_run.intervals_per_day = sim.long_run_intervals;
    long_run.goal_schedule = sim.long_run_schedule;
    long_run.Validate();
  });
  Checked("predictors", [&] {
    predictors.view.Validate();
    predictors.bid.Validate();
    if (!(predictors.train_fraction > 0.0 && predictors.train_fraction < 1.0)) {
      throw ConfigError("'predictors.train_fraction' must lie in (0, 1)");
    }
  });
  for (const auto& a : agents) {
    Checked("agents." + a.name, [&] { a.config.Validate(); });
  }
  Checked("pid", [&] { pid.Validate(); });
  Checked("bayesopt", [&] {
    bayesopt.tune.Validate();
    bayesopt.space.Validate();
    if (bayesopt.random_search_budget < 1) {
      throw ConfigError("'bayesopt.random_search_budget' must be >= 1");
    }
  });
  if (seeds.empty()) throw ConfigError("'seeds' must not be empty");
}

AgentConfig RunConfig::AgentNamed(const std::string& name) const {
  for (const auto& a : agents) {
    if (a.name == name) return a.config;
  }
  return AgentConfigFor(name);
}

RunConfig ParseRunConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  RunConfig config;
  ObjectReader r(root, "");
  if (const json* v = r.Take("generator")) ReadGenerator(*v, config.generator);
  if (const json* v = r.Take("sim")) ReadSim(*v, config.sim);
  if (const json* v = r.Take("predictors")) ReadPredictors(*v, config.predictors);
  if (const json* v = r.Take("agents")) config.agents = ReadAgents(*v);
  if (const json* v = r.Take("pid")) ReadPid(*v, config.pid);
  if (const json* v = r.Take("bayesopt")) ReadBayesopt(*v, config.bayesopt);
  if (const json* v = r.Take("seeds")) {
    RequireArray(*v, "seeds");
    config.seeds.clear();
    for (size_t i = 0; i < v->size(); ++i) {
      config.seeds.push_back(ObjectReader::AsSeed(
          (*v)[i], "seeds[" + std::to_string(i) + "]"));
    }
  }
  r.Finish();
  config.Validate();
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseRunConfig(text.str());
}

void ApplySeedOverride(RunConfig& config, uint64_t seed) {
  config.seeds = {seed};
  config.generator.seed = seed;
  config.sim.config.seed = seed;
  config.bayesopt.tune.seed = seed;
}

bool ApplySeedOverride(RunConfig& config) {
  const char* raw = std::getenv(kSeedEnvVar);
  if (raw == nullptr || *raw == '\0') return false;
  const std::string text(raw);
  uint64_t seed = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(kSeedEnvVar) +
                      " must be an unsigned 64-bit integer, got '" + text + "'");
  }
  ApplySeedOverride(config, seed);
  return true;
}

}  // namespace viewsim
