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

#ifndef VIEWSIM_RUN_CONFIG_H_
#define VIEWSIM_RUN_CONFIG_H_

// Experiment configuration loaded from a JSON document. Every field is
// optional; unknown keys are rejected with the full key path in the message.

#include <cstdint>
#include <string>
#include <vector>

#include "viewsim/agents.h"
#include "viewsim/auction_sim.h"
#include "viewsim/bayesopt.h"
#include "viewsim/controllers.h"
#include "viewsim/dataset.h"
#include "viewsim/predictors.h"

namespace viewsim {

inline constexpr const char* kSeedEnvVar = "VIEWSIM_SEED";

struct PredictorSettings {
  TrainConfig view;  // logistic view model
  TrainConfig bid;   // only l2 is used by the bid regression
  double train_fraction = 0.5;
};

// Simulator settings plus the episode counts and long-run schedule used by
// the experiment drivers.
struct SimSettings {
  SimConfig config;
  int rollout_episodes = 200;
  int random_episodes = 32;
  // Goal-change run: total intervals, and the schedule applied on top of
  // config.goal. Per-interval auction volume matches the daily episodes.
  int long_run_intervals = 96;
  std::vector<GoalChange> long_run_schedule = {
      {48, UnitInterval(0.8)}, {72, UnitInterval(0.6)}};
};

struct BayesoptSettings {
  TuneConfig tune;  // trace_path is set by the driver
  ParamSpace space = ParamSpace::Default();
  int random_search_budget = 10;
};

struct RunConfig {
  GeneratorConfig generator;
  SimSettings sim;
  PredictorSettings predictors;
  std::vector<NamedAgent> agents = DefaultAgentLineup();
  PidConfig pid;
  BayesoptSettings bayesopt;
  std::vector<uint64_t> seeds = {7, 11, 13};

  void Validate() const;
  // The configured agent with this name, else the stock configuration.
  AgentConfig AgentNamed(const std::string& name) const;
};

// Throws ConfigError on malformed JSON, unknown keys, wrong types or
// invalid values.
RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);

// When VIEWSIM_SEED is set to an unsigned 64-bit integer, replaces the seed
// list with that single seed and reseeds the generator, simulator and tuner.
// A malformed value is a ConfigError. Returns true when applied.
bool ApplySeedOverride(RunConfig& config);
void ApplySeedOverride(RunConfig& config, uint64_t seed);

}  // namespace viewsim

#endif  // VIEWSIM_RUN_CONFIG_H_
