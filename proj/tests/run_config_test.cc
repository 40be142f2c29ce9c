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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "viewsim/errors.h"

namespace viewsim {
namespace {

std::string ConfigPath(const std::string& name) {
  return std::string(VIEWSIM_CONFIG_DIR) + "/" + name;
}

std::string ErrorOf(const std::string& text) {
  try {
    ParseRunConfig(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfigTest, EmptyDocumentGivesDefaults) {
  const RunConfig config = ParseRunConfig("{}");
  EXPECT_EQ(config.seeds, (std::vector<uint64_t>{7, 11, 13}));
  EXPECT_EQ(config.generator.n_records, 100000);
  EXPECT_EQ(config.sim.config.n_per_day, 24000);
  EXPECT_EQ(config.sim.config.intervals_per_day, 24);
  EXPECT_EQ(config.agents.size(), 4u);
  EXPECT_EQ(config.pid.kp, 0.5);
  EXPECT_EQ(config.bayesopt.tune.init_points, 8);
  EXPECT_EQ(config.sim.long_run_intervals, 96);
  ASSERT_EQ(config.sim.long_run_schedule.size(), 2u);
  EXPECT_EQ(config.sim.long_run_schedule[0].interval, 48);
  EXPECT_EQ(config.sim.long_run_schedule[1].goal.value(), 0.6);
}

TEST(RunConfigTest, ReadsEverySection) {
  const RunConfig config = ParseRunConfig(R"({
    "generator": {"n_records": 1234, "seed": 3, "cost_view_coupling": 0.0},
    "sim": {"goal": 0.6, "n_per_day": 4800, "goal_schedule":
            [{"interval": 5, "goal": 0.7}], "rollout_episodes": 9},
    "predictors": {"view": {"epochs": 4, "learning_rate": 0.25},
                   "bid": {"l2": 0.001}, "train_fraction": 0.6},
    "agents": [{"name": "td3", "gamma": 0.7, "hidden": [8, 8]}],
    "pid": {"kp": 0.2, "step_clamp": 0.1},
    "bayesopt": {"budget": 12, "bounds": {"epochs": [1, 3]}},
    "seeds": [18446744073709551615]
  })");
  EXPECT_EQ(config.generator.n_records, 1234);
  EXPECT_EQ(config.generator.seed, 3u);
  EXPECT_EQ(config.sim.config.goal.value(), 0.6);
  ASSERT_EQ(config.sim.config.goal_schedule.size(), 1u);
  EXPECT_EQ(config.sim.config.goal_schedule[0].interval, 5);
  EXPECT_EQ(config.sim.rollout_episodes, 9);
  EXPECT_EQ(config.predictors.view.epochs, 4);
  EXPECT_EQ(config.predictors.bid.l2, 0.001);
  EXPECT_EQ(config.predictors.train_fraction, 0.6);
  ASSERT_EQ(config.agents.size(), 1u);
  EXPECT_EQ(config.AgentNamed("td3").gamma, 0.7);
  EXPECT_EQ(config.AgentNamed("td3").hidden, (std::vector<int>{8, 8}));
  EXPECT_EQ(config.AgentNamed("ddpg").gamma, 0.9);
  EXPECT_EQ(config.pid.kp, 0.2);
  EXPECT_EQ(config.bayesopt.tune.budget, 12);
  EXPECT_EQ(config.bayesopt.space.dims[2].hi, 3.0);
  EXPECT_EQ(config.seeds, (std::vector<uint64_t>{18446744073709551615ULL}));
}

TEST(RunConfigTest, UnknownKeysNameTheirPath) {
  EXPECT_NE(ErrorOf(R"({"sim": {"goall": 0.5}})").find("sim.goall"),
            std::string::npos);
  EXPECT_NE(ErrorOf(R"({"colour": 1})").find("colour"), std::string::npos);
  EXPECT_NE(ErrorOf(R"({"agents": [{"name": "td3", "gama": 0.5}]})")
                .find("agents[0].gama"),
            std::string::npos);
}

TEST(RunConfigTest, RejectsBadValues) {
  EXPECT_FALSE(ErrorOf(R"({"seeds": [-1]})").empty());
  EXPECT_FALSE(ErrorOf(R"({"seeds": [1.5]})").empty());
  EXPECT_FALSE(ErrorOf(R"({"seeds": []})").empty());
  EXPECT_FALSE(ErrorOf(R"({"sim": {"goal": 1.5}})").empty());
  EXPECT_FALSE(ErrorOf(R"({"agents": [{"name": "sac"}]})").empty());
  EXPECT_FALSE(ErrorOf(R"({"generator": {"n_records": "many"}})").empty());
  EXPECT_FALSE(ErrorOf("{not json").empty());
  EXPECT_FALSE(ErrorOf(R"({"bayesopt": {"bounds": {"depth": [1, 2]}}})").empty());
}

TEST(RunConfigTest, MissingFileIsConfigError) {
  EXPECT_THROW(LoadRunConfig("/nonexistent/viewsim.json"), ConfigError);
}

TEST(RunConfigTest, PinnedConfigsParse) {
  for (const auto& entry :
       std::filesystem::directory_iterator(VIEWSIM_CONFIG_DIR)) {
    EXPECT_NO_THROW(LoadRunConfig(entry.path().string())) << entry.path();
  }
  const RunConfig baselines = LoadRunConfig(ConfigPath("baselines.json"));
  EXPECT_EQ(baselines.sim.config.goal.value(), 0.53);
}

TEST(RunConfigTest, SeedOverride) {
  RunConfig config;
  ::setenv(kSeedEnvVar, "99", 1);
  EXPECT_TRUE(ApplySeedOverride(config));
  EXPECT_EQ(config.seeds, (std::vector<uint64_t>{99}));
  EXPECT_EQ(config.generator.seed, 99u);
  EXPECT_EQ(config.bayesopt.tune.seed, 99u);
  ::setenv(kSeedEnvVar, "12x", 1);
  EXPECT_THROW(ApplySeedOverride(config), ConfigError);
  ::unsetenv(kSeedEnvVar);
  RunConfig untouched;
  EXPECT_FALSE(ApplySeedOverride(untouched));
  EXPECT_EQ(untouched.seeds.size(), 3u);
}

}  // namespace
}  // namespace viewsim
