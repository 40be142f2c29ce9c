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

#include "viewsim/experiments.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "viewsim/errors.h"

namespace viewsim {
namespace {

namespace fs = std::filesystem;

RunConfig SmokeConfig() {
  return LoadRunConfig(std::string(VIEWSIM_CONFIG_DIR) + "/smoke.json");
}

fs::path FreshDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "viewsim_experiments_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string FirstLine(const fs::path& path) {
  const std::string text = Slurp(path);
  return text.substr(0, text.find('\n'));
}

EpisodeReport Episode(const std::vector<double>& viewability, double goal) {
  EpisodeReport e;
  for (size_t t = 0; t < viewability.size(); ++t) {
    IntervalReport r;
    r.index = static_cast<int>(t);
    r.wins = 10;
    r.measured_viewability = UnitInterval(viewability[t]);
    r.goal = UnitInterval(goal);
    r.reward = Reward(r.measured_viewability, r.goal);
    e.intervals.push_back(r);
  }
  return e;
}

TEST(ExperimentHelpersTest, CumulativeReward) {
  const auto e = Episode({0.7, 0.6, 0.7}, 0.7);
  const auto c = CumulativeReward(e);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_NEAR(c[1], 1.81, 1e-12);
  EXPECT_NEAR(c[2], 2.81, 1e-12);
}

TEST(ExperimentHelpersTest, FirstGoalEntryIsOneBased) {
  EXPECT_EQ(FirstGoalEntry(Episode({0.5, 0.6, 0.68}, 0.7), 0.05), 3);
  EXPECT_EQ(FirstGoalEntry(Episode({0.7}, 0.7), 0.05), 1);
  EXPECT_FALSE(FirstGoalEntry(Episode({0.5, 0.5}, 0.7), 0.05).has_value());
  auto collapsed = Episode({0.7}, 0.7);
  collapsed.intervals[0].wins = 0;
  EXPECT_FALSE(FirstGoalEntry(collapsed, 0.05).has_value());
}

TEST(ExperimentHelpersTest, SeedDerivedSimConfigs) {
  SimConfig base;
  EXPECT_EQ(RolloutSimConfig(base, 7).seed, DeriveSeed(7, 0));
  EXPECT_EQ(EvalSimConfig(base, 7).seed, DeriveSeed(7, 1));
  SimSettings sim;
  const SimConfig long_run = LongRunSimConfig(sim, 7);
  EXPECT_EQ(long_run.intervals_per_day, 96);
  EXPECT_EQ(long_run.n_per_day, 4 * sim.config.n_per_day);
  ASSERT_EQ(long_run.goal_schedule.size(), 2u);
  EXPECT_EQ(long_run.GoalAt(47).value(), 0.7);
  EXPECT_EQ(long_run.GoalAt(48).value(), 0.8);
  EXPECT_EQ(long_run.GoalAt(72).value(), 0.6);
}

TEST(ExperimentHelpersTest, RolloutAlphaSamplesSkipEpisodeStarts) {
  std::vector<TransitionSample> log;
  const EnvModelParams params{0.5};
  for (int e = 0; e < 2; ++e) {
    // Each episode starts from an arbitrary state the model did not produce.
    CampaignState s{UnitInterval(0.9), UnitInterval(0.7), UnitInterval(0.05)};
    for (int t = 0; t < 4; ++t) {
      const UnitInterval a(0.2 + 0.15 * t + 0.05 * e);
      const UnitInterval v =
          t == 0 ? UnitInterval(0.3)
                 : PredictNextViewability(s.viewability, s.prev_threshold, a, params);
      const CampaignState next{v, s.goal, a};
      log.push_back({s, a, 0.0, next, t == 3});
      s = next;
    }
  }
  const auto samples = RolloutAlphaSamples(log, 4);
  ASSERT_EQ(samples.size(), 6u);
  for (double a : samples) EXPECT_NEAR(a, 0.5, 1e-9);
}

TEST(ExperimentKindTest, Names) {
  for (auto kind : {ExperimentKind::kCompareAlgos, ExperimentKind::kBaselines,
                    ExperimentKind::kRlVsPid, ExperimentKind::kSanity,
                    ExperimentKind::kTune}) {
    EXPECT_EQ(ParseExperiment(ExperimentName(kind)), kind);
  }
  EXPECT_EQ(std::string(ExperimentName(ExperimentKind::kRlVsPid)), "rl-vs-pid");
  EXPECT_THROW(ParseExperiment("fig4"), Error);
}

class ExperimentRunTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    config_ = std::make_unique<RunConfig>(SmokeConfig());
    data_ = std::make_unique<PreparedData>(PrepareData(*config_));
  }
  static void TearDownTestSuite() {
    data_.reset();
    config_.reset();
  }
  static std::unique_ptr<RunConfig> config_;
  static std::unique_ptr<PreparedData> data_;
};

std::unique_ptr<RunConfig> ExperimentRunTest::config_;
std::unique_ptr<PreparedData> ExperimentRunTest::data_;

TEST_F(ExperimentRunTest, PreparedDataIsDisjointAndScored) {
  EXPECT_EQ(data_->train.size() + data_->eval.size(), 6000u);
  EXPECT_LE(data_->train.back().timestamp, data_->eval.front().timestamp);
  EXPECT_GT(data_->metrics.eval_auc, 0.5);
  EXPECT_LE(data_->metrics.eval_auc, 1.0);
  EXPECT_GT(data_->metrics.bid_rmse_micros, 0.0);
}

TEST_F(ExperimentRunTest, BaselinesArms) {
  const auto result = RunBaselines(*data_, *config_);
  ASSERT_EQ(result.arms.size(), 3u);
  EXPECT_EQ(result.arms[0].arm, kArmGreedyMedian);
  EXPECT_EQ(result.arms[1].arm, kArmGreedyMean);
  EXPECT_EQ(result.arms[2].arm, kArmTd3);
  EXPECT_EQ(result.realized_alpha_median.count(7), 1u);
}

TEST_F(ExperimentRunTest, RlVsPidTimeline) {
  const auto result = RunRlVsPid(*data_, *config_);
  ASSERT_EQ(result.arms.size(), 2u);
  for (const auto& arm : result.arms) {
    EXPECT_EQ(arm.episode.intervals.size(), 48u);
    EXPECT_EQ(arm.episode.intervals[30].goal.value(), 0.8);
  }
  std::ostringstream out;
  WriteTimeline(result.arms, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "algo,seed,interval,goal,threshold,viewability,wins,reward");
}

TEST_F(ExperimentRunTest, SanityOfBaselines) {
  const auto greedy = RunSanity([] { return MakeGreedyPolicy({0.204}); });
  ASSERT_EQ(greedy.goals.size(), 3u);
  EXPECT_EQ(greedy.sweep.pass_fraction, 1.0);
  const auto pid = RunSanity([] { return MakePidPolicy({}); });
  for (const auto& r : pid.reach) EXPECT_TRUE(r.reached);
  for (bool s : pid.stable) EXPECT_TRUE(s);
}

TEST_F(ExperimentRunTest, RunExperimentWritesOutputs) {
  struct Case {
    ExperimentKind kind;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases = {
      {ExperimentKind::kCompareAlgos,
       {"rewards.csv", "comparison_table.csv", "summary.json"}},
      {ExperimentKind::kBaselines,
       {"rewards.csv", "viewability_timeline.csv", "summary.json"}},
      {ExperimentKind::kRlVsPid,
       {"rewards.csv", "viewability_timeline.csv", "summary.json"}},
      {ExperimentKind::kSanity, {"sanity_report.csv", "summary.json"}},
      {ExperimentKind::kTune,
       {"tune_trace.csv", "random_trace.csv", "summary.json"}},
  };
  for (const auto& c : cases) {
    const fs::path dir = FreshDir(ExperimentName(c.kind));
    RunExperiment(c.kind, *config_, {dir.string(), std::nullopt});
    for (const auto& f : c.files) {
      EXPECT_TRUE(fs::exists(dir / f)) << ExperimentName(c.kind) << " " << f;
    }
    EXPECT_FALSE(fs::exists(dir / "FAILED"));
  }
  const fs::path root = fs::temp_directory_path() / "viewsim_experiments_test";
  EXPECT_EQ(FirstLine(root / "compare-algos" / "rewards.csv"),
            "algo,seed,interval,reward");
  EXPECT_EQ(FirstLine(root / "sanity" / "sanity_report.csv"),
            "v,goal,phi_prev,action,direction_ok");
  const std::string trace = Slurp(root / "tune" / "tune_trace.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'),
            1 + config_->bayesopt.tune.budget);

  const fs::path plots = FreshDir("plots");
  const auto files = WritePlotData((root / "compare-algos").string(),
                                   plots.string());
  EXPECT_FALSE(files.empty());
  EXPECT_TRUE(fs::exists(plots / "reward_td3.dat"));
  const std::string first = Slurp(plots / "reward_td3.dat");
  WritePlotData((root / "compare-algos").string(), plots.string());
  EXPECT_EQ(Slurp(plots / "reward_td3.dat"), first);
}

TEST_F(ExperimentRunTest, FailureLeavesMarker) {
  const fs::path dir = FreshDir("failed");
  RunConfig broken = *config_;
  broken.generator.true_view_weights.fill(0.0);
  broken.generator.true_view_weights[kBiasColumn] = 40.0;
  EXPECT_THROW(RunExperiment(ExperimentKind::kCompareAlgos, broken,
                             {dir.string(), std::nullopt}),
               Error);
  EXPECT_TRUE(fs::exists(dir / "FAILED"));
  // A later successful run clears the stale marker.
  RunExperiment(ExperimentKind::kSanity, *config_, {dir.string(), std::nullopt});
  EXPECT_FALSE(fs::exists(dir / "FAILED"));
}

TEST(PlotDataTest, MissingInputDirectory) {
  EXPECT_THROW(WritePlotData("/nonexistent/viewsim", "/tmp"), Error);
}

}  // namespace
}  // namespace viewsim
