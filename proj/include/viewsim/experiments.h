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

#ifndef VIEWSIM_EXPERIMENTS_H_
#define VIEWSIM_EXPERIMENTS_H_

// Experiment drivers shared by the command-line tool and the acceptance
// tests: data preparation, algorithm comparison, baseline comparison, RL vs
// PID on a goal-change schedule, the policy sanity battery, and tuning.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viewsim/agents.h"
#include "viewsim/auction_sim.h"
#include "viewsim/bayesopt.h"
#include "viewsim/controllers.h"
#include "viewsim/dataset.h"
#include "viewsim/predictors.h"
#include "viewsim/run_config.h"

namespace viewsim {

struct PredictorMetrics {
  double eval_auc = 0.0;
  double bid_rmse_micros = 0.0;  // on eval records
};

struct PreparedData {
  std::vector<ImpressionRecord> train;
  std::vector<ImpressionRecord> eval;
  LinearModel view_model;
  LinearModel bid_model;
  PredictorMetrics metrics;
};

// Chronological split and both predictors trained on the train part.
PreparedData PrepareData(std::vector<ImpressionRecord> records,
                         const PredictorSettings& settings);
// Generates the records from config.generator first.
PreparedData PrepareData(const RunConfig& config);

PredictorMetrics EvaluatePredictors(std::span<const ImpressionRecord> eval,
                                    const LinearModel& view_model,
                                    const LinearModel& bid_model);

// One evaluated episode of one arm.
struct ArmEpisode {
  std::string arm;
  uint64_t seed = 0;
  EpisodeReport episode;
};

// Seed-derived simulator configs: rollouts on train, evaluation on eval.
SimConfig RolloutSimConfig(const SimConfig& base, uint64_t seed);
SimConfig EvalSimConfig(const SimConfig& base, uint64_t seed);

// Random rollouts on the train market for one seed.
std::vector<TransitionSample> TrainRollouts(const PreparedData& data,
                                            const SimSettings& sim,
                                            uint64_t seed);

// Sensitivity estimates from rollouts: each episode's first transition is
// skipped because its viewability was not produced by its threshold.
std::vector<double> RolloutAlphaSamples(
    std::span<const TransitionSample> rollouts, int intervals_per_episode);

ComparisonResult RunCompareAlgos(const PreparedData& data,
                                 const RunConfig& config);

struct BaselinesResult {
  std::vector<ArmEpisode> arms;  // per seed: greedy_alpha_median,
                                 // greedy_alpha_mean, td3
  std::map<uint64_t, double> realized_alpha_median;
  std::map<uint64_t, double> realized_alpha_mean_positive;
};

inline constexpr const char* kArmGreedyMedian = "greedy_alpha_median";
inline constexpr const char* kArmGreedyMean = "greedy_alpha_mean";
inline constexpr const char* kArmTd3 = "td3";
inline constexpr const char* kArmPid = "pid";

BaselinesResult RunBaselines(const PreparedData& data, const RunConfig& config);

// Running sum of per-interval rewards.
std::vector<double> CumulativeReward(const EpisodeReport& episode);

// 1-based count of intervals until measured viewability is first within
// `band` of that interval's goal; nullopt if it never is.
std::optional<int> FirstGoalEntry(const EpisodeReport& episode, double band);

struct RlVsPidResult {
  std::vector<ArmEpisode> arms;  // per seed: td3, pid
};

// The long goal-change run: config.sim.long_run_intervals intervals with
// the long-run schedule, same per-interval auction volume as a day.
SimConfig LongRunSimConfig(const SimSettings& sim, uint64_t seed);

RlVsPidResult RunRlVsPid(const PreparedData& data, const RunConfig& config);

struct SanityResult {
  std::vector<UnitInterval> goals;
  std::vector<GoalReachResult> reach;  // one per goal
  std::vector<bool> stable;            // one per goal
  SweepReport sweep;
};

using PolicyFactory = std::function<Policy()>;

// Goal reaching and stability on the linear toy for goals 0.6, 0.7, 0.8,
// and the direction sweep. A fresh policy is made for every check.
SanityResult RunSanity(const PolicyFactory& make_policy);

struct TuneExperimentResult {
  TuneResult tuned;
  TuneResult random_search;
  double random_median = 0.0;
};

// Objective: train DDPG with the candidate hyperparameters on fixed
// rollouts and return the evaluation episode's day-level reward.
Objective MakeDdpgObjective(const PreparedData& data, const RunConfig& config,
                            std::span<const TransitionSample> rollouts);

TuneExperimentResult RunTune(const PreparedData& data, const RunConfig& config,
                             const std::optional<std::string>& trace_path,
                             const std::optional<std::string>& random_path);

enum class ExperimentKind { kCompareAlgos, kBaselines, kRlVsPid, kSanity, kTune };

const char* ExperimentName(ExperimentKind kind);
ExperimentKind ParseExperiment(const std::string& name);

struct ExperimentOptions {
  std::string out_dir;
  // sanity: policy file to check; without one the greedy baseline and the
  // PID controller are checked.
  std::optional<std::string> policy_path;
};

// Writes the experiment's CSVs and summary.json into out_dir. On failure a
// FAILED marker holding the message is written next to any partial outputs
// and the error is rethrown.
void RunExperiment(ExperimentKind kind, const RunConfig& config,
                   const ExperimentOptions& options);

// algo,seed,interval,reward
void WriteArmRewards(std::span<const ArmEpisode> arms, std::ostream& out);
// algo,seed,interval,goal,threshold,viewability,wins,reward
void WriteTimeline(std::span<const ArmEpisode> arms, std::ostream& out);

// Converts an experiment output directory into whitespace-separated series
// files under out_dir (one per curve). Returns the files written.
std::vector<std::string> WritePlotData(const std::string& in_dir,
                                       const std::string& out_dir);

}  // namespace viewsim

#endif  // VIEWSIM_EXPERIMENTS_H_
