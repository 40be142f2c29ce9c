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

// Command-line driver: data generation, predictor training, rollouts, agent
// training, experiments and plot data. Exit codes: 0 success, 1 runtime
// failure, 2 usage or configuration error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "viewsim/agents.h"
#include "viewsim/auction_sim.h"
#include "viewsim/csv_util.h"
#include "viewsim/dataset.h"
#include "viewsim/errors.h"
#include "viewsim/experiments.h"
#include "viewsim/predictors.h"
#include "viewsim/run_config.h"

namespace {

namespace fs = std::filesystem;
using namespace viewsim;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

constexpr const char* kViewModelFile = "view_model.csv";
constexpr const char* kBidModelFile = "bid_model.csv";

class UsageError : public Error {
 public:
  using Error::Error;
};

RunConfig LoadConfig(const std::string& path) {
  RunConfig config = path.empty() ? RunConfig{} : LoadRunConfig(path);
  ApplySeedOverride(config);
  return config;
}

int GenData(const std::string& config_path, const std::string& out) {
  const RunConfig config = LoadConfig(config_path);
  const auto records = GenerateLld(config.generator);
  WriteLld(records, out);
  int64_t views = 0;
  for (const auto& r : records) views += r.viewed ? 1 : 0;
  std::cout << "records=" << records.size() << " view_rate="
            << csv::FormatDouble(static_cast<double>(views) /
                                 static_cast<double>(records.size()))
            << '\n';
  return kExitOk;
}

int TrainPredictors(const std::string& config_path, const std::string& data,
                    const std::string& out_dir) {
  const RunConfig config = LoadConfig(config_path);
  const PreparedData prepared = PrepareData(ReadLld(data), config.predictors);
  fs::create_directories(out_dir);
  WriteModel(prepared.view_model, (fs::path(out_dir) / kViewModelFile).string());
  WriteModel(prepared.bid_model, (fs::path(out_dir) / kBidModelFile).string());
  std::cout << "train=" << prepared.train.size()
            << " eval=" << prepared.eval.size()
            << " eval_auc=" << csv::FormatDouble(prepared.metrics.eval_auc)
            << " bid_rmse_micros="
            << csv::FormatDouble(prepared.metrics.bid_rmse_micros) << '\n';
  return kExitOk;
}

int Rollouts(const std::string& config_path, const std::string& data,
             const std::string& models, int episodes, const std::string& out) {
  if (episodes < 1) throw UsageError("--episodes must be >= 1");
  const RunConfig config = LoadConfig(config_path);
  const auto split =
      SplitTrainEval(ReadLld(data), config.predictors.train_fraction);
  const LinearModel view = ReadModel((fs::path(models) / kViewModelFile).string());
  const LinearModel bid = ReadModel((fs::path(models) / kBidModelFile).string());
  const ReplayMarket market(split.train, view, bid);
  const auto transitions = CollectRandomRollouts(
      market, RolloutSimConfig(config.sim.config, config.seeds.front()),
      episodes);
  WriteTransitions(transitions, out);
  std::cout << "transitions=" << transitions.size() << '\n';
  return kExitOk;
}

int TrainAgentCmd(const std::string& config_path, const std::string& algo,
                  const std::string& transitions_path, const std::string& out,
                  std::optional<uint64_t> seed) {
  const RunConfig config = LoadConfig(config_path);
  AgentConfig agent = config.AgentNamed(algo);
  if (seed) {
    agent.seed = *seed;
  } else if (std::getenv(kSeedEnvVar) != nullptr) {
    agent.seed = config.seeds.front();
  }
  const auto transitions = ReadTransitions(transitions_path);
  const auto result = TrainAgent(transitions, agent);
  WritePolicy(result.policy, out);
  std::cout << "algo=" << algo << " critic_updates="
            << result.stats.critic_updates << " final_loss="
            << csv::FormatDouble(result.stats.final_critic_loss) << '\n';
  return kExitOk;
}

int RunExperimentCmd(const std::string& config_path, const std::string& name,
                     const std::string& out_dir,
                     const std::optional<std::string>& policy) {
  ExperimentKind kind;
  try {
    kind = ParseExperiment(name);
  } catch (const InvalidArgumentError& e) {
    throw UsageError(e.what());
  }
  const RunConfig config = LoadConfig(config_path);
  RunExperiment(kind, config, ExperimentOptions{out_dir, policy});
  std::cout << "experiment=" << name << " out_dir=" << out_dir << '\n';
  return kExitOk;
}

int PlotData(const std::string& in_dir, std::string out_dir) {
  if (!fs::is_directory(in_dir)) {
    throw UsageError("input directory '" + in_dir + "' does not exist");
  }
  if (out_dir.empty()) out_dir = (fs::path(in_dir) / "plot").string();
  const auto files = WritePlotData(in_dir, out_dir);
  std::cout << "series=" << files.size() << " out_dir=" << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewsim: viewability-threshold control laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string out_dir;
  std::string data;
  std::string models;
  std::string in_dir;
  std::string algo;
  std::string transitions;
  std::string experiment;
  std::optional<std::string> policy;
  std::optional<uint64_t> seed;
  int episodes = 0;

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic log-level data");
  gen->add_option("--config", config_path, "Run configuration (JSON)")
      ->required();
  gen->add_option("--out", out, "Output CSV path")->required();

  auto* preds =
      app.add_subcommand("train-predictors", "Train view and bid models");
  preds->add_option("--data", data, "Log-level data CSV")->required();
  preds->add_option("--out-dir", out_dir, "Model output directory")->required();
  preds->add_option("--config", config_path, "Run configuration (JSON)");

  auto* roll = app.add_subcommand("rollouts", "Random-threshold rollouts");
  roll->add_option("--data", data, "Log-level data CSV")->required();
  roll->add_option("--models", models, "Directory with trained models")
      ->required();
  roll->add_option("--episodes", episodes, "Number of episodes")->required();
  roll->add_option("--out", out, "Transition CSV path")->required();
  roll->add_option("--config", config_path, "Run configuration (JSON)");

  auto* train = app.add_subcommand("train-agent", "Train an offline RL agent");
  train->add_option("--algo", algo, "Agent")
      ->required()
      ->check(CLI::IsMember({"dqn10", "dqn20", "ddpg", "td3"}));
  train->add_option("--transitions", transitions, "Transition CSV")->required();
  train->add_option("--out", out, "Policy output path")->required();
  train->add_option("--config", config_path, "Run configuration (JSON)");
  train->add_option("--seed", seed, "Training seed");

  auto* run = app.add_subcommand("run-experiment", "Run an experiment");
  run->add_option("experiment", experiment,
                  "compare-algos | baselines | rl-vs-pid | sanity | tune")
      ->required()
      ->check(CLI::IsMember(
          {"compare-algos", "baselines", "rl-vs-pid", "sanity", "tune"}));
  run->add_option("--config", config_path, "Run configuration (JSON)")
      ->required();
  run->add_option("--out-dir", out_dir, "Output directory")->required();
  run->add_option("--policy", policy, "Policy file (sanity only)");

  auto* plot = app.add_subcommand("plot-data", "Emit gnuplot series files");
  plot->add_option("--in", in_dir, "Experiment output directory")->required();
  plot->add_option("--out", out_dir, "Series directory (default <in>/plot)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return GenData(config_path, out);
    if (*preds) return TrainPredictors(config_path, data, out_dir);
    if (*roll) return Rollouts(config_path, data, models, episodes, out);
    if (*train) return TrainAgentCmd(config_path, algo, transitions, out, seed);
    if (*run) return RunExperimentCmd(config_path, experiment, out_dir, policy);
    if (*plot) return PlotData(in_dir, out_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
