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

#ifndef VIEWSIM_AGENTS_H_
#define VIEWSIM_AGENTS_H_

// Offline (batch) reinforcement learning from logged transitions: DQN over
// discretized thresholds, DDPG, and TD3, plus the algorithm comparison
// harness. Training never interacts with the simulator; it replays a fixed
// transition log for a number of epochs.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "viewsim/auction_sim.h"
#include "viewsim/core.h"
#include "viewsim/neuralnet.h"
#include "viewsim/predictors.h"
#include "viewsim/rng.h"

namespace viewsim {

enum class Algo { kDqn, kDdpg, kTd3 };

const char* AlgoName(Algo algo);
Algo ParseAlgo(const std::string& name);

struct AgentConfig {
  Algo algo = Algo::kTd3;
  int n_actions = 10;  // dqn only
  double gamma = 0.9;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  int epochs = 30;
  int minibatch = 64;
  double tau = 0.005;
  double td3_policy_noise = 0.2;
  double td3_noise_clip = 0.5;
  int td3_policy_delay = 2;
  std::vector<int> hidden = {64, 64};
  uint64_t seed = 7;

  void Validate() const;
  // Canonical text of every field that affects training.
  std::string Describe() const;
  // Hex FNV-1a digest of Describe().
  std::string Digest() const;
};

// Bounded transition store with a seeded uniform sampler. When full, new
// samples overwrite the oldest.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity);

  void Add(const TransitionSample& sample);
  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const TransitionSample& at(size_t i) const { return data_.at(i); }

  // `minibatch` indices drawn uniformly with replacement. Requires
  // size() >= minibatch.
  std::vector<size_t> Sample(size_t minibatch, Rng& rng) const;
  // A fresh permutation of all indices (one offline epoch).
  std::vector<size_t> EpochOrder(Rng& rng) const;

 private:
  size_t capacity_;
  size_t next_ = 0;
  std::vector<TransitionSample> data_;
};

// Network input for a state: each component mapped from [0, 1] to [-1, 1].
Eigen::Vector3d EncodeState(const CampaignState& state);

// Action bins {i / (n_actions - 1)}.
int ActionToBin(double action, int n_actions);
double BinToAction(int bin, int n_actions);

// r + gamma * next_value, or r when terminal.
double BellmanTarget(double reward, bool terminal, double gamma,
                     double next_value);
// Bellman target on the smaller of the two critic estimates.
double TwinTarget(double reward, bool terminal, double gamma, double q1,
                  double q2);
// clip(actor_action + clip(noise, -noise_clip, noise_clip), 0, 1).
double SmoothedTargetAction(double actor_action, double noise,
                            double noise_clip);

// Actor output (tanh in [-1, 1]) mapped to a threshold in [0, 1].
Eigen::RowVectorXd ActorActions(const Mlp& actor, const Eigen::MatrixXd& states,
                                ForwardCache* cache = nullptr);

// J = mean over columns of Q(s, actor(s)), and its gradient with respect to
// the actor parameters (chained through the critic's action input).
double ActorObjective(const Mlp& actor, const Mlp& critic,
                      const Eigen::MatrixXd& states);
MlpGradients ActorObjectiveGradient(const Mlp& actor, const Mlp& critic,
                                    const Eigen::MatrixXd& states);

// A trained decision function state -> threshold.
class TrainedPolicy {
 public:
  TrainedPolicy() = default;
  TrainedPolicy(Algo algo, int n_actions, Mlp network, std::string digest);

  Algo algo() const { return algo_; }
  int n_actions() const { return n_actions_; }
  const Mlp& network() const { return network_; }
  const std::string& config_digest() const { return digest_; }

  // dqn: argmax bin (ties to the lower bin), decoded. ddpg/td3: squashed
  // actor output. Always in [0, 1].
  UnitInterval Act(const CampaignState& state) const;
  Policy AsPolicy() const;

 private:
  Algo algo_ = Algo::kTd3;
  int n_actions_ = 0;
  Mlp network_;
  std::string digest_;
};

// Manifest line "policy,<algo>,<n_actions>,<digest>" followed by the network.
void WritePolicy(const TrainedPolicy& policy, std::ostream& out);
void WritePolicy(const TrainedPolicy& policy, const std::string& path);
TrainedPolicy ReadPolicy(std::istream& in);
TrainedPolicy ReadPolicy(const std::string& path);

struct TrainStats {
  int64_t critic_updates = 0;
  int64_t actor_updates = 0;
  std::vector<double> epoch_critic_loss;  // mean squared TD error per epoch
  double final_critic_loss = 0.0;
};

struct TrainResult {
  TrainedPolicy policy;
  TrainStats stats;
};

TrainResult DqnTrain(std::span<const TransitionSample> transitions,
                     const AgentConfig& config);
TrainResult DdpgTrain(std::span<const TransitionSample> transitions,
                      const AgentConfig& config);
TrainResult Td3Train(std::span<const TransitionSample> transitions,
                     const AgentConfig& config);
// Dispatches on config.algo.
TrainResult TrainAgent(std::span<const TransitionSample> transitions,
                       const AgentConfig& config);

struct NamedAgent {
  std::string name;  // e.g. "dqn10"
  AgentConfig config;
};

// The four configurations compared in the algorithm study.
std::vector<NamedAgent> DefaultAgentLineup(const AgentConfig& base = {});
// "dqn10" / "dqn20" / "ddpg" / "td3" applied on top of `base`.
AgentConfig AgentConfigFor(const std::string& name, AgentConfig base = {});

struct ComparisonSetup {
  std::span<const ImpressionRecord> train;
  std::span<const ImpressionRecord> eval;
  const LinearModel* view_model = nullptr;
  const LinearModel* bid_model = nullptr;
  SimConfig sim;          // rollouts and evaluation episodes
  int rollout_episodes = 200;
  int random_episodes = 32;  // random-policy episodes per seed
};

struct ComparisonRow {
  std::string algo;
  uint64_t seed = 0;
  int interval = 0;
  double reward = 0.0;
};

struct ComparisonResult {
  std::vector<ComparisonRow> rows;  // includes the "random" reference arm
  std::map<std::string, double> mean_final_reward;
  double random_mean_final_reward = 0.0;
};

// For each seed: random rollouts on the train records, every agent trained
// on the same log, each evaluated on one episode over the eval records.
// Throws InvalidArgumentError if a record appears in both train and eval.
ComparisonResult CompareAlgorithms(const ComparisonSetup& setup,
                                   std::span<const NamedAgent> agents,
                                   std::span<const uint64_t> seeds);

// algo,seed,interval,reward
void WriteComparison(const ComparisonResult& result, std::ostream& out);

}  // namespace viewsim

#endif  // VIEWSIM_AGENTS_H_
