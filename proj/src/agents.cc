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

#include "viewsim/agents.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"

namespace viewsim {

namespace {

constexpr int kStateDim = 3;

struct Batch {
  Eigen::MatrixXd states;       // 3 x B
  Eigen::MatrixXd next_states;  // 3 x B
  Eigen::RowVectorXd actions;   // B, in [0, 1]
  Eigen::RowVectorXd rewards;   // B
  std::vector<bool> terminal;
};

Batch MakeBatch(std::span<const TransitionSample> data,
                std::span<const size_t> idx) {
  const auto b = static_cast<Eigen::Index>(idx.size());
  Batch batch;
  batch.states.resize(kStateDim, b);
  batch.next_states.resize(kStateDim, b);
  batch.actions.resize(b);
  batch.rewards.resize(b);
  batch.terminal.resize(idx.size());
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto& t = data[idx[static_cast<size_t>(j)]];
    batch.states.col(j) = EncodeState(t.state);
    batch.next_states.col(j) = EncodeState(t.next_state);
    batch.actions(j) = t.action;
    batch.rewards(j) = t.reward;
    batch.terminal[static_cast<size_t>(j)] = t.terminal;
  }
  return batch;
}

// Critic input: encoded state stacked over the action mapped to [-1, 1].
Eigen::MatrixXd CriticInput(const Eigen::MatrixXd& states,
                            const Eigen::RowVectorXd& actions) {
  Eigen::MatrixXd x(kStateDim + 1, states.cols());
  x.topRows(kStateDim) = states;
  x.row(kStateDim) = 2.0 * actions.array() - 1.0;
  return x;
}

std::vector<Activation> HiddenActivations(size_t hidden_layers,
                                          Activation output) {
  std::vector<Activation> acts(hidden_layers, Activation::kRelu);
  acts.push_back(output);
  return acts;
}

std::vector<int> Sizes(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Mlp MakeActor(const AgentConfig& c, uint64_t seed) {
  return Mlp(Sizes(kStateDim, c.hidden, 1),
             HiddenActivations(c.hidden.size(), Activation::kTanh), seed);
}

Mlp MakeCritic(const AgentConfig& c, uint64_t seed) {
  return Mlp(Sizes(kStateDim + 1, c.hidden, 1),
             HiddenActivations(c.hidden.size(), Activation::kIdentity), seed);
}

// One regression step of `critic` toward `targets`; returns the mean squared
// error before the step.
double CriticStep(Mlp& critic, AdamOptimizer& opt, const Eigen::MatrixXd& input,
                  const Eigen::RowVectorXd& targets) {
  ForwardCache cache;
  const Eigen::MatrixXd q = critic.Forward(input, &cache);
  const Eigen::RowVectorXd err = q.row(0) - targets;
  const double b = static_cast<double>(targets.size());
  const Eigen::MatrixXd upstream = (2.0 / b) * err;
  opt.Step(critic, critic.Backward(cache, upstream));
  return err.squaredNorm() / b;
}

void ActorStep(Mlp& actor, AdamOptimizer& opt, const Mlp& critic,
               const Eigen::MatrixXd& states) {
  MlpGradients g = ActorObjectiveGradient(actor, critic, states);
  for (auto& layer : g) {
    layer.weight = -layer.weight;
    layer.bias = -layer.bias;
  }
  opt.Step(actor, g);
}

void RequireAlgo(const AgentConfig& config, Algo algo) {
  config.Validate();
  if (config.algo != algo) {
    throw InvalidArgumentError(std::string("config is for ") +
                               AlgoName(config.algo) + ", trainer is " +
                               AlgoName(algo));
  }
}

void RequireData(std::span<const TransitionSample> transitions) {
  if (transitions.empty()) {
    throw InvalidArgumentError("no transitions to train on");
  }
}

// Splits a shuffled epoch order into consecutive minibatches (the last one
// may be short).
template <typename Fn>
void ForEachMinibatch(const std::vector<size_t>& order, int minibatch, Fn fn) {
  const size_t b = static_cast<size_t>(minibatch);
  for (size_t start = 0; start < order.size(); start += b) {
    const size_t len = std::min(b, order.size() - start);
    fn(std::span<const size_t>(order).subspan(start, len));
  }
}

std::vector<size_t> Shuffled(size_t n, Rng& rng) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.Index(i)]);
  return order;
}

std::string HexDigest(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct RecordHash {
  size_t operator()(const ImpressionRecord& r) const {
    uint64_t h = MixSeed(static_cast<uint64_t>(r.timestamp));
    h = MixSeed(h ^ static_cast<uint64_t>(r.domain_id));
    h = MixSeed(h ^ static_cast<uint64_t>(r.cost_micros));
    h = MixSeed(h ^ static_cast<uint64_t>(r.device_type * 16 + r.position * 2 +
                                          (r.viewed ? 1 : 0)));
    return static_cast<size_t>(h);
  }
};

}  // namespace

const char* AlgoName(Algo algo) {
  switch (algo) {
    case Algo::kDqn:
      return "dqn";
    case Algo::kDdpg:
      return "ddpg";
    case Algo::kTd3:
      return "td3";
  }
  return "td3";
}

Algo ParseAlgo(const std::string& name) {
  if (name == "dqn") return Algo::kDqn;
  if (name == "ddpg") return Algo::kDdpg;
  if (name == "td3") return Algo::kTd3;
  throw InvalidArgumentError("unknown algorithm '" + name + "'");
}

void AgentConfig::Validate() const {
  if (algo == Algo::kDqn && n_actions < 2) {
    throw InvalidArgumentError("dqn needs n_actions >= 2");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw InvalidArgumentError("gamma must lie in [0, 1)");
  }
  if (!(actor_lr > 0.0 && critic_lr > 0.0)) {
    throw InvalidArgumentError("learning rates must be positive");
  }
  if (epochs < 1) throw InvalidArgumentError("epochs must be >= 1");
  if (minibatch < 1) throw InvalidArgumentError("minibatch must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgumentError("tau in (0, 1]");
  if (algo == Algo::kTd3) {
    if (!(td3_policy_noise >= 0.0 && td3_noise_clip >= 0.0)) {
      throw InvalidArgumentError("td3 noise parameters must be >= 0");
    }
    if (td3_policy_delay < 1) {
      throw InvalidArgumentError("td3_policy_delay must be >= 1");
    }
  }
  for (int h : hidden) {
    if (h < 1) throw InvalidArgumentError("hidden sizes must be positive");
  }
}

std::string AgentConfig::Describe() const {
  std::ostringstream s;
  s << "algo=" << AlgoName(algo);
  if (algo == Algo::kDqn) s << ";n_actions=" << n_actions;
  s << ";gamma=" << csv::FormatDouble(gamma)
    << ";actor_lr=" << csv::FormatDouble(actor_lr)
    << ";critic_lr=" << csv::FormatDouble(critic_lr) << ";epochs=" << epochs
    << ";minibatch=" << minibatch << ";tau=" << csv::FormatDouble(tau);
  if (algo == Algo::kTd3) {
    s << ";policy_noise=" << csv::FormatDouble(td3_policy_noise)
      << ";noise_clip=" << csv::FormatDouble(td3_noise_clip)
      << ";policy_delay=" << td3_policy_delay;
  }
  s << ";hidden=";
  for (size_t i = 0; i < hidden.size(); ++i) s << (i ? "x" : "") << hidden[i];
  s << ";seed=" << seed;
  return s.str();
}

std::string AgentConfig::Digest() const { return HexDigest(Describe()); }

ReplayBuffer::ReplayBuffer(size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw InvalidArgumentError("capacity must be positive");
}

void ReplayBuffer::Add(const TransitionSample& sample) {
  if (data_.size() < capacity_) {
    data_.push_back(sample);
  } else {
    data_[next_] = sample;
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<size_t> ReplayBuffer::Sample(size_t minibatch, Rng& rng) const {
  if (minibatch == 0 || data_.size() < minibatch) {
    throw InsufficientDataError("replay buffer holds fewer samples than the "
                                "minibatch");
  }
  std::vector<size_t> out(minibatch);
  for (auto& i : out) i = rng.Index(data_.size());
  return out;
}

std::vector<size_t> ReplayBuffer::EpochOrder(Rng& rng) const {
  return Shuffled(data_.size(), rng);
}

Eigen::Vector3d EncodeState(const CampaignState& s) {
  return Eigen::Vector3d(2.0 * s.viewability - 1.0, 2.0 * s.goal - 1.0,
                         2.0 * s.prev_threshold - 1.0);
}

int ActionToBin(double action, int n_actions) {
  const double scaled = std::clamp(action, 0.0, 1.0) * (n_actions - 1);
  return std::clamp(static_cast<int>(std::lround(scaled)), 0, n_actions - 1);
}

double BinToAction(int bin, int n_actions) {
  return static_cast<double>(bin) / static_cast<double>(n_actions - 1);
}

double BellmanTarget(double reward, bool terminal, double gamma,
                     double next_value) {
  return terminal ? reward : reward + gamma * next_value;
}

double TwinTarget(double reward, bool terminal, double gamma, double q1,
                  double q2) {
  return BellmanTarget(reward, terminal, gamma, std::min(q1, q2));
}

double SmoothedTargetAction(double actor_action, double noise,
                            double noise_clip) {
  return std::clamp(
      actor_action + std::clamp(noise, -noise_clip, noise_clip), 0.0, 1.0);
}

Eigen::RowVectorXd ActorActions(const Mlp& actor, const Eigen::MatrixXd& states,
                                ForwardCache* cache) {
  const Eigen::MatrixXd t = actor.Forward(states, cache);
  return 0.5 * (t.row(0).array() + 1.0);
}

double ActorObjective(const Mlp& actor, const Mlp& critic,
                      const Eigen::MatrixXd& states) {
  const Eigen::RowVectorXd a = ActorActions(actor, states);
  return critic.Forward(CriticInput(states, a)).row(0).mean();
}

MlpGradients ActorObjectiveGradient(const Mlp& actor, const Mlp& critic,
                                    const Eigen::MatrixXd& states) {
  ForwardCache actor_cache;
  const Eigen::RowVectorXd a = ActorActions(actor, states, &actor_cache);
  ForwardCache critic_cache;
  critic.Forward(CriticInput(states, a), &critic_cache);
  const double b = static_cast<double>(states.cols());
  const Eigen::MatrixXd upstream =
      Eigen::MatrixXd::Constant(1, states.cols(), 1.0 / b);
  Eigen::MatrixXd d_input;
  critic.Backward(critic_cache, upstream, &d_input);
  // The critic sees 2a - 1 = tanh output, so d/d(tanh) is d/d(input row 3).
  const Eigen::MatrixXd d_tanh = d_input.row(kStateDim);
  return actor.Backward(actor_cache, d_tanh);
}

TrainedPolicy::TrainedPolicy(Algo algo, int n_actions, Mlp network,
                             std::string digest)
    : algo_(algo),
      n_actions_(n_actions),
      network_(std::move(network)),
      digest_(std::move(digest)) {
  const int expected_out = algo == Algo::kDqn ? n_actions : 1;
  const int expected_in = kStateDim;
  if (network_.input_size() != expected_in ||
      network_.output_size() != expected_out) {
    throw InvalidArgumentError("network shape does not match the algorithm");
  }
}

UnitInterval TrainedPolicy::Act(const CampaignState& state) const {
  const Eigen::VectorXd out = network_.Forward(Eigen::VectorXd(EncodeState(state)));
  if (algo_ == Algo::kDqn) {
    int best = 0;
    for (int i = 1; i < out.size(); ++i) {
      if (out(i) > out(best)) best = i;
    }
    return UnitInterval(BinToAction(best, n_actions_));
  }
  return UnitInterval::Clamped(0.5 * (out(0) + 1.0));
}

Policy TrainedPolicy::AsPolicy() const {
  // Copy so the policy stays valid independently of this object.
  auto self = std::make_shared<const TrainedPolicy>(*this);
  return [self](const CampaignState& s) { return self->Act(s).value(); };
}

void WritePolicy(const TrainedPolicy& policy, std::ostream& out) {
  out << "policy," << AlgoName(policy.algo()) << ',' << policy.n_actions()
      << ',' << policy.config_digest() << '\n';
  WriteMlp(policy.network(), out);
}

void WritePolicy(const TrainedPolicy& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  WritePolicy(policy, out);
}

TrainedPolicy ReadPolicy(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty policy file");
  const auto head = csv::SplitLine(line);
  if (head.size() != 4 || head[0] != "policy") {
    throw FormatError("policy manifest must be 'policy,<algo>,<n_actions>,"
                      "<digest>'");
  }
  const Algo algo = ParseAlgo(std::string(head[1]));
  const int n_actions = static_cast<int>(csv::ParseInt(head[2], "n_actions", 1));
  std::string digest(head[3]);
  return TrainedPolicy(algo, n_actions, ReadMlp(in), std::move(digest));
}

TrainedPolicy ReadPolicy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadPolicy(in);
}

TrainResult DqnTrain(std::span<const TransitionSample> transitions,
                     const AgentConfig& config) {
  RequireAlgo(config, Algo::kDqn);
  RequireData(transitions);
  const int n = config.n_actions;
  Mlp q(Sizes(kStateDim, config.hidden, n),
        HiddenActivations(config.hidden.size(), Activation::kIdentity),
        DeriveSeed(config.seed, 1));
  Mlp q_target = q;
  AdamOptimizer opt(q, config.critic_lr);
  Rng rng(DeriveSeed(config.seed, 2));

  std::vector<int> bins(transitions.size());
  for (size_t i = 0; i < transitions.size(); ++i) {
    bins[i] = ActionToBin(transitions[i].action, n);
  }

  TrainStats stats;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    int batches = 0;
    ForEachMinibatch(
        Shuffled(transitions.size(), rng), config.minibatch,
        [&](std::span<const size_t> idx) {
          const Batch batch = MakeBatch(transitions, idx);
          const Eigen::Index b = batch.states.cols();
          const Eigen::MatrixXd next_q = q_target.Forward(batch.next_states);
          ForwardCache cache;
          const Eigen::MatrixXd pred = q.Forward(batch.states, &cache);
          Eigen::MatrixXd upstream = Eigen::MatrixXd::Zero(n, b);
          double sq = 0.0;
          for (Eigen::Index j = 0; j < b; ++j) {
            const double y = BellmanTarget(
                batch.rewards(j), batch.terminal[static_cast<size_t>(j)],
                config.gamma, next_q.col(j).maxCoeff());
            const int a = bins[idx[static_cast<size_t>(j)]];
            const double err = pred(a, j) - y;
            upstream(a, j) = 2.0 * err / static_cast<double>(b);
            sq += err * err;
          }
          opt.Step(q, q.Backward(cache, upstream));
          SoftUpdate(q_target, q, config.tau);
          ++stats.critic_updates;
          loss_sum += sq / static_cast<double>(b);
          ++batches;
        });
    stats.epoch_critic_loss.push_back(loss_sum / batches);
  }
  stats.final_critic_loss = stats.epoch_critic_loss.back();
  return TrainResult{TrainedPolicy(Algo::kDqn, n, std::move(q), config.Digest()),
                     std::move(stats)};
}

TrainResult DdpgTrain(std::span<const TransitionSample> transitions,
                      const AgentConfig& config) {
  RequireAlgo(config, Algo::kDdpg);
  RequireData(transitions);
  Mlp actor = MakeActor(config, DeriveSeed(config.seed, 1));
  Mlp critic = MakeCritic(config, DeriveSeed(config.seed, 2));
  Mlp actor_target = actor;
  Mlp critic_target = critic;
  AdamOptimizer actor_opt(actor, config.actor_lr);
  AdamOptimizer critic_opt(critic, config.critic_lr);
  Rng rng(DeriveSeed(config.seed, 3));

  TrainStats stats;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    int batches = 0;
    ForEachMinibatch(
        Shuffled(transitions.size(), rng), config.minibatch,
        [&](std::span<const size_t> idx) {
          const Batch batch = MakeBatch(transitions, idx);
          const Eigen::RowVectorXd next_a =
              ActorActions(actor_target, batch.next_states);
          const Eigen::MatrixXd next_q =
              critic_target.Forward(CriticInput(batch.next_states, next_a));
          Eigen::RowVectorXd y(batch.rewards.size());
          for (Eigen::Index j = 0; j < y.size(); ++j) {
            y(j) = BellmanTarget(batch.rewards(j),
                                 batch.terminal[static_cast<size_t>(j)],
                                 config.gamma, next_q(0, j));
          }
          loss_sum += CriticStep(critic, critic_opt,
                                 CriticInput(batch.states, batch.actions), y);
          ++stats.critic_updates;
          ActorStep(actor, actor_opt, critic, batch.states);
          ++stats.actor_updates;
          SoftUpdate(critic_target, critic, config.tau);
          SoftUpdate(actor_target, actor, config.tau);
          ++batches;
        });
    stats.epoch_critic_loss.push_back(loss_sum / batches);
  }
  stats.final_critic_loss = stats.epoch_critic_loss.back();
  return TrainResult{
      TrainedPolicy(Algo::kDdpg, 0, std::move(actor), config.Digest()),
      std::move(stats)};
}

TrainResult Td3Train(std::span<const TransitionSample> transitions,
                     const AgentConfig& config) {
  RequireAlgo(config, Algo::kTd3);
  RequireData(transitions);
  Mlp actor = MakeActor(config, DeriveSeed(config.seed, 1));
  Mlp critic1 = MakeCritic(config, DeriveSeed(config.seed, 2));
  Mlp critic2 = MakeCritic(config, DeriveSeed(config.seed, 4));
  Mlp actor_target = actor;
  Mlp critic1_target = critic1;
  Mlp critic2_target = critic2;
  AdamOptimizer actor_opt(actor, config.actor_lr);
  AdamOptimizer critic1_opt(critic1, config.critic_lr);
  AdamOptimizer critic2_opt(critic2, config.critic_lr);
  Rng rng(DeriveSeed(config.seed, 3));
  Rng noise_rng(DeriveSeed(config.seed, 5));

  TrainStats stats;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    int batches = 0;
    ForEachMinibatch(
        Shuffled(transitions.size(), rng), config.minibatch,
        [&](std::span<const size_t> idx) {
          const Batch batch = MakeBatch(transitions, idx);
          Eigen::RowVectorXd next_a =
              ActorActions(actor_target, batch.next_states);
          for (Eigen::Index j = 0; j < next_a.size(); ++j) {
            next_a(j) = SmoothedTargetAction(
                next_a(j), config.td3_policy_noise * noise_rng.Normal(),
                config.td3_noise_clip);
          }
          const Eigen::MatrixXd next_input =
              CriticInput(batch.next_states, next_a);
          const Eigen::MatrixXd q1 = critic1_target.Forward(next_input);
          const Eigen::MatrixXd q2 = critic2_target.Forward(next_input);
          Eigen::RowVectorXd y(batch.rewards.size());
          for (Eigen::Index j = 0; j < y.size(); ++j) {
            y(j) = TwinTarget(batch.rewards(j),
                              batch.terminal[static_cast<size_t>(j)],
                              config.gamma, q1(0, j), q2(0, j));
          }
          const Eigen::MatrixXd input = CriticInput(batch.states, batch.actions);
          loss_sum += CriticStep(critic1, critic1_opt, input, y);
          CriticStep(critic2, critic2_opt, input, y);
          ++stats.critic_updates;
          ++batches;
          if (stats.critic_updates % config.td3_policy_delay == 0) {
            ActorStep(actor, actor_opt, critic1, batch.states);
            ++stats.actor_updates;
            SoftUpdate(critic1_target, critic1, config.tau);
            SoftUpdate(critic2_target, critic2, config.tau);
            SoftUpdate(actor_target, actor, config.tau);
          }
        });
    stats.epoch_critic_loss.push_back(loss_sum / batches);
  }
  stats.final_critic_loss = stats.epoch_critic_loss.back();
  return TrainResult{
      TrainedPolicy(Algo::kTd3, 0, std::move(actor), config.Digest()),
      std::move(stats)};
}

TrainResult TrainAgent(std::span<const TransitionSample> transitions,
                       const AgentConfig& config) {
  switch (config.algo) {
    case Algo::kDqn:
      return DqnTrain(transitions, config);
    case Algo::kDdpg:
      return DdpgTrain(transitions, config);
    case Algo::kTd3:
      return Td3Train(transitions, config);
  }
  throw InvalidArgumentError("unknown algorithm");
}

AgentConfig AgentConfigFor(const std::string& name, AgentConfig base) {
  if (name == "dqn10" || name == "dqn20") {
    base.algo = Algo::kDqn;
    base.n_actions = name == "dqn10" ? 10 : 20;
  } else if (name == "ddpg") {
    base.algo = Algo::kDdpg;
  } else if (name == "td3") {
    base.algo = Algo::kTd3;
  } else {
    throw InvalidArgumentError("unknown agent '" + name +
                               "' (expected dqn10, dqn20, ddpg or td3)");
  }
  return base;
}

std::vector<NamedAgent> DefaultAgentLineup(const AgentConfig& base) {
  std::vector<NamedAgent> out;
  for (const char* name : {"dqn10", "dqn20", "ddpg", "td3"}) {
    out.push_back(NamedAgent{name, AgentConfigFor(name, base)});
  }
  return out;
}

ComparisonResult CompareAlgorithms(const ComparisonSetup& setup,
                                   std::span<const NamedAgent> agents,
                                   std::span<const uint64_t> seeds) {
  if (seeds.empty()) throw InvalidArgumentError("need at least one seed");
  if (!setup.view_model || !setup.bid_model) {
    throw InvalidArgumentError("comparison needs trained predictors");
  }
  {
    std::unordered_set<ImpressionRecord, RecordHash> train_set(
        setup.train.begin(), setup.train.end());
    for (const auto& r : setup.eval) {
      if (train_set.count(r)) {
        throw InvalidArgumentError(
            "train and eval datasets overlap; evaluation must use disjoint "
            "records");
      }
    }
  }
  const ReplayMarket train_market(setup.train, *setup.view_model,
                                  *setup.bid_model);
  const ReplayMarket eval_market(setup.eval, *setup.view_model,
                                 *setup.bid_model);

  ComparisonResult result;
  std::map<std::string, double> final_sum;
  double random_final_sum = 0.0;
  int random_count = 0;
  for (uint64_t seed : seeds) {
    SimConfig rollout_config = setup.sim;
    rollout_config.seed = DeriveSeed(seed, 0);
    const auto log =
        CollectRandomRollouts(train_market, rollout_config, setup.rollout_episodes);

    SimConfig eval_config = setup.sim;
    eval_config.seed = DeriveSeed(seed, 1);

    // Random reference arm: average curve over several random policies on the
    // same auction stream.
    std::vector<double> random_curve(
        static_cast<size_t>(eval_config.intervals_per_day), 0.0);
    for (int j = 0; j < setup.random_episodes; ++j) {
      const auto ep = RunEpisode(
          MakeRandomPolicy(DeriveSeed(seed, 1000 + static_cast<uint64_t>(j))),
          eval_market, eval_config);
      for (size_t t = 0; t < random_curve.size(); ++t) {
        random_curve[t] += ep.intervals[t].reward / setup.random_episodes;
      }
      random_final_sum += ep.intervals.back().reward;
      ++random_count;
    }
    for (size_t t = 0; t < random_curve.size(); ++t) {
      result.rows.push_back(
          ComparisonRow{"random", seed, static_cast<int>(t), random_curve[t]});
    }

    for (const auto& agent : agents) {
      AgentConfig config = agent.config;
      config.seed = seed;
      const auto trained = TrainAgent(log, config);
      const auto ep = RunEpisode(trained.policy.AsPolicy(), eval_market,
                                 eval_config);
      for (const auto& iv : ep.intervals) {
        result.rows.push_back(ComparisonRow{agent.name, seed, iv.index, iv.reward});
      }
      final_sum[agent.name] += ep.intervals.back().reward;
    }
  }
  for (const auto& [name, sum] : final_sum) {
    result.mean_final_reward[name] = sum / static_cast<double>(seeds.size());
  }
  result.random_mean_final_reward = random_final_sum / random_count;
  return result;
}

void WriteComparison(const ComparisonResult& result, std::ostream& out) {
  out << "algo,seed,interval,reward\n";
  for (const auto& row : result.rows) {
    out << row.algo << ',' << row.seed << ',' << row.interval << ','
        << csv::FormatDouble(row.reward) << '\n';
  }
}

}  // namespace viewsim
