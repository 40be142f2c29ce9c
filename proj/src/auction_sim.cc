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

#include "viewsim/auction_sim.h"

#include <cmath>
#include <fstream>
#include <memory>
#include <string>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"
#include "viewsim/rng.h"

namespace viewsim {

namespace {

// Per-interval auction counters.
struct Tally {
  int64_t bids = 0;
  int64_t wins = 0;
  int64_t viewable_wins = 0;
  int64_t spend = 0;

  void Add(double p_view, int64_t bid, int64_t cost, bool viewed,
           double threshold) {
    if (p_view < threshold) return;
    ++bids;
    if (bid >= cost) {
      ++wins;
      spend += cost;
      if (viewed) ++viewable_wins;
    }
  }

  IntervalReport ToReport(UnitInterval threshold, UnitInterval carry) const {
    IntervalReport r;
    r.threshold = threshold;
    r.bids = bids;
    r.wins = wins;
    r.viewable_wins = viewable_wins;
    r.spend_micros = spend;
    r.delivery_collapse = wins == 0;
    r.measured_viewability =
        wins > 0 ? UnitInterval(static_cast<double>(viewable_wins) /
                                static_cast<double>(wins))
                 : carry;
    return r;
  }
};

UnitInterval CheckedAction(double action) {
  if (!(action >= 0.0 && action <= 1.0)) {
    throw PolicyContractError("policy returned threshold " +
                              std::to_string(action) + " outside [0, 1]");
  }
  return UnitInterval(action);
}

}  // namespace

void SimConfig::Validate() const {
  if (intervals_per_day <= 0) {
    throw InvalidArgumentError("intervals_per_day must be positive");
  }
  if (n_per_day < intervals_per_day) {
    throw InvalidArgumentError("n_per_day must be >= intervals_per_day");
  }
  RewardParams{goal, reward_exponent}.Validate();
  int last = -1;
  for (const auto& change : goal_schedule) {
    if (change.interval <= last) {
      throw InvalidArgumentError("goal_schedule must be strictly increasing");
    }
    last = change.interval;
  }
  if (rollout_goal_min.has_value() != rollout_goal_max.has_value()) {
    throw InvalidArgumentError("rollout goal range needs both min and max");
  }
  if (rollout_goal_min && *rollout_goal_min > *rollout_goal_max) {
    throw InvalidArgumentError("rollout goal range is empty");
  }
}

UnitInterval SimConfig::GoalAt(int interval) const {
  UnitInterval g = goal;
  for (const auto& change : goal_schedule) {
    if (change.interval <= interval) g = change.goal;
  }
  return g;
}

IntervalReport RunInterval(UnitInterval threshold,
                           std::span<const ImpressionRecord> impressions,
                           const LinearModel& view_model,
                           const LinearModel& bid_model,
                           UnitInterval carry_viewability) {
  Tally tally;
  for (const auto& r : impressions) {
    const double p = PredictViewProbability(view_model, r);
    if (p < threshold) continue;
    tally.Add(p, BidPrice(bid_model, r), r.cost_micros, r.viewed, threshold);
  }
  return tally.ToReport(threshold, carry_viewability);
}

ReplayMarket::ReplayMarket(std::span<const ImpressionRecord> pool,
                           const LinearModel& view_model,
                           const LinearModel& bid_model)
    : pool_(pool) {
  if (pool.empty()) throw InvalidArgumentError("replay pool is empty");
  scored_.reserve(pool.size());
  for (const auto& r : pool) {
    scored_.push_back(Scored{PredictViewProbability(view_model, r),
                             BidPrice(bid_model, r), r.cost_micros, r.viewed});
  }
}

IntervalReport ReplayMarket::RunInterval(UnitInterval threshold,
                                         std::span<const size_t> indices,
                                         UnitInterval carry_viewability) const {
  Tally tally;
  for (size_t i : indices) {
    const Scored& s = scored_[i];
    tally.Add(s.p_view, s.bid, s.cost, s.viewed, threshold);
  }
  return tally.ToReport(threshold, carry_viewability);
}

EpisodeReport RunEpisode(const Policy& policy, const ReplayMarket& market,
                         const SimConfig& config) {
  config.Validate();
  const auto stream =
      SampleAuctionIndices(market.size(), config.n_per_day, config.seed);
  const auto k = static_cast<size_t>(config.intervals_per_day);
  const size_t base = stream.size() / k;
  const size_t extra = stream.size() % k;

  EpisodeReport out;
  out.intervals.reserve(k);
  out.states.reserve(k + 1);
  UnitInterval v = config.initial_viewability;
  UnitInterval phi = config.initial_threshold;
  size_t offset = 0;
  for (size_t t = 0; t < k; ++t) {
    const UnitInterval goal = config.GoalAt(static_cast<int>(t));
    const CampaignState state{v, goal, phi};
    out.states.push_back(state);
    const UnitInterval action = CheckedAction(policy(state));

    const size_t len = base + (t < extra ? 1 : 0);
    IntervalReport report = market.RunInterval(
        action, std::span<const size_t>(stream).subspan(offset, len), v);
    offset += len;
    report.index = static_cast<int>(t);
    report.goal = goal;
    report.reward = report.delivery_collapse
                        ? 0.0
                        : Reward(report.measured_viewability, goal,
                                 config.reward_exponent);
    out.wins += report.wins;
    out.viewable_wins += report.viewable_wins;
    out.spend_micros += report.spend_micros;
    v = report.measured_viewability;
    phi = action;
    out.intervals.push_back(report);
  }
  out.states.push_back(
      CampaignState{v, config.GoalAt(static_cast<int>(k)), phi});
  if (out.wins > 0) {
    out.day_viewability = UnitInterval(static_cast<double>(out.viewable_wins) /
                                       static_cast<double>(out.wins));
    out.day_reward =
        Reward(out.day_viewability, config.goal, config.reward_exponent);
  }
  return out;
}

EpisodeReport RunEpisode(const Policy& policy,
                         std::span<const ImpressionRecord> eval,
                         const LinearModel& view_model,
                         const LinearModel& bid_model, const SimConfig& config) {
  const ReplayMarket market(eval, view_model, bid_model);
  return RunEpisode(policy, market, config);
}

std::vector<TransitionSample> EpisodeTransitions(const EpisodeReport& episode) {
  std::vector<TransitionSample> out;
  const size_t k = episode.intervals.size();
  out.reserve(k);
  for (size_t t = 0; t < k; ++t) {
    out.push_back(TransitionSample{episode.states[t],
                                   episode.intervals[t].threshold,
                                   episode.intervals[t].reward,
                                   episode.states[t + 1], t + 1 == k});
  }
  return out;
}

std::vector<TransitionSample> CollectRandomRollouts(const ReplayMarket& market,
                                                    const SimConfig& config,
                                                    int episodes) {
  if (episodes < 1) throw InvalidArgumentError("episodes must be >= 1");
  config.Validate();
  std::vector<TransitionSample> out;
  for (int e = 0; e < episodes; ++e) {
    const uint64_t episode_seed =
        DeriveSeed(config.seed, static_cast<uint64_t>(e));
    SimConfig episode_config = config;
    episode_config.seed = episode_seed;
    if (config.rollout_goal_min) {
      Rng goal_rng(DeriveSeed(episode_seed, 2));
      episode_config.goal = UnitInterval::Clamped(
          goal_rng.Uniform(*config.rollout_goal_min, *config.rollout_goal_max));
      episode_config.goal_schedule.clear();
    }
    const auto episode = RunEpisode(MakeRandomPolicy(DeriveSeed(episode_seed, 1)),
                                    market, episode_config);
    auto transitions = EpisodeTransitions(episode);
    out.insert(out.end(), transitions.begin(), transitions.end());
  }
  return out;
}

Policy MakeRandomPolicy(uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const CampaignState&) { return rng->Uniform(); };
}

Policy MakeConstantPolicy(double threshold) {
  return [threshold](const CampaignState&) { return threshold; };
}

const std::vector<std::string>& TransitionColumns() {
  static const std::vector<std::string> kColumns = {
      "v",      "goal",      "phi_prev",      "action",  "reward",
      "v_next", "goal_next", "phi_prev_next", "terminal"};
  return kColumns;
}

void WriteTransitions(std::span<const TransitionSample> samples,
                      std::ostream& out) {
  using csv::FormatDouble;
  out << csv::JoinHeader(TransitionColumns()) << '\n';
  for (const auto& s : samples) {
    out << FormatDouble(s.state.viewability) << ','
        << FormatDouble(s.state.goal) << ','
        << FormatDouble(s.state.prev_threshold) << ','
        << FormatDouble(s.action) << ',' << FormatDouble(s.reward) << ','
        << FormatDouble(s.next_state.viewability) << ','
        << FormatDouble(s.next_state.goal) << ','
        << FormatDouble(s.next_state.prev_threshold) << ','
        << (s.terminal ? 1 : 0) << '\n';
  }
}

void WriteTransitions(std::span<const TransitionSample> samples,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  WriteTransitions(samples, out);
}

std::vector<TransitionSample> ReadTransitions(std::istream& in) {
  const auto& cols = TransitionColumns();
  csv::ExpectHeader(in, cols);
  std::vector<TransitionSample> out;
  std::string line;
  int n = 1;
  auto unit = [&](std::string_view field, size_t col) {
    const double x = csv::ParseDouble(field, cols[col], n);
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ParseError("column '" + cols[col] + "' outside [0, 1]", n);
    }
    return UnitInterval(x);
  };
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::SplitRow(line, cols.size(), n);
    TransitionSample s;
    s.state = CampaignState{unit(f[0], 0), unit(f[1], 1), unit(f[2], 2)};
    s.action = unit(f[3], 3);
    s.reward = unit(f[4], 4);
    s.next_state = CampaignState{unit(f[5], 5), unit(f[6], 6), unit(f[7], 7)};
    s.terminal = csv::ParseBool01(f[8], cols[8], n);
    out.push_back(s);
  }
  return out;
}

std::vector<TransitionSample> ReadTransitions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadTransitions(in);
}

const std::vector<std::string>& EpisodeColumns() {
  static const std::vector<std::string> kColumns = {
      "interval",     "threshold",   "bids",   "wins",    "viewable_wins",
      "spend_micros", "viewability", "reward", "collapse"};
  return kColumns;
}

void WriteEpisodeReport(const EpisodeReport& report, std::ostream& out) {
  using csv::FormatDouble;
  out << csv::JoinHeader(EpisodeColumns()) << '\n';
  for (const auto& r : report.intervals) {
    out << r.index << ',' << FormatDouble(r.threshold) << ',' << r.bids << ','
        << r.wins << ',' << r.viewable_wins << ',' << r.spend_micros << ','
        << FormatDouble(r.measured_viewability) << ','
        << FormatDouble(r.reward) << ',' << (r.delivery_collapse ? 1 : 0)
        << '\n';
  }
}

}  // namespace viewsim
