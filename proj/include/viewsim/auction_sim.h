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

#ifndef VIEWSIM_AUCTION_SIM_H_
#define VIEWSIM_AUCTION_SIM_H_

// Offline replay of logged auctions. Each impression is scored by the view
// model; impressions predicted below the threshold get no bid; the rest are
// bid on by the pricing model and won when the bid covers the logged price,
// which is what gets paid (second-price replay).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewsim/core.h"
#include "viewsim/dataset.h"
#include "viewsim/predictors.h"

namespace viewsim {

// Maps the current observation to the next viewability threshold. Must
// return a value in [0, 1]; anything else is a PolicyContractError.
using Policy = std::function<double(const CampaignState&)>;

struct GoalChange {
  int interval = 0;  // first interval that uses the new goal
  UnitInterval goal;
};

struct SimConfig {
  int64_t n_per_day = 24000;
  int intervals_per_day = 24;
  UnitInterval goal{0.7};
  UnitInterval initial_threshold{0.0};
  UnitInterval initial_viewability{0.5};
  double reward_exponent = 2.0;
  uint64_t seed = 7;
  // Goal changes applied during an episode, in increasing interval order.
  std::vector<GoalChange> goal_schedule;
  // When set, random-rollout episodes draw their goal uniformly from
  // [min, max] instead of using `goal`.
  std::optional<UnitInterval> rollout_goal_min;
  std::optional<UnitInterval> rollout_goal_max;

  void Validate() const;
  UnitInterval GoalAt(int interval) const;
};

struct IntervalReport {
  int index = 0;
  UnitInterval threshold;
  int64_t bids = 0;
  int64_t wins = 0;
  int64_t viewable_wins = 0;
  int64_t spend_micros = 0;
  // viewable_wins / wins; when nothing was won, the previous interval's value.
  UnitInterval measured_viewability;
  double reward = 0.0;
  bool delivery_collapse = false;
  UnitInterval goal;  // goal in force for this interval (not serialized)

  friend bool operator==(const IntervalReport&,
                         const IntervalReport&) = default;
};

struct EpisodeReport {
  std::vector<IntervalReport> intervals;
  // Observation at each decision point plus the one after the last interval
  // (intervals.size() + 1 entries).
  std::vector<CampaignState> states;
  int64_t wins = 0;
  int64_t viewable_wins = 0;
  int64_t spend_micros = 0;
  UnitInterval day_viewability;
  // (1 - |v_day - goal|)^exponent against SimConfig::goal; 0 on a day
  // without wins.
  double day_reward = 0.0;

  friend bool operator==(const EpisodeReport&,
                         const EpisodeReport&) = default;
};

struct TransitionSample {
  CampaignState state;
  UnitInterval action;
  double reward = 0.0;
  CampaignState next_state;
  bool terminal = false;

  friend bool operator==(const TransitionSample&,
                         const TransitionSample&) = default;
};

// Scores a single interval. Only the auction counters and viewability are
// filled in; `reward` is left at 0 for the episode runner to set.
// `carry_viewability` is reported when nothing is won.
IntervalReport RunInterval(UnitInterval threshold,
                           std::span<const ImpressionRecord> impressions,
                           const LinearModel& view_model,
                           const LinearModel& bid_model,
                           UnitInterval carry_viewability = UnitInterval());

// A pool of logged impressions with the model outputs precomputed, so an
// episode only does threshold comparisons.
class ReplayMarket {
 public:
  struct Scored {
    double p_view = 0.0;
    int64_t bid = 0;
    int64_t cost = 0;
    bool viewed = false;
  };

  ReplayMarket(std::span<const ImpressionRecord> pool,
               const LinearModel& view_model, const LinearModel& bid_model);

  size_t size() const { return scored_.size(); }
  const std::vector<Scored>& scored() const { return scored_; }
  std::span<const ImpressionRecord> pool() const { return pool_; }

  IntervalReport RunInterval(UnitInterval threshold,
                             std::span<const size_t> indices,
                             UnitInterval carry_viewability) const;

 private:
  std::span<const ImpressionRecord> pool_;
  std::vector<Scored> scored_;
};

// Samples config.n_per_day auctions from the market (seeded by config.seed),
// splits them evenly over the intervals (earliest intervals take the
// remainder) and lets the policy choose each interval's threshold.
EpisodeReport RunEpisode(const Policy& policy, const ReplayMarket& market,
                         const SimConfig& config);
EpisodeReport RunEpisode(const Policy& policy,
                         std::span<const ImpressionRecord> eval,
                         const LinearModel& view_model,
                         const LinearModel& bid_model, const SimConfig& config);

// Converts an episode into one transition per interval; the last is terminal.
std::vector<TransitionSample> EpisodeTransitions(const EpisodeReport& episode);

// Episodes with thresholds drawn uniformly from [0, 1] at every interval.
// Episode e re-samples its auctions with a seed derived from (config.seed, e).
std::vector<TransitionSample> CollectRandomRollouts(const ReplayMarket& market,
                                                    const SimConfig& config,
                                                    int episodes);

// Uniform-random threshold policy (for baselines and rollouts).
Policy MakeRandomPolicy(uint64_t seed);
Policy MakeConstantPolicy(double threshold);

// v,goal,phi_prev,action,reward,v_next,goal_next,phi_prev_next,terminal
const std::vector<std::string>& TransitionColumns();
void WriteTransitions(std::span<const TransitionSample> samples,
                      std::ostream& out);
void WriteTransitions(std::span<const TransitionSample> samples,
                      const std::string& path);
std::vector<TransitionSample> ReadTransitions(std::istream& in);
std::vector<TransitionSample> ReadTransitions(const std::string& path);

// interval,threshold,bids,wins,viewable_wins,spend_micros,viewability,
// reward,collapse
const std::vector<std::string>& EpisodeColumns();
void WriteEpisodeReport(const EpisodeReport& report, std::ostream& out);

}  // namespace viewsim

#endif  // VIEWSIM_AUCTION_SIM_H_
