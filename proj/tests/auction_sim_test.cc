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

#include <gtest/gtest.h>

#include <array>
#include <memory>
#include <sstream>
#include <string>

#include "viewsim/controllers.h"
#include "viewsim/env_model.h"
#include "viewsim/errors.h"
#include "viewsim/experiments.h"

namespace viewsim {
namespace {

// First interval inside the goal band for the matched-alpha greedy run
// started at threshold 0.3.
constexpr int kGreedyEntryFixture = 4;

class AuctionSimTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = std::make_unique<PreparedData>(PrepareData(RunConfig{}));
    market_ = std::make_unique<ReplayMarket>(data_->eval, data_->view_model,
                                             data_->bid_model);
  }
  static void TearDownTestSuite() {
    market_.reset();
    data_.reset();
  }

  static std::unique_ptr<PreparedData> data_;
  static std::unique_ptr<ReplayMarket> market_;
};

std::unique_ptr<PreparedData> AuctionSimTest::data_;
std::unique_ptr<ReplayMarket> AuctionSimTest::market_;

TEST_F(AuctionSimTest, ZeroThresholdBidsOnEverything) {
  const std::span<const ImpressionRecord> slice(data_->eval.data(), 5000);
  const auto report = RunInterval(UnitInterval(0.0), slice, data_->view_model,
                                  data_->bid_model);
  EXPECT_EQ(report.bids, 5000);
  EXPECT_GT(report.wins, 0);
  EXPECT_LE(report.viewable_wins, report.wins);
  EXPECT_LE(report.wins, report.bids);
}

TEST_F(AuctionSimTest, FullThresholdCollapsesDelivery) {
  const std::span<const ImpressionRecord> slice(data_->eval.data(), 5000);
  const auto report = RunInterval(UnitInterval(1.0), slice, data_->view_model,
                                  data_->bid_model, UnitInterval(0.42));
  EXPECT_EQ(report.bids, 0);
  EXPECT_EQ(report.wins, 0);
  EXPECT_TRUE(report.delivery_collapse);
  EXPECT_EQ(report.measured_viewability.value(), 0.42);
}

TEST_F(AuctionSimTest, HigherThresholdBuysMoreViewableInventory) {
  const auto low = RunInterval(UnitInterval(0.2), data_->eval,
                               data_->view_model, data_->bid_model);
  const auto high = RunInterval(UnitInterval(0.8), data_->eval,
                                data_->view_model, data_->bid_model);
  EXPECT_GE(high.measured_viewability.value(), low.measured_viewability.value());
}

TEST_F(AuctionSimTest, SpendIsExactSumOfWinningCosts) {
  const std::span<const ImpressionRecord> slice(data_->eval.data(), 20000);
  const UnitInterval threshold(0.4);
  int64_t spend = 0, wins = 0, viewable = 0;
  for (const auto& r : slice) {
    if (PredictViewProbability(data_->view_model, r) < threshold) continue;
    if (BidPrice(data_->bid_model, r) >= r.cost_micros) {
      spend += r.cost_micros;
      ++wins;
      viewable += r.viewed ? 1 : 0;
    }
  }
  const auto report =
      RunInterval(threshold, slice, data_->view_model, data_->bid_model);
  EXPECT_EQ(report.spend_micros, spend);
  EXPECT_EQ(report.wins, wins);
  EXPECT_EQ(report.viewable_wins, viewable);
  EXPECT_EQ(report.measured_viewability.value(),
            static_cast<double>(viewable) / static_cast<double>(wins));
}

TEST_F(AuctionSimTest, MarketMatchesDirectInterval) {
  std::vector<size_t> idx(3000);
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i * 7;
  std::vector<ImpressionRecord> picked;
  for (size_t i : idx) picked.push_back(data_->eval[i]);
  const UnitInterval threshold(0.55);
  EXPECT_EQ(market_->RunInterval(threshold, idx, UnitInterval()),
            RunInterval(threshold, picked, data_->view_model, data_->bid_model));
}

TEST_F(AuctionSimTest, ThresholdGridMonotonicity) {
  double prev_view = -1.0;
  int64_t prev_wins = INT64_MAX;
  for (int i = 0; i <= 9; ++i) {
    const auto report = RunInterval(UnitInterval(i / 10.0), data_->eval,
                                    data_->view_model, data_->bid_model);
    EXPECT_GE(report.measured_viewability.value(), prev_view - 0.005);
    EXPECT_LE(report.wins, prev_wins);
    prev_view = report.measured_viewability.value();
    prev_wins = report.wins;
  }
}

TEST_F(AuctionSimTest, ConstantPolicyEpisode) {
  SimConfig config;
  const auto episode = RunEpisode(MakeConstantPolicy(0.3), *market_, config);
  ASSERT_EQ(episode.intervals.size(), 24u);
  ASSERT_EQ(episode.states.size(), 25u);
  int64_t bids = 0;
  for (const auto& iv : episode.intervals) {
    EXPECT_EQ(iv.threshold.value(), 0.3);
    bids += iv.bids;
  }
  const double v_day = static_cast<double>(episode.viewable_wins) /
                       static_cast<double>(episode.wins);
  EXPECT_EQ(episode.day_viewability.value(), v_day);
  EXPECT_NEAR(episode.day_reward, Reward(UnitInterval(v_day), config.goal),
              1e-15);
  EXPECT_GT(bids, 0);
}

TEST_F(AuctionSimTest, EvenPartitionWithRemainderFirst) {
  SimConfig config;
  config.n_per_day = 24 * 100 + 5;
  const auto episode = RunEpisode(MakeConstantPolicy(0.0), *market_, config);
  for (size_t t = 0; t < episode.intervals.size(); ++t) {
    EXPECT_EQ(episode.intervals[t].bids, t < 5 ? 101 : 100);
  }
}

TEST_F(AuctionSimTest, ZeroWinDayScoresZero) {
  const auto episode = RunEpisode(MakeConstantPolicy(1.0), *market_, SimConfig{});
  EXPECT_EQ(episode.wins, 0);
  EXPECT_EQ(episode.day_reward, 0.0);
  for (const auto& iv : episode.intervals) {
    EXPECT_TRUE(iv.delivery_collapse);
    EXPECT_EQ(iv.reward, 0.0);
    EXPECT_EQ(iv.measured_viewability.value(), 0.5);
  }
}

TEST_F(AuctionSimTest, PolicyOutsideUnitIntervalIsRejected) {
  EXPECT_THROW(RunEpisode(MakeConstantPolicy(1.5), *market_, SimConfig{}),
               PolicyContractError);
}

TEST_F(AuctionSimTest, EpisodesAreDeterministic) {
  const EnvModelParams params{0.41};
  const auto a = RunEpisode(MakeGreedyPolicy(params), *market_, SimConfig{});
  const auto b = RunEpisode(MakeGreedyPolicy(params), *market_, SimConfig{});
  EXPECT_EQ(a, b);
}

TEST_F(AuctionSimTest, GreedyWithMatchedAlphaReachesGoalBand) {
  const auto rollouts = TrainRollouts(*data_, SimSettings{}, 7);
  const double alpha = AlphaMedian(RolloutAlphaSamples(rollouts, 24));
  SimConfig config = EvalSimConfig({}, 7);
  config.initial_threshold = UnitInterval(0.3);
  const auto episode = RunEpisode(MakeGreedyPolicy({alpha}), *market_, config);
  const auto entry = FirstGoalEntry(episode, 0.05);
  ASSERT_TRUE(entry.has_value());
  EXPECT_EQ(*entry, kGreedyEntryFixture);
}

TEST_F(AuctionSimTest, GreedyFromZeroThresholdStaysNearZero) {
  // logit(eps) is so far from the goal's logit that the model asks for a
  // negligible threshold step.
  const auto episode =
      RunEpisode(MakeGreedyPolicy({0.41}), *market_, EvalSimConfig({}, 7));
  for (const auto& iv : episode.intervals) EXPECT_LE(iv.threshold.value(), 1e-3);
}

TEST_F(AuctionSimTest, RandomRolloutShape) {
  SimConfig config;
  config.n_per_day = 2400;
  const auto t = CollectRandomRollouts(*market_, config, 1);
  ASSERT_EQ(t.size(), 24u);
  int terminals = 0;
  for (const auto& s : t) {
    terminals += s.terminal ? 1 : 0;
    EXPECT_GE(s.reward, 0.0);
    EXPECT_LE(s.reward, 1.0);
  }
  EXPECT_EQ(terminals, 1);
  EXPECT_TRUE(t.back().terminal);
  for (size_t i = 0; i + 1 < t.size(); ++i) {
    EXPECT_EQ(t[i].next_state, t[i + 1].state);
  }
}

TEST_F(AuctionSimTest, RandomActionsAreUniform) {
  SimConfig config;
  config.n_per_day = 240;
  const auto t = CollectRandomRollouts(*market_, config, 417);
  ASSERT_GE(t.size(), 10000u);
  std::array<double, 10> counts{};
  for (const auto& s : t) {
    counts[std::min<size_t>(9, static_cast<size_t>(s.action * 10.0))] += 1.0;
  }
  const double expected = static_cast<double>(t.size()) / 10.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99th percentile of chi-square with 9 degrees of freedom.
  EXPECT_LT(chi2, 21.666);
}

TEST_F(AuctionSimTest, RolloutGoalRange) {
  SimConfig config;
  config.n_per_day = 240;
  config.rollout_goal_min = UnitInterval(0.55);
  config.rollout_goal_max = UnitInterval(0.85);
  const auto t = CollectRandomRollouts(*market_, config, 20);
  for (const auto& s : t) {
    EXPECT_GE(s.state.goal.value(), 0.55);
    EXPECT_LE(s.state.goal.value(), 0.85);
  }
  EXPECT_NE(t.front().state.goal, t.back().state.goal);
}

TEST(SimConfigTest, Validates) {
  SimConfig config;
  config.n_per_day = 10;
  EXPECT_THROW(config.Validate(), InvalidArgumentError);
  config = {};
  config.goal_schedule = {{5, UnitInterval(0.8)}, {5, UnitInterval(0.6)}};
  EXPECT_THROW(config.Validate(), InvalidArgumentError);
  config = {};
  config.rollout_goal_min = UnitInterval(0.5);
  EXPECT_THROW(config.Validate(), InvalidArgumentError);
}

TEST(SimConfigTest, GoalSchedule) {
  SimConfig config;
  config.goal_schedule = {{3, UnitInterval(0.8)}, {6, UnitInterval(0.6)}};
  EXPECT_EQ(config.GoalAt(0).value(), 0.7);
  EXPECT_EQ(config.GoalAt(3).value(), 0.8);
  EXPECT_EQ(config.GoalAt(5).value(), 0.8);
  EXPECT_EQ(config.GoalAt(6).value(), 0.6);
}

TEST(TransitionIoTest, RoundTripIdentity) {
  std::vector<TransitionSample> samples;
  for (int i = 0; i < 30; ++i) {
    const double x = i / 29.0;
    samples.push_back({{UnitInterval(x), UnitInterval(0.7), UnitInterval(1 - x)},
                       UnitInterval(x * x),
                       x / 3.0,
                       {UnitInterval(1 - x), UnitInterval(0.8), UnitInterval(x * x)},
                       i % 5 == 4});
  }
  std::stringstream buf;
  WriteTransitions(samples, buf);
  const std::string text = buf.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "v,goal,phi_prev,action,reward,v_next,goal_next,phi_prev_next,"
            "terminal");
  EXPECT_NE(text.find(",1\n"), std::string::npos);
  EXPECT_NE(text.find(",0\n"), std::string::npos);
  EXPECT_EQ(ReadTransitions(buf), samples);
}

TEST(TransitionIoTest, MalformedRewardCitesLine) {
  std::istringstream in(
      "v,goal,phi_prev,action,reward,v_next,goal_next,phi_prev_next,terminal\n"
      "0.5,0.7,0.1,0.2,0.9,0.6,0.7,0.2,0\n"
      "0.5,0.7,0.1,0.2,oops,0.6,0.7,0.2,1\n");
  try {
    ReadTransitions(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("reward"), std::string::npos);
  }
}

TEST(EpisodeIoTest, Header) {
  std::ostringstream out;
  WriteEpisodeReport(EpisodeReport{}, out);
  EXPECT_EQ(out.str(),
            "interval,threshold,bids,wins,viewable_wins,spend_micros,"
            "viewability,reward,collapse\n");
}

}  // namespace
}  // namespace viewsim
