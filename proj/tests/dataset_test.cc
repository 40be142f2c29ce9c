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

#include "viewsim/dataset.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "viewsim/errors.h"

namespace viewsim {
namespace {

double Correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double ViewRate(const std::vector<ImpressionRecord>& records) {
  double views = 0.0;
  for (const auto& r : records) views += r.viewed ? 1.0 : 0.0;
  return views / static_cast<double>(records.size());
}

TEST(EncodeFeaturesTest, FixedLayout) {
  ImpressionRecord r;
  r.device_type = 2;
  r.position = 1;
  r.hour_of_day = 6;
  r.domain_id = 123;
  const FeatureVector x = EncodeFeatures(r);
  EXPECT_EQ(x[2], 1.0);
  EXPECT_EQ(x[0] + x[1] + x[2] + x[3], 1.0);
  EXPECT_EQ(x[kNumDeviceTypes + 1], 1.0);
  EXPECT_NEAR(x[kHourSinColumn], 1.0, 1e-15);
  EXPECT_NEAR(x[kHourCosColumn], 0.0, 1e-15);
  double domain_sum = 0.0;
  for (int j = 0; j < kNumDomainBuckets; ++j) domain_sum += x[kDomainColumn + j];
  EXPECT_EQ(domain_sum, 1.0);
  EXPECT_EQ(x[kDomainColumn + DomainBucket(123)], 1.0);
  EXPECT_EQ(x[kBiasColumn], 1.0);
}

TEST(GeneratorTest, RecordCountAndChronology) {
  GeneratorConfig config;
  config.n_records = 5000;
  const auto records = GenerateLld(config);
  ASSERT_EQ(records.size(), 5000u);
  EXPECT_TRUE(std::is_sorted(
      records.begin(), records.end(),
      [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; }));
  for (const auto& r : records) {
    EXPECT_GE(r.timestamp, config.start_timestamp);
    EXPECT_LT(r.timestamp, config.start_timestamp +
                               int64_t{86400} * config.duration_days);
    EXPECT_GE(r.cost_micros, 0);
    EXPECT_TRUE(r.viewed || !r.clicked);
  }
}

TEST(GeneratorTest, DecoupledCostIsUncorrelated) {
  GeneratorConfig config;
  config.cost_view_coupling = 0.0;
  const auto gen = GenerateLldWithLatents(config);
  std::vector<double> costs;
  for (const auto& r : gen.records) {
    costs.push_back(static_cast<double>(r.cost_micros));
  }
  EXPECT_LE(std::abs(Correlation(gen.p_view, costs)), 0.02);
}

TEST(GeneratorTest, ZeroWeightsGiveHalfViewRate) {
  GeneratorConfig config;
  config.true_view_weights.fill(0.0);
  const auto records = GenerateLld(config);
  const double rate = ViewRate(records);
  EXPECT_GE(rate, 0.49);
  EXPECT_LE(rate, 0.51);
}

TEST(GeneratorTest, ViewRateMatchesLatents) {
  const GeneratorConfig config;
  const auto gen = GenerateLldWithLatents(config);
  const double n = static_cast<double>(gen.records.size());
  const double mean_p =
      std::accumulate(gen.p_view.begin(), gen.p_view.end(), 0.0) / n;
  double var = 0.0;
  for (double p : gen.p_view) var += p * (1.0 - p);
  const double se = std::sqrt(var) / n;
  EXPECT_LE(std::abs(ViewRate(gen.records) - mean_p), 3.0 * se);
}

TEST(GeneratorTest, ViewRateIncreasesAcrossLatentDeciles) {
  const GeneratorConfig config;
  const auto gen = GenerateLldWithLatents(config);
  std::vector<size_t> order(gen.records.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return gen.p_view[a] < gen.p_view[b];
  });
  const size_t per = order.size() / 10;
  double prev = -1.0;
  for (int d = 0; d < 10; ++d) {
    double views = 0.0;
    for (size_t k = d * per; k < (d + 1) * per; ++k) {
      views += gen.records[order[k]].viewed ? 1.0 : 0.0;
    }
    const double rate = views / static_cast<double>(per);
    // Binomial noise allowance of about three standard errors.
    EXPECT_GT(rate, prev - 3.0 * std::sqrt(0.25 / per));
    prev = rate;
  }
}

TEST(GeneratorTest, Deterministic) {
  GeneratorConfig config;
  config.n_records = 3000;
  std::ostringstream a, b;
  WriteLld(GenerateLld(config), a);
  WriteLld(GenerateLld(config), b);
  EXPECT_EQ(a.str(), b.str());
  config.seed = 8;
  std::ostringstream c;
  WriteLld(GenerateLld(config), c);
  EXPECT_NE(a.str(), c.str());
}

TEST(GeneratorTest, ValidatesConfig) {
  GeneratorConfig config;
  config.n_records = 0;
  EXPECT_THROW(GenerateLld(config), InvalidArgumentError);
  config = {};
  config.click_given_view = 1.5;
  EXPECT_THROW(GenerateLld(config), InvalidArgumentError);
}

TEST(WinnersOnlyTest, KeepsAffordableRecords) {
  GeneratorConfig config;
  config.n_records = 2000;
  const auto records = GenerateLld(config);
  const auto winners = WinnersOnly(records, 1000000);
  EXPECT_LT(winners.size(), records.size());
  for (const auto& r : winners) EXPECT_LE(r.cost_micros, 1000000);
}

TEST(LldIoTest, RoundTripIdentity) {
  GeneratorConfig config;
  config.n_records = 4000;
  auto records = GenerateLld(config);
  ImpressionRecord edge;
  edge.timestamp = 0;
  edge.hour_of_day = 0;
  edge.domain_id = INT64_MAX;
  edge.cost_micros = 0;
  records.push_back(edge);
  std::stringstream buf;
  WriteLld(records, buf);
  EXPECT_EQ(ReadLld(buf), records);
}

TEST(LldIoTest, WrongHeaderIsFormatError) {
  std::istringstream in("ts,hour,device_type\n1,0,0\n");
  EXPECT_THROW(ReadLld(in), FormatError);
}

TEST(LldIoTest, BadCostCitesLine) {
  std::istringstream in(
      "timestamp,hour_of_day,device_type,domain_id,position,cost_micros,"
      "viewed,clicked\n"
      "0,0,0,1,0,100,1,0\n"
      "0,0,0,1,0,abc,1,0\n");
  try {
    ReadLld(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(std::string(e.what()).find("cost_micros"), std::string::npos);
  }
}

TEST(SplitTest, HalfSplitIsChronological) {
  GeneratorConfig config;
  config.n_records = 100;
  const auto split = SplitTrainEval(GenerateLld(config), 0.5);
  ASSERT_EQ(split.train.size(), 50u);
  ASSERT_EQ(split.eval.size(), 50u);
  int64_t max_train = 0;
  for (const auto& r : split.train) max_train = std::max(max_train, r.timestamp);
  int64_t min_eval = INT64_MAX;
  for (const auto& r : split.eval) min_eval = std::min(min_eval, r.timestamp);
  EXPECT_LE(max_train, min_eval);
}

TEST(SplitTest, QuarterSplit) {
  GeneratorConfig config;
  const auto split = SplitTrainEval(GenerateLld(config), 0.25);
  EXPECT_EQ(split.train.size(), 25000u);
  EXPECT_EQ(split.eval.size(), 75000u);
}

TEST(SplitTest, SingleRecordFails) {
  EXPECT_THROW(SplitTrainEval({ImpressionRecord{}}, 0.5), InvalidArgumentError);
}

TEST(SampleAuctionStreamTest, FullDrawIsPermutation) {
  const auto idx = SampleAuctionIndices(500, 500, 3);
  std::set<size_t> seen(idx.begin(), idx.end());
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_EQ(*seen.rbegin(), 499u);
}

TEST(SampleAuctionStreamTest, OversampleDrawsFromEval) {
  GeneratorConfig config;
  config.n_records = 300;
  const auto eval = GenerateLld(config);
  const auto sample = SampleAuctionStream(eval, 600, 5);
  ASSERT_EQ(sample.size(), 600u);
  for (const auto& r : sample) {
    EXPECT_NE(std::find(eval.begin(), eval.end(), r), eval.end());
  }
}

TEST(SampleAuctionStreamTest, Deterministic) {
  EXPECT_EQ(SampleAuctionIndices(1000, 200, 9), SampleAuctionIndices(1000, 200, 9));
  EXPECT_NE(SampleAuctionIndices(1000, 200, 9), SampleAuctionIndices(1000, 200, 10));
}

}  // namespace
}  // namespace viewsim
