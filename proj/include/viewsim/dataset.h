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

#ifndef VIEWSIM_DATASET_H_
#define VIEWSIM_DATASET_H_

// Log-level impression data: the record type, its CSV format, the
// chronological train/eval split, auction-stream sampling, and a synthetic
// generator that keeps its ground truth.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace viewsim {

inline constexpr int kNumDeviceTypes = 4;
inline constexpr int kNumPositions = 3;
inline constexpr int kNumDomainBuckets = 8;

// Encoded feature layout, fixed order:
//   [0, 4)   device_type one-hot
//   [4, 7)   position one-hot (above / mid / below fold)
//   7, 8     sin, cos of 2*pi*hour/24
//   [9, 17)  domain_id hashed into 8 one-hot buckets
//   17       bias (constant 1)
inline constexpr int kFeatureDim = 18;
inline constexpr int kHourSinColumn = 7;
inline constexpr int kHourCosColumn = 8;
inline constexpr int kDomainColumn = 9;
inline constexpr int kBiasColumn = 17;

using FeatureVector = std::array<double, kFeatureDim>;

struct ImpressionRecord {
  int64_t timestamp = 0;  // unix seconds, UTC
  int hour_of_day = 0;
  int device_type = 0;
  int64_t domain_id = 0;
  int position = 0;
  int64_t cost_micros = 0;  // clearing price actually paid
  bool viewed = false;
  bool clicked = false;

  friend bool operator==(const ImpressionRecord&,
                         const ImpressionRecord&) = default;
};

int DomainBucket(int64_t domain_id);
FeatureVector EncodeFeatures(const ImpressionRecord& record);

struct GeneratorConfig {
  int64_t n_records = 100000;
  uint64_t seed = 7;
  // Ground-truth logit weights over the encoded features; the last entry is
  // the bias.
  FeatureVector true_view_weights = DefaultViewWeights();
  int64_t cost_base_micros = 1000000;
  double cost_view_coupling = 0.5;
  double cost_lognormal_sigma = 0.5;
  int duration_days = 28;
  int64_t start_timestamp = 1704067200;  // 2024-01-01T00:00:00Z
  int64_t n_domains = 500;
  // Per-record logit noise that no feature can explain. Zero keeps the view
  // probability a pure function of the features.
  double latent_noise_sigma = 0.0;
  // Probability of a click given a view (non-viewed impressions never click).
  double click_given_view = 0.02;

  static FeatureVector DefaultViewWeights();
  void Validate() const;
};

struct GeneratedLld {
  std::vector<ImpressionRecord> records;
  std::vector<double> p_view;  // latent view probability per record
};

GeneratedLld GenerateLldWithLatents(const GeneratorConfig& config);
std::vector<ImpressionRecord> GenerateLld(const GeneratorConfig& config);

// Records a flat-bid incumbent would have bought: cost_micros <= bid. Real
// log-level data only contains auctions that were won.
std::vector<ImpressionRecord> WinnersOnly(
    std::span<const ImpressionRecord> records, int64_t incumbent_bid_micros);

// Header: timestamp,hour_of_day,device_type,domain_id,position,cost_micros,
//         viewed,clicked
const std::vector<std::string>& LldColumns();
void WriteLld(std::span<const ImpressionRecord> records, std::ostream& out);
void WriteLld(std::span<const ImpressionRecord> records,
              const std::string& path);
std::vector<ImpressionRecord> ReadLld(std::istream& in);
std::vector<ImpressionRecord> ReadLld(const std::string& path);

struct TrainEvalSplit {
  std::vector<ImpressionRecord> train;
  std::vector<ImpressionRecord> eval;
};

// Chronological split; the first `fraction` of records (by timestamp) go to
// train. Needs at least two records and fraction in (0, 1).
TrainEvalSplit SplitTrainEval(std::vector<ImpressionRecord> records,
                              double fraction = 0.5);

// n records drawn uniformly from `eval`: without replacement when
// n <= eval.size(), with replacement otherwise.
std::vector<ImpressionRecord> SampleAuctionStream(
    std::span<const ImpressionRecord> eval, int64_t n, uint64_t seed);

// Same draw as SampleAuctionStream, returned as indices into `eval`.
std::vector<size_t> SampleAuctionIndices(size_t eval_size, int64_t n,
                                         uint64_t seed);

}  // namespace viewsim

#endif  // VIEWSIM_DATASET_H_
