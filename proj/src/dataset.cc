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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "viewsim/core.h"
#include "viewsim/csv_util.h"
#include "viewsim/errors.h"
#include "viewsim/rng.h"

namespace viewsim {

namespace {

constexpr int64_t kSecondsPerDay = 86400;
constexpr std::array<double, kNumDeviceTypes> kDeviceProbs = {0.45, 0.35, 0.15,
                                                              0.05};
constexpr std::array<double, kNumPositions> kPositionProbs = {0.40, 0.35, 0.25};

template <size_t N>
int DrawCategory(Rng& rng, const std::array<double, N>& probs) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < N; ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(N - 1);
}

int HourOf(int64_t timestamp) {
  int64_t sec = timestamp % kSecondsPerDay;
  if (sec < 0) sec += kSecondsPerDay;
  return static_cast<int>(sec / 3600);
}

std::ofstream OpenForWrite(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream OpenForRead(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace

int DomainBucket(int64_t domain_id) {
  return static_cast<int>(MixSeed(static_cast<uint64_t>(domain_id)) %
                          kNumDomainBuckets);
}

FeatureVector EncodeFeatures(const ImpressionRecord& record) {
  FeatureVector x{};
  x[record.device_type] = 1.0;
  x[kNumDeviceTypes + record.position] = 1.0;
  const double angle = 2.0 * std::numbers::pi * record.hour_of_day / 24.0;
  x[kHourSinColumn] = std::sin(angle);
  x[kHourCosColumn] = std::cos(angle);
  x[kDomainColumn + DomainBucket(record.domain_id)] = 1.0;
  x[kBiasColumn] = 1.0;
  return x;
}

FeatureVector GeneratorConfig::DefaultViewWeights() {
  return {
      // device: desktop, mobile web, app, ctv
      0.4, -0.2, 0.1, -0.5,
      // position: above, mid, below fold
      1.2, 0.0, -1.4,
      // hour sin, cos
      0.3, -0.2,
      // domain buckets
      0.8, -0.6, 0.3, -1.0, 0.5, 0.0, -0.3, 1.0,
      // bias
      -0.3};
}

void GeneratorConfig::Validate() const {
  if (n_records <= 0) throw InvalidArgumentError("n_records must be positive");
  if (cost_base_micros <= 0) {
    throw InvalidArgumentError("cost_base_micros must be positive");
  }
  if (!(cost_view_coupling >= 0.0)) {
    throw InvalidArgumentError("cost_view_coupling must be >= 0");
  }
  if (!(cost_lognormal_sigma > 0.0)) {
    throw InvalidArgumentError("cost_lognormal_sigma must be positive");
  }
  if (duration_days <= 0) {
    throw InvalidArgumentError("duration_days must be positive");
  }
  if (n_domains <= 0) throw InvalidArgumentError("n_domains must be positive");
  if (!(latent_noise_sigma >= 0.0)) {
    throw InvalidArgumentError("latent_noise_sigma must be >= 0");
  }
  if (!(click_given_view >= 0.0 && click_given_view <= 1.0)) {
    throw InvalidArgumentError("click_given_view must lie in [0, 1]");
  }
}

GeneratedLld GenerateLldWithLatents(const GeneratorConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  const auto n = static_cast<size_t>(config.n_records);
  const auto span_seconds =
      static_cast<uint64_t>(config.duration_days) * kSecondsPerDay;

  std::vector<int64_t> timestamps(n);
  for (auto& ts : timestamps) {
    ts = config.start_timestamp + static_cast<int64_t>(rng.Index(span_seconds));
  }
  std::sort(timestamps.begin(), timestamps.end());

  GeneratedLld out;
  out.records.reserve(n);
  out.p_view.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    ImpressionRecord r;
    r.timestamp = timestamps[i];
    r.hour_of_day = HourOf(r.timestamp);
    r.device_type = DrawCategory(rng, kDeviceProbs);
    r.position = DrawCategory(rng, kPositionProbs);
    r.domain_id = static_cast<int64_t>(
        rng.Index(static_cast<uint64_t>(config.n_domains)));

    const FeatureVector x = EncodeFeatures(r);
    double z = 0.0;
    for (int j = 0; j < kFeatureDim; ++j) z += config.true_view_weights[j] * x[j];
    if (config.latent_noise_sigma > 0.0) {
      z += config.latent_noise_sigma * rng.Normal();
    }
    const double p = Sigmoid(z);
    r.viewed = rng.Bernoulli(p);
    r.clicked = r.viewed && rng.Bernoulli(config.click_given_view);
    const double log_cost = rng.Normal(config.cost_view_coupling * p,
                                       config.cost_lognormal_sigma);
    r.cost_micros = std::llround(
        static_cast<double>(config.cost_base_micros) * std::exp(log_cost));

    out.records.push_back(r);
    out.p_view.push_back(p);
  }
  return out;
}

std::vector<ImpressionRecord> GenerateLld(const GeneratorConfig& config) {
  return GenerateLldWithLatents(config).records;
}

std::vector<ImpressionRecord> WinnersOnly(
    std::span<const ImpressionRecord> records, int64_t incumbent_bid_micros) {
  std::vector<ImpressionRecord> out;
  for (const auto& r : records) {
    if (r.cost_micros <= incumbent_bid_micros) out.push_back(r);
  }
  return out;
}

const std::vector<std::string>& LldColumns() {
  static const std::vector<std::string> kColumns = {
      "timestamp",   "hour_of_day", "device_type", "domain_id",
      "position",    "cost_micros", "viewed",      "clicked"};
  return kColumns;
}

void WriteLld(std::span<const ImpressionRecord> records, std::ostream& out) {
  out << csv::JoinHeader(LldColumns()) << '\n';
  for (const auto& r : records) {
    out << r.timestamp << ',' << r.hour_of_day << ',' << r.device_type << ','
        << r.domain_id << ',' << r.position << ',' << r.cost_micros << ','
        << (r.viewed ? 1 : 0) << ',' << (r.clicked ? 1 : 0) << '\n';
  }
}

void WriteLld(std::span<const ImpressionRecord> records,
              const std::string& path) {
  auto out = OpenForWrite(path);
  WriteLld(records, out);
  if (!out) throw Error("failed writing '" + path + "'");
}

std::vector<ImpressionRecord> ReadLld(std::istream& in) {
  const auto& cols = LldColumns();
  csv::ExpectHeader(in, cols);
  std::vector<ImpressionRecord> out;
  std::string line;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::SplitRow(line, cols.size(), line_number);
    ImpressionRecord r;
    r.timestamp = csv::ParseInt(f[0], cols[0], line_number);
    r.hour_of_day = static_cast<int>(csv::ParseInt(f[1], cols[1], line_number));
    r.device_type = static_cast<int>(csv::ParseInt(f[2], cols[2], line_number));
    r.domain_id = csv::ParseInt(f[3], cols[3], line_number);
    r.position = static_cast<int>(csv::ParseInt(f[4], cols[4], line_number));
    r.cost_micros = csv::ParseInt(f[5], cols[5], line_number);
    r.viewed = csv::ParseBool01(f[6], cols[6], line_number);
    r.clicked = csv::ParseBool01(f[7], cols[7], line_number);

    if (r.hour_of_day != HourOf(r.timestamp)) {
      throw ParseError("hour_of_day does not match timestamp", line_number);
    }
    if (r.device_type < 0 || r.device_type >= kNumDeviceTypes) {
      throw ParseError("device_type out of range", line_number);
    }
    if (r.position < 0 || r.position >= kNumPositions) {
      throw ParseError("position out of range", line_number);
    }
    if (r.domain_id < 0) throw ParseError("negative domain_id", line_number);
    if (r.cost_micros < 0) throw ParseError("negative cost_micros", line_number);
    out.push_back(r);
  }
  return out;
}

std::vector<ImpressionRecord> ReadLld(const std::string& path) {
  auto in = OpenForRead(path);
  return ReadLld(in);
}

TrainEvalSplit SplitTrainEval(std::vector<ImpressionRecord> records,
                              double fraction) {
  if (records.size() < 2) {
    throw InvalidArgumentError("need at least two records to split");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgumentError("split fraction must lie in (0, 1)");
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ImpressionRecord& a, const ImpressionRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  const auto n = records.size();
  auto cut = static_cast<size_t>(std::floor(fraction * static_cast<double>(n)));
  cut = std::clamp<size_t>(cut, 1, n - 1);
  TrainEvalSplit split;
  split.train.assign(records.begin(), records.begin() + cut);
  split.eval.assign(records.begin() + cut, records.end());
  return split;
}

std::vector<size_t> SampleAuctionIndices(size_t eval_size, int64_t n,
                                         uint64_t seed) {
  if (eval_size == 0) throw InvalidArgumentError("cannot sample from no records");
  if (n <= 0) throw InvalidArgumentError("sample size must be positive");
  Rng rng(seed);
  const auto count = static_cast<size_t>(n);
  std::vector<size_t> out;
  if (count <= eval_size) {
    // Partial Fisher-Yates over an index permutation.
    std::vector<size_t> perm(eval_size);
    for (size_t i = 0; i < eval_size; ++i) perm[i] = i;
    for (size_t i = 0; i < count; ++i) {
      const size_t j = i + rng.Index(eval_size - i);
      std::swap(perm[i], perm[j]);
    }
    perm.resize(count);
    return perm;
  }
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back(rng.Index(eval_size));
  return out;
}

std::vector<ImpressionRecord> SampleAuctionStream(
    std::span<const ImpressionRecord> eval, int64_t n, uint64_t seed) {
  const auto idx = SampleAuctionIndices(eval.size(), n, seed);
  std::vector<ImpressionRecord> out;
  out.reserve(idx.size());
  for (size_t i : idx) out.push_back(eval[i]);
  return out;
}

}  // namespace viewsim
