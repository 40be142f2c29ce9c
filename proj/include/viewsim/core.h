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

#ifndef VIEWSIM_CORE_H_
#define VIEWSIM_CORE_H_

// Shared numeric primitives: bounded probabilities, the logit/sigmoid pair
// and the viewability reward.

namespace viewsim {

// Clamp applied to logit inputs so that 0 and 1 map to finite values.
inline constexpr double kLogitEps = 1e-6;

// A real number in [0, 1]. Construction from anything else throws
// InvalidArgumentError; use Clamped() when saturation is intended.
class UnitInterval {
 public:
  constexpr UnitInterval() = default;
  explicit UnitInterval(double value);

  static UnitInterval Clamped(double value);

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }  // NOLINT

  friend constexpr bool operator==(UnitInterval a, UnitInterval b) {
    return a.value_ == b.value_;
  }

 private:
  double value_ = 0.0;
};

struct RewardParams {
  UnitInterval goal;
  double exponent = 2.0;

  // Throws InvalidArgumentError unless exponent > 0.
  void Validate() const;
};

// The agent's observation: measured viewability, goal and the threshold that
// was in force while the viewability was measured.
struct CampaignState {
  UnitInterval viewability;
  UnitInterval goal;
  UnitInterval prev_threshold;

  friend bool operator==(const CampaignState&, const CampaignState&) = default;
};

// (1 - |v - goal|)^exponent. Equals 1 exactly when v == goal.
double Reward(UnitInterval v, const RewardParams& params);
double Reward(UnitInterval v, UnitInterval goal, double exponent = 2.0);

// ln(x / (1 - x)) after clamping x into [eps, 1 - eps]. eps must be in
// (0, 0.5).
double SafeLogit(double x, double eps = kLogitEps);

// 1 / (1 + e^-x), evaluated without overflow for large |x|.
UnitInterval Sigmoid(double x);

}  // namespace viewsim

#endif  // VIEWSIM_CORE_H_
