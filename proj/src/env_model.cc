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

#include "viewsim/env_model.h"

#include <algorithm>
#include <cmath>

#include "viewsim/errors.h"

namespace viewsim {

namespace {

constexpr double kMinLogitDelta = 1e-9;

}  // namespace

void EnvModelParams::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgumentError("alpha must be positive");
  }
  if (!(eps > 0.0 && eps < 0.5)) {
    throw InvalidArgumentError("eps must lie in (0, 0.5)");
  }
}

UnitInterval PredictNextViewability(UnitInterval v_t, UnitInterval phi_t,
                                    UnitInterval phi_next,
                                    const EnvModelParams& params) {
  params.Validate();
  const double shift =
      SafeLogit(phi_next, params.eps) - SafeLogit(phi_t, params.eps);
  if (shift == 0.0) return v_t;
  return Sigmoid(SafeLogit(v_t, params.eps) + params.alpha * shift);
}

std::vector<double> AlphaSamples(std::span<const ControlObservation> history,
                                 double eps) {
  std::vector<double> out;
  for (const auto& obs : history) {
    const double dphi = SafeLogit(obs.phi_next, eps) - SafeLogit(obs.phi_t, eps);
    if (std::abs(dphi) <= kMinLogitDelta) continue;
    const double dv = SafeLogit(obs.v_next, eps) - SafeLogit(obs.v_t, eps);
    out.push_back(dv / dphi);
  }
  return out;
}

double AlphaMedian(std::span<const double> samples) {
  if (samples.empty()) {
    throw InsufficientDataError("insufficient data: no alpha samples");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double AlphaMeanPositive(std::span<const double> samples) {
  double sum = 0.0;
  size_t count = 0;
  for (double a : samples) {
    if (a > 0.0) {
      sum += a;
      ++count;
    }
  }
  if (count == 0) {
    throw InsufficientDataError("insufficient data: no positive alpha samples");
  }
  return sum / static_cast<double>(count);
}

UnitInterval GreedyThreshold(const CampaignState& state,
                             const EnvModelParams& params, int grid_size,
                             double reward_exponent) {
  params.Validate();
  if (grid_size < 2) throw InvalidArgumentError("grid_size must be >= 2");
  const RewardParams reward{state.goal, reward_exponent};
  reward.Validate();

  // The model is evaluated in logit space directly; this is the same
  // computation as PredictNextViewability without re-validating per point.
  const double base_v = SafeLogit(state.viewability, params.eps);
  const double base_phi = SafeLogit(state.prev_threshold, params.eps);

  double best_phi = 0.0;
  double best_reward = -1.0;
  for (int i = 0; i < grid_size; ++i) {
    const double phi = std::clamp(static_cast<double>(i) / (grid_size - 1),
                                  params.eps, 1.0 - params.eps);
    const double shift = SafeLogit(phi, params.eps) - base_phi;
    const UnitInterval v = shift == 0.0
                               ? state.viewability
                               : Sigmoid(base_v + params.alpha * shift);
    const double r = Reward(v, reward);
    if (r > best_reward) {
      best_reward = r;
      best_phi = phi;
    }
  }
  return UnitInterval(best_phi);
}

}  // namespace viewsim
