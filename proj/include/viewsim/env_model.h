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

#ifndef VIEWSIM_ENV_MODEL_H_
#define VIEWSIM_ENV_MODEL_H_

// Deterministic logit-space environment model:
//
//   logit(v_{t+1}) = logit(v_t) + alpha * (logit(phi_{t+1}) - logit(phi_t))
//
// together with the per-record sensitivity estimator and the greedy one-step
// policy that plans against it.

#include <span>
#include <vector>

#include "viewsim/core.h"

namespace viewsim {

// Sensitivity estimates observed on historical campaigns: the median of all
// per-record estimates and the mean of the strictly positive ones.
inline constexpr double kReferenceAlphaMedian = 0.204;
inline constexpr double kReferenceAlphaMeanPositive = 1.08;

inline constexpr int kDefaultGreedyGridSize = 1001;

struct EnvModelParams {
  double alpha = kReferenceAlphaMedian;
  double eps = kLogitEps;

  // alpha > 0 and eps in (0, 0.5).
  void Validate() const;
};

// Viewability and threshold at t paired with the same quantities at t + 1.
struct ControlObservation {
  UnitInterval v_t;
  UnitInterval phi_t;
  UnitInterval v_next;
  UnitInterval phi_next;
};

UnitInterval PredictNextViewability(UnitInterval v_t, UnitInterval phi_t,
                                    UnitInterval phi_next,
                                    const EnvModelParams& params);

// One estimate per record whose threshold moved (|delta logit(phi)| > 1e-9).
std::vector<double> AlphaSamples(std::span<const ControlObservation> history,
                                 double eps = kLogitEps);

// Throw InsufficientDataError on empty input / no positive samples.
double AlphaMedian(std::span<const double> samples);
double AlphaMeanPositive(std::span<const double> samples);

// argmax over the uniform grid {i / (grid_size - 1)} (clamped to
// [eps, 1 - eps]) of the predicted next-step reward. Ties go to the lower
// threshold.
UnitInterval GreedyThreshold(const CampaignState& state,
                             const EnvModelParams& params,
                             int grid_size = kDefaultGreedyGridSize,
                             double reward_exponent = 2.0);

}  // namespace viewsim

#endif  // VIEWSIM_ENV_MODEL_H_
