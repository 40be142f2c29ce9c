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

#include "viewsim/core.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "viewsim/errors.h"

namespace viewsim {

UnitInterval::UnitInterval(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgumentError("value " + std::to_string(value) +
                               " is outside [0, 1]");
  }
}

UnitInterval UnitInterval::Clamped(double value) {
  if (std::isnan(value)) throw InvalidArgumentError("cannot clamp NaN");
  return UnitInterval(std::clamp(value, 0.0, 1.0));
}

void RewardParams::Validate() const {
  if (!(exponent > 0.0) || !std::isfinite(exponent)) {
    throw InvalidArgumentError("reward exponent must be a positive number");
  }
}

double Reward(UnitInterval v, const RewardParams& params) {
  params.Validate();
  const double gap = std::abs(v.value() - params.goal.value());
  return std::pow(1.0 - gap, params.exponent);
}

double Reward(UnitInterval v, UnitInterval goal, double exponent) {
  return Reward(v, RewardParams{goal, exponent});
}

double SafeLogit(double x, double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw InvalidArgumentError("logit clamp eps must lie in (0, 0.5)");
  }
  const double c = std::clamp(x, eps, 1.0 - eps);
  return std::log(c / (1.0 - c));
}

UnitInterval Sigmoid(double x) {
  if (x >= 0.0) return UnitInterval(1.0 / (1.0 + std::exp(-x)));
  const double e = std::exp(x);
  return UnitInterval(e / (1.0 + e));
}

}  // namespace viewsim
