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

#ifndef VIEWSIM_CONTROLLERS_H_
#define VIEWSIM_CONTROLLERS_H_

// Rule-based PID threshold controller, the naive toy environment, and the
// quick policy sanity battery (goal reaching, stability at goal, direction
// sweep).

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "viewsim/auction_sim.h"
#include "viewsim/core.h"
#include "viewsim/env_model.h"

namespace viewsim {

struct PidConfig {
  double kp = 0.5;
  double ki = 0.05;
  double kd = 0.0;
  double step_clamp = 0.05;      // max threshold change per step
  double integral_clamp = 1.0;   // anti-windup bound on |integral|
  double threshold_lo = 0.0;
  double threshold_hi = 0.99;

  void Validate() const;
};

struct PidState {
  double integral = 0.0;
  std::optional<double> prev_error;
  UnitInterval current_threshold;
};

struct PidStepResult {
  PidState state;
  UnitInterval threshold;
};

// e = goal - v; integral += e (clamped); d = e - prev_error (0 when unset);
// threshold = current + clamp(kp e + ki integral + kd d, +-step_clamp),
// clamped into the threshold bounds.
PidStepResult PidStep(const PidState& state, const PidConfig& config,
                      UnitInterval v, UnitInterval goal);

// Stateful policy wrapper. The controller's current threshold is taken from
// the observation's prev_threshold; the integral and derivative memory live
// inside the returned closure, so use one instance per episode.
Policy MakePidPolicy(const PidConfig& config);

// Greedy model-based baseline as a policy.
Policy MakeGreedyPolicy(const EnvModelParams& params,
                        int grid_size = kDefaultGreedyGridSize,
                        double reward_exponent = 2.0);

struct ToyEnvConfig {
  double intercept = 0.3;
  double slope = 0.6;

  void Validate() const;
};

// clamp(intercept + slope * threshold, 0, 1).
UnitInterval ToyStep(double threshold, const ToyEnvConfig& config);

// Closed-form toy inverse (goal - intercept) / slope, clamped to [0, 1].
UnitInterval ToyInverse(UnitInterval goal, const ToyEnvConfig& config);

// A fast stand-in environment: given the observation and the newly chosen
// threshold, returns the next viewability.
struct ToyEnvironment {
  std::function<UnitInterval(const CampaignState&, UnitInterval)> step;
  UnitInterval initial_viewability;
  UnitInterval initial_threshold;
};

// The linear toy, started at (v = intercept, phi = 0).
ToyEnvironment LinearToyEnvironment(const ToyEnvConfig& config = {});

// An environment that follows the logit-space model exactly.
ToyEnvironment ModelToyEnvironment(const EnvModelParams& params,
                                   UnitInterval initial_viewability,
                                   UnitInterval initial_threshold);

struct GoalReachResult {
  bool reached = false;
  int steps = 0;  // first step (1-based) inside the band; max_steps if never
};

GoalReachResult CheckGoalReaching(const Policy& policy, UnitInterval goal,
                                  int max_steps = 20, double band = 0.05,
                                  const ToyEnvConfig& toy = {});
GoalReachResult CheckGoalReaching(const Policy& policy, UnitInterval goal,
                                  int max_steps, double band,
                                  const ToyEnvironment& env);

// Starts at v = goal with the toy-inverse threshold; true iff no step moves
// the threshold by more than delta.
bool CheckStabilityAtGoal(const Policy& policy, UnitInterval goal,
                          int steps = 20, double delta = 0.05,
                          const ToyEnvConfig& toy = {});

struct SweepRow {
  CampaignState state;
  UnitInterval action;
  bool direction_ok = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  double pass_fraction = 0.0;
};

// v in {0.2..0.9} x goal in {0.6, 0.7, 0.8} x phi in {0.2..0.8}, step 0.1.
std::vector<CampaignState> DefaultSweepGrid();

// direction_ok = (v < goal => action >= phi - delta) and
//                (v > goal => action <= phi + delta).
SweepReport RationalitySweep(const Policy& policy,
                             std::span<const CampaignState> grid,
                             double delta = 0.05);

// Strict mode: throws Error when pass_fraction < min_pass_fraction.
void RequireRational(const SweepReport& report,
                     double min_pass_fraction = 0.95);

// v,goal,phi_prev,action,direction_ok
void WriteSweepReport(const SweepReport& report, std::ostream& out);

}  // namespace viewsim

#endif  // VIEWSIM_CONTROLLERS_H_
