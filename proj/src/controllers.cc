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

#include "viewsim/controllers.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"

namespace viewsim {

void PidConfig::Validate() const {
  if (!(kp >= 0.0 && ki >= 0.0 && kd >= 0.0)) {
    throw InvalidArgumentError("PID gains must be >= 0");
  }
  if (!(step_clamp > 0.0) || !(integral_clamp > 0.0)) {
    throw InvalidArgumentError("PID clamps must be positive");
  }
  if (!(threshold_lo >= 0.0 && threshold_hi <= 1.0 &&
        threshold_lo < threshold_hi)) {
    throw InvalidArgumentError("PID threshold bounds must satisfy 0<=lo<hi<=1");
  }
}

PidStepResult PidStep(const PidState& state, const PidConfig& config,
                      UnitInterval v, UnitInterval goal) {
  config.Validate();
  const double error = goal - v;
  PidState next = state;
  next.integral = std::clamp(state.integral + error, -config.integral_clamp,
                             config.integral_clamp);
  const double derivative = state.prev_error ? error - *state.prev_error : 0.0;
  const double raw = config.kp * error + config.ki * next.integral +
                     config.kd * derivative;
  const double delta = std::clamp(raw, -config.step_clamp, config.step_clamp);
  const UnitInterval threshold(std::clamp(state.current_threshold + delta,
                                          config.threshold_lo,
                                          config.threshold_hi));
  next.prev_error = error;
  next.current_threshold = threshold;
  return {next, threshold};
}

Policy MakePidPolicy(const PidConfig& config) {
  config.Validate();
  auto memory = std::make_shared<PidState>();
  return [config, memory](const CampaignState& s) {
    memory->current_threshold = s.prev_threshold;
    const auto result = PidStep(*memory, config, s.viewability, s.goal);
    *memory = result.state;
    return result.threshold.value();
  };
}

Policy MakeGreedyPolicy(const EnvModelParams& params, int grid_size,
                        double reward_exponent) {
  params.Validate();
  return [=](const CampaignState& s) {
    return GreedyThreshold(s, params, grid_size, reward_exponent).value();
  };
}

void ToyEnvConfig::Validate() const {
  if (slope == 0.0 || !std::isfinite(slope) || !std::isfinite(intercept)) {
    throw InvalidArgumentError("toy slope must be finite and nonzero");
  }
}

UnitInterval ToyStep(double threshold, const ToyEnvConfig& config) {
  return UnitInterval::Clamped(config.intercept + config.slope * threshold);
}

UnitInterval ToyInverse(UnitInterval goal, const ToyEnvConfig& config) {
  config.Validate();
  return UnitInterval::Clamped((goal - config.intercept) / config.slope);
}

ToyEnvironment LinearToyEnvironment(const ToyEnvConfig& config) {
  config.Validate();
  return ToyEnvironment{
      [config](const CampaignState&, UnitInterval phi) {
        return ToyStep(phi, config);
      },
      UnitInterval::Clamped(config.intercept), UnitInterval(0.0)};
}

ToyEnvironment ModelToyEnvironment(const EnvModelParams& params,
                                   UnitInterval initial_viewability,
                                   UnitInterval initial_threshold) {
  params.Validate();
  return ToyEnvironment{
      [params](const CampaignState& s, UnitInterval phi) {
        return PredictNextViewability(s.viewability, s.prev_threshold, phi,
                                      params);
      },
      initial_viewability, initial_threshold};
}

GoalReachResult CheckGoalReaching(const Policy& policy, UnitInterval goal,
                                  int max_steps, double band,
                                  const ToyEnvironment& env) {
  if (!(band > 0.0)) throw InvalidArgumentError("band must be positive");
  if (max_steps < 1) throw InvalidArgumentError("max_steps must be >= 1");
  CampaignState state{env.initial_viewability, goal, env.initial_threshold};
  for (int step = 1; step <= max_steps; ++step) {
    const UnitInterval phi = UnitInterval::Clamped(policy(state));
    const UnitInterval v = env.step(state, phi);
    if (std::abs(v - goal) <= band) return {true, step};
    state = CampaignState{v, goal, phi};
  }
  return {false, max_steps};
}

GoalReachResult CheckGoalReaching(const Policy& policy, UnitInterval goal,
                                  int max_steps, double band,
                                  const ToyEnvConfig& toy) {
  return CheckGoalReaching(policy, goal, max_steps, band,
                           LinearToyEnvironment(toy));
}

bool CheckStabilityAtGoal(const Policy& policy, UnitInterval goal, int steps,
                          double delta, const ToyEnvConfig& toy) {
  if (!(delta > 0.0)) throw InvalidArgumentError("delta must be positive");
  CampaignState state{goal, goal, ToyInverse(goal, toy)};
  double worst = 0.0;
  for (int i = 0; i < steps; ++i) {
    const UnitInterval phi = UnitInterval::Clamped(policy(state));
    worst = std::max(worst, std::abs(phi - state.prev_threshold));
    state = CampaignState{ToyStep(phi, toy), goal, phi};
  }
  return worst <= delta;
}

std::vector<CampaignState> DefaultSweepGrid() {
  std::vector<CampaignState> grid;
  for (int v = 2; v <= 9; ++v) {
    for (int g = 6; g <= 8; ++g) {
      for (int phi = 2; phi <= 8; ++phi) {
        grid.push_back(CampaignState{UnitInterval(v / 10.0),
                                     UnitInterval(g / 10.0),
                                     UnitInterval(phi / 10.0)});
      }
    }
  }
  return grid;
}

SweepReport RationalitySweep(const Policy& policy,
                             std::span<const CampaignState> grid,
                             double delta) {
  if (grid.empty()) throw InvalidArgumentError("sweep grid is empty");
  SweepReport report;
  size_t passed = 0;
  for (const auto& s : grid) {
    const UnitInterval action = UnitInterval::Clamped(policy(s));
    bool ok = true;
    if (s.viewability < s.goal) ok = action >= s.prev_threshold - delta;
    if (s.viewability > s.goal) ok = action <= s.prev_threshold + delta;
    if (ok) ++passed;
    report.rows.push_back(SweepRow{s, action, ok});
  }
  report.pass_fraction =
      static_cast<double>(passed) / static_cast<double>(grid.size());
  return report;
}

void RequireRational(const SweepReport& report, double min_pass_fraction) {
  if (report.pass_fraction < min_pass_fraction) {
    throw Error("rationality sweep pass fraction " +
                std::to_string(report.pass_fraction) + " below " +
                std::to_string(min_pass_fraction));
  }
}

void WriteSweepReport(const SweepReport& report, std::ostream& out) {
  using csv::FormatDouble;
  out << "v,goal,phi_prev,action,direction_ok\n";
  for (const auto& row : report.rows) {
    out << FormatDouble(row.state.viewability) << ','
        << FormatDouble(row.state.goal) << ','
        << FormatDouble(row.state.prev_threshold) << ','
        << FormatDouble(row.action) << ',' << (row.direction_ok ? 1 : 0)
        << '\n';
  }
}

}  // namespace viewsim
