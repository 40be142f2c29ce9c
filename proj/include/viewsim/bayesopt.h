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

#ifndef VIEWSIM_BAYESOPT_H_
#define VIEWSIM_BAYESOPT_H_

// Gaussian-process Bayesian optimization (maximization) over a small box of
// hyperparameters. All modelling happens in normalized [0, 1] coordinates.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "viewsim/rng.h"

namespace viewsim {

enum class ParamScale { kLinear, kLog10 };

struct ParamDim {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  ParamScale scale = ParamScale::kLinear;
  bool integer = false;
};

using ParamPoint = std::vector<double>;

struct ParamSpace {
  std::vector<ParamDim> dims;

  // actor_lr, critic_lr, epochs, minibatch, gamma.
  static ParamSpace Default();

  void Validate() const;
  size_t size() const { return dims.size(); }
  std::vector<std::string> Names() const;
  // Integer dims are rounded and every coordinate is clamped into bounds.
  ParamPoint FromUnit(const Eigen::VectorXd& unit) const;
  Eigen::VectorXd ToUnit(const ParamPoint& point) const;
  bool Contains(const ParamPoint& point) const;
};

struct GpConfig {
  double length_scale = 0.2;  // used for every dim without an override
  std::vector<double> length_scales;  // optional per-dim override
  double signal_variance = 1.0;
  double noise_variance = 1e-4;  // floored at 1e-6

  void Validate() const;
};

struct GpModel {
  GpConfig config;
  Eigen::MatrixXd points;  // n x d, normalized coordinates
  Eigen::VectorXd values;
  double mean = 0.0;  // constant prior mean (mean of the values)
  double jitter = 0.0;  // diagonal actually added
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd weights;  // K^-1 (values - mean)
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;  // latent function variance, >= 0
};

double SquaredExponential(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const GpConfig& config);

// Exact GP regression. Jitter is increased until the covariance factorizes,
// so duplicate points never fail. Requires at least one observation.
GpModel GpFit(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
              const GpConfig& config = {});
GpPrediction GpPosterior(const GpModel& model, const Eigen::VectorXd& point);

// Expected improvement over `best` for a Gaussian with the given moments.
double ExpectedImprovement(double mean, double variance, double best);

// Maximizes EI over n_candidates uniform samples in normalized space (ties
// keep the first candidate). With no model (or an empty one) returns a
// uniform random point.
ParamPoint Suggest(const GpModel* model, const ParamSpace& space, Rng& rng,
                   int n_candidates = 4096);

struct TraceEntry {
  int eval_index = 0;
  ParamPoint point;
  double value = 0.0;
  bool flagged = false;  // objective failed; value recorded as 0

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

// The objective receives the point and a seed derived for that evaluation.
using Objective = std::function<double(const ParamPoint&, uint64_t)>;

struct TuneConfig {
  int budget = 20;
  int init_points = 8;
  uint64_t seed = 7;
  int n_candidates = 4096;
  GpConfig gp;
  // When set, the trace is rewritten after every evaluation, and an existing
  // file there is resumed from.
  std::optional<std::string> trace_path;

  void Validate() const;
};

struct TuneResult {
  ParamPoint best_point;
  double best_value = 0.0;
  std::vector<TraceEntry> trace;
  int new_evaluations = 0;
};

// Evaluation i draws its point from a generator seeded by (seed, i): the
// first init_points uniformly, the rest by EI on a GP fit to all earlier
// entries. A resumed run therefore continues exactly where it stopped.
TuneResult Tune(const Objective& objective, const ParamSpace& space,
                const TuneConfig& config,
                std::vector<TraceEntry> resume_from = {});

// Tune with init_points = budget.
TuneResult RandomSearch(const Objective& objective, const ParamSpace& space,
                        TuneConfig config);

// eval_index,<dim names>,reward,flagged
void WriteTrace(const std::vector<TraceEntry>& trace, const ParamSpace& space,
                std::ostream& out);
void WriteTrace(const std::vector<TraceEntry>& trace, const ParamSpace& space,
                const std::string& path);
std::vector<TraceEntry> ReadTrace(std::istream& in, const ParamSpace& space);
std::vector<TraceEntry> ReadTrace(const std::string& path,
                                  const ParamSpace& space);

}  // namespace viewsim

#endif  // VIEWSIM_BAYESOPT_H_
