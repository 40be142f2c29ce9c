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

#ifndef VIEWSIM_PREDICTORS_H_
#define VIEWSIM_PREDICTORS_H_

// The two learned pieces of the replay simulator: a logistic view-probability
// model standing in for the DSP's bid-time prediction, and a linear
// bid-pricing model standing in for the production bidder.

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "viewsim/core.h"
#include "viewsim/dataset.h"

namespace viewsim {

enum class ModelKind { kLogistic, kLinear };

const char* ModelKindName(ModelKind kind);

struct LinearModel {
  ModelKind kind = ModelKind::kLogistic;
  std::vector<double> weights;  // kFeatureDim entries, bias last

  double Dot(const FeatureVector& x) const;
  void Validate() const;
};

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 30;
  int minibatch = 256;
  double l2 = 1e-6;
  uint64_t seed = 7;

  void Validate() const;
};

// Design matrix (one row per sample) of the encoded features.
Eigen::MatrixXd DesignMatrix(std::span<const ImpressionRecord> records);

struct LogisticFit {
  Eigen::VectorXd weights;
  // Full-data objective before training and after every epoch.
  std::vector<double> epoch_loss;
};

// Mean log loss plus (l2 / 2) * |w|^2.
double LogisticObjective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double l2);

// Minibatch gradient descent from all-zero weights. The seed only drives the
// per-epoch shuffle. Throws DegenerateLabelsError on single-class labels.
LogisticFit FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const TrainConfig& config);

LinearModel TrainLogistic(std::span<const ImpressionRecord> records,
                          const TrainConfig& config,
                          std::vector<double>* epoch_loss = nullptr);

UnitInterval PredictViewProbability(const LinearModel& model,
                                    const ImpressionRecord& record);

// Ridge normal equations (X'X + l2 I) w = X'y. With l2 == 0 a rank
// deficient system throws SingularSystemError.
Eigen::VectorXd FitLeastSquares(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double l2);

// Regresses cost_micros on the encoded features; uses config.l2 only.
LinearModel TrainBidModel(std::span<const ImpressionRecord> winning_records,
                          const TrainConfig& config);

// max(0, round(w . x)).
int64_t BidPrice(const LinearModel& model, const ImpressionRecord& record);

// Largest scaled error |analytic - numeric| / max(1, |analytic|, |numeric|)
// between the single-record log-loss gradient and central differences.
// eps must be in (0, 1e-2).
double GradientCheckLogistic(const LinearModel& model,
                             const ImpressionRecord& record, bool label,
                             double eps);

// Area under the ROC curve (ties count one half). Needs both classes.
double RocAuc(std::span<const double> scores, std::span<const bool> labels);

// First line "<kind>,<dim>", then one weight per line (17 significant
// digits).
void WriteModel(const LinearModel& model, std::ostream& out);
void WriteModel(const LinearModel& model, const std::string& path);
LinearModel ReadModel(std::istream& in);
LinearModel ReadModel(const std::string& path);

}  // namespace viewsim

#endif  // VIEWSIM_PREDICTORS_H_
