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

#include "viewsim/predictors.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"
#include "viewsim/rng.h"

namespace viewsim {

namespace {

double StableSigmoid(double z) { return Sigmoid(z).value(); }

// log(1 + e^z) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double ScaledError(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double SingleRecordLoss(const FeatureVector& x, bool label,
                        const std::vector<double>& w) {
  double z = 0.0;
  for (int j = 0; j < kFeatureDim; ++j) z += w[j] * x[j];
  // -[y log p + (1 - y) log(1 - p)] with p = sigmoid(z)
  return label ? Softplus(-z) : Softplus(z);
}

}  // namespace

const char* ModelKindName(ModelKind kind) {
  return kind == ModelKind::kLogistic ? "logistic" : "linear";
}

double LinearModel::Dot(const FeatureVector& x) const {
  double z = 0.0;
  for (int j = 0; j < kFeatureDim; ++j) z += weights[j] * x[j];
  return z;
}

void LinearModel::Validate() const {
  if (weights.size() != static_cast<size_t>(kFeatureDim)) {
    throw InvalidArgumentError("model has " + std::to_string(weights.size()) +
                               " weights, expected " +
                               std::to_string(kFeatureDim));
  }
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    throw InvalidArgumentError("learning_rate must be positive");
  }
  if (epochs < 0) throw InvalidArgumentError("epochs must be >= 0");
  if (minibatch <= 0) throw InvalidArgumentError("minibatch must be positive");
  if (!(l2 >= 0.0)) throw InvalidArgumentError("l2 must be >= 0");
}

Eigen::MatrixXd DesignMatrix(std::span<const ImpressionRecord> records) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()), kFeatureDim);
  for (size_t i = 0; i < records.size(); ++i) {
    const auto f = EncodeFeatures(records[i]);
    for (int j = 0; j < kFeatureDim; ++j) x(static_cast<Eigen::Index>(i), j) = f[j];
  }
  return x;
}

double LogisticObjective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w, double l2) {
  const Eigen::VectorXd z = x * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += y(i) > 0.5 ? Softplus(-z(i)) : Softplus(z(i));
  }
  return loss / static_cast<double>(z.size()) + 0.5 * l2 * w.squaredNorm();
}

LogisticFit FitLogistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                        const TrainConfig& config) {
  config.Validate();
  const Eigen::Index n = x.rows();
  if (n == 0) throw InvalidArgumentError("empty training set");
  if (y.size() != n) throw InvalidArgumentError("label count mismatch");
  const double positives = (y.array() > 0.5).count();
  if (positives == 0 || positives == n) {
    throw DegenerateLabelsError("degenerate labels: only one class present");
  }

  LogisticFit fit;
  fit.weights = Eigen::VectorXd::Zero(x.cols());
  fit.epoch_loss.push_back(LogisticObjective(x, y, fit.weights, config.l2));

  Rng rng(config.seed);
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::Index batch = std::min<Eigen::Index>(config.minibatch, n);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.Index(i + 1)]);
    }
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index stop = std::min(n, start + batch);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.cols());
      for (Eigen::Index k = start; k < stop; ++k) {
        const Eigen::Index row = order[static_cast<size_t>(k)];
        const double p = StableSigmoid(x.row(row).dot(fit.weights));
        grad += (p - y(row)) * x.row(row).transpose();
      }
      grad /= static_cast<double>(stop - start);
      grad += config.l2 * fit.weights;
      fit.weights -= config.learning_rate * grad;
    }
    fit.epoch_loss.push_back(LogisticObjective(x, y, fit.weights, config.l2));
  }
  return fit;
}

LinearModel TrainLogistic(std::span<const ImpressionRecord> records,
                          const TrainConfig& config,
                          std::vector<double>* epoch_loss) {
  const Eigen::MatrixXd x = DesignMatrix(records);
  Eigen::VectorXd y(x.rows());
  for (size_t i = 0; i < records.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = records[i].viewed ? 1.0 : 0.0;
  }
  LogisticFit fit = FitLogistic(x, y, config);
  if (epoch_loss) *epoch_loss = fit.epoch_loss;
  LinearModel model{ModelKind::kLogistic,
                    std::vector<double>(fit.weights.begin(), fit.weights.end())};
  return model;
}

UnitInterval PredictViewProbability(const LinearModel& model,
                                    const ImpressionRecord& record) {
  if (model.kind != ModelKind::kLogistic) {
    throw InvalidArgumentError("view probability needs a logistic model");
  }
  model.Validate();
  return Sigmoid(model.Dot(EncodeFeatures(record)));
}

Eigen::VectorXd FitLeastSquares(const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double l2) {
  if (x.rows() == 0) throw InvalidArgumentError("empty training set");
  if (!(l2 >= 0.0)) throw InvalidArgumentError("l2 must be >= 0");
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += l2;
  const Eigen::VectorXd rhs = x.transpose() * y;

  if (l2 == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < gram.cols()) {
      throw SingularSystemError(
          "normal equations are singular; use a ridge term l2 > 0");
    }
    return qr.solve(rhs);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw SingularSystemError("normal equations could not be factored");
  }
  return ldlt.solve(rhs);
}

LinearModel TrainBidModel(std::span<const ImpressionRecord> winning_records,
                          const TrainConfig& config) {
  if (winning_records.empty()) throw InvalidArgumentError("empty training set");
  const Eigen::MatrixXd x = DesignMatrix(winning_records);
  Eigen::VectorXd y(x.rows());
  for (size_t i = 0; i < winning_records.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) =
        static_cast<double>(winning_records[i].cost_micros);
  }
  const Eigen::VectorXd w = FitLeastSquares(x, y, config.l2);
  return LinearModel{ModelKind::kLinear, std::vector<double>(w.begin(), w.end())};
}

int64_t BidPrice(const LinearModel& model, const ImpressionRecord& record) {
  model.Validate();
  const double price = model.Dot(EncodeFeatures(record));
  return price > 0.0 ? std::llround(price) : 0;
}

double GradientCheckLogistic(const LinearModel& model,
                             const ImpressionRecord& record, bool label,
                             double eps) {
  if (!(eps > 0.0 && eps < 1e-2)) {
    throw InvalidArgumentError("gradient check eps must lie in (0, 1e-2)");
  }
  model.Validate();
  const FeatureVector x = EncodeFeatures(record);
  const double p = Sigmoid(model.Dot(x));
  const double y = label ? 1.0 : 0.0;

  double worst = 0.0;
  std::vector<double> w = model.weights;
  for (int j = 0; j < kFeatureDim; ++j) {
    const double analytic = (p - y) * x[j];
    const double saved = w[j];
    w[j] = saved + eps;
    const double up = SingleRecordLoss(x, label, w);
    w[j] = saved - eps;
    const double down = SingleRecordLoss(x, label, w);
    w[j] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    worst = std::max(worst, ScaledError(analytic, numeric));
  }
  return worst;
}

double RocAuc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) {
    throw InvalidArgumentError("scores and labels differ in length");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Mann-Whitney U with average ranks for ties.
  double rank_sum = 0.0;
  size_t positives = 0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (size_t k = i; k < j; ++k) {
      if (labels[order[k]]) {
        rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DegenerateLabelsError("AUC needs both classes");
  }
  const double np = static_cast<double>(positives);
  return (rank_sum - np * (np + 1.0) / 2.0) /
         (np * static_cast<double>(negatives));
}

void WriteModel(const LinearModel& model, std::ostream& out) {
  out << ModelKindName(model.kind) << ',' << model.weights.size() << '\n';
  for (double w : model.weights) out << csv::FormatDouble(w) << '\n';
}

void WriteModel(const LinearModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  WriteModel(model, out);
}

LinearModel ReadModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file");
  const auto head = csv::SplitLine(line);
  if (head.size() != 2) throw FormatError("model header must be 'kind,dim'");
  LinearModel model;
  if (head[0] == "logistic") {
    model.kind = ModelKind::kLogistic;
  } else if (head[0] == "linear") {
    model.kind = ModelKind::kLinear;
  } else {
    throw FormatError("unknown model kind '" + std::string(head[0]) + "'");
  }
  const int64_t dim = csv::ParseInt(head[1], "dim", 1);
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    model.weights.push_back(csv::ParseDouble(line, "weight", line_number));
  }
  if (static_cast<int64_t>(model.weights.size()) != dim) {
    throw FormatError("model declares " + std::to_string(dim) +
                      " weights but holds " +
                      std::to_string(model.weights.size()));
  }
  model.Validate();
  return model;
}

LinearModel ReadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadModel(in);
}

}  // namespace viewsim
