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

#include "viewsim/bayesopt.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "viewsim/csv_util.h"
#include "viewsim/errors.h"

namespace viewsim {

namespace {

constexpr double kMinJitter = 1e-6;

double ToScale(double x, ParamScale scale) {
  return scale == ParamScale::kLog10 ? std::log10(x) : x;
}

double FromScale(double x, ParamScale scale) {
  return scale == ParamScale::kLog10 ? std::pow(10.0, x) : x;
}

double LengthScale(const GpConfig& config, Eigen::Index dim) {
  if (static_cast<size_t>(dim) < config.length_scales.size()) {
    return config.length_scales[static_cast<size_t>(dim)];
  }
  return config.length_scale;
}

std::vector<std::string> TraceColumns(const ParamSpace& space) {
  std::vector<std::string> cols{"eval_index"};
  for (const auto& d : space.dims) cols.push_back(d.name);
  cols.push_back("reward");
  cols.push_back("flagged");
  return cols;
}

TuneResult Summarize(std::vector<TraceEntry> trace, int new_evaluations) {
  TuneResult result;
  result.new_evaluations = new_evaluations;
  const TraceEntry* best = nullptr;
  for (const auto& e : trace) {
    if (e.flagged) continue;
    if (!best || e.value > best->value) best = &e;
  }
  if (!best && !trace.empty()) best = &trace.front();
  if (best) {
    result.best_point = best->point;
    result.best_value = best->value;
  }
  result.trace = std::move(trace);
  return result;
}

}  // namespace

ParamSpace ParamSpace::Default() {
  return ParamSpace{{
      {"actor_lr", 1e-5, 1e-1, ParamScale::kLog10, false},
      {"critic_lr", 1e-5, 1e-1, ParamScale::kLog10, false},
      {"epochs", 1, 100, ParamScale::kLinear, true},
      {"minibatch", 16, 512, ParamScale::kLinear, true},
      {"gamma", 0.5, 0.999, ParamScale::kLinear, false},
  }};
}

void ParamSpace::Validate() const {
  if (dims.empty()) throw InvalidArgumentError("parameter space is empty");
  for (const auto& d : dims) {
    if (d.name.empty()) throw InvalidArgumentError("dimension without a name");
    if (!(d.lo < d.hi)) {
      throw InvalidArgumentError("dimension '" + d.name + "' needs lo < hi");
    }
    if (d.scale == ParamScale::kLog10 && !(d.lo > 0.0)) {
      throw InvalidArgumentError("log-scaled dimension '" + d.name +
                                 "' needs lo > 0");
    }
  }
}

std::vector<std::string> ParamSpace::Names() const {
  std::vector<std::string> out;
  for (const auto& d : dims) out.push_back(d.name);
  return out;
}

ParamPoint ParamSpace::FromUnit(const Eigen::VectorXd& unit) const {
  if (static_cast<size_t>(unit.size()) != dims.size()) {
    throw InvalidArgumentError("unit point has the wrong dimension");
  }
  ParamPoint out(dims.size());
  for (size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    const double u = std::clamp(unit(static_cast<Eigen::Index>(i)), 0.0, 1.0);
    const double lo = ToScale(d.lo, d.scale);
    const double hi = ToScale(d.hi, d.scale);
    double x = FromScale(lo + u * (hi - lo), d.scale);
    if (d.integer) x = std::round(x);
    out[i] = std::clamp(x, d.lo, d.hi);
  }
  return out;
}

Eigen::VectorXd ParamSpace::ToUnit(const ParamPoint& point) const {
  if (point.size() != dims.size()) {
    throw InvalidArgumentError("point has the wrong dimension");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(dims.size()));
  for (size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    const double lo = ToScale(d.lo, d.scale);
    const double hi = ToScale(d.hi, d.scale);
    out(static_cast<Eigen::Index>(i)) =
        std::clamp((ToScale(point[i], d.scale) - lo) / (hi - lo), 0.0, 1.0);
  }
  return out;
}

bool ParamSpace::Contains(const ParamPoint& point) const {
  if (point.size() != dims.size()) return false;
  for (size_t i = 0; i < dims.size(); ++i) {
    const auto& d = dims[i];
    if (!(point[i] >= d.lo && point[i] <= d.hi)) return false;
    if (d.integer && point[i] != std::round(point[i])) return false;
  }
  return true;
}

void GpConfig::Validate() const {
  if (!(length_scale > 0.0)) throw InvalidArgumentError("length_scale > 0");
  for (double l : length_scales) {
    if (!(l > 0.0)) throw InvalidArgumentError("length scales must be > 0");
  }
  if (!(signal_variance > 0.0)) {
    throw InvalidArgumentError("signal_variance must be > 0");
  }
  if (!(noise_variance >= 0.0)) {
    throw InvalidArgumentError("noise_variance must be >= 0");
  }
}

double SquaredExponential(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          const GpConfig& config) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double z = (a(i) - b(i)) / LengthScale(config, i);
    r2 += z * z;
  }
  return config.signal_variance * std::exp(-0.5 * r2);
}

GpModel GpFit(const Eigen::MatrixXd& points, const Eigen::VectorXd& values,
              const GpConfig& config) {
  config.Validate();
  const Eigen::Index n = points.rows();
  if (n == 0) throw InsufficientDataError("GP fit needs an observation");
  if (values.size() != n) {
    throw InvalidArgumentError("GP points and values differ in count");
  }
  if (!values.allFinite() || !points.allFinite()) {
    throw InvalidArgumentError("GP observations must be finite");
  }
  GpModel model;
  model.config = config;
  model.points = points;
  model.values = values;
  model.mean = values.mean();

  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = SquaredExponential(points.row(i).transpose(),
                                             points.row(j).transpose(), config);
    }
  }
  double jitter = std::max(config.noise_variance, kMinJitter);
  for (int attempt = 0;; ++attempt) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    model.chol.compute(kj);
    if (model.chol.info() == Eigen::Success) break;
    if (attempt >= 12) {
      throw SingularSystemError("GP covariance could not be factorized");
    }
    jitter *= 10.0;
  }
  model.jitter = jitter;
  model.weights = model.chol.solve(
      (values.array() - model.mean).matrix());
  return model;
}

GpPrediction GpPosterior(const GpModel& model, const Eigen::VectorXd& point) {
  if (point.size() != model.points.cols()) {
    throw InvalidArgumentError("posterior point has the wrong dimension");
  }
  const Eigen::Index n = model.points.rows();
  Eigen::VectorXd kx(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kx(i) = SquaredExponential(model.points.row(i).transpose(), point,
                               model.config);
  }
  GpPrediction out;
  out.mean = model.mean + kx.dot(model.weights);
  const Eigen::VectorXd v = model.chol.matrixL().solve(kx);
  out.variance = std::max(0.0, model.config.signal_variance - v.squaredNorm());
  return out;
}

double ExpectedImprovement(double mean, double variance, double best) {
  const double sd = std::sqrt(std::max(variance, 0.0));
  const double gain = mean - best;
  if (sd < 1e-12) return std::max(gain, 0.0);
  const double z = gain / sd;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gain * cdf + sd * pdf);
}

ParamPoint Suggest(const GpModel* model, const ParamSpace& space, Rng& rng,
                   int n_candidates) {
  space.Validate();
  const auto d = static_cast<Eigen::Index>(space.size());
  auto uniform = [&] {
    Eigen::VectorXd u(d);
    for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.Uniform();
    return u;
  };
  if (model == nullptr || model->points.rows() == 0) {
    return space.FromUnit(uniform());
  }
  if (n_candidates < 1) throw InvalidArgumentError("n_candidates must be >= 1");
  const double best = model->values.maxCoeff();
  Eigen::VectorXd best_u;
  double best_ei = -1.0;
  for (int c = 0; c < n_candidates; ++c) {
    const Eigen::VectorXd u = uniform();
    const GpPrediction p = GpPosterior(*model, u);
    const double ei = ExpectedImprovement(p.mean, p.variance, best);
    if (ei > best_ei) {
      best_ei = ei;
      best_u = u;
    }
  }
  return space.FromUnit(best_u);
}

void TuneConfig::Validate() const {
  if (init_points < 1) throw InvalidArgumentError("init_points must be >= 1");
  if (budget < init_points) {
    throw InvalidArgumentError("budget must be >= init_points");
  }
  if (n_candidates < 1) throw InvalidArgumentError("n_candidates must be >= 1");
  gp.Validate();
}

TuneResult Tune(const Objective& objective, const ParamSpace& space,
                const TuneConfig& config, std::vector<TraceEntry> resume_from) {
  space.Validate();
  config.Validate();
  std::vector<TraceEntry> trace = std::move(resume_from);
  if (trace.empty() && config.trace_path &&
      std::filesystem::exists(*config.trace_path)) {
    trace = ReadTrace(*config.trace_path, space);
  }
  for (size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].eval_index != static_cast<int>(i)) {
      throw FormatError("trace eval_index values must be 0, 1, 2, ...");
    }
    if (!space.Contains(trace[i].point)) {
      throw FormatError("trace entry " + std::to_string(i) +
                        " lies outside the parameter space");
    }
  }
  if (trace.size() > static_cast<size_t>(config.budget)) {
    throw InvalidArgumentError("trace already holds more entries than budget");
  }

  int new_evaluations = 0;
  for (int i = static_cast<int>(trace.size()); i < config.budget; ++i) {
    Rng rng(DeriveSeed(config.seed, static_cast<uint64_t>(i)));
    ParamPoint point;
    if (i < config.init_points) {
      point = Suggest(nullptr, space, rng, config.n_candidates);
    } else {
      Eigen::MatrixXd x(static_cast<Eigen::Index>(trace.size()),
                        static_cast<Eigen::Index>(space.size()));
      Eigen::VectorXd y(static_cast<Eigen::Index>(trace.size()));
      for (size_t j = 0; j < trace.size(); ++j) {
        x.row(static_cast<Eigen::Index>(j)) =
            space.ToUnit(trace[j].point).transpose();
        y(static_cast<Eigen::Index>(j)) = trace[j].value;
      }
      const GpModel model = GpFit(x, y, config.gp);
      point = Suggest(&model, space, rng, config.n_candidates);
    }

    TraceEntry entry{i, point, 0.0, false};
    try {
      const double value =
          objective(point, DeriveSeed(config.seed, 1000000 + static_cast<uint64_t>(i)));
      if (std::isfinite(value)) {
        entry.value = value;
      } else {
        entry.flagged = true;
      }
    } catch (const std::exception&) {
      entry.flagged = true;
    }
    trace.push_back(std::move(entry));
    ++new_evaluations;
    if (config.trace_path) WriteTrace(trace, space, *config.trace_path);
  }
  return Summarize(std::move(trace), new_evaluations);
}

TuneResult RandomSearch(const Objective& objective, const ParamSpace& space,
                        TuneConfig config) {
  config.init_points = config.budget;
  return Tune(objective, space, config);
}

void WriteTrace(const std::vector<TraceEntry>& trace, const ParamSpace& space,
                std::ostream& out) {
  out << csv::JoinHeader(TraceColumns(space)) << '\n';
  for (const auto& e : trace) {
    out << e.eval_index;
    for (double x : e.point) out << ',' << csv::FormatDouble(x);
    out << ',' << csv::FormatDouble(e.value) << ',' << (e.flagged ? 1 : 0)
        << '\n';
  }
}

void WriteTrace(const std::vector<TraceEntry>& trace, const ParamSpace& space,
                const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    WriteTrace(trace, space, out);
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<TraceEntry> ReadTrace(std::istream& in, const ParamSpace& space) {
  const auto cols = TraceColumns(space);
  csv::ExpectHeader(in, cols);
  std::vector<TraceEntry> out;
  std::string line;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const auto f = csv::SplitRow(line, cols.size(), line_number);
    TraceEntry e;
    e.eval_index =
        static_cast<int>(csv::ParseInt(f[0], "eval_index", line_number));
    for (size_t i = 0; i < space.size(); ++i) {
      e.point.push_back(
          csv::ParseDouble(f[1 + i], space.dims[i].name, line_number));
    }
    e.value = csv::ParseDouble(f[1 + space.size()], "reward", line_number);
    e.flagged = csv::ParseBool01(f[2 + space.size()], "flagged", line_number);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TraceEntry> ReadTrace(const std::string& path,
                                  const ParamSpace& space) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadTrace(in, space);
}

}  // namespace viewsim
