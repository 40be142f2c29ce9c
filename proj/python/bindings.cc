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

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "viewsim/agents.h"
#include "viewsim/bayesopt.h"
#include "viewsim/controllers.h"
#include "viewsim/core.h"
#include "viewsim/dataset.h"
#include "viewsim/env_model.h"
#include "viewsim/errors.h"
#include "viewsim/experiments.h"
#include "viewsim/run_config.h"

namespace py = pybind11;

namespace viewsim {
namespace {

using Observation = std::tuple<double, double, double, double>;

std::vector<ControlObservation> ToObservations(
    const std::vector<Observation>& rows) {
  std::vector<ControlObservation> out;
  out.reserve(rows.size());
  for (const auto& [v, phi, v_next, phi_next] : rows) {
    out.push_back({UnitInterval(v), UnitInterval(phi), UnitInterval(v_next),
                   UnitInterval(phi_next)});
  }
  return out;
}

EnvModelParams Params(double alpha) {
  EnvModelParams p;
  p.alpha = alpha;
  return p;
}

CampaignState State(double v, double goal, double prev_threshold) {
  return CampaignState{UnitInterval(v), UnitInterval(goal),
                       UnitInterval(prev_threshold)};
}

// Generates records from a JSON run configuration and writes them as CSV.
py::tuple GenerateLldFile(const std::string& config_json,
                          const std::string& path) {
  const RunConfig config = ParseRunConfig(config_json);
  const auto records = GenerateLld(config.generator);
  WriteLld(records, path);
  int64_t views = 0;
  for (const auto& r : records) views += r.viewed ? 1 : 0;
  return py::make_tuple(records.size(), static_cast<double>(views) /
                                            static_cast<double>(records.size()));
}

py::dict TuneCallable(const py::function& objective,
                      const std::vector<std::tuple<std::string, double, double,
                                                   std::string, bool>>& dims,
                      int budget, int init_points, uint64_t seed,
                      int n_candidates) {
  ParamSpace space;
  for (const auto& [name, lo, hi, scale, integer] : dims) {
    ParamDim d{name, lo, hi, ParamScale::kLinear, integer};
    if (scale == "log10") {
      d.scale = ParamScale::kLog10;
    } else if (scale != "linear") {
      throw InvalidArgumentError("scale must be 'linear' or 'log10'");
    }
    space.dims.push_back(d);
  }
  TuneConfig config;
  config.budget = budget;
  config.init_points = init_points;
  config.seed = seed;
  config.n_candidates = n_candidates;
  const Objective fn = [&objective](const ParamPoint& p, uint64_t) {
    return objective(p).cast<double>();
  };
  const TuneResult r = Tune(fn, space, config);
  py::list values;
  py::list points;
  py::list flagged;
  for (const auto& e : r.trace) {
    values.append(e.value);
    points.append(e.point);
    flagged.append(e.flagged);
  }
  py::dict out;
  out["best_point"] = r.best_point;
  out["best_value"] = r.best_value;
  out["values"] = values;
  out["points"] = points;
  out["flagged"] = flagged;
  return out;
}

}  // namespace
}  // namespace viewsim

PYBIND11_MODULE(_core, m) {
  using namespace viewsim;
  m.doc() = "Viewability-threshold control laboratory (native core)";

  static py::exception<Error> base_error(m, "ViewsimError");
  static py::exception<ConfigError> config_error(m, "ConfigError",
                                                 base_error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      config_error(e.what());
    } catch (const Error& e) {
      base_error(e.what());
    }
  });

  m.attr("ALPHA_MEDIAN") = kReferenceAlphaMedian;
  m.attr("ALPHA_MEAN_POSITIVE") = kReferenceAlphaMeanPositive;

  m.def(
      "reward",
      [](double v, double goal, double exponent) {
        return Reward(UnitInterval(v), UnitInterval(goal), exponent);
      },
      py::arg("v"), py::arg("goal"), py::arg("exponent") = 2.0,
      "(1 - |v - goal|)^exponent");
  m.def("safe_logit", &SafeLogit, py::arg("x"), py::arg("eps") = kLogitEps);
  m.def(
      "sigmoid", [](double x) { return Sigmoid(x).value(); }, py::arg("x"));
  m.def(
      "predict_next_viewability",
      [](double v, double phi, double phi_next, double alpha) {
        return PredictNextViewability(UnitInterval(v), UnitInterval(phi),
                                      UnitInterval(phi_next), Params(alpha))
            .value();
      },
      py::arg("v"), py::arg("phi"), py::arg("phi_next"),
      py::arg("alpha") = kReferenceAlphaMedian);
  m.def(
      "alpha_samples",
      [](const std::vector<Observation>& rows) {
        return AlphaSamples(ToObservations(rows));
      },
      py::arg("observations"),
      "Per-record sensitivity estimates from (v, phi, v_next, phi_next).");
  m.def(
      "alpha_median",
      [](const std::vector<double>& s) { return AlphaMedian(s); },
      py::arg("samples"));
  m.def(
      "alpha_mean_positive",
      [](const std::vector<double>& s) { return AlphaMeanPositive(s); },
      py::arg("samples"));
  m.def(
      "greedy_threshold",
      [](double v, double goal, double prev_threshold, double alpha,
         int grid_size, double exponent) {
        return GreedyThreshold(State(v, goal, prev_threshold), Params(alpha),
                               grid_size, exponent)
            .value();
      },
      py::arg("v"), py::arg("goal"), py::arg("prev_threshold"),
      py::arg("alpha") = kReferenceAlphaMedian,
      py::arg("grid_size") = kDefaultGreedyGridSize,
      py::arg("exponent") = 2.0);
  m.def(
      "greedy_sweep_pass_fraction",
      [](double alpha) {
        const auto grid = DefaultSweepGrid();
        return RationalitySweep(MakeGreedyPolicy(Params(alpha)), grid)
            .pass_fraction;
      },
      py::arg("alpha") = kReferenceAlphaMedian);
  m.def("validate_config",
        [](const std::string& text) { ParseRunConfig(text); },
        py::arg("json_text"), "Raises ConfigError on an invalid document.");
  m.def("generate_lld", &GenerateLldFile, py::arg("config_json"),
        py::arg("path"), "Writes synthetic records; returns (count, view_rate).");
  m.def(
      "train_agent",
      [](const std::string& algo, const std::string& transitions,
         const std::string& out, uint64_t seed) {
        AgentConfig config = AgentConfigFor(algo);
        config.seed = seed;
        const auto result = TrainAgent(ReadTransitions(transitions), config);
        WritePolicy(result.policy, out);
        return result.stats.final_critic_loss;
      },
      py::arg("algo"), py::arg("transitions"), py::arg("out"),
      py::arg("seed") = 7);
  m.def(
      "policy_act",
      [](const std::string& path, double v, double goal, double prev_threshold) {
        return ReadPolicy(path).Act(State(v, goal, prev_threshold)).value();
      },
      py::arg("policy"), py::arg("v"), py::arg("goal"),
      py::arg("prev_threshold"));
  m.def(
      "run_experiment",
      [](const std::string& name, const std::string& config_path,
         const std::string& out_dir) {
        RunConfig config = LoadRunConfig(config_path);
        ApplySeedOverride(config);
        RunExperiment(ParseExperiment(name), config, ExperimentOptions{out_dir, {}});
      },
      py::arg("name"), py::arg("config"), py::arg("out_dir"));
  m.def("tune", &TuneCallable, py::arg("objective"), py::arg("dims"),
        py::arg("budget"), py::arg("init_points") = 8, py::arg("seed") = 7,
        py::arg("n_candidates") = 4096,
        "Maximizes objective(point) over dims given as "
        "(name, lo, hi, 'linear'|'log10', integer).");
}
