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

#include "viewsim/experiments.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "viewsim/csv_util.h"
#include "viewsim/env_model.h"
#include "viewsim/errors.h"

namespace viewsim {

namespace fs = std::filesystem;

namespace {

using nlohmann::json;

constexpr const char* kFailedMarker = "FAILED";
constexpr double kGoalBand = 0.05;

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void WriteJson(const fs::path& path, const json& j) {
  auto out = OpenOut(path);
  out << j.dump(2) << '\n';
}

double Median(std::vector<double> v) {
  if (v.empty()) throw InsufficientDataError("median of an empty set");
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json OptionalNumber(const std::optional<int>& x) {
  return x ? json(*x) : json(nullptr);
}

std::string SeedKey(uint64_t seed) { return std::to_string(seed); }

const EpisodeReport& FindArm(std::span<const ArmEpisode> arms,
                             const std::string& arm, uint64_t seed) {
  for (const auto& a : arms) {
    if (a.arm == arm && a.seed == seed) return a.episode;
  }
  throw Error("missing arm '" + arm + "' for seed " + SeedKey(seed));
}

AgentConfig SeededAgent(const RunConfig& config, const std::string& name,
                        uint64_t seed) {
  AgentConfig agent = config.AgentNamed(name);
  agent.seed = seed;
  return agent;
}

// Sum of rewards over the first `count` intervals.
double PrefixReward(const EpisodeReport& e, size_t count) {
  double sum = 0.0;
  for (size_t i = 0; i < std::min(count, e.intervals.size()); ++i) {
    sum += e.intervals[i].reward;
  }
  return sum;
}

json CompareAlgosSummary(const ComparisonResult& r, const PreparedData& data,
                         const RunConfig& config) {
  json j;
  j["experiment"] = "compare-algos";
  j["seeds"] = config.seeds;
  j["mean_final_reward"] = r.mean_final_reward;
  j["random_mean_final_reward"] = r.random_mean_final_reward;
  j["predictors"] = {{"eval_auc", data.metrics.eval_auc},
                     {"bid_rmse_micros", data.metrics.bid_rmse_micros}};
  std::string best;
  for (const auto& [name, value] : r.mean_final_reward) {
    if (best.empty() || value > r.mean_final_reward.at(best)) best = name;
  }
  j["best_algo"] = best;
  return j;
}

json BaselinesSummary(const BaselinesResult& r, const RunConfig& config) {
  json j;
  j["experiment"] = "baselines";
  j["seeds"] = config.seeds;
  j["alpha_median_reference"] = kReferenceAlphaMedian;
  j["alpha_mean_reference"] = kReferenceAlphaMeanPositive;
  for (uint64_t seed : config.seeds) {
    const std::string key = SeedKey(seed);
    const auto& med = FindArm(r.arms, kArmGreedyMedian, seed);
    const auto& mean = FindArm(r.arms, kArmGreedyMean, seed);
    const auto& td3 = FindArm(r.arms, kArmTd3, seed);
    const auto cm = CumulativeReward(med);
    const auto cn = CumulativeReward(mean);
    const auto ct = CumulativeReward(td3);
    bool median_ahead = true;
    for (size_t t = 1; t < cm.size(); ++t) median_ahead &= cm[t] > cn[t];
    const size_t quarter = std::max<size_t>(1, cm.size() / 4);
    const double td3_q = PrefixReward(td3, quarter);
    const bool early = td3_q > PrefixReward(med, quarter) &&
                       td3_q > PrefixReward(mean, quarter);
    std::optional<int> crossover;
    for (size_t t = quarter; t < ct.size(); ++t) {
      if (ct[t] < std::max(cm[t], cn[t])) {
        crossover = static_cast<int>(t);
        break;
      }
    }
    j["cumulative_reward"][kArmGreedyMedian][key] = cm.back();
    j["cumulative_reward"][kArmGreedyMean][key] = cn.back();
    j["cumulative_reward"][kArmTd3][key] = ct.back();
    j["median_ahead_every_interval"][key] = median_ahead;
    j["td3_first_quarter_advantage"][key] = early;
    j["td3_crossover_interval"][key] = OptionalNumber(crossover);
    if (r.realized_alpha_median.count(seed)) {
      j["realized_alpha_median"][key] = r.realized_alpha_median.at(seed);
    }
    if (r.realized_alpha_mean_positive.count(seed)) {
      j["realized_alpha_mean_positive"][key] =
          r.realized_alpha_mean_positive.at(seed);
    }
  }
  return j;
}

json RlVsPidSummary(const RlVsPidResult& r, const RunConfig& config) {
  json j;
  j["experiment"] = "rl-vs-pid";
  j["seeds"] = config.seeds;
  j["goal_band"] = kGoalBand;
  json schedule = json::array();
  for (const auto& c : config.sim.long_run_schedule) {
    schedule.push_back({{"interval", c.interval}, {"goal", c.goal.value()}});
  }
  j["schedule"] = schedule;
  j["initial_goal"] = config.sim.config.goal.value();
  for (uint64_t seed : config.seeds) {
    const std::string key = SeedKey(seed);
    const auto td3 = FirstGoalEntry(FindArm(r.arms, kArmTd3, seed), kGoalBand);
    const auto pid = FirstGoalEntry(FindArm(r.arms, kArmPid, seed), kGoalBand);
    j["first_goal_entry"][kArmTd3][key] = OptionalNumber(td3);
    j["first_goal_entry"][kArmPid][key] = OptionalNumber(pid);
    if (td3 && pid) {
      j["entry_ratio_td3_over_pid"][key] =
          static_cast<double>(*td3) / static_cast<double>(*pid);
    } else {
      j["entry_ratio_td3_over_pid"][key] = nullptr;
    }
    const int last_change = config.sim.long_run_schedule.empty()
                                ? 0
                                : config.sim.long_run_schedule.back().interval;
    for (const char* arm : {kArmTd3, kArmPid}) {
      const auto& e = FindArm(r.arms, arm, seed);
      double gap = 0.0;
      int count = 0;
      for (const auto& iv : e.intervals) {
        if (iv.index < last_change) continue;
        gap += std::abs(iv.measured_viewability - iv.goal);
        ++count;
      }
      j["mean_goal_gap_after_last_change"][arm][key] =
          count ? gap / count : 0.0;
    }
  }
  return j;
}

json SanitySummary(const SanityResult& r, const std::string& subject) {
  json j;
  j["experiment"] = "sanity";
  j["subject"] = subject;
  for (size_t i = 0; i < r.goals.size(); ++i) {
    const std::string key = csv::FormatDouble(r.goals[i]);
    j["goal_reaching"][key] = {{"reached", r.reach[i].reached},
                               {"steps", r.reach[i].steps}};
    j["stable_at_goal"][key] = static_cast<bool>(r.stable[i]);
  }
  j["sweep_pass_fraction"] = r.sweep.pass_fraction;
  j["sweep_rational"] = r.sweep.pass_fraction >= 0.95;
  return j;
}

json PointJson(const ParamSpace& space, const ParamPoint& point) {
  json j = json::object();
  for (size_t i = 0; i < space.size() && i < point.size(); ++i) {
    j[space.dims[i].name] = point[i];
  }
  return j;
}

json TuneSummary(const TuneExperimentResult& r, const RunConfig& config) {
  const ParamSpace& space = config.bayesopt.space;
  json j;
  j["experiment"] = "tune";
  j["budget"] = config.bayesopt.tune.budget;
  j["init_points"] = config.bayesopt.tune.init_points;
  j["evaluations"] = r.tuned.trace.size();
  j["new_evaluations"] = r.tuned.new_evaluations;
  j["best_value"] = r.tuned.best_value;
  j["best_point"] = PointJson(space, r.tuned.best_point);
  int flagged = 0;
  for (const auto& e : r.tuned.trace) flagged += e.flagged ? 1 : 0;
  j["flagged"] = flagged;
  j["random_search"] = {{"budget", r.random_search.trace.size()},
                        {"best_value", r.random_search.best_value},
                        {"median_value", r.random_median}};
  return j;
}

// Minimal CSV table for the plot converter.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t Column(const std::string& name, const std::string& file) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw FormatError("'" + file + "' has no column '" + name + "'");
    }
    return static_cast<size_t>(it - header.begin());
  }
};

Table ReadTable(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path.string() + "' is empty");
  for (auto f : csv::SplitLine(line)) t.header.emplace_back(f);
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::vector<std::string> row;
    for (auto f : csv::SplitRow(line, t.header.size(), line_number)) {
      row.emplace_back(f);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string SafeName(std::string s) {
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      c = '_';
    }
  }
  return s;
}

void WriteSeries(const fs::path& path, const std::string& columns,
                 const std::vector<std::vector<double>>& rows,
                 std::vector<std::string>& written) {
  auto out = OpenOut(path);
  out << "# " << columns << '\n';
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << (i ? " " : "") << csv::FormatDouble(row[i]);
    }
    out << '\n';
  }
  written.push_back(path.string());
}

void PlotRewards(const fs::path& file, const fs::path& out_dir,
                 std::vector<std::string>& written) {
  const Table t = ReadTable(file);
  const std::string name = file.string();
  const size_t ca = t.Column("algo", name), ci = t.Column("interval", name),
               cr = t.Column("reward", name);
  // algo -> interval -> (sum, count)
  std::map<std::string, std::map<int64_t, std::pair<double, int>>> acc;
  int line = 1;
  for (const auto& row : t.rows) {
    ++line;
    auto& cell = acc[row[ca]][csv::ParseInt(row[ci], "interval", line)];
    cell.first += csv::ParseDouble(row[cr], "reward", line);
    ++cell.second;
  }
  for (const auto& [algo, series] : acc) {
    std::vector<std::vector<double>> rows;
    for (const auto& [interval, sc] : series) {
      rows.push_back({static_cast<double>(interval), sc.first / sc.second});
    }
    WriteSeries(out_dir / ("reward_" + SafeName(algo) + ".dat"),
                "interval mean_reward", rows, written);
  }
}

void PlotTimeline(const fs::path& file, const fs::path& out_dir,
                  std::vector<std::string>& written) {
  const Table t = ReadTable(file);
  const std::string name = file.string();
  const size_t ca = t.Column("algo", name), cs = t.Column("seed", name),
               ci = t.Column("interval", name), cg = t.Column("goal", name),
               ct = t.Column("threshold", name),
               cv = t.Column("viewability", name);
  std::map<std::pair<std::string, std::string>, std::vector<std::vector<double>>>
      curves;
  int line = 1;
  for (const auto& row : t.rows) {
    ++line;
    curves[{row[ca], row[cs]}].push_back(
        {static_cast<double>(csv::ParseInt(row[ci], "interval", line)),
         csv::ParseDouble(row[cg], "goal", line),
         csv::ParseDouble(row[ct], "threshold", line),
         csv::ParseDouble(row[cv], "viewability", line)});
  }
  for (const auto& [key, rows] : curves) {
    WriteSeries(out_dir / ("timeline_" + SafeName(key.first) + "_seed" +
                           SafeName(key.second) + ".dat"),
                "interval goal threshold viewability", rows, written);
  }
}

void PlotTrace(const fs::path& file, const fs::path& out_path,
               std::vector<std::string>& written) {
  const Table t = ReadTable(file);
  const std::string name = file.string();
  const size_t ci = t.Column("eval_index", name), cr = t.Column("reward", name);
  std::vector<std::vector<double>> rows;
  double best = -std::numeric_limits<double>::infinity();
  int line = 1;
  for (const auto& row : t.rows) {
    ++line;
    const double r = csv::ParseDouble(row[cr], "reward", line);
    best = std::max(best, r);
    rows.push_back(
        {static_cast<double>(csv::ParseInt(row[ci], "eval_index", line)), r,
         best});
  }
  WriteSeries(out_path, "eval_index reward best_so_far", rows, written);
}

}  // namespace

PredictorMetrics EvaluatePredictors(std::span<const ImpressionRecord> eval,
                                    const LinearModel& view_model,
                                    const LinearModel& bid_model) {
  if (eval.empty()) throw InsufficientDataError("no eval records");
  std::vector<double> scores;
  auto labels = std::make_unique<bool[]>(eval.size());
  double sq = 0.0;
  for (size_t i = 0; i < eval.size(); ++i) {
    const auto& r = eval[i];
    scores.push_back(PredictViewProbability(view_model, r));
    labels[i] = r.viewed;
    const double err = bid_model.Dot(EncodeFeatures(r)) -
                       static_cast<double>(r.cost_micros);
    sq += err * err;
  }
  PredictorMetrics m;
  m.eval_auc = RocAuc(scores, std::span<const bool>(labels.get(), eval.size()));
  m.bid_rmse_micros = std::sqrt(sq / static_cast<double>(eval.size()));
  return m;
}

PreparedData PrepareData(std::vector<ImpressionRecord> records,
                         const PredictorSettings& settings) {
  auto split = SplitTrainEval(std::move(records), settings.train_fraction);
  PreparedData data;
  data.train = std::move(split.train);
  data.eval = std::move(split.eval);
  data.view_model = TrainLogistic(data.train, settings.view);
  data.bid_model = TrainBidModel(data.train, settings.bid);
  data.metrics = EvaluatePredictors(data.eval, data.view_model, data.bid_model);
  return data;
}

PreparedData PrepareData(const RunConfig& config) {
  return PrepareData(GenerateLld(config.generator), config.predictors);
}

SimConfig RolloutSimConfig(const SimConfig& base, uint64_t seed) {
  SimConfig c = base;
  c.seed = DeriveSeed(seed, 0);
  return c;
}

SimConfig EvalSimConfig(const SimConfig& base, uint64_t seed) {
  SimConfig c = base;
  c.seed = DeriveSeed(seed, 1);
  return c;
}

std::vector<TransitionSample> TrainRollouts(const PreparedData& data,
                                            const SimSettings& sim,
                                            uint64_t seed) {
  const ReplayMarket market(data.train, data.view_model, data.bid_model);
  return CollectRandomRollouts(market, RolloutSimConfig(sim.config, seed),
                               sim.rollout_episodes);
}

std::vector<double> RolloutAlphaSamples(
    std::span<const TransitionSample> rollouts, int intervals_per_episode) {
  if (intervals_per_episode < 1) {
    throw InvalidArgumentError("intervals_per_episode must be >= 1");
  }
  std::vector<ControlObservation> history;
  for (size_t i = 0; i < rollouts.size(); ++i) {
    if (i % static_cast<size_t>(intervals_per_episode) == 0) continue;
    const auto& t = rollouts[i];
    history.push_back(ControlObservation{t.state.viewability,
                                         t.state.prev_threshold,
                                         t.next_state.viewability, t.action});
  }
  return AlphaSamples(history);
}

ComparisonResult RunCompareAlgos(const PreparedData& data,
                                 const RunConfig& config) {
  ComparisonSetup setup;
  setup.train = data.train;
  setup.eval = data.eval;
  setup.view_model = &data.view_model;
  setup.bid_model = &data.bid_model;
  setup.sim = config.sim.config;
  setup.rollout_episodes = config.sim.rollout_episodes;
  setup.random_episodes = config.sim.random_episodes;
  return CompareAlgorithms(setup, config.agents, config.seeds);
}

BaselinesResult RunBaselines(const PreparedData& data, const RunConfig& config) {
  const ReplayMarket train_market(data.train, data.view_model, data.bid_model);
  const ReplayMarket eval_market(data.eval, data.view_model, data.bid_model);
  const double exponent = config.sim.config.reward_exponent;
  BaselinesResult result;
  for (uint64_t seed : config.seeds) {
    const auto rollouts =
        CollectRandomRollouts(train_market, RolloutSimConfig(config.sim.config, seed),
                              config.sim.rollout_episodes);
    const auto samples =
        RolloutAlphaSamples(rollouts, config.sim.config.intervals_per_day);
    if (!samples.empty()) {
      result.realized_alpha_median[seed] = AlphaMedian(samples);
      if (std::any_of(samples.begin(), samples.end(),
                      [](double a) { return a > 0.0; })) {
        result.realized_alpha_mean_positive[seed] = AlphaMeanPositive(samples);
      }
    }
    const SimConfig eval = EvalSimConfig(config.sim.config, seed);
    const auto greedy = [&](double alpha) {
      EnvModelParams params;
      params.alpha = alpha;
      return MakeGreedyPolicy(params, kDefaultGreedyGridSize, exponent);
    };
    result.arms.push_back(
        {kArmGreedyMedian, seed,
         RunEpisode(greedy(kReferenceAlphaMedian), eval_market, eval)});
    result.arms.push_back(
        {kArmGreedyMean, seed,
         RunEpisode(greedy(kReferenceAlphaMeanPositive), eval_market, eval)});
    const auto td3 = Td3Train(rollouts, SeededAgent(config, "td3", seed));
    result.arms.push_back(
        {kArmTd3, seed, RunEpisode(td3.policy.AsPolicy(), eval_market, eval)});
  }
  return result;
}

std::vector<double> CumulativeReward(const EpisodeReport& episode) {
  std::vector<double> out;
  double sum = 0.0;
  for (const auto& iv : episode.intervals) {
    sum += iv.reward;
    out.push_back(sum);
  }
  return out;
}

std::optional<int> FirstGoalEntry(const EpisodeReport& episode, double band) {
  for (size_t i = 0; i < episode.intervals.size(); ++i) {
    const auto& iv = episode.intervals[i];
    if (iv.wins > 0 && std::abs(iv.measured_viewability - iv.goal) <= band) {
      return static_cast<int>(i) + 1;
    }
  }
  return std::nullopt;
}

SimConfig LongRunSimConfig(const SimSettings& sim, uint64_t seed) {
  SimConfig c = EvalSimConfig(sim.config, seed);
  c.n_per_day = sim.config.n_per_day * sim.long_run_intervals /
                sim.config.intervals_per_day;
  c.intervals_per_day = sim.long_run_intervals;
  c.goal_schedule = sim.long_run_schedule;
  return c;
}

RlVsPidResult RunRlVsPid(const PreparedData& data, const RunConfig& config) {
  const ReplayMarket train_market(data.train, data.view_model, data.bid_model);
  const ReplayMarket eval_market(data.eval, data.view_model, data.bid_model);
  RlVsPidResult result;
  for (uint64_t seed : config.seeds) {
    const auto rollouts =
        CollectRandomRollouts(train_market, RolloutSimConfig(config.sim.config, seed),
                              config.sim.rollout_episodes);
    const SimConfig run = LongRunSimConfig(config.sim, seed);
    const auto td3 = Td3Train(rollouts, SeededAgent(config, "td3", seed));
    result.arms.push_back(
        {kArmTd3, seed, RunEpisode(td3.policy.AsPolicy(), eval_market, run)});
    result.arms.push_back(
        {kArmPid, seed, RunEpisode(MakePidPolicy(config.pid), eval_market, run)});
  }
  return result;
}

SanityResult RunSanity(const PolicyFactory& make_policy) {
  SanityResult r;
  r.goals = {UnitInterval(0.6), UnitInterval(0.7), UnitInterval(0.8)};
  for (UnitInterval goal : r.goals) {
    r.reach.push_back(CheckGoalReaching(make_policy(), goal));
    r.stable.push_back(CheckStabilityAtGoal(make_policy(), goal));
  }
  // Every sweep state is judged by a fresh policy so controller memory from
  // one state never leaks into the next.
  const Policy fresh = [make_policy](const CampaignState& s) {
    return make_policy()(s);
  };
  const auto grid = DefaultSweepGrid();
  r.sweep = RationalitySweep(fresh, grid);
  return r;
}

Objective MakeDdpgObjective(const PreparedData& data, const RunConfig& config,
                            std::span<const TransitionSample> rollouts) {
  auto log = std::make_shared<const std::vector<TransitionSample>>(
      rollouts.begin(), rollouts.end());
  auto market = std::make_shared<const ReplayMarket>(data.eval, data.view_model,
                                                     data.bid_model);
  const SimConfig eval = EvalSimConfig(config.sim.config, config.seeds.front());
  const AgentConfig base = config.AgentNamed("ddpg");
  const ParamSpace space = config.bayesopt.space;
  return [log, market, eval, base, space](const ParamPoint& point,
                                          uint64_t seed) {
    AgentConfig agent = base;
    agent.seed = seed;
    for (size_t i = 0; i < space.size(); ++i) {
      const std::string& name = space.dims[i].name;
      const double x = point.at(i);
      if (name == "actor_lr") {
        agent.actor_lr = x;
      } else if (name == "critic_lr") {
        agent.critic_lr = x;
      } else if (name == "epochs") {
        agent.epochs = static_cast<int>(x);
      } else if (name == "minibatch") {
        agent.minibatch = static_cast<int>(x);
      } else if (name == "gamma") {
        agent.gamma = x;
      } else {
        throw InvalidArgumentError("unknown tuning dimension '" + name + "'");
      }
    }
    const auto trained = DdpgTrain(*log, agent);
    return RunEpisode(trained.policy.AsPolicy(), *market, eval).day_reward;
  };
}

TuneExperimentResult RunTune(const PreparedData& data, const RunConfig& config,
                             const std::optional<std::string>& trace_path,
                             const std::optional<std::string>& random_path) {
  const auto rollouts = TrainRollouts(data, config.sim, config.seeds.front());
  const Objective objective = MakeDdpgObjective(data, config, rollouts);
  TuneConfig tune = config.bayesopt.tune;
  tune.trace_path = trace_path;
  TuneExperimentResult r;
  r.tuned = Tune(objective, config.bayesopt.space, tune);
  TuneConfig random = config.bayesopt.tune;
  random.budget = config.bayesopt.random_search_budget;
  random.init_points = std::min(random.init_points, random.budget);
  random.trace_path = random_path;
  r.random_search = RandomSearch(objective, config.bayesopt.space, random);
  std::vector<double> values;
  for (const auto& e : r.random_search.trace) values.push_back(e.value);
  r.random_median = Median(values);
  return r;
}

const char* ExperimentName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCompareAlgos:
      return "compare-algos";
    case ExperimentKind::kBaselines:
      return "baselines";
    case ExperimentKind::kRlVsPid:
      return "rl-vs-pid";
    case ExperimentKind::kSanity:
      return "sanity";
    case ExperimentKind::kTune:
      return "tune";
  }
  return "tune";
}

ExperimentKind ParseExperiment(const std::string& name) {
  for (auto kind : {ExperimentKind::kCompareAlgos, ExperimentKind::kBaselines,
                    ExperimentKind::kRlVsPid, ExperimentKind::kSanity,
                    ExperimentKind::kTune}) {
    if (name == ExperimentName(kind)) return kind;
  }
  throw InvalidArgumentError("unknown experiment '" + name + "'");
}

void WriteArmRewards(std::span<const ArmEpisode> arms, std::ostream& out) {
  out << "algo,seed,interval,reward\n";
  for (const auto& a : arms) {
    for (const auto& iv : a.episode.intervals) {
      out << a.arm << ',' << a.seed << ',' << iv.index << ','
          << csv::FormatDouble(iv.reward) << '\n';
    }
  }
}

void WriteTimeline(std::span<const ArmEpisode> arms, std::ostream& out) {
  out << "algo,seed,interval,goal,threshold,viewability,wins,reward\n";
  for (const auto& a : arms) {
    for (const auto& iv : a.episode.intervals) {
      out << a.arm << ',' << a.seed << ',' << iv.index << ','
          << csv::FormatDouble(iv.goal) << ','
          << csv::FormatDouble(iv.threshold) << ','
          << csv::FormatDouble(iv.measured_viewability) << ',' << iv.wins
          << ',' << csv::FormatDouble(iv.reward) << '\n';
    }
  }
}

void RunExperiment(ExperimentKind kind, const RunConfig& config,
                   const ExperimentOptions& options) {
  const fs::path dir(options.out_dir);
  fs::create_directories(dir);
  fs::remove(dir / kFailedMarker);
  try {
    switch (kind) {
      case ExperimentKind::kCompareAlgos: {
        const PreparedData data = PrepareData(config);
        const auto result = RunCompareAlgos(data, config);
        {
          auto out = OpenOut(dir / "rewards.csv");
          WriteComparison(result, out);
        }
        {
          auto out = OpenOut(dir / "comparison_table.csv");
          out << "algo,mean_final_reward,margin_over_random\n";
          for (const auto& [name, value] : result.mean_final_reward) {
            out << name << ',' << csv::FormatDouble(value) << ','
                << csv::FormatDouble(value - result.random_mean_final_reward)
                << '\n';
          }
          out << "random," << csv::FormatDouble(result.random_mean_final_reward)
              << ",0\n";
        }
        WriteJson(dir / "summary.json",
                  CompareAlgosSummary(result, data, config));
        break;
      }
      case ExperimentKind::kBaselines: {
        const PreparedData data = PrepareData(config);
        const auto result = RunBaselines(data, config);
        {
          auto out = OpenOut(dir / "rewards.csv");
          WriteArmRewards(result.arms, out);
        }
        {
          auto out = OpenOut(dir / "viewability_timeline.csv");
          WriteTimeline(result.arms, out);
        }
        WriteJson(dir / "summary.json", BaselinesSummary(result, config));
        break;
      }
      case ExperimentKind::kRlVsPid: {
        const PreparedData data = PrepareData(config);
        const auto result = RunRlVsPid(data, config);
        {
          auto out = OpenOut(dir / "rewards.csv");
          WriteArmRewards(result.arms, out);
        }
        {
          auto out = OpenOut(dir / "viewability_timeline.csv");
          WriteTimeline(result.arms, out);
        }
        WriteJson(dir / "summary.json", RlVsPidSummary(result, config));
        break;
      }
      case ExperimentKind::kSanity: {
        std::string subject;
        PolicyFactory factory;
        if (options.policy_path) {
          const auto policy =
              std::make_shared<const TrainedPolicy>(ReadPolicy(*options.policy_path));
          // Identified by content, not location, so reruns match byte for byte.
          subject = std::string(AlgoName(policy->algo())) + " policy " +
                    policy->config_digest();
          factory = [policy] { return policy->AsPolicy(); };
        } else {
          const PreparedData data = PrepareData(config);
          const uint64_t seed = config.seeds.front();
          const auto rollouts = TrainRollouts(data, config.sim, seed);
          const auto policy = std::make_shared<const TrainedPolicy>(
              Td3Train(rollouts, SeededAgent(config, "td3", seed)).policy);
          subject = "td3 trained with seed " + SeedKey(seed);
          factory = [policy] { return policy->AsPolicy(); };
        }
        const auto result = RunSanity(factory);
        {
          auto out = OpenOut(dir / "sanity_report.csv");
          WriteSweepReport(result.sweep, out);
        }
        WriteJson(dir / "summary.json", SanitySummary(result, subject));
        break;
      }
      case ExperimentKind::kTune: {
        const PreparedData data = PrepareData(config);
        const auto result =
            RunTune(data, config, (dir / "tune_trace.csv").string(),
                    (dir / "random_trace.csv").string());
        WriteJson(dir / "summary.json", TuneSummary(result, config));
        break;
      }
    }
  } catch (const std::exception& e) {
    std::ofstream marker(dir / kFailedMarker, std::ios::binary | std::ios::trunc);
    marker << ExperimentName(kind) << ": " << e.what() << '\n';
    throw;
  }
}

std::vector<std::string> WritePlotData(const std::string& in_dir,
                                       const std::string& out_dir) {
  const fs::path in(in_dir);
  if (!fs::is_directory(in)) {
    throw InvalidArgumentError("input directory '" + in_dir + "' not found");
  }
  const fs::path out(out_dir);
  fs::create_directories(out);
  std::vector<std::string> written;
  if (fs::exists(in / "rewards.csv")) PlotRewards(in / "rewards.csv", out, written);
  if (fs::exists(in / "viewability_timeline.csv")) {
    PlotTimeline(in / "viewability_timeline.csv", out, written);
  }
  if (fs::exists(in / "tune_trace.csv")) {
    PlotTrace(in / "tune_trace.csv", out / "tune_best_so_far.dat", written);
  }
  if (fs::exists(in / "random_trace.csv")) {
    PlotTrace(in / "random_trace.csv", out / "random_best_so_far.dat", written);
  }
  if (written.empty()) {
    throw Error("no plottable outputs (rewards.csv, viewability_timeline.csv, "
                "tune_trace.csv) in '" + in_dir + "'");
  }
  return written;
}

}  // namespace viewsim
