// Copyright 2026 The QHD Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qhd/agent.hpp"
#include "qhd/envs.hpp"

namespace qhd {

/// Goal detection. kEpisodic compares each episode's reward with the
/// threshold; kTrailingMean compares the mean of the last `window` rewards
/// and only fires once `window` episodes exist.
struct GoalSpec {
  enum class Mode { kEpisodic, kTrailingMean };

  Mode mode = Mode::kEpisodic;
  double threshold = 200.0;
  std::size_t window = 1;
  bool strict = true;  ///< '>' when true, '>=' otherwise

  bool met(double value) const { return strict ? value > threshold : value >= threshold; }
};

struct SweepAxes {
  std::vector<std::size_t> batch;
  std::vector<std::size_t> memory;

  bool empty() const noexcept { return batch.empty() && memory.empty(); }
};

struct ExperimentSpec {
  std::string env = "cartpole";
  EnvOptions env_options;
  AgentConfig agent;
  std::size_t trials = 10;
  std::size_t episodes = 200;
  std::uint64_t seed = 0;
  GoalSpec goal;
  std::size_t report_window = 50;  ///< trailing-mean window written to the CSV
  SweepAxes sweep;
  std::string out = "results";
  std::size_t jobs = 1;            ///< concurrent trials
  bool record_wall_time = false;   ///< fill the wall_ms column of episodes.csv

  /// Documented defaults for "cartpole", "acrobot" and "chain".
  static ExperimentSpec defaults_for(const std::string& env);

  /// Every invalid field, one message each.
  std::vector<std::string> validate() const;

  nlohmann::json to_json() const;
  /// Overlays the fields present in j on `base`. Unknown keys and type errors
  /// are collected and reported together as one ConfigError.
  static ExperimentSpec from_json(const nlohmann::json& j, const ExperimentSpec& base);
  /// Starts from defaults_for(j["env"]) (cartpole when absent).
  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct EpisodeRecord {
  std::size_t trial = 0;
  std::size_t episode = 0;
  double reward = 0.0;
  std::size_t steps = 0;
  double epsilon = 0.0;
  double trailing_mean = 0.0;
  double wall_ms = 0.0;  ///< cumulative agent compute time in the trial
  double env_ms = 0.0;   ///< cumulative environment time in the trial
  bool goal = false;
};

struct TrialSummary {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::size_t episodes_run = 0;
  std::optional<std::size_t> goal_episode;  ///< first episode meeting the goal
  std::optional<double> goal_wall_ms;
  double final_trailing_mean = 0.0;         ///< report_window mean at the last episode
  double final_goal_mean = 0.0;             ///< goal-window mean at the last episode
  double agent_ms = 0.0;
  double env_ms = 0.0;
  std::size_t total_steps = 0;
  nlohmann::json basis;  ///< encoder parameters (PositionBasis::to_json)
};

struct AggregateSummary {
  std::size_t trials = 0;
  std::size_t failed = 0;
  std::size_t reached_goal = 0;
  std::optional<double> mean_goal_episode;
  std::optional<double> mean_goal_wall_ms;
  double mean_final_trailing = 0.0;
  double mean_final_goal_mean = 0.0;
  double mean_agent_ms = 0.0;
};

struct ResultsBundle {
  ExperimentSpec spec;
  std::vector<EpisodeRecord> records;
  std::vector<TrialSummary> trials;
  AggregateSummary aggregate;
};

using ProgressFn = std::function<void(const EpisodeRecord&)>;

/// Runs spec.trials independent trials with seeds seed, seed+1, ... A trial
/// whose learner diverges is marked failed; the remaining trials still run.
ResultsBundle run_experiment(const ExperimentSpec& spec, const ProgressFn& progress = {});

struct SweepCell {
  std::size_t batch = 0;
  std::size_t memory = 0;
  bool online = false;     ///< memory == batch
  bool realtime = false;   ///< memory == batch == 1
  ResultsBundle results;
};

struct SweepResult {
  ExperimentSpec spec;
  std::vector<SweepCell> cells;  ///< batch-major Cartesian product
};

/// One run_experiment per (batch, memory) pair; an axis that is absent uses
/// the spec's own agent value.
SweepResult run_sweep(const ExperimentSpec& spec, const ProgressFn& progress = {});

/// Creates `dir` and proves it writable. IoError otherwise.
void prepare_output_dir(const std::filesystem::path& dir);

/// episodes.csv, timing.csv, summary.json and config.json.
void emit_outputs(const ResultsBundle& results, const std::filesystem::path& dir);
/// One sub-directory per cell plus sweep.json.
void emit_sweep_outputs(const SweepResult& sweep, const std::filesystem::path& dir);

std::string episodes_csv(const std::vector<EpisodeRecord>& records, bool with_wall_time);
nlohmann::json summary_json(const ResultsBundle& results);

/// Library version string.
const char* version();

}  // namespace qhd
