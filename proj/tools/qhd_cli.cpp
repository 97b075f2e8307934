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

// Experiment command line: run, sweep, rollout, oracle.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qhd/envs.hpp"
#include "qhd/errors.hpp"
#include "qhd/oracle.hpp"
#include "qhd/runner.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct CommonOptions {
  std::string env;
  std::string config;
  std::optional<std::size_t> dim, batch, episodes, trials, jobs;
  std::optional<std::string> memory;
  std::optional<std::uint64_t> seed;
  std::optional<double> beta, gamma;
  std::optional<std::string> out;
  bool record_wall_time = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--env", o.env, "cartpole | acrobot | chain")
      ->check(CLI::IsMember({"cartpole", "acrobot", "chain"}));
  cmd->add_option("--config", o.config, "experiment JSON file")->check(CLI::ExistingFile);
  cmd->add_option("--dim", o.dim, "hypervector dimension D");
  cmd->add_option("--batch", o.batch, "replay batch size");
  cmd->add_option("--memory", o.memory, "replay capacity, or 'unlimited'");
  cmd->add_option("--episodes", o.episodes, "episodes per trial");
  cmd->add_option("--trials", o.trials, "independent seeded trials");
  cmd->add_option("--seed", o.seed, "base seed (trial t uses seed + t)");
  cmd->add_option("--beta", o.beta, "regression learning rate");
  cmd->add_option("--gamma", o.gamma, "reward decay");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "trials run concurrently");
  cmd->add_flag("--record-wall-time", o.record_wall_time, "write wall_ms into episodes.csv");
  cmd->add_flag("--quiet", o.quiet, "no per-episode progress");
}

json parse_memory(const std::string& text) {
  if (text == "unlimited") return "unlimited";
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos == text.size() && v >= 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  return text;  // rejected by validation with a clear message
}

json load_config(const CommonOptions& o) {
  json j = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw qhd::IoError("cannot read " + o.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw qhd::ConfigError(o.config + ": " + e.what());
    }
  }
  if (!o.env.empty()) {
    if (j.contains("env") && j["env"] != o.env) {
      // Switching environment: start from that environment's defaults.
      json agent = j.value("agent", json::object());
      j = json{{"agent", agent}};
    }
    j["env"] = o.env;
  }
  auto& agent = j["agent"];
  if (!agent.is_object()) agent = json::object();
  if (o.dim) agent["dim"] = *o.dim;
  if (o.batch) agent["batch"] = *o.batch;
  if (o.memory) agent["memory"] = parse_memory(*o.memory);
  if (o.beta) agent["beta"] = *o.beta;
  if (o.gamma) agent["gamma"] = *o.gamma;
  if (o.episodes) j["episodes"] = *o.episodes;
  if (o.trials) j["trials"] = *o.trials;
  if (o.seed) j["seed"] = *o.seed;
  if (o.out) j["out"] = *o.out;
  if (o.jobs) j["jobs"] = *o.jobs;
  if (o.record_wall_time) j["record_wall_time"] = true;
  return j;
}

qhd::ProgressFn progress_printer(bool quiet) {
  if (quiet) return {};
  return [](const qhd::EpisodeRecord& r) {
    std::fprintf(stderr, "trial %zu episode %4zu  reward %8.1f  steps %4zu  eps %.3f  mean %8.2f%s\n",
                 r.trial, r.episode, r.reward, r.steps, r.epsilon, r.trailing_mean,
                 r.goal ? "  [goal]" : "");
  };
}

void print_aggregate(const qhd::ResultsBundle& b) {
  const auto& a = b.aggregate;
  std::printf("trials %zu  failed %zu  reached goal %zu", a.trials, a.failed, a.reached_goal);
  if (a.mean_goal_episode) std::printf("  mean goal episode %.1f", *a.mean_goal_episode);
  std::printf("  mean final trailing reward %.2f  mean agent time %.1f ms\n", a.mean_final_trailing,
              a.mean_agent_ms);
}

std::vector<std::size_t> parse_axis(const std::vector<std::string>& items) {
  std::vector<std::size_t> out;
  for (const auto& s : items) {
    const json v = parse_memory(s);
    if (v.is_string() && v == "unlimited") {
      out.push_back(qhd::ReplayBuffer::kUnlimited);
    } else if (v.is_number_unsigned()) {
      out.push_back(v.get<std::size_t>());
    } else {
      throw qhd::ConfigError("invalid axis value '" + s + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional Q-learning experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "train agents and write episodes.csv / summary.json");
  add_common(run, run_opts);

  CommonOptions sweep_opts;
  std::vector<std::string> batch_axis, memory_axis;
  auto* sweep = app.add_subcommand("sweep", "run the Cartesian product of batch and memory axes");
  add_common(sweep, sweep_opts);
  sweep->add_option("--batch-axis", batch_axis, "batch sizes")->delimiter(',');
  sweep->add_option("--memory-axis", memory_axis, "memory capacities")->delimiter(',');

  std::string rollout_env = "cartpole";
  std::size_t rollout_episodes = 200;
  std::uint64_t rollout_seed = 0;
  auto* rollout = app.add_subcommand("rollout", "uniform-random policy baseline");
  rollout->add_option("--env", rollout_env)->check(CLI::IsMember({"cartpole", "acrobot", "chain"}));
  rollout->add_option("--episodes", rollout_episodes);
  rollout->add_option("--seed", rollout_seed);

  std::string mdp_file;
  std::size_t chain_length = 5;
  double chain_gamma = 0.9;
  double tolerance = 1e-10;
  auto* oracle = app.add_subcommand("oracle", "value iteration on a tabular MDP");
  oracle->add_option("--mdp", mdp_file, "MDP JSON file (default: the chain MDP)")
      ->check(CLI::ExistingFile);
  oracle->add_option("--chain", chain_length, "chain length when no file is given");
  oracle->add_option("--gamma", chain_gamma, "chain discount when no file is given");
  oracle->add_option("--tolerance", tolerance);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto spec = qhd::ExperimentSpec::from_json(load_config(run_opts));
      qhd::prepare_output_dir(spec.out);
      const auto results = qhd::run_experiment(spec, progress_printer(run_opts.quiet));
      qhd::emit_outputs(results, spec.out);
      print_aggregate(results);
    } else if (*sweep) {
      json j = load_config(sweep_opts);
      if (!batch_axis.empty()) j["sweep"]["batch"] = parse_axis(batch_axis);
      if (!memory_axis.empty()) {
        json m = json::array();
        for (std::size_t v : parse_axis(memory_axis)) {
          m.push_back(v >= qhd::ReplayBuffer::kUnlimited ? json("unlimited") : json(v));
        }
        j["sweep"]["memory"] = m;
      }
      const auto spec = qhd::ExperimentSpec::from_json(j);
      qhd::prepare_output_dir(spec.out);
      const auto result = qhd::run_sweep(spec, progress_printer(sweep_opts.quiet));
      qhd::emit_sweep_outputs(result, spec.out);
      for (const auto& c : result.cells) {
        std::printf("batch %zu memory %zu%s: ", c.batch, c.memory,
                    c.realtime ? " [real-time]" : c.online ? " [online]" : "");
        print_aggregate(c.results);
      }
    } else if (*rollout) {
      auto env = qhd::make_env(rollout_env);
      const auto stats = qhd::rollout_random(*env, rollout_episodes, rollout_seed);
      std::printf("%s random policy over %zu episodes: mean %.3f  std %.3f\n", rollout_env.c_str(),
                  rollout_episodes, stats.mean, stats.stddev);
    } else if (*oracle) {
      qhd::TabularMdp mdp = qhd::chain_mdp(chain_length, chain_gamma);
      if (!mdp_file.empty()) {
        std::ifstream in(mdp_file);
        if (!in) throw qhd::IoError("cannot read " + mdp_file);
        json j;
        try {
          j = json::parse(in);
        } catch (const json::parse_error& e) {
          throw qhd::ConfigError(mdp_file + ": " + e.what());
        }
        mdp = qhd::TabularMdp::from_json(j);
      }
      const auto q = qhd::value_iteration(mdp, tolerance);
      const auto policy = qhd::greedy_policy(q);
      json out = {{"q", json::array()}, {"policy", policy},
                  {"residual", qhd::bellman_residual(mdp, q)}};
      for (std::size_t s = 0; s < q.n_states; ++s) {
        json row = json::array();
        for (std::size_t a = 0; a < q.n_actions; ++a) row.push_back(q.at(s, a));
        out["q"].push_back(row);
      }
      std::printf("%s\n", out.dump(2).c_str());
    }
  } catch (const qhd::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const qhd::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
