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

#include "qhd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>
#include <type_traits>

#include "qhd/errors.hpp"

#ifndef QHD_VERSION
#define QHD_VERSION "unknown"
#endif

namespace qhd {

const char* version() { return QHD_VERSION; }

namespace {

using nlohmann::json;

// Shortest round-trip representation; stable across runs.
std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a combined word
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E5ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const char* schedule_name(EpsilonSchedule s) {
  return s == EpsilonSchedule::kPerEpisode ? "episode" : "step";
}

json memory_to_json(std::size_t m) {
  return m >= ReplayBuffer::kUnlimited ? json("unlimited") : json(m);
}

// Reads optional keys from a JSON object, collecting every problem instead of
// stopping at the first one.
class FieldReader {
 public:
  FieldReader(const json& j, std::string prefix, std::vector<std::string>& errors)
      : j_(j), prefix_(std::move(prefix)), errors_(errors) {
    if (!j_.is_object()) errors_.push_back(prefix_ + ": expected an object");
  }

  bool has(const char* key) {
    known_.insert(key);
    return j_.is_object() && j_.contains(key);
  }

  const json& at(const char* key) const { return j_.at(key); }

  void error(const char* key, const std::string& msg) { errors_.push_back(prefix_ + key + ": " + msg); }

  template <typename T>
  void read(const char* key, T& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) return error(key, "expected a boolean");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) return error(key, "expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) return error(key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) return error(key, "expected a string");
    }
    try {
      out = v.get<T>();
    } catch (const json::exception& e) {
      error(key, e.what());
    }
  }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items()) {
      if (!known_.count(k)) errors_.push_back("unknown key '" + prefix_ + k + "'");
    }
  }

 private:
  const json& j_;
  std::string prefix_;
  std::vector<std::string>& errors_;
  std::set<std::string> known_;
};

void read_memory(FieldReader& r, const char* key, std::size_t& out) {
  if (!r.has(key)) return;
  const json& v = r.at(key);
  if (v.is_string() && v.get<std::string>() == "unlimited") {
    out = ReplayBuffer::kUnlimited;
  } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    out = v.get<std::size_t>();
  } else {
    r.error(key, "expected a positive integer or \"unlimited\"");
  }
}

void read_agent(const json& j, AgentConfig& a, std::vector<std::string>& errors) {
  FieldReader r(j, "agent.", errors);
  r.read("dim", a.dim);
  r.read("beta", a.beta);
  r.read("gamma", a.gamma);
  r.read("epsilon_start", a.epsilon_start);
  r.read("epsilon_decay", a.epsilon_decay);
  r.read("epsilon_min", a.epsilon_min);
  if (r.has("epsilon_schedule")) {
    const json& v = r.at("epsilon_schedule");
    if (v == "episode") {
      a.epsilon_schedule = EpsilonSchedule::kPerEpisode;
    } else if (v == "step") {
      a.epsilon_schedule = EpsilonSchedule::kPerStep;
    } else {
      r.error("epsilon_schedule", "expected \"episode\" or \"step\"");
    }
  }
  r.read("sync_period", a.sync_period);
  r.read("batch", a.batch);
  read_memory(r, "memory", a.memory);
  if (r.has("short_batch")) {
    const json& v = r.at("short_batch");
    if (v == "use_all") {
      a.short_batch = ShortBatchPolicy::kUseAll;
    } else if (v == "wait_full") {
      a.short_batch = ShortBatchPolicy::kWaitFull;
    } else {
      r.error("short_batch", "expected \"use_all\" or \"wait_full\"");
    }
  }
  r.read("normalize_dot", a.model.normalize_by_dim);
  if (r.has("update_convention")) {
    const json& v = r.at("update_convention");
    if (v == "state") {
      a.model.convention = UpdateConvention::kState;
    } else if (v == "conjugate") {
      a.model.convention = UpdateConvention::kConjugate;
    } else {
      r.error("update_convention", "expected \"state\" or \"conjugate\"");
    }
  }
  if (r.has("phase_distribution")) {
    const json& v = r.at("phase_distribution");
    if (v == "gaussian") {
      a.phase_distribution = PhaseDistribution::Kind::kGaussian;
    } else if (v == "uniform") {
      a.phase_distribution = PhaseDistribution::Kind::kUniform;
    } else {
      r.error("phase_distribution", "expected \"gaussian\" or \"uniform\"");
    }
  }
  r.read("bandwidth", a.bandwidth);
  if (r.has("bandwidths")) {
    const json& v = r.at("bandwidths");
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number(); })) {
      r.error("bandwidths", "expected an array of numbers");
    } else {
      a.bandwidths = v.get<std::vector<double>>();
    }
  }
  r.finish();
}

json agent_to_json(const AgentConfig& a) {
  return {{"dim", a.dim},
          {"beta", a.beta},
          {"gamma", a.gamma},
          {"epsilon_start", a.epsilon_start},
          {"epsilon_decay", a.epsilon_decay},
          {"epsilon_min", a.epsilon_min},
          {"epsilon_schedule", schedule_name(a.epsilon_schedule)},
          {"sync_period", a.sync_period},
          {"batch", a.batch},
          {"memory", memory_to_json(a.memory)},
          {"short_batch", a.short_batch == ShortBatchPolicy::kUseAll ? "use_all" : "wait_full"},
          {"normalize_dot", a.model.normalize_by_dim},
          {"update_convention",
           a.model.convention == UpdateConvention::kState ? "state" : "conjugate"},
          {"phase_distribution",
           a.phase_distribution == PhaseDistribution::Kind::kGaussian ? "gaussian" : "uniform"},
          {"bandwidth", a.bandwidth},
          {"bandwidths", a.bandwidths}};
}

double tail_mean(const std::vector<double>& v, std::size_t window) {
  const std::size_t n = std::min(window, v.size());
  if (n == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = v.size() - n; i < v.size(); ++i) sum += v[i];
  return sum / static_cast<double>(n);
}

struct TrialOutcome {
  std::vector<EpisodeRecord> records;
  TrialSummary summary;
};

TrialOutcome run_trial(const ExperimentSpec& spec, std::size_t trial, const ProgressFn& progress,
                       std::mutex& progress_mutex) {
  TrialOutcome out;
  TrialSummary& s = out.summary;
  s.trial = trial;
  s.seed = spec.seed + trial;

  auto env = make_env(spec.env, spec.env_options);
  AgentConfig cfg = spec.agent;
  cfg.seed = s.seed;
  QhdAgent agent(cfg, env->action_count(), env->observation_scales());
  s.basis = agent.basis().to_json();

  std::vector<double> rewards;
  rewards.reserve(spec.episodes);
  for (std::size_t ep = 1; ep <= spec.episodes; ++ep) {
    EpisodeResult res;
    try {
      res = agent.run_episode(*env, mix_seed(s.seed, ep));
    } catch (const DivergenceError& e) {
      s.failed = true;
      s.error = "episode " + std::to_string(ep) + ": " + e.what();
      break;
    }
    rewards.push_back(res.total_reward);
    s.agent_ms += res.agent_ms;
    s.env_ms += res.env_ms;
    s.total_steps += res.steps;

    EpisodeRecord rec;
    rec.trial = trial;
    rec.episode = ep;
    rec.reward = res.total_reward;
    rec.steps = res.steps;
    rec.epsilon = res.epsilon;
    rec.trailing_mean = tail_mean(rewards, spec.report_window);
    rec.wall_ms = s.agent_ms;
    rec.env_ms = s.env_ms;
    if (spec.goal.mode == GoalSpec::Mode::kEpisodic) {
      rec.goal = spec.goal.met(res.total_reward);
    } else {
      rec.goal = rewards.size() >= spec.goal.window &&
                 spec.goal.met(tail_mean(rewards, spec.goal.window));
    }
    if (rec.goal && !s.goal_episode) {
      s.goal_episode = ep;
      s.goal_wall_ms = s.agent_ms;
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(rec);
    }
    out.records.push_back(rec);
  }
  s.episodes_run = rewards.size();
  s.final_trailing_mean = tail_mean(rewards, spec.report_window);
  s.final_goal_mean = tail_mean(rewards, spec.goal.window);
  return out;
}

AggregateSummary aggregate(const std::vector<TrialSummary>& trials) {
  AggregateSummary a;
  a.trials = trials.size();
  double goal_ep = 0.0, goal_ms = 0.0;
  std::size_t ran = 0;
  for (const auto& t : trials) {
    if (t.failed) ++a.failed;
    if (t.goal_episode) {
      ++a.reached_goal;
      goal_ep += static_cast<double>(*t.goal_episode);
      goal_ms += *t.goal_wall_ms;
    }
    if (t.episodes_run > 0) {
      ++ran;
      a.mean_final_trailing += t.final_trailing_mean;
      a.mean_final_goal_mean += t.final_goal_mean;
      a.mean_agent_ms += t.agent_ms;
    }
  }
  if (a.reached_goal > 0) {
    a.mean_goal_episode = goal_ep / static_cast<double>(a.reached_goal);
    a.mean_goal_wall_ms = goal_ms / static_cast<double>(a.reached_goal);
  }
  if (ran > 0) {
    a.mean_final_trailing /= static_cast<double>(ran);
    a.mean_final_goal_mean /= static_cast<double>(ran);
    a.mean_agent_ms /= static_cast<double>(ran);
  }
  return a;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentSpec

ExperimentSpec ExperimentSpec::defaults_for(const std::string& env) {
  ExperimentSpec s;
  s.env = env;
  if (env == "cartpole") {
    s.episodes = 200;
    s.agent.epsilon_decay = 0.98;
    s.goal = {GoalSpec::Mode::kEpisodic, 200.0, 1, true};
    s.report_window = 50;
  } else if (env == "acrobot") {
    s.episodes = 500;
    s.goal = {GoalSpec::Mode::kTrailingMean, -120.0, 100, false};
    s.report_window = 100;
  } else if (env == "chain") {
    s.episodes = 300;
    s.agent.gamma = 0.9;
    s.goal = {GoalSpec::Mode::kTrailingMean, 1.0, 10, false};
    s.report_window = 10;
  } else {
    throw ConfigError("unknown environment '" + env + "' (expected cartpole, acrobot or chain)");
  }
  return s;
}

std::vector<std::string> ExperimentSpec::validate() const {
  std::vector<std::string> errors;
  if (env != "cartpole" && env != "acrobot" && env != "chain") {
    errors.push_back("env must be one of cartpole, acrobot, chain (got '" + env + "')");
  }
  if (env == "chain" && env_options.chain_length < 2) errors.emplace_back("chain_length must be >= 2");
  if (trials == 0) errors.emplace_back("trials must be >= 1");
  if (goal.window == 0) errors.emplace_back("goal.window must be >= 1");
  if (!std::isfinite(goal.threshold)) errors.emplace_back("goal.threshold must be finite");
  if (report_window == 0) errors.emplace_back("report_window must be >= 1");
  if (jobs == 0) errors.emplace_back("jobs must be >= 1");
  if (out.empty()) errors.emplace_back("out must not be empty");
  for (const auto& e : agent.validate()) errors.push_back("agent." + e);
  for (std::size_t b : sweep.batch) {
    if (b == 0) errors.emplace_back("sweep.batch values must be >= 1");
  }
  for (std::size_t m : sweep.memory) {
    if (m == 0) errors.emplace_back("sweep.memory values must be >= 1");
  }
  return errors;
}

json ExperimentSpec::to_json() const {
  json sweep_j = json::object();
  if (!sweep.batch.empty()) sweep_j["batch"] = sweep.batch;
  if (!sweep.memory.empty()) {
    json m = json::array();
    for (std::size_t v : sweep.memory) m.push_back(memory_to_json(v));
    sweep_j["memory"] = m;
  }
  return {{"env", env},
          {"chain_length", env_options.chain_length},
          {"step_cap", env_options.step_cap},
          {"agent", agent_to_json(agent)},
          {"trials", trials},
          {"episodes", episodes},
          {"seed", seed},
          {"goal",
           {{"mode", goal.mode == GoalSpec::Mode::kEpisodic ? "episodic" : "trailing_mean"},
            {"threshold", goal.threshold},
            {"window", goal.window},
            {"strict", goal.strict}}},
          {"report_window", report_window},
          {"sweep", sweep_j},
          {"out", out},
          {"jobs", jobs},
          {"record_wall_time", record_wall_time}};
}

ExperimentSpec ExperimentSpec::from_json(const json& j, const ExperimentSpec& base) {
  ExperimentSpec s = base;
  std::vector<std::string> errors;
  FieldReader r(j, "", errors);
  r.read("env", s.env);
  r.read("chain_length", s.env_options.chain_length);
  r.read("step_cap", s.env_options.step_cap);
  if (r.has("agent")) read_agent(j.at("agent"), s.agent, errors);
  r.read("trials", s.trials);
  r.read("episodes", s.episodes);
  r.read("seed", s.seed);
  if (r.has("goal")) {
    FieldReader g(j.at("goal"), "goal.", errors);
    if (g.has("mode")) {
      const json& v = g.at("mode");
      if (v == "episodic") {
        s.goal.mode = GoalSpec::Mode::kEpisodic;
      } else if (v == "trailing_mean") {
        s.goal.mode = GoalSpec::Mode::kTrailingMean;
      } else {
        g.error("mode", "expected \"episodic\" or \"trailing_mean\"");
      }
    }
    g.read("threshold", s.goal.threshold);
    g.read("window", s.goal.window);
    g.read("strict", s.goal.strict);
    g.finish();
  }
  r.read("report_window", s.report_window);
  if (r.has("sweep")) {
    FieldReader w(j.at("sweep"), "sweep.", errors);
    w.read("batch", s.sweep.batch);
    if (w.has("memory")) {
      const json& v = w.at("memory");
      if (!v.is_array()) {
        w.error("memory", "expected an array");
      } else {
        s.sweep.memory.clear();
        for (const auto& m : v) {
          if (m.is_string() && m.get<std::string>() == "unlimited") {
            s.sweep.memory.push_back(ReplayBuffer::kUnlimited);
          } else if (m.is_number_integer() && m.get<std::int64_t>() >= 0) {
            s.sweep.memory.push_back(m.get<std::size_t>());
          } else {
            w.error("memory", "entries must be positive integers or \"unlimited\"");
          }
        }
      }
    }
    w.finish();
  }
  r.read("out", s.out);
  r.read("jobs", s.jobs);
  r.read("record_wall_time", s.record_wall_time);
  r.finish();

  for (const auto& e : s.validate()) errors.push_back(e);
  if (!errors.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return s;
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  std::string env = "cartpole";
  if (j.is_object() && j.contains("env") && j.at("env").is_string()) env = j.at("env");
  ExperimentSpec base;
  try {
    base = defaults_for(env);
  } catch (const ConfigError&) {
    base = defaults_for("cartpole");
    base.env = env;  // reported by validate()
  }
  return from_json(j, base);
}

// ---------------------------------------------------------------------------
// Running

ResultsBundle run_experiment(const ExperimentSpec& spec, const ProgressFn& progress) {
  if (const auto errors = spec.validate(); !errors.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  ResultsBundle bundle;
  bundle.spec = spec;
  std::vector<TrialOutcome> outcomes(spec.trials);
  std::mutex progress_mutex;

  const std::size_t workers = std::min(spec.jobs, spec.trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < spec.trials; ++t) {
      outcomes[t] = run_trial(spec, t, progress, progress_mutex);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(spec.trials);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < spec.trials; t = next++) {
          try {
            outcomes[t] = run_trial(spec, t, progress, progress_mutex);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  for (auto& o : outcomes) {
    bundle.records.insert(bundle.records.end(), o.records.begin(), o.records.end());
    bundle.trials.push_back(std::move(o.summary));
  }
  bundle.aggregate = aggregate(bundle.trials);
  return bundle;
}

SweepResult run_sweep(const ExperimentSpec& spec, const ProgressFn& progress) {
  if (const auto errors = spec.validate(); !errors.empty()) {
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  SweepResult result;
  result.spec = spec;
  const std::vector<std::size_t> batches =
      spec.sweep.batch.empty() ? std::vector<std::size_t>{spec.agent.batch} : spec.sweep.batch;
  const std::vector<std::size_t> memories =
      spec.sweep.memory.empty() ? std::vector<std::size_t>{spec.agent.memory} : spec.sweep.memory;
  for (std::size_t b : batches) {
    for (std::size_t m : memories) {
      SweepCell cell;
      cell.batch = b;
      cell.memory = m;
      cell.online = m == b;
      cell.realtime = m == 1 && b == 1;
      ExperimentSpec cs = spec;
      cs.sweep = {};
      cs.agent.batch = b;
      cs.agent.memory = m;
      cell.results = run_experiment(cs, progress);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe, std::ios::trunc);
    if (!out || !(out << "ok")) throw IoError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

std::string episodes_csv(const std::vector<EpisodeRecord>& records, bool with_wall_time) {
  std::string out = "trial,episode,reward,steps,epsilon,trailing_mean,wall_ms,goal\n";
  for (const auto& r : records) {
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.episode);
    out += ',';
    out += format_double(r.reward);
    out += ',';
    out += std::to_string(r.steps);
    out += ',';
    out += format_double(r.epsilon);
    out += ',';
    out += format_double(r.trailing_mean);
    out += ',';
    if (with_wall_time) out += format_double(r.wall_ms);
    out += ',';
    out += r.goal ? '1' : '0';
    out += '\n';
  }
  return out;
}

json summary_json(const ResultsBundle& results) {
  json trials = json::array();
  for (const auto& t : results.trials) {
    trials.push_back({{"trial", t.trial},
                      {"seed", t.seed},
                      {"failed", t.failed},
                      {"error", t.error},
                      {"episodes_run", t.episodes_run},
                      {"goal_episode", t.goal_episode ? json(*t.goal_episode) : json(nullptr)},
                      {"goal_wall_ms", optional_json(t.goal_wall_ms)},
                      {"final_trailing_mean", t.final_trailing_mean},
                      {"final_goal_mean", t.final_goal_mean},
                      {"agent_ms", t.agent_ms},
                      {"env_ms", t.env_ms},
                      {"total_steps", t.total_steps},
                      {"encoder", t.basis}});
  }
  const auto& a = results.aggregate;
  return {{"version", version()},
          {"config", results.spec.to_json()},
          {"trials", trials},
          {"aggregate",
           {{"trials", a.trials},
            {"failed", a.failed},
            {"reached_goal", a.reached_goal},
            {"mean_goal_episode", optional_json(a.mean_goal_episode)},
            {"mean_goal_wall_ms", optional_json(a.mean_goal_wall_ms)},
            {"mean_final_trailing", a.mean_final_trailing},
            {"mean_final_goal_mean", a.mean_final_goal_mean},
            {"mean_agent_ms", a.mean_agent_ms}}}};
}

void emit_outputs(const ResultsBundle& results, const std::filesystem::path& dir) {
  prepare_output_dir(dir);
  write_text(dir / "episodes.csv", episodes_csv(results.records, results.spec.record_wall_time));
  std::string timing = "trial,episode,agent_ms,env_ms\n";
  for (const auto& r : results.records) {
    timing += std::to_string(r.trial) + ',' + std::to_string(r.episode) + ',' +
              format_double(r.wall_ms) + ',' + format_double(r.env_ms) + '\n';
  }
  write_text(dir / "timing.csv", timing);
  write_text(dir / "summary.json", summary_json(results).dump(2) + "\n");
  write_text(dir / "config.json", results.spec.to_json().dump(2) + "\n");
}

void emit_sweep_outputs(const SweepResult& sweep, const std::filesystem::path& dir) {
  prepare_output_dir(dir);
  json cells = json::array();
  for (const auto& c : sweep.cells) {
    const std::string name = "batch" + std::to_string(c.batch) + "_memory" +
                             (c.memory >= ReplayBuffer::kUnlimited ? std::string("unlimited")
                                                                   : std::to_string(c.memory));
    emit_outputs(c.results, dir / name);
    const json agg = summary_json(c.results).at("aggregate");
    cells.push_back({{"batch", c.batch},
                     {"memory", memory_to_json(c.memory)},
                     {"online", c.online},
                     {"realtime", c.realtime},
                     {"dir", name},
                     {"aggregate", agg}});
  }
  const json doc = {{"version", version()}, {"config", sweep.spec.to_json()}, {"cells", cells}};
  write_text(dir / "sweep.json", doc.dump(2) + "\n");
  write_text(dir / "config.json", sweep.spec.to_json().dump(2) + "\n");
}

}  // namespace qhd
