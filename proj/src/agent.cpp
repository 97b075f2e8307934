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

#include "qhd/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "qhd/errors.hpp"

namespace qhd {
namespace {

constexpr std::uint64_t kPolicyStream = 0x706f6cULL;
constexpr std::uint64_t kReplayStream = 0x726570ULL;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string describe(const Transition& t) {
  std::ostringstream os;
  os.precision(17);
  os << "state=[";
  for (double v : t.state) os << v << ' ';
  os << "] action=" << t.action << " reward=" << t.reward << " next=[";
  for (double v : t.next_state) os << v << ' ';
  os << "] terminal=" << t.terminal;
  return os.str();
}

std::string context(const Environment& env, const std::exception& e) {
  return env.name() + " episode, step " + std::to_string(env.steps()) + ": " + e.what();
}

std::vector<double> resolve_bandwidths(const AgentConfig& c, std::size_t features) {
  if (!c.bandwidths.empty()) {
    if (c.bandwidths.size() != features) {
      throw ConfigError("agent: " + std::to_string(c.bandwidths.size()) +
                        " per-feature bandwidths for " + std::to_string(features) + " features");
    }
    return c.bandwidths;
  }
  return std::vector<double>(features, c.bandwidth);
}

}  // namespace

std::vector<std::string> AgentConfig::validate() const {
  std::vector<std::string> errors;
  if (dim == 0) errors.emplace_back("dim must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) errors.emplace_back("beta must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) errors.emplace_back("gamma must lie in [0, 1]");
  if (!(epsilon_decay > 0.0 && epsilon_decay < 1.0)) {
    errors.emplace_back("epsilon_decay must lie in (0, 1)");
  }
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) {
    errors.emplace_back("epsilon_start must lie in [0, 1]");
  }
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon_start)) {
    errors.emplace_back("epsilon_min must lie in [0, epsilon_start]");
  }
  if (sync_period == 0) errors.emplace_back("sync_period must be >= 1");
  if (batch == 0) errors.emplace_back("batch must be >= 1");
  if (memory == 0) errors.emplace_back("memory must be >= 1");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) errors.emplace_back("bandwidth must be > 0");
  for (double b : bandwidths) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      errors.emplace_back("every per-feature bandwidth must be > 0");
      break;
    }
  }
  return errors;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

QhdAgent::QhdAgent(const AgentConfig& config, std::size_t n_actions,
                   std::vector<FeatureScale> scales)
    : config_(config),
      basis_(nullptr),
      q_(config.dim == 0 ? 1 : config.dim, n_actions == 0 ? 1 : n_actions, config.model),
      q_delayed_(q_),
      buffer_(config.memory == 0 ? 1 : config.memory, make_rng(config.seed, kReplayStream),
              config.short_batch),
      epsilon_(config.epsilon_start),
      rng_(make_rng(config.seed, kPolicyStream)) {
  if (const auto errors = config_.validate(); !errors.empty()) {
    std::string msg = "agent config:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw ConfigError(msg);
  }
  if (n_actions == 0) throw ConfigError("agent: need at least one action");
  auto bandwidths = resolve_bandwidths(config_, scales.size());
  basis_ = std::make_shared<const PositionBasis>(config_.dim, std::move(bandwidths),
                                                 std::move(scales), config_.seed,
                                                 config_.phase_distribution);
}

EncodedState QhdAgent::encode(std::span<const double> state) const {
  return qhd::encode(*basis_, state);
}

std::size_t QhdAgent::greedy_action(std::span<const double> state) const {
  const auto q = q_.predict_all(encode(state));
  return argmax(q);
}

std::size_t QhdAgent::select_action(std::span<const double> state) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng_) < epsilon_) {
    std::uniform_int_distribution<std::size_t> pick(0, q_.n_actions() - 1);
    return pick(rng_);
  }
  return greedy_action(state);
}

double QhdAgent::bellman_target(const Transition& t) const {
  if (t.terminal) return t.reward;
  const auto next_q = q_delayed_.predict_all(encode(t.next_state));
  return t.reward + config_.gamma * *std::max_element(next_q.begin(), next_q.end());
}

void QhdAgent::remember(Transition t) {
  if (t.action >= q_.n_actions()) {
    throw ActionError("agent: transition action " + std::to_string(t.action) + " out of range");
  }
  buffer_.push(std::move(t));
}

TrainStats QhdAgent::train_step() {
  TrainStats stats;
  const auto batch = buffer_.sample(config_.batch);
  double abs_td = 0.0;
  for (const Transition* t : batch) {
    const EncodedState s = encode(t->state);
    const double q_pred = q_.predict(s, t->action);
    const double q_true = bellman_target(*t);
    try {
      q_.update(s, t->action, q_true, q_pred, config_.beta);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at " + describe(*t));
    }
    abs_td += std::abs(q_true - q_pred);
  }
  stats.batch_used = batch.size();
  if (!batch.empty()) stats.mean_abs_td = abs_td / static_cast<double>(batch.size());
  return stats;
}

void QhdAgent::decay_epsilon() {
  epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
}

void QhdAgent::end_episode() {
  if (config_.epsilon_schedule == EpsilonSchedule::kPerEpisode) decay_epsilon();
  emit(AgentEvent::kDecay);
  ++episodes_;
  if (episodes_ % config_.sync_period == 0) {
    q_delayed_ = q_.clone();
    emit(AgentEvent::kSync);
  }
}

EpisodeResult QhdAgent::run_episode(Environment& env, std::uint64_t env_seed) {
  EpisodeResult result;
  result.epsilon = epsilon_;
  std::vector<double> state = env.reset(env_seed);
  double td_sum = 0.0;
  std::size_t td_count = 0;
  while (true) {
    emit(AgentEvent::kObserve);
    auto t0 = Clock::now();
    const std::size_t action = select_action(state);
    result.agent_ms += elapsed_ms(t0);
    emit(AgentEvent::kAct);

    t0 = Clock::now();
    StepResult step;
    try {
      step = env.step(action);
    } catch (const ContractViolation& e) {
      throw ContractViolation(context(env, e));
    } catch (const ActionError& e) {
      throw ActionError(context(env, e));
    }
    result.env_ms += elapsed_ms(t0);
    emit(AgentEvent::kReward);
    result.total_reward += step.reward;

    t0 = Clock::now();
    remember({state, action, step.reward, step.state, step.terminal});
    emit(AgentEvent::kRecord);
    const TrainStats ts = train_step();
    if (config_.epsilon_schedule == EpsilonSchedule::kPerStep) decay_epsilon();
    result.agent_ms += elapsed_ms(t0);
    emit(AgentEvent::kTrain);
    if (ts.batch_used > 0) {
      td_sum += ts.mean_abs_td;
      ++td_count;
    }

    state = std::move(step.state);
    if (step.done()) {
      result.terminal = step.terminal;
      break;
    }
  }
  result.steps = env.steps();
  if (td_count > 0) result.mean_abs_td = td_sum / static_cast<double>(td_count);
  end_episode();
  return result;
}

}  // namespace qhd
