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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qhd/encoder.hpp"
#include "qhd/envs.hpp"
#include "qhd/qmodel.hpp"
#include "qhd/replay.hpp"

namespace qhd {

enum class EpsilonSchedule { kPerEpisode, kPerStep };

struct AgentConfig {
  std::size_t dim = 6000;
  double beta = 0.05;                 ///< regression learning rate
  double gamma = 0.99;                ///< reward decay
  double epsilon_start = 1.0;
  double epsilon_decay = 0.99;        ///< multiplicative, in (0, 1)
  double epsilon_min = 0.01;
  EpsilonSchedule epsilon_schedule = EpsilonSchedule::kPerEpisode;
  std::size_t sync_period = 2;        ///< episodes between delayed-model copies
  std::size_t batch = 4;
  std::size_t memory = ReplayBuffer::kUnlimited;
  ShortBatchPolicy short_batch = ShortBatchPolicy::kUseAll;
  std::uint64_t seed = 0;
  QModelOptions model;
  PhaseDistribution::Kind phase_distribution = PhaseDistribution::Kind::kGaussian;
  double bandwidth = 10.0 / 3.0;      ///< shared sigma: kernel length-scale 0.3
  std::vector<double> bandwidths;     ///< optional per-feature override

  /// Every violated constraint, one message each. Empty when valid.
  std::vector<std::string> validate() const;
};

struct TrainStats {
  std::size_t batch_used = 0;
  double mean_abs_td = 0.0;
};

struct EpisodeResult {
  double total_reward = 0.0;
  std::size_t steps = 0;
  bool terminal = false;
  double epsilon = 0.0;      ///< exploration probability used during the episode
  double agent_ms = 0.0;     ///< encode + select + train
  double env_ms = 0.0;       ///< environment stepping
  double mean_abs_td = 0.0;
};

/// Instrumentation hook for the order of operations inside run_episode.
enum class AgentEvent { kObserve, kAct, kReward, kRecord, kTrain, kDecay, kSync };

/// Hyperdimensional Q-learning agent: epsilon-greedy over an online
/// regression model Q, Bellman targets from a delayed copy Q', experience
/// replay, training after every environment step.
class QhdAgent {
 public:
  QhdAgent(const AgentConfig& config, std::size_t n_actions, std::vector<FeatureScale> scales);

  const AgentConfig& config() const noexcept { return config_; }
  const PositionBasis& basis() const noexcept { return *basis_; }
  const QModel& online() const noexcept { return q_; }
  const QModel& delayed() const noexcept { return q_delayed_; }
  QModel& mutable_online() noexcept { return q_; }
  QModel& mutable_delayed() noexcept { return q_delayed_; }
  const ReplayBuffer& memory() const noexcept { return buffer_; }
  double epsilon() const noexcept { return epsilon_; }
  void set_epsilon(double e) { epsilon_ = e; }
  std::size_t episodes_completed() const noexcept { return episodes_; }

  void set_observer(std::function<void(AgentEvent)> observer) { observer_ = std::move(observer); }

  EncodedState encode(std::span<const double> state) const;

  /// Random action with probability epsilon, else the greedy action on Q.
  std::size_t select_action(std::span<const double> state);
  /// Greedy action; ties resolve to the lowest index.
  std::size_t greedy_action(std::span<const double> state) const;

  /// R for terminal transitions, otherwise R + gamma * max_a Q'(S', a).
  double bellman_target(const Transition& t) const;

  void remember(Transition t);
  /// One replay batch, updated sequentially. No-op on an empty memory.
  TrainStats train_step();
  /// Decays epsilon (per-episode schedule) and syncs Q' every sync_period.
  void end_episode();

  EpisodeResult run_episode(Environment& env, std::uint64_t env_seed);

 private:
  void emit(AgentEvent e) const {
    if (observer_) observer_(e);
  }
  void decay_epsilon();

  AgentConfig config_;
  std::shared_ptr<const PositionBasis> basis_;
  QModel q_;
  QModel q_delayed_;
  ReplayBuffer buffer_;
  double epsilon_;
  std::size_t episodes_ = 0;
  Rng rng_;
  std::function<void(AgentEvent)> observer_;
};

/// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace qhd
