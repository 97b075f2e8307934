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

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qhd/encoder.hpp"

namespace qhd {

struct StepResult {
  std::vector<double> state;
  double reward = 0.0;
  /// The environment reached a terminal state; no bootstrapping past it.
  bool terminal = false;
  /// The step cap ended the episode while the state was not terminal.
  bool truncated = false;

  bool done() const noexcept { return terminal || truncated; }
};

/// Episodic environment. reset() must precede the first step(); stepping after
/// the episode ended throws ContractViolation, an invalid action ActionError.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t step_cap() const = 0;
  /// Encoder normalization for each observation feature: published bounds,
  /// with caps for velocities that are unbounded in principle.
  virtual std::vector<FeatureScale> observation_scales() const = 0;

  std::vector<double> reset(std::uint64_t seed);
  StepResult step(std::size_t action);

  bool done() const noexcept { return done_; }
  std::size_t steps() const noexcept { return steps_; }

 protected:
  struct Outcome {
    double reward;
    bool terminal;
  };
  virtual std::vector<double> do_reset(std::uint64_t seed) = 0;
  virtual Outcome do_step(std::size_t action) = 0;
  virtual std::vector<double> observe() const = 0;

 private:
  bool started_ = false;
  bool done_ = true;
  std::size_t steps_ = 0;
};

/// Cart-pole balancing with the classic-control constants and explicit Euler
/// integration. Reward 1 for every step that does not terminate.
class CartPoleEnv final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfPoleLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXThreshold = 2.4;
  static constexpr double kThetaThreshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kVelocityCap = 3.0;

  explicit CartPoleEnv(std::size_t step_cap = 1000) : cap_(step_cap) {}

  std::string name() const override { return "cartpole"; }
  std::size_t state_dim() const override { return 4; }
  std::size_t action_count() const override { return 2; }
  std::size_t step_cap() const override { return cap_; }
  std::vector<FeatureScale> observation_scales() const override;

  /// (x, x_dot, theta, theta_dot)
  const std::array<double, 4>& physical_state() const noexcept { return s_; }
  void set_physical_state(const std::array<double, 4>& s) { s_ = s; }

 protected:
  std::vector<double> do_reset(std::uint64_t seed) override;
  Outcome do_step(std::size_t action) override;
  std::vector<double> observe() const override { return {s_.begin(), s_.end()}; }

 private:
  std::size_t cap_;
  std::array<double, 4> s_{};
};

/// Two-link acrobot ("book" dynamics), one RK4 step of 0.2 s per action,
/// torques {-1, 0, +1}. Observation: cos/sin of both joint angles plus the two
/// angular velocities. Reward -1 for every step that does not reach the goal
/// height.
class AcrobotEnv final : public Environment {
 public:
  static constexpr double kDt = 0.2;
  static constexpr double kLinkLength1 = 1.0;
  static constexpr double kLinkMass1 = 1.0;
  static constexpr double kLinkMass2 = 1.0;
  static constexpr double kLinkCom1 = 0.5;
  static constexpr double kLinkCom2 = 0.5;
  static constexpr double kLinkMoi = 1.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kMaxVel1 = 4.0 * 3.14159265358979323846;
  static constexpr double kMaxVel2 = 9.0 * 3.14159265358979323846;

  explicit AcrobotEnv(std::size_t step_cap = 500) : cap_(step_cap) {}

  std::string name() const override { return "acrobot"; }
  std::size_t state_dim() const override { return 6; }
  std::size_t action_count() const override { return 3; }
  std::size_t step_cap() const override { return cap_; }
  std::vector<FeatureScale> observation_scales() const override;

  /// (theta1, theta2, dtheta1, dtheta2)
  const std::array<double, 4>& physical_state() const noexcept { return s_; }
  void set_physical_state(const std::array<double, 4>& s) { s_ = s; }

  /// Kinetic plus potential energy of the current configuration.
  double mechanical_energy() const;

  /// Time derivative of (theta1, theta2, dtheta1, dtheta2) under torque.
  static std::array<double, 4> derivatives(const std::array<double, 4>& s, double torque);

 protected:
  std::vector<double> do_reset(std::uint64_t seed) override;
  Outcome do_step(std::size_t action) override;
  std::vector<double> observe() const override;

 private:
  std::size_t cap_;
  std::array<double, 4> s_{};
};

/// Deterministic chain of N states on a line. Actions: 0 = left, 1 = right.
/// Start at 0; entering state N-1 pays 1 and terminates. The observation is the
/// state index as a single real feature.
class ChainEnv final : public Environment {
 public:
  explicit ChainEnv(std::size_t length = 5, std::size_t step_cap = 50);

  std::string name() const override { return "chain"; }
  std::size_t state_dim() const override { return 1; }
  std::size_t action_count() const override { return 2; }
  std::size_t step_cap() const override { return cap_; }
  std::vector<FeatureScale> observation_scales() const override;

  std::size_t length() const noexcept { return length_; }
  std::size_t position() const noexcept { return pos_; }
  void set_position(std::size_t p);

 protected:
  std::vector<double> do_reset(std::uint64_t seed) override;
  Outcome do_step(std::size_t action) override;
  std::vector<double> observe() const override { return {static_cast<double>(pos_)}; }

 private:
  std::size_t length_;
  std::size_t cap_;
  std::size_t pos_ = 0;
};

struct EnvOptions {
  std::size_t chain_length = 5;
  /// 0 keeps the environment's default cap.
  std::size_t step_cap = 0;
};

/// "cartpole", "acrobot" or "chain"; ConfigError otherwise.
std::unique_ptr<Environment> make_env(const std::string& name, const EnvOptions& options = {});

struct RolloutStats {
  std::vector<double> rewards;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Uniform-random policy for the given number of episodes.
RolloutStats rollout_random(Environment& env, std::size_t episodes, std::uint64_t seed);

}  // namespace qhd
