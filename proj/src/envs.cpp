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

#include "qhd/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qhd/errors.hpp"

namespace qhd {

namespace {
constexpr std::uint64_t kEnvStream = 0x656e76ULL;
}  // namespace

std::vector<double> Environment::reset(std::uint64_t seed) {
  started_ = true;
  done_ = false;
  steps_ = 0;
  return do_reset(seed);
}

StepResult Environment::step(std::size_t action) {
  if (!started_) throw ContractViolation(name() + ": step() before reset()");
  if (done_) throw ContractViolation(name() + ": step() after the episode ended");
  if (action >= action_count()) {
    throw ActionError(name() + ": invalid action " + std::to_string(action));
  }
  const Outcome o = do_step(action);
  ++steps_;
  StepResult r;
  r.state = observe();
  r.reward = o.reward;
  r.terminal = o.terminal;
  r.truncated = !o.terminal && steps_ >= step_cap();
  done_ = r.done();
  return r;
}

// ---------------------------------------------------------------------------
// CartPole

std::vector<FeatureScale> CartPoleEnv::observation_scales() const {
  return {{0.0, kXThreshold, true},
          {0.0, kVelocityCap, true},
          {0.0, kThetaThreshold, true},
          {0.0, kVelocityCap, true}};
}

std::vector<double> CartPoleEnv::do_reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, kEnvStream);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (auto& v : s_) v = u(rng);
  return observe();
}

CartPoleEnv::Outcome CartPoleEnv::do_step(std::size_t action) {
  constexpr double total_mass = kCartMass + kPoleMass;
  constexpr double pole_mass_length = kPoleMass * kHalfPoleLength;
  auto& [x, x_dot, theta, theta_dot] = s_;
  const double force = action == 1 ? kForce : -kForce;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (kHalfPoleLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  x += kTau * x_dot;
  x_dot += kTau * x_acc;
  theta += kTau * theta_dot;
  theta_dot += kTau * theta_acc;

  const bool terminal =
      x < -kXThreshold || x > kXThreshold || theta < -kThetaThreshold || theta > kThetaThreshold;
  return {terminal ? 0.0 : 1.0, terminal};
}

// ---------------------------------------------------------------------------
// Acrobot

std::vector<FeatureScale> AcrobotEnv::observation_scales() const {
  return {{0.0, 1.0, true}, {0.0, 1.0, true},      {0.0, 1.0, true},
          {0.0, 1.0, true}, {0.0, kMaxVel1, true}, {0.0, kMaxVel2, true}};
}

std::vector<double> AcrobotEnv::do_reset(std::uint64_t seed) {
  Rng rng = make_rng(seed, kEnvStream);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (auto& v : s_) v = u(rng);
  return observe();
}

std::vector<double> AcrobotEnv::observe() const {
  return {std::cos(s_[0]), std::sin(s_[0]), std::cos(s_[1]), std::sin(s_[1]), s_[2], s_[3]};
}

std::array<double, 4> AcrobotEnv::derivatives(const std::array<double, 4>& s, double torque) {
  constexpr double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  constexpr double lc1 = kLinkCom1, lc2 = kLinkCom2, i1 = kLinkMoi, i2 = kLinkMoi, g = kGravity;
  const auto [theta1, theta2, dtheta1, dtheta2] = s;
  const double d1 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - std::numbers::pi / 2.0);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - std::numbers::pi / 2.0) + phi2;
  const double ddtheta2 =
      (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
      (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

double AcrobotEnv::mechanical_energy() const {
  constexpr double m1 = kLinkMass1, m2 = kLinkMass2, l1 = kLinkLength1;
  constexpr double lc1 = kLinkCom1, lc2 = kLinkCom2, i1 = kLinkMoi, i2 = kLinkMoi, g = kGravity;
  const auto [theta1, theta2, dtheta1, dtheta2] = s_;
  const double d11 =
      m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d12 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double d22 = m2 * lc2 * lc2 + i2;
  const double kinetic =
      0.5 * (d11 * dtheta1 * dtheta1 + 2.0 * d12 * dtheta1 * dtheta2 + d22 * dtheta2 * dtheta2);
  const double potential =
      -(m1 * lc1 + m2 * l1) * g * std::cos(theta1) - m2 * lc2 * g * std::cos(theta1 + theta2);
  return kinetic + potential;
}

namespace {

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  while (x > std::numbers::pi) x -= two_pi;
  while (x < -std::numbers::pi) x += two_pi;
  return x;
}

}  // namespace

AcrobotEnv::Outcome AcrobotEnv::do_step(std::size_t action) {
  const double torque = static_cast<double>(action) - 1.0;
  auto axpy = [](const std::array<double, 4>& s, const std::array<double, 4>& k, double h) {
    return std::array<double, 4>{s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2],
                                 s[3] + h * k[3]};
  };
  const auto k1 = derivatives(s_, torque);
  const auto k2 = derivatives(axpy(s_, k1, kDt / 2.0), torque);
  const auto k3 = derivatives(axpy(s_, k2, kDt / 2.0), torque);
  const auto k4 = derivatives(axpy(s_, k3, kDt), torque);
  std::array<double, 4> ns;
  for (std::size_t i = 0; i < 4; ++i) {
    ns[i] = s_[i] + kDt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  ns[0] = wrap_angle(ns[0]);
  ns[1] = wrap_angle(ns[1]);
  ns[2] = std::clamp(ns[2], -kMaxVel1, kMaxVel1);
  ns[3] = std::clamp(ns[3], -kMaxVel2, kMaxVel2);
  s_ = ns;

  const bool terminal = -std::cos(s_[0]) - std::cos(s_[1] + s_[0]) > 1.0;
  return {terminal ? 0.0 : -1.0, terminal};
}

// ---------------------------------------------------------------------------
// Chain

ChainEnv::ChainEnv(std::size_t length, std::size_t step_cap) : length_(length), cap_(step_cap) {
  if (length_ < 2) throw ConfigError("chain: length must be >= 2");
}

std::vector<FeatureScale> ChainEnv::observation_scales() const {
  const double half = static_cast<double>(length_ - 1) / 2.0;
  return {{half, half, true}};
}

void ChainEnv::set_position(std::size_t p) {
  if (p >= length_) throw DimensionError("chain: position out of range");
  pos_ = p;
}

std::vector<double> ChainEnv::do_reset(std::uint64_t /*seed*/) {
  pos_ = 0;
  return observe();
}

ChainEnv::Outcome ChainEnv::do_step(std::size_t action) {
  if (action == 1) {
    ++pos_;
  } else if (pos_ > 0) {
    --pos_;
  }
  const bool terminal = pos_ == length_ - 1;
  return {terminal ? 1.0 : 0.0, terminal};
}

// ---------------------------------------------------------------------------

std::unique_ptr<Environment> make_env(const std::string& name, const EnvOptions& options) {
  if (name == "cartpole") {
    return std::make_unique<CartPoleEnv>(options.step_cap ? options.step_cap : 1000);
  }
  if (name == "acrobot") {
    return std::make_unique<AcrobotEnv>(options.step_cap ? options.step_cap : 500);
  }
  if (name == "chain") {
    return std::make_unique<ChainEnv>(options.chain_length, options.step_cap ? options.step_cap : 50);
  }
  throw ConfigError("unknown environment '" + name + "' (expected cartpole, acrobot or chain)");
}

RolloutStats rollout_random(Environment& env, std::size_t episodes, std::uint64_t seed) {
  RolloutStats stats;
  Rng rng = make_rng(seed, 0x726f6c6cULL);
  std::uniform_int_distribution<std::size_t> pick(0, env.action_count() - 1);
  for (std::size_t e = 0; e < episodes; ++e) {
    env.reset(seed * 1'000'003ULL + e);
    double total = 0.0;
    while (!env.done()) total += env.step(pick(rng)).reward;
    stats.rewards.push_back(total);
  }
  if (!stats.rewards.empty()) {
    double sum = 0.0;
    for (double r : stats.rewards) sum += r;
    stats.mean = sum / static_cast<double>(stats.rewards.size());
    double sq = 0.0;
    for (double r : stats.rewards) sq += (r - stats.mean) * (r - stats.mean);
    stats.stddev = std::sqrt(sq / static_cast<double>(stats.rewards.size()));
  }
  return stats;
}

}  // namespace qhd
