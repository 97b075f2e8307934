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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "qhd/envs.hpp"
#include "qhd/errors.hpp"

namespace qhd {
namespace {

using State4 = std::array<double, 4>;

// Acrobot energy written from the link geometry: angles measured from the
// downward vertical, the second relative to the first.
double acrobot_energy(const State4& s) {
  constexpr double m1 = 1.0, m2 = 1.0, l1 = 1.0, lc1 = 0.5, lc2 = 0.5, inertia = 1.0, g = 9.8;
  const auto [t1, t2, w1, w2] = s;
  const double y1 = -lc1 * std::cos(t1);
  const double y2 = -l1 * std::cos(t1) - lc2 * std::cos(t1 + t2);
  // Centre-of-mass velocities.
  const double v1sq = lc1 * lc1 * w1 * w1;
  const double v2sq = l1 * l1 * w1 * w1 + lc2 * lc2 * (w1 + w2) * (w1 + w2) +
                      2.0 * l1 * lc2 * w1 * (w1 + w2) * std::cos(t2);
  const double kinetic = 0.5 * m1 * v1sq + 0.5 * m2 * v2sq + 0.5 * inertia * w1 * w1 +
                         0.5 * inertia * (w1 + w2) * (w1 + w2);
  return kinetic + m1 * g * y1 + m2 * g * y2;
}

TEST(Environment, ResetIsSeedDeterministic) {
  for (const char* name : {"cartpole", "acrobot", "chain"}) {
    auto a = make_env(name), b = make_env(name);
    EXPECT_EQ(a->reset(42), b->reset(42)) << name;
  }
  auto env = make_env("cartpole");
  EXPECT_NE(env->reset(1), env->reset(2));
}

TEST(Environment, UnknownNameIsConfigError) { EXPECT_THROW(make_env("lunarlander"), ConfigError); }

TEST(Environment, ContractAndActionErrors) {
  for (const char* name : {"cartpole", "acrobot", "chain"}) {
    auto env = make_env(name);
    EXPECT_THROW(env->step(0), ContractViolation) << name;
    env->reset(0);
    EXPECT_THROW(env->step(env->action_count()), ActionError) << name;
    while (!env->done()) env->step(0);
    EXPECT_THROW(env->step(0), ContractViolation) << name;
  }
}

TEST(CartPole, InitialStatesWithinBounds) {
  CartPoleEnv env;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    for (double v : env.reset(seed)) {
      EXPECT_GE(v, -0.05);
      EXPECT_LE(v, 0.05);
    }
  }
}

TEST(CartPole, OneStepFromRestMatchesHandEvaluation) {
  // At rest: temp = F/(m_c+m_p) = 9.0909; theta_acc = -temp / (l (4/3 - m_p/(m_c+m_p))) = -14.634;
  // x_acc = temp - m_p l theta_acc / (m_c+m_p) = 9.7561. Euler with dt = 0.02.
  CartPoleEnv env;
  env.reset(0);
  env.set_physical_state({0.0, 0.0, 0.0, 0.0});
  const auto r = env.step(1);
  EXPECT_EQ(r.state[0], 0.0);
  EXPECT_NEAR(r.state[1], 0.1951, 5e-5);
  EXPECT_EQ(r.state[2], 0.0);
  EXPECT_NEAR(r.state[3], -0.2927, 5e-5);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_FALSE(r.done());
}

TEST(CartPole, DynamicsAreMirrorSymmetric) {
  CartPoleEnv left, right;
  left.reset(0);
  right.reset(0);
  left.set_physical_state({0.0, 0.0, 0.0, 0.0});
  right.set_physical_state({0.0, 0.0, 0.0, 0.0});
  for (int t = 0; t < 5; ++t) {
    const auto a = left.step(0), b = right.step(1);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.state[k], -b.state[k]);
  }
  // Mirrored initial states under mirrored actions stay mirrored.
  left.reset(0);
  right.reset(0);
  left.set_physical_state({0.01, -0.02, 0.03, -0.04});
  right.set_physical_state({-0.01, 0.02, -0.03, 0.04});
  for (int t = 0; t < 5; ++t) {
    const auto a = left.step(t % 2), b = right.step(1 - t % 2);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a.state[k], -b.state[k], 1e-15);
  }
}

TEST(CartPole, TerminatesAtThresholdsWithZeroReward) {
  CartPoleEnv env;
  env.reset(0);
  env.set_physical_state({0.0, 0.0, CartPoleEnv::kThetaThreshold - 1e-4, 1.0});
  const auto r = env.step(0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.reward, 0.0);
  env.reset(0);
  env.set_physical_state({2.399, 1.0, 0.0, 0.0});
  EXPECT_TRUE(env.step(1).terminal);
}

TEST(CartPole, BalancingControllerHitsStepCap) {
  CartPoleEnv env;
  env.reset(3);
  StepResult r;
  double total = 0.0;
  do {
    const auto& s = env.physical_state();
    r = env.step(s[2] + 0.5 * s[3] + 0.01 * s[0] + 0.1 * s[1] > 0.0 ? 1 : 0);
    total += r.reward;
  } while (!r.done());
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(env.steps(), 1000u);
  EXPECT_EQ(total, 1000.0);
}

TEST(CartPole, RandomPolicyBaseline) {
  CartPoleEnv env;
  const auto stats = rollout_random(env, 1000, 7);
  EXPECT_GE(stats.mean, 15.0);
  EXPECT_LE(stats.mean, 35.0);
}

TEST(Acrobot, InitialStatesWithinBounds) {
  AcrobotEnv env;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    env.reset(seed);
    for (double v : env.physical_state()) {
      EXPECT_GE(v, -0.1);
      EXPECT_LE(v, 0.1);
    }
  }
}

TEST(Acrobot, ObservationIsSixFeatures) {
  AcrobotEnv env;
  env.reset(0);
  env.set_physical_state({0.3, -0.2, 1.0, -2.0});
  const auto r = env.step(1);
  ASSERT_EQ(r.state.size(), 6u);
  const auto& s = env.physical_state();
  EXPECT_EQ(r.state[0], std::cos(s[0]));
  EXPECT_EQ(r.state[1], std::sin(s[0]));
  EXPECT_EQ(r.state[2], std::cos(s[1]));
  EXPECT_EQ(r.state[3], std::sin(s[1]));
  EXPECT_EQ(r.state[4], s[2]);
  EXPECT_EQ(r.state[5], s[3]);
}

// dE/dt along the equations of motion equals the power of the joint torque.
TEST(Acrobot, DerivativesConserveEnergyUpToTorquePower) {
  Rng rng = make_rng(13, 0);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> vel(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const State4 s{angle(rng), angle(rng), vel(rng), vel(rng)};
    const double torque = static_cast<double>(trial % 3) - 1.0;
    const auto d = AcrobotEnv::derivatives(s, torque);
    constexpr double h = 1e-6;
    State4 fwd, bwd;
    for (std::size_t i = 0; i < 4; ++i) {
      fwd[i] = s[i] + h * d[i];
      bwd[i] = s[i] - h * d[i];
    }
    const double de_dt = (acrobot_energy(fwd) - acrobot_energy(bwd)) / (2.0 * h);
    EXPECT_NEAR(de_dt, torque * s[3], 1e-5) << "trial " << trial;
  }
}

TEST(Acrobot, MechanicalEnergyMatchesGeometry) {
  AcrobotEnv env;
  env.reset(0);
  const State4 s{0.4, -1.1, 0.7, 2.5};
  env.set_physical_state(s);
  EXPECT_NEAR(env.mechanical_energy(), acrobot_energy(s), 1e-12);
}

TEST(Acrobot, ZeroTorqueEnergyDriftIsSmall) {
  AcrobotEnv env;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    env.reset(seed);
    const auto s0 = env.physical_state();
    env.set_physical_state({s0[0] * 3.0, s0[1] * 3.0, s0[2], s0[3]});
    const double rest = acrobot_energy({0.0, 0.0, 0.0, 0.0});
    double previous = acrobot_energy(env.physical_state());
    const double scale = std::abs(rest);
    for (int t = 0; t < 100; ++t) {
      env.step(1);
      const double e = acrobot_energy(env.physical_state());
      EXPECT_LE(std::abs(e - previous) / scale, 1e-3) << "seed " << seed << " step " << t;
      previous = e;
    }
  }
}

TEST(Acrobot, GoalHeightTerminatesWithZeroReward) {
  AcrobotEnv env;
  env.reset(0);
  env.set_physical_state({std::numbers::pi, 0.0, 0.0, 0.0});
  const auto r = env.step(1);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.reward, 0.0);
  env.reset(0);
  EXPECT_EQ(env.step(1).reward, -1.0);
}

TEST(Acrobot, RandomPolicyRarelyReachesGoal) {
  AcrobotEnv env;
  const auto stats = rollout_random(env, 100, 3);
  EXPECT_LE(stats.mean, -480.0);
  for (double r : stats.rewards) {
    EXPECT_GE(r, -500.0);
    EXPECT_LE(r, 0.0);
  }
  env.reset(11);
  Rng rng = make_rng(11, 0);
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  StepResult r;
  do {
    r = env.step(pick(rng));
  } while (!r.done());
  if (r.truncated) {
    EXPECT_EQ(env.steps(), 500u);
  }
}

TEST(Acrobot, TrajectoryDependsOnlyOnSeedAndActions) {
  AcrobotEnv a, b;
  a.reset(77);
  b.reset(77);
  for (int t = 0; t < 200; ++t) {
    const std::size_t action = static_cast<std::size_t>((t * 7) % 3);
    EXPECT_EQ(a.step(action).state, b.step(action).state);
  }
}

TEST(Chain, ResetStartsAtZero) {
  ChainEnv env;
  for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_EQ(env.reset(seed), std::vector<double>{0.0});
  EXPECT_THROW(ChainEnv(1), ConfigError);
}

TEST(Chain, RightFromPenultimatePaysAndTerminates) {
  ChainEnv env(5);
  env.reset(0);
  env.set_position(3);
  const auto r = env.step(1);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.state, std::vector<double>{4.0});
}

TEST(Chain, LeftWallAndCap) {
  ChainEnv env(5, 3);
  env.reset(0);
  EXPECT_EQ(env.step(0).state, std::vector<double>{0.0});
  env.step(1);
  const auto r = env.step(0);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.reward, 0.0);
}

TEST(Chain, RandomReturnBelowOptimal) {
  constexpr double gamma = 0.9;
  const double optimal = std::pow(gamma, 3);  // four moves right, reward on the last
  ChainEnv env;
  Rng rng = make_rng(5, 0);
  std::uniform_int_distribution<std::size_t> pick(0, 1);
  double mean = 0.0;
  for (int e = 0; e < 1000; ++e) {
    env.reset(e);
    double discount = 1.0, ret = 0.0;
    while (!env.done()) {
      ret += discount * env.step(pick(rng)).reward;
      discount *= gamma;
    }
    mean += ret / 1000.0;
  }
  EXPECT_LT(mean, optimal);
}

}  // namespace
}  // namespace qhd
