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

#include <cmath>
#include <functional>
#include <random>

#include "qhd/errors.hpp"
#include "qhd/hypervector.hpp"
#include "qhd/oracle.hpp"

namespace qhd {
namespace {

// Layered MDP: state = layer * width + slot, actions move to the next layer,
// the last layer is terminal.
struct Layered {
  TabularMdp mdp;
  std::size_t width;
  std::size_t horizon;
};

Layered random_layered(std::size_t horizon, std::size_t width, std::size_t actions, bool stochastic,
                       Rng& rng) {
  const std::size_t n = (horizon + 1) * width;
  std::uniform_real_distribution<double> reward(-1.0, 1.0), unit(0.0, 1.0), gamma(0.5, 1.0);
  std::uniform_int_distribution<std::size_t> slot(0, width - 1);
  Layered l{TabularMdp(n, actions, gamma(rng)), width, horizon};
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t w = 0; w < width; ++w) {
      for (std::size_t a = 0; a < actions; ++a) {
        std::vector<Outcome> next;
        if (stochastic) {
          const double p = unit(rng);
          next = {{(t + 1) * width + slot(rng), p}, {(t + 1) * width + slot(rng), 1.0 - p}};
        } else {
          next = {{(t + 1) * width + slot(rng), 1.0}};
        }
        l.mdp.set(t * width + w, a, reward(rng), next);
      }
    }
  }
  for (std::size_t w = 0; w < width; ++w) l.mdp.set_terminal(horizon * width + w);
  return l;
}

// Optimal return by expanding every action sequence and outcome branch.
double enumerate(const TabularMdp& mdp, std::size_t s, std::size_t depth) {
  if (mdp.terminal(s) || depth == 0) return 0.0;
  double best = -INFINITY;
  for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
    double v = mdp.reward(s, a);
    for (const auto& o : mdp.outcomes(s, a)) {
      v += mdp.gamma() * o.probability * enumerate(mdp, o.next, depth - 1);
    }
    best = std::max(best, v);
  }
  return best;
}

TEST(ValueIteration, SelfLoopGeometricSeries) {
  TabularMdp mdp(1, 1, 0.5);
  mdp.set(0, 0, 1.0, {{0, 1.0}});
  const auto q = value_iteration(mdp);
  EXPECT_NEAR(q.at(0, 0), 2.0, 1e-9);
}

TEST(ValueIteration, ChainStartValue) {
  const auto mdp = chain_mdp(5, 0.9);
  const auto q = value_iteration(mdp);
  EXPECT_NEAR(q.at(0, 1), 0.729, 1e-9);
  EXPECT_NEAR(q.at(3, 1), 1.0, 1e-9);
  EXPECT_NEAR(q.at(0, 0), 0.9 * 0.729, 1e-9);
  EXPECT_NEAR(enumerate(mdp, 0, 10), 0.729, 1e-9);
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(q.at(4, a), 0.0);
  const auto policy = greedy_policy(q);
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(policy[s], 1u) << "state " << s;
}

TEST(ValueIteration, ZeroRewardsGiveZeroValues) {
  Rng rng = make_rng(1, 0);
  auto l = random_layered(4, 3, 2, true, rng);
  TabularMdp zero(l.mdp.n_states(), 2, 0.9);
  for (std::size_t s = 0; s < l.mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < 2; ++a) zero.set(s, a, 0.0, l.mdp.outcomes(s, a));
  }
  for (double v : value_iteration(zero).values) EXPECT_EQ(v, 0.0);
}

TEST(ValueIteration, AgreesWithEnumerationOnShortHorizons) {
  Rng rng = make_rng(2, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t horizon = 1 + static_cast<std::size_t>(trial) % 6;
    auto l = random_layered(horizon, 3, 2 + trial % 2, trial % 2 == 0, rng);
    const auto q = value_iteration(l.mdp);
    for (std::size_t w = 0; w < l.width; ++w) {
      double best = -INFINITY;
      for (std::size_t a = 0; a < l.mdp.n_actions(); ++a) best = std::max(best, q.at(w, a));
      EXPECT_NEAR(best, enumerate(l.mdp, w, horizon), 1e-9) << "trial " << trial;
    }
  }
}

TEST(ValueIteration, ResidualWithinTolerance) {
  Rng rng = make_rng(3, 0);
  std::uniform_real_distribution<double> reward(-1.0, 1.0), unit(0.0, 1.0);
  TabularMdp mdp(8, 3, 0.95);
  for (std::size_t s = 0; s < 8; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double p = unit(rng);
      mdp.set(s, a, reward(rng), {{(s + a) % 8, p}, {(s * 3 + 1) % 8, 1.0 - p}});
    }
  }
  for (double tol : {1e-4, 1e-10}) {
    const auto q = value_iteration(mdp, tol);
    EXPECT_LE(bellman_residual(mdp, q), tol);
  }
}

TEST(ValueIteration, ReportsNonConvergence) {
  TabularMdp mdp(1, 1, 0.999);
  mdp.set(0, 0, 1.0, {{0, 1.0}});
  EXPECT_THROW(value_iteration(mdp, 1e-10, 10), SolverError);
  EXPECT_THROW(value_iteration(mdp, 0.0), ConfigError);
}

TEST(GreedyPolicy, TiesGoToLowestIndex) {
  QTable q{3, 4, std::vector<double>(12, 1.5)};
  EXPECT_EQ(greedy_policy(q), (std::vector<std::size_t>{0, 0, 0}));
  q.at(1, 2) = 2.0;
  q.at(1, 3) = 2.0;
  EXPECT_EQ(greedy_policy(q)[1], 2u);
}

TEST(GreedyPolicy, InvariantUnderConstantShift) {
  Rng rng = make_rng(4, 0);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    QTable q{5, 3, std::vector<double>(15)};
    for (auto& v : q.values) v = n(rng);
    auto shifted = q;
    const double c = n(rng) * 10.0;
    for (auto& v : shifted.values) v += c;
    EXPECT_EQ(greedy_policy(q), greedy_policy(shifted));
  }
}

TEST(TabularMdp, ValidationRejectsBadRows) {
  TabularMdp mdp(2, 1, 0.9);
  mdp.set(0, 0, 1.0, {{1, 0.5}, {0, 0.4}});
  EXPECT_THROW(mdp.validate(), ConfigError);
  EXPECT_THROW(value_iteration(mdp), ConfigError);
  mdp.set(0, 0, 1.0, {{2, 1.0}});
  EXPECT_THROW(mdp.validate(), ConfigError);
  mdp.set(0, 0, NAN, {{1, 1.0}});
  EXPECT_THROW(mdp.validate(), ConfigError);
  mdp.set(0, 0, 1.0, {{1, 1.0}});
  EXPECT_NO_THROW(mdp.validate());
  EXPECT_THROW(TabularMdp(2, 1, 1.5), ConfigError);
}

TEST(TabularMdp, JsonRoundTrip) {
  Rng rng = make_rng(5, 0);
  auto l = random_layered(3, 2, 2, true, rng);
  const auto j = l.mdp.to_json();
  const auto back = TabularMdp::from_json(j);
  EXPECT_EQ(back.to_json(), j);
  EXPECT_EQ(value_iteration(back).values, value_iteration(l.mdp).values);

  const auto parsed = TabularMdp::from_json(nlohmann::json::parse(R"({
    "states": 2, "actions": 1, "gamma": 0.5, "terminal": [1],
    "transitions": [{"state": 0, "action": 0, "reward": 3.0, "next": [[1, 1.0]]}]})"));
  EXPECT_NEAR(value_iteration(parsed).at(0, 0), 3.0, 1e-12);
  EXPECT_THROW(TabularMdp::from_json(nlohmann::json::parse(R"({"states": 2})")), ConfigError);
}

}  // namespace
}  // namespace qhd
