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
#include <vector>

#include <nlohmann/json.hpp>

namespace qhd {

struct Outcome {
  std::size_t next = 0;
  double probability = 1.0;
};

/// Finite MDP with expected rewards r(s, a) and transition rows p(. | s, a).
/// Terminal states have value 0. Unspecified (s, a) pairs are zero-reward
/// self-loops.
class TabularMdp {
 public:
  TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma);

  std::size_t n_states() const noexcept { return n_states_; }
  std::size_t n_actions() const noexcept { return n_actions_; }
  double gamma() const noexcept { return gamma_; }

  void set(std::size_t state, std::size_t action, double reward, std::vector<Outcome> outcomes);
  void set_terminal(std::size_t state, bool terminal = true);

  bool terminal(std::size_t state) const { return terminal_.at(state); }
  double reward(std::size_t state, std::size_t action) const;
  const std::vector<Outcome>& outcomes(std::size_t state, std::size_t action) const;

  /// Throws ConfigError when a transition row does not sum to 1 (within
  /// 1e-9), a target is out of range, or a reward is not finite.
  void validate() const;

  /// {"states", "actions", "gamma", "terminal": [...], "transitions":
  ///  [{"state", "action", "reward", "next": [[s', p], ...]}, ...]}
  static TabularMdp from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  std::size_t index(std::size_t s, std::size_t a) const;

  std::size_t n_states_;
  std::size_t n_actions_;
  double gamma_;
  std::vector<double> rewards_;
  std::vector<std::vector<Outcome>> outcomes_;
  std::vector<bool> terminal_;
};

/// Row-major state-action values.
struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> values;

  double at(std::size_t s, std::size_t a) const { return values.at(s * n_actions + a); }
  double& at(std::size_t s, std::size_t a) { return values.at(s * n_actions + a); }
};

/// Iterates the Bellman optimality operator until the sup-norm Bellman
/// residual is at most `tolerance`. SolverError if max_iterations is reached.
QTable value_iteration(const TabularMdp& mdp, double tolerance = 1e-10,
                       std::size_t max_iterations = 1'000'000);

/// sup_{s,a} |(T Q)(s, a) - Q(s, a)| over non-terminal states.
double bellman_residual(const TabularMdp& mdp, const QTable& q);

/// Greedy action per state, ties to the lowest index.
std::vector<std::size_t> greedy_policy(const QTable& q);

/// The chain of ChainEnv as a tabular MDP.
TabularMdp chain_mdp(std::size_t length, double gamma);

}  // namespace qhd
