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

#include "qhd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qhd/agent.hpp"
#include "qhd/errors.hpp"

namespace qhd {

TabularMdp::TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma)
    : n_states_(n_states), n_actions_(n_actions), gamma_(gamma) {
  if (n_states == 0 || n_actions == 0) throw ConfigError("mdp: need states and actions");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("mdp: gamma must lie in [0, 1]");
  rewards_.assign(n_states * n_actions, 0.0);
  outcomes_.resize(n_states * n_actions);
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t a = 0; a < n_actions; ++a) outcomes_[index(s, a)] = {{s, 1.0}};
  }
  terminal_.assign(n_states, false);
}

std::size_t TabularMdp::index(std::size_t s, std::size_t a) const {
  if (s >= n_states_) throw DimensionError("mdp: state " + std::to_string(s) + " out of range");
  if (a >= n_actions_) throw ActionError("mdp: action " + std::to_string(a) + " out of range");
  return s * n_actions_ + a;
}

void TabularMdp::set(std::size_t state, std::size_t action, double reward,
                     std::vector<Outcome> outcomes) {
  const auto i = index(state, action);
  rewards_[i] = reward;
  outcomes_[i] = std::move(outcomes);
}

void TabularMdp::set_terminal(std::size_t state, bool terminal) {
  if (state >= n_states_) throw DimensionError("mdp: state out of range");
  terminal_[state] = terminal;
}

double TabularMdp::reward(std::size_t state, std::size_t action) const {
  return rewards_[index(state, action)];
}

const std::vector<Outcome>& TabularMdp::outcomes(std::size_t state, std::size_t action) const {
  return outcomes_[index(state, action)];
}

void TabularMdp::validate() const {
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      const auto i = index(s, a);
      if (!std::isfinite(rewards_[i])) {
        throw ConfigError("mdp: reward of (" + std::to_string(s) + ", " + std::to_string(a) +
                          ") is not finite");
      }
      double total = 0.0;
      for (const auto& o : outcomes_[i]) {
        if (o.next >= n_states_) throw ConfigError("mdp: transition target out of range");
        if (!(o.probability >= 0.0)) throw ConfigError("mdp: negative transition probability");
        total += o.probability;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("mdp: transition row (" + std::to_string(s) + ", " + std::to_string(a) +
                          ") sums to " + std::to_string(total));
      }
    }
  }
}

TabularMdp TabularMdp::from_json(const nlohmann::json& j) {
  try {
    TabularMdp mdp(j.at("states").get<std::size_t>(), j.at("actions").get<std::size_t>(),
                   j.at("gamma").get<double>());
    for (const auto& t : j.value("terminal", nlohmann::json::array())) {
      mdp.set_terminal(t.get<std::size_t>());
    }
    for (const auto& t : j.value("transitions", nlohmann::json::array())) {
      std::vector<Outcome> outcomes;
      for (const auto& n : t.at("next")) {
        outcomes.push_back({n.at(0).get<std::size_t>(), n.at(1).get<double>()});
      }
      mdp.set(t.at("state").get<std::size_t>(), t.at("action").get<std::size_t>(),
              t.value("reward", 0.0), std::move(outcomes));
    }
    mdp.validate();
    return mdp;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mdp json: ") + e.what());
  }
}

nlohmann::json TabularMdp::to_json() const {
  nlohmann::json terminal = nlohmann::json::array();
  for (std::size_t s = 0; s < n_states_; ++s) {
    if (terminal_[s]) terminal.push_back(s);
  }
  nlohmann::json transitions = nlohmann::json::array();
  for (std::size_t s = 0; s < n_states_; ++s) {
    for (std::size_t a = 0; a < n_actions_; ++a) {
      nlohmann::json next = nlohmann::json::array();
      for (const auto& o : outcomes_[index(s, a)]) next.push_back({o.next, o.probability});
      transitions.push_back(
          {{"state", s}, {"action", a}, {"reward", rewards_[index(s, a)]}, {"next", next}});
    }
  }
  return {{"states", n_states_},
          {"actions", n_actions_},
          {"gamma", gamma_},
          {"terminal", terminal},
          {"transitions", transitions}};
}

namespace {

double state_value(const TabularMdp& mdp, const QTable& q, std::size_t s) {
  if (mdp.terminal(s)) return 0.0;
  double best = q.at(s, 0);
  for (std::size_t a = 1; a < q.n_actions; ++a) best = std::max(best, q.at(s, a));
  return best;
}

double backup(const TabularMdp& mdp, const QTable& q, std::size_t s, std::size_t a) {
  double expected = 0.0;
  for (const auto& o : mdp.outcomes(s, a)) expected += o.probability * state_value(mdp, q, o.next);
  return mdp.reward(s, a) + mdp.gamma() * expected;
}

}  // namespace

QTable value_iteration(const TabularMdp& mdp, double tolerance, std::size_t max_iterations) {
  if (!(tolerance > 0.0)) throw ConfigError("value_iteration: tolerance must be > 0");
  mdp.validate();
  QTable q{mdp.n_states(), mdp.n_actions(),
           std::vector<double>(mdp.n_states() * mdp.n_actions(), 0.0)};
  QTable next = q;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    double delta = 0.0;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const double v = mdp.terminal(s) ? 0.0 : backup(mdp, q, s, a);
        delta = std::max(delta, std::abs(v - q.at(s, a)));
        next.at(s, a) = v;
      }
    }
    std::swap(q, next);
    // residual(Q_{k+1}) <= gamma * |Q_{k+1} - Q_k| <= delta
    if (delta <= tolerance) return q;
  }
  throw SolverError("value_iteration: no convergence within " + std::to_string(max_iterations) +
                    " iterations");
}

double bellman_residual(const TabularMdp& mdp, const QTable& q) {
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    if (mdp.terminal(s)) continue;
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      worst = std::max(worst, std::abs(backup(mdp, q, s, a) - q.at(s, a)));
    }
  }
  return worst;
}

std::vector<std::size_t> greedy_policy(const QTable& q) {
  std::vector<std::size_t> policy(q.n_states);
  for (std::size_t s = 0; s < q.n_states; ++s) {
    policy[s] = argmax(std::span<const double>(q.values).subspan(s * q.n_actions, q.n_actions));
  }
  return policy;
}

TabularMdp chain_mdp(std::size_t length, double gamma) {
  if (length < 2) throw ConfigError("chain mdp: length must be >= 2");
  TabularMdp mdp(length, 2, gamma);
  const std::size_t goal = length - 1;
  for (std::size_t s = 0; s < goal; ++s) {
    mdp.set(s, 0, 0.0, {{s == 0 ? 0 : s - 1, 1.0}});
    mdp.set(s, 1, s + 1 == goal ? 1.0 : 0.0, {{s + 1, 1.0}});
  }
  mdp.set_terminal(goal);
  return mdp;
}

}  // namespace qhd
