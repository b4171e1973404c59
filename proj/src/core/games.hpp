// Copyright 2026 The RobustComm Authors.
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

#ifndef ROBUSTCOMM_CORE_GAMES_HPP_
#define ROBUSTCOMM_CORE_GAMES_HPP_

#include <optional>
#include <string>
#include <vector>

#include "core/engine.hpp"
#include "core/rational.hpp"

namespace robustcomm {

// Finite sender-receiver game with exact-rational prior and payoffs.
struct FiniteGame {
  std::vector<std::string> states;   // Omega
  std::vector<std::string> actions;  // A
  std::vector<Rational> prior;       // nu, sums to 1 exactly
  std::vector<std::vector<Rational>> u_sender;    // [state][action]
  std::vector<std::vector<Rational>> u_receiver;  // [state][action]

  int n_states() const { return static_cast<int>(states.size()); }
  int n_actions() const { return static_cast<int>(actions.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Row-stochastic matrices with exact entries.
using StochasticMatrix = std::vector<std::vector<Rational>>;
void check_stochastic(const StochasticMatrix& m, int rows, int cols,
                      const std::string& what);

// sigma*: Omega -> Delta(M) and tau*: M -> Delta(A).
struct DirectStrategyPair {
  StochasticMatrix sender;    // [state][message]
  StochasticMatrix receiver;  // [message][action]
  int n_messages() const {
    return sender.empty() ? 0 : static_cast<int>(sender[0].size());
  }
};

// Canonical communication device phi: Omega -> Delta(A).
using CommDevice = StochasticMatrix;

struct IncentiveViolation {
  std::string constraint;  // human-readable inequality with exact values
};

struct EquilibriumReport {
  bool ok = false;
  std::optional<IncentiveViolation> violation;
  std::vector<std::string> inequalities;  // every checked inequality + slack
  // filled by verify_comm_eq:
  std::vector<std::pair<std::string, std::vector<Rational>>> posteriors;
  Rational receiver_payoff;
  Rational sender_payoff;
  std::vector<Rational> sender_payoff_by_state;
};

// Exact best-response checks of (sigma*, tau*) in the direct game; reports
// the first violated inequality.
EquilibriumReport verify_direct_nash(const FiniteGame& g,
                                     const DirectStrategyPair& pair);

// Truthfulness and obedience of the canonical device phi, with posteriors
// and expected payoffs; all arithmetic exact.
EquilibriumReport verify_comm_eq(const FiniteGame& g, const CommDevice& phi);

// Weights over A x Omega; exact rationals.
struct OutcomeDistribution {
  std::vector<std::vector<Rational>> weight;  // [state][action]

  static OutcomeDistribution zeros(int n_states, int n_actions);
  Rational total() const;
  OutcomeDistribution normalized() const;  // throws on zero total
};

// Counts (action, state) outcomes of runs; throws std::domain_error on an
// empty run list.
OutcomeDistribution empirical_distribution(
    const std::vector<std::pair<int, int>>& state_action_runs, int n_states,
    int n_actions);

// Total-variation distance of two normalized distributions, exact.
Rational tv_distance(const OutcomeDistribution& a,
                     const OutcomeDistribution& b);

// nu (x) phi: the outcome law of an obedient mediated play.
OutcomeDistribution device_outcome_law(const FiniteGame& g,
                                       const CommDevice& phi);
// Outcome law of the direct pair: sum_m sigma(m|w) tau(a|m).
OutcomeDistribution direct_outcome_law(const FiniteGame& g,
                                       const DirectStrategyPair& pair);

int best_reply_to_prior(const FiniteGame& g);  // ties by action order

struct RobustCheckConfig {
  Scope scope = Scope::kSigma;
  bool exhaustive_templates = true;  // template sweep per (state, message)
  long randomized_schedules = 0;     // extra random schedules per pair
  std::uint64_t seed = 1;
};

struct RobustCheckReport {
  bool ok = false;
  std::string refusal;  // non-empty when the precondition fails
  long runs = 0;
  long failures = 0;
  OutcomeDistribution outcome_law;  // exact mu implied by decode correctness
  std::vector<std::string> detail;
};

// Composition of the transmission protocol with (sigma*, tau*): the sender
// draws m ~ sigma*(.|w), the circle transmits it, the receiver plays
// tau*(.|m) on decode. For every swept schedule the decode must equal the
// drawn message, which makes the conditional action law exactly tau*(.|m).
// Refused (report.refusal) when the network has no two disjoint paths.
RobustCheckReport robust_implementation_check(const FiniteGame& g,
                                              const DirectStrategyPair& pair,
                                              const Network& net,
                                              const RobustCheckConfig& cfg);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_GAMES_HPP_
