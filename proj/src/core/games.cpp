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

#include "core/games.hpp"

#include <stdexcept>

namespace robustcomm {

void FiniteGame::validate() const {
  if (states.empty() || actions.empty())
    throw std::invalid_argument("game needs states and actions");
  if (static_cast<int>(prior.size()) != n_states())
    throw std::invalid_argument("prior size mismatch");
  Rational sum;
  for (const auto& p : prior) {
    if (p < Rational(0)) throw std::invalid_argument("negative prior");
    sum += p;
  }
  if (!(sum == Rational(1)))
    throw std::invalid_argument("prior must sum to 1 exactly");
  auto check_table = [&](const std::vector<std::vector<Rational>>& t,
                         const char* what) {
    if (static_cast<int>(t.size()) != n_states())
      throw std::invalid_argument(std::string(what) + " rows mismatch");
    for (const auto& row : t)
      if (static_cast<int>(row.size()) != n_actions())
        throw std::invalid_argument(std::string(what) + " cols mismatch");
  };
  check_table(u_sender, "sender payoff table");
  check_table(u_receiver, "receiver payoff table");
}

void check_stochastic(const StochasticMatrix& m, int rows, int cols,
                      const std::string& what) {
  if (static_cast<int>(m.size()) != rows)
    throw std::invalid_argument(what + ": row count mismatch");
  for (const auto& row : m) {
    if (static_cast<int>(row.size()) != cols)
      throw std::invalid_argument(what + ": column count mismatch");
    Rational sum;
    for (const auto& x : row) {
      if (x < Rational(0)) throw std::invalid_argument(what + ": negative entry");
      sum += x;
    }
    if (!(sum == Rational(1)))
      throw std::invalid_argument(what + ": row does not sum to 1");
  }
}

namespace {

std::string ineq(const std::string& lhs_desc, const Rational& lhs,
                 const std::string& rhs_desc, const Rational& rhs) {
  return lhs_desc + " = " + lhs.str() + " >= " + rhs_desc + " = " + rhs.str() +
         "  (slack " + (lhs - rhs).str() + ")";
}

}  // namespace

EquilibriumReport verify_direct_nash(const FiniteGame& g,
                                     const DirectStrategyPair& pair) {
  g.validate();
  int nm = pair.n_messages();
  check_stochastic(pair.sender, g.n_states(), nm, "sender strategy");
  check_stochastic(pair.receiver, nm, g.n_actions(), "receiver strategy");
  EquilibriumReport rep;

  // Sender: every message in the support of sigma*(.|w) maximizes the
  // induced payoff sum_a tau*(a|m) u_S(a,w).
  std::vector<std::vector<Rational>> value(g.n_states());
  for (int w = 0; w < g.n_states(); ++w) {
    value[w].resize(nm);
    for (int m = 0; m < nm; ++m) {
      Rational v;
      for (int a = 0; a < g.n_actions(); ++a)
        v += pair.receiver[m][a] * g.u_sender[w][a];
      value[w][m] = v;
    }
  }
  for (int w = 0; w < g.n_states(); ++w) {
    if (g.prior[w].is_zero()) continue;
    for (int m = 0; m < nm; ++m) {
      if (pair.sender[w][m].is_zero()) continue;
      for (int m2 = 0; m2 < nm; ++m2) {
        std::string line =
            ineq("u_S(" + g.states[w] + ", msg " + std::to_string(m) + ")",
                 value[w][m], "u_S(msg " + std::to_string(m2) + ")",
                 value[w][m2]);
        rep.inequalities.push_back(line);
        if (value[w][m] < value[w][m2] && !rep.violation) {
          rep.violation = IncentiveViolation{
              "sender at " + g.states[w] + " gains " +
              (value[w][m2] - value[w][m]).str() + " by sending message " +
              std::to_string(m2) + " instead of " + std::to_string(m)};
        }
      }
    }
  }

  // Receiver: every on-path message's supported actions maximize the
  // posterior-expected payoff.
  for (int m = 0; m < nm; ++m) {
    Rational mass;
    std::vector<Rational> joint(g.n_states());
    for (int w = 0; w < g.n_states(); ++w) {
      joint[w] = g.prior[w] * pair.sender[w][m];
      mass += joint[w];
    }
    if (mass.is_zero()) continue;  // off-path message, unconstrained
    std::vector<Rational> exp_u(g.n_actions());
    for (int a = 0; a < g.n_actions(); ++a)
      for (int w = 0; w < g.n_states(); ++w)
        exp_u[a] += joint[w] * g.u_receiver[w][a];
    for (int a = 0; a < g.n_actions(); ++a) {
      if (pair.receiver[m][a].is_zero()) continue;
      for (int a2 = 0; a2 < g.n_actions(); ++a2) {
        rep.inequalities.push_back(
            ineq("u_R(msg " + std::to_string(m) + ", " + g.actions[a] + ")",
                 exp_u[a] / mass, "u_R(" + g.actions[a2] + ")",
                 exp_u[a2] / mass));
        if (exp_u[a] < exp_u[a2] && !rep.violation) {
          rep.violation = IncentiveViolation{
              "receiver after message " + std::to_string(m) + " prefers " +
              g.actions[a2] + " over " + g.actions[a] + " by " +
              ((exp_u[a2] - exp_u[a]) / mass).str()};
        }
      }
    }
  }
  rep.ok = !rep.violation.has_value();
  return rep;
}

EquilibriumReport verify_comm_eq(const FiniteGame& g, const CommDevice& phi) {
  g.validate();
  check_stochastic(phi, g.n_states(), g.n_actions(), "device");
  EquilibriumReport rep;

  // Truthfulness: reporting the true state is optimal.
  std::vector<std::vector<Rational>> report_value(g.n_states());
  for (int w = 0; w < g.n_states(); ++w) {
    report_value[w].resize(g.n_states());
    for (int r = 0; r < g.n_states(); ++r) {
      Rational v;
      for (int a = 0; a < g.n_actions(); ++a)
        v += phi[r][a] * g.u_sender[w][a];
      report_value[w][r] = v;
    }
  }
  for (int w = 0; w < g.n_states(); ++w) {
    for (int r = 0; r < g.n_states(); ++r) {
      if (r == w) continue;
      rep.inequalities.push_back(
          ineq("truthfulness u_S(" + g.states[w] + " | report " +
                   g.states[w] + ")",
               report_value[w][w],
               "u_S(" + g.states[w] + " | report " + g.states[r] + ")",
               report_value[w][r]));
      if (report_value[w][w] < report_value[w][r] && !rep.violation) {
        rep.violation = IncentiveViolation{
            "truthfulness violated at " + g.states[w] + ": reporting " +
            g.states[r] + " gains " +
            (report_value[w][r] - report_value[w][w]).str()};
      }
    }
  }

  // Obedience: every on-path recommendation maximizes the posterior-expected
  // receiver payoff.
  for (int a = 0; a < g.n_actions(); ++a) {
    Rational mass;
    std::vector<Rational> joint(g.n_states());
    for (int w = 0; w < g.n_states(); ++w) {
      joint[w] = g.prior[w] * phi[w][a];
      mass += joint[w];
    }
    if (mass.is_zero()) continue;
    std::vector<Rational> posterior(g.n_states());
    for (int w = 0; w < g.n_states(); ++w) posterior[w] = joint[w] / mass;
    rep.posteriors.emplace_back(g.actions[a], posterior);
    std::vector<Rational> exp_u(g.n_actions());
    for (int a2 = 0; a2 < g.n_actions(); ++a2)
      for (int w = 0; w < g.n_states(); ++w)
        exp_u[a2] += posterior[w] * g.u_receiver[w][a2];
    for (int a2 = 0; a2 < g.n_actions(); ++a2) {
      if (a2 == a) continue;
      rep.inequalities.push_back(
          ineq("obedience u_R(follow " + g.actions[a] + ")", exp_u[a],
               "u_R(play " + g.actions[a2] + ")", exp_u[a2]));
      if (exp_u[a] < exp_u[a2] && !rep.violation) {
        rep.violation = IncentiveViolation{
            "obedience violated at recommendation " + g.actions[a] +
            ": playing " + g.actions[a2] + " gains " +
            (exp_u[a2] - exp_u[a]).str()};
      }
    }
  }

  rep.sender_payoff_by_state.resize(g.n_states());
  for (int w = 0; w < g.n_states(); ++w) {
    for (int a = 0; a < g.n_actions(); ++a) {
      rep.receiver_payoff += g.prior[w] * phi[w][a] * g.u_receiver[w][a];
      rep.sender_payoff += g.prior[w] * phi[w][a] * g.u_sender[w][a];
      rep.sender_payoff_by_state[w] += phi[w][a] * g.u_sender[w][a];
    }
  }
  rep.ok = !rep.violation.has_value();
  return rep;
}

OutcomeDistribution OutcomeDistribution::zeros(int n_states, int n_actions) {
  OutcomeDistribution d;
  d.weight.assign(n_states, std::vector<Rational>(n_actions));
  return d;
}

Rational OutcomeDistribution::total() const {
  Rational t;
  for (const auto& row : weight)
    for (const auto& x : row) t += x;
  return t;
}

OutcomeDistribution OutcomeDistribution::normalized() const {
  Rational t = total();
  if (t.is_zero()) throw std::domain_error("empty distribution");
  OutcomeDistribution d = *this;
  for (auto& row : d.weight)
    for (auto& x : row) x = x / t;
  return d;
}

OutcomeDistribution empirical_distribution(
    const std::vector<std::pair<int, int>>& state_action_runs, int n_states,
    int n_actions) {
  if (state_action_runs.empty())
    throw std::domain_error("no runs to count");
  auto d = OutcomeDistribution::zeros(n_states, n_actions);
  for (const auto& [w, a] : state_action_runs) {
    if (w < 0 || w >= n_states || a < 0 || a >= n_actions)
      throw std::domain_error("outcome outside the game");
    d.weight[w][a] += Rational(1);
  }
  return d;
}

Rational tv_distance(const OutcomeDistribution& a,
                     const OutcomeDistribution& b) {
  auto an = a.normalized();
  auto bn = b.normalized();
  if (an.weight.size() != bn.weight.size())
    throw std::domain_error("distribution shape mismatch");
  Rational sum;
  for (std::size_t w = 0; w < an.weight.size(); ++w) {
    if (an.weight[w].size() != bn.weight[w].size())
      throw std::domain_error("distribution shape mismatch");
    for (std::size_t x = 0; x < an.weight[w].size(); ++x)
      sum += (an.weight[w][x] - bn.weight[w][x]).abs();
  }
  return sum / Rational(2);
}

OutcomeDistribution device_outcome_law(const FiniteGame& g,
                                       const CommDevice& phi) {
  auto d = OutcomeDistribution::zeros(g.n_states(), g.n_actions());
  for (int w = 0; w < g.n_states(); ++w)
    for (int a = 0; a < g.n_actions(); ++a)
      d.weight[w][a] = g.prior[w] * phi[w][a];
  return d;
}

OutcomeDistribution direct_outcome_law(const FiniteGame& g,
                                       const DirectStrategyPair& pair) {
  auto d = OutcomeDistribution::zeros(g.n_states(), g.n_actions());
  for (int w = 0; w < g.n_states(); ++w)
    for (int m = 0; m < pair.n_messages(); ++m)
      for (int a = 0; a < g.n_actions(); ++a)
        d.weight[w][a] += g.prior[w] * pair.sender[w][m] * pair.receiver[m][a];
  return d;
}

int best_reply_to_prior(const FiniteGame& g) {
  int best = 0;
  Rational best_u;
  for (int a = 0; a < g.n_actions(); ++a) {
    Rational u;
    for (int w = 0; w < g.n_states(); ++w)
      u += g.prior[w] * g.u_receiver[w][a];
    if (a == 0 || best_u < u) {
      best = a;
      best_u = u;
    }
  }
  return best;
}

RobustCheckReport robust_implementation_check(const FiniteGame& g,
                                              const DirectStrategyPair& pair,
                                              const Network& net,
                                              const RobustCheckConfig& rcc) {
  g.validate();
  int nm = pair.n_messages();
  check_stochastic(pair.sender, g.n_states(), nm, "sender strategy");
  check_stochastic(pair.receiver, nm, g.n_actions(), "receiver strategy");
  RobustCheckReport rep;
  auto circle = two_disjoint_paths(net);
  if (!circle) {
    auto cut = find_cut_vertex(net);
    rep.refusal = "no two disjoint paths";
    if (cut) rep.refusal += "; cut vertex " + net.name(*cut);
    return rep;
  }
  auto cfg = build_schedule(circle->n_circle());

  // The transmitted alphabet is the message set of the direct game; a single
  // reliability sweep over it covers every on-path (state, message) pair,
  // because the run depends on the drawn message only.
  SweepConfig sc;
  sc.scope = rcc.scope;
  sc.seed = rcc.seed;
  sc.mode = rcc.exhaustive_templates ? SweepConfig::Mode::kExhaustive
                                     : SweepConfig::Mode::kRandomized;
  sc.samples = rcc.randomized_schedules > 0 ? rcc.randomized_schedules : 2000;
  sc.max_combo_events = 1;
  sc.refusal_limit = 5e7;
  SweepSummary s = sweep_reliability(net, *circle, cfg, nm, sc);
  if (s.refused) {
    sc.mode = SweepConfig::Mode::kRandomized;
    s = sweep_reliability(net, *circle, cfg, nm, sc);
  }
  rep.runs = s.runs;
  rep.failures = s.failures;
  for (int w = 0; w < g.n_states(); ++w) {
    if (g.prior[w].is_zero()) continue;
    for (int m = 0; m < nm; ++m) {
      if (pair.sender[w][m].is_zero()) continue;
      rep.detail.push_back(
          "state " + g.states[w] + ", message " + std::to_string(m) +
          ": decode exact under swept schedules, conditional action law = "
          "tau*(.|m)");
    }
  }

  rep.outcome_law = direct_outcome_law(g, pair);
  rep.ok = rep.failures == 0 && rep.refusal.empty();
  return rep;
}

}  // namespace robustcomm
