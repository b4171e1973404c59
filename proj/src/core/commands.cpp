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

#include <cmath>
#include <stdexcept>

#include "core/rng.hpp"
#include "core/scenario.hpp"
#include "json.hpp"

namespace robustcomm {

using nlohmann::json;

namespace {

struct Expect {
  const std::map<std::string, std::string>* table;
  std::vector<std::string> mismatches;

  void check(const std::string& key, const std::string& got) {
    auto it = table->find(key);
    if (it == table->end()) return;
    if (it->second != got)
      mismatches.push_back("expect " + key + ": want '" + it->second +
                           "', got '" + got + "'");
  }
  bool ok() const { return mismatches.empty(); }
};

CommandResult pack(int status, json& summary, std::vector<std::string> text,
                   Expect* ex = nullptr, std::string trace = "") {
  if (ex && !ex->ok()) {
    status = std::max(status, 1);
    for (const auto& m : ex->mismatches) text.push_back(m);
    summary["expect_ok"] = false;
  } else if (ex) {
    summary["expect_ok"] = true;
  }
  summary["status"] = status;
  summary["text"] = text;
  CommandResult r;
  r.status = status;
  r.summary_json = summary.dump(2);
  r.trace_text = std::move(trace);
  return r;
}

CommandResult input_error(const std::string& command, const std::string& what) {
  json summary;
  summary["command"] = command;
  std::vector<std::string> text{"input error: " + what};
  return pack(2, summary, text);
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

AdversaryPlan plan_from_scenario(const Scenario& sc) {
  if (sc.script.empty()) return AdversaryPlan::honest(sc.scope);
  ScriptedAdversary scripted(sc.script, sc.scope, sc.script_multilateral);
  return AdversaryPlan::from_script(scripted);
}

}  // namespace

CommandResult cmd_check_paths(const Scenario& sc) {
  json summary;
  summary["command"] = "check-paths";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;
  auto circle = two_disjoint_paths(sc.net);
  summary["circle_exists"] = circle.has_value();
  ex.check("circle_exists", bool_str(circle.has_value()));
  int status = 0;
  if (circle) {
    auto cfg = build_schedule(circle->n_circle());
    auto path_names = [&](const std::vector<NodeId>& p) {
      json arr = json::array();
      for (NodeId v : p) arr.push_back(sc.net.name(v));
      return arr;
    };
    summary["left"] = path_names(circle->left);
    summary["right"] = path_names(circle->right);
    summary["n_circle"] = circle->n_circle();
    summary["block_length"] = cfg.block_length;
    summary["num_blocks"] = cfg.num_blocks;
    summary["t"] = cfg.total_stages;
    summary["l"] = cfg.max_other_triplets;
    std::string lp, rp;
    for (NodeId v : circle->left) lp += (lp.empty() ? "" : "-") + sc.net.name(v);
    for (NodeId v : circle->right)
      rp += (rp.empty() ? "" : "-") + sc.net.name(v);
    text.push_back("circle found: left " + lp + ", right " + rp);
    text.push_back("n_circle=" + std::to_string(circle->n_circle()) +
                   " blocks=" + std::to_string(cfg.num_blocks) + "x" +
                   std::to_string(cfg.block_length) +
                   " T=" + std::to_string(cfg.total_stages) +
                   " L=" + std::to_string(cfg.max_other_triplets));
    ex.check("n_circle", std::to_string(circle->n_circle()));
    ex.check("t", std::to_string(cfg.total_stages));
  } else {
    auto cut = find_cut_vertex(sc.net);
    status = 1;
    if (cut) {
      summary["cut_vertex"] = sc.net.name(*cut);
      text.push_back("no two disjoint paths; cut vertex: " +
                     sc.net.name(*cut));
      ex.check("cut_vertex", sc.net.name(*cut));
    } else {
      text.push_back("no two disjoint paths (receiver unreachable)");
    }
  }
  return pack(status, summary, text, &ex);
}

CommandResult cmd_simulate(const Scenario& sc) {
  if (sc.alphabet.empty()) return input_error("simulate", "alphabet missing");
  if (!sc.message) return input_error("simulate", "message missing");
  auto circle = two_disjoint_paths(sc.net);
  if (!circle)
    return input_error("simulate", "network has no two disjoint paths");
  json summary;
  summary["command"] = "simulate";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;

  auto cfg = build_schedule(circle->n_circle());
  RunConfig rc;
  rc.key_mode = sc.key_mode;
  rc.seed = sc.seed;
  rc.capture_trace = true;
  AdversaryPlan plan;
  try {
    plan = plan_from_scenario(sc);
  } catch (const std::invalid_argument& e) {
    return input_error("simulate", e.what());
  }
  auto out = run_protocol(sc.net, *circle, cfg, plan,
                          Content::symbol(*sc.message),
                          static_cast<int>(sc.alphabet.size()), rc);
  std::string decoded =
      out.report.decoded ? content_str(*out.report.decoded, sc.alphabet)
                         : "undecided";
  summary["decoded"] = decoded;
  summary["learn_stage"] = out.report.stage_receiver_learn;
  summary["broadcasts"] = out.report.broadcast_count;
  summary["lemma1_ok"] = out.report.lemma1_ok;
  summary["lemma2_ok"] = out.report.lemma2_ok;
  summary["t"] = cfg.total_stages;
  text.push_back("decoded=" + decoded +
                 " stage=" + std::to_string(out.report.stage_receiver_learn));
  text.push_back("broadcasts=" + std::to_string(out.report.broadcast_count) +
                 " T=" + std::to_string(cfg.total_stages));
  ex.check("decoded", decoded);
  ex.check("learn_stage", std::to_string(out.report.stage_receiver_learn));
  int status = 0;
  return pack(status, summary, text, &ex, out.trace.text());
}

CommandResult cmd_sweep(const Scenario& sc) {
  if (sc.alphabet.empty()) return input_error("sweep", "alphabet missing");
  if (sc.key_mode != KeyMode::kSymbolic)
    return input_error("sweep",
                       "action enumeration needs symbolic keys; numeric mode "
                       "is unsupported here");
  auto circle = two_disjoint_paths(sc.net);
  if (!circle) return input_error("sweep", "network has no two disjoint paths");
  json summary;
  summary["command"] = "sweep";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;

  auto cfg = build_schedule(circle->n_circle());
  SweepConfig swc;
  swc.scope = sc.scope;
  swc.mode = sc.sweep_mode;
  swc.samples = sc.samples;
  swc.max_combo_events = sc.combo_events;
  swc.seed = sc.seed;
  auto sum = sweep_reliability(sc.net, *circle, cfg,
                               static_cast<int>(sc.alphabet.size()), swc);
  if (sum.refused) {
    summary["refused"] = true;
    summary["reason"] = sum.refusal_reason;
    text.push_back("refused: " + sum.refusal_reason);
    ex.check("refused", "true");
    return pack(ex.ok() ? 2 : 2, summary, text, &ex);
  }
  summary["seed"] = sc.seed;
  summary["runs"] = sum.runs;
  summary["failures"] = sum.failures;
  summary["schedules"] = sum.schedules_swept;
  summary["templates"] = sum.templates;
  summary["combo_runs"] = sum.combo_runs;
  summary["lemma1_checked"] = sum.lemma1_checked;
  summary["lemma1_violations"] = sum.lemma1_violations;
  summary["lemma2_checked"] = sum.lemma2_checked;
  summary["lemma2_violations"] = sum.lemma2_violations;
  text.push_back("runs=" + std::to_string(sum.runs) +
                 " failures=" + std::to_string(sum.failures));
  text.push_back("lemma1 " + std::to_string(sum.lemma1_violations) + "/" +
                 std::to_string(sum.lemma1_checked) + " violations, lemma2 " +
                 std::to_string(sum.lemma2_violations) + "/" +
                 std::to_string(sum.lemma2_checked));
  for (const auto& f : sum.failure_samples) {
    std::string line = "failure: m=" + f.message + " decoded=" + f.decoded +
                       " schedule=";
    for (const auto& [t, n] : f.schedule)
      line += "(" + std::to_string(t) + "," + n + ")";
    text.push_back(line);
  }
  ex.check("failures", std::to_string(sum.failures));
  int status = (sum.failures == 0 && sum.lemma1_violations == 0 &&
                sum.lemma2_violations == 0)
                   ? 0
                   : 1;
  return pack(status, summary, text, &ex);
}

CommandResult cmd_mediated(const Scenario& sc) {
  if (!sc.game) return input_error("mediated", "game section missing");
  if (!sc.device) return input_error("mediated", "device missing");
  json summary;
  summary["command"] = "mediated";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;
  const FiniteGame& g = *sc.game;

  MediatedConfig mc;
  mc.seed = sc.seed;
  mc.key_mode = sc.key_mode;
  int violations = 0;
  std::string trace;

  if (sc.mediated_runs <= 1) {
    mc.capture_trace = true;
    auto r = run_mediated(g, *sc.device, sc.net, sc.mediated_deviations, mc);
    char hex[24];
    summary["state"] = g.states[r.state];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(r.x));
    summary["x"] = hex;
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(r.y));
    summary["y"] = hex;
    summary["action"] = g.actions[r.receiver_action];
    summary["honest_recommendation"] = g.actions[r.honest_recommendation];
    summary["majority"] = r.majority.has_value();
    summary["receiver_ignorance_ok"] = r.receiver_ignorance_ok;
    summary["copies_synchronized"] = r.copies_synchronized;
    summary["total_stages"] = r.total_stages;
    text.push_back("state=" + g.states[r.state] +
                   " action=" + g.actions[r.receiver_action] +
                   " honest_rec=" + g.actions[r.honest_recommendation]);
    std::string copies = "copies=";
    for (int c = 0; c < 3; ++c) {
      if (c) copies += ",";
      copies += r.copy_decodes[c] ? g.actions[*r.copy_decodes[c]] : "undecided";
    }
    text.push_back(copies + " stages=" + std::to_string(r.total_stages));
    ex.check("action", g.actions[r.receiver_action]);
    if (!r.receiver_ignorance_ok || !r.copies_synchronized) violations++;
    for (const auto& l : r.trace_lines) trace += l + "\n";
  } else {
    std::vector<std::pair<int, int>> outcomes;
    Rational sender_sum, receiver_sum;
    for (long i = 0; i < sc.mediated_runs; ++i) {
      MediatedConfig mci = mc;
      mci.seed = Rng::derive(sc.seed, i);
      auto r = run_mediated(g, *sc.device, sc.net, sc.mediated_deviations, mci);
      outcomes.emplace_back(r.state, r.receiver_action);
      sender_sum += g.u_sender[r.state][r.receiver_action];
      receiver_sum += g.u_receiver[r.state][r.receiver_action];
      if (!r.receiver_ignorance_ok || !r.copies_synchronized) violations++;
    }
    auto emp = empirical_distribution(outcomes, g.n_states(), g.n_actions());
    auto target = device_outcome_law(g, *sc.device);
    Rational tv = tv_distance(emp, target);
    Rational n(sc.mediated_runs);
    summary["runs"] = sc.mediated_runs;
    summary["seed"] = sc.seed;
    summary["tv"] = tv.to_double();
    summary["sender_mean"] = (sender_sum / n).to_double();
    summary["receiver_mean"] = (receiver_sum / n).to_double();
    text.push_back("runs=" + std::to_string(sc.mediated_runs) +
                   " tv=" + std::to_string(tv.to_double()));
    text.push_back("sender_mean=" +
                   std::to_string((sender_sum / n).to_double()) +
                   " receiver_mean=" +
                   std::to_string((receiver_sum / n).to_double()));
    auto it = sc.expect.find("tv_le");
    if (it != sc.expect.end() && tv.to_double() > std::stod(it->second))
      ex.mismatches.push_back("expect tv_le " + it->second + ", got " +
                              std::to_string(tv.to_double()));
  }
  summary["invariant_violations"] = violations;
  int status = violations == 0 ? 0 : 1;
  return pack(status, summary, text, &ex, trace);
}

CommandResult cmd_verify_eq(const Scenario& sc) {
  if (!sc.game) return input_error("verify-eq", "game section missing");
  json summary;
  summary["command"] = "verify-eq";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;
  const FiniteGame& g = *sc.game;
  bool any_violation = false;
  bool checked = false;

  if (sc.device) {
    checked = true;
    auto rep = verify_comm_eq(g, *sc.device);
    summary["device_ok"] = rep.ok;
    summary["receiver_payoff"] = rep.receiver_payoff.str();
    summary["sender_payoff"] = rep.sender_payoff.str();
    json posts = json::object();
    for (const auto& [a, post] : rep.posteriors) {
      json row = json::array();
      for (const auto& p : post) row.push_back(p.str());
      posts[a] = row;
    }
    summary["posteriors"] = posts;
    if (rep.ok) {
      text.push_back("device OK; receiver payoff " +
                     rep.receiver_payoff.str() + ", sender payoff " +
                     rep.sender_payoff.str());
    } else {
      text.push_back("device REJECTED: " + rep.violation->constraint);
      any_violation = true;
    }
    for (const auto& [a, post] : rep.posteriors) {
      std::string line = "posterior after " + a + ":";
      for (std::size_t w = 0; w < post.size(); ++w)
        line += " " + g.states[w] + "=" + post[w].str();
      text.push_back(line);
    }
    for (const auto& l : rep.inequalities) text.push_back("  " + l);
    ex.check("device_ok", bool_str(rep.ok));
    ex.check("receiver_payoff", rep.receiver_payoff.str());
    if (!rep.posteriors.empty())
      for (const auto& [a, post] : rep.posteriors)
        ex.check("posterior_" + a + "_" + g.states[0], post[0].str());
  }
  if (sc.strategies) {
    checked = true;
    auto rep = verify_direct_nash(g, *sc.strategies);
    summary["nash_ok"] = rep.ok;
    if (rep.ok) {
      text.push_back("direct pair OK (Nash)");
    } else {
      text.push_back("direct pair REJECTED: " + rep.violation->constraint);
      any_violation = true;
    }
    for (const auto& l : rep.inequalities) text.push_back("  " + l);
    ex.check("nash_ok", bool_str(rep.ok));
  }
  if (!checked)
    return input_error("verify-eq", "nothing to verify: no device/strategies");
  int status = any_violation && sc.expect.empty() ? 1 : 0;
  return pack(status, summary, text, &ex);
}

CommandResult cmd_demo_majority(const Scenario& sc) {
  json summary;
  summary["command"] = "demo-majority";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;
  MajorityExhibit exh;
  try {
    exh = naive_majority_demo(sc.net, sc.alphabet);
  } catch (const std::invalid_argument& e) {
    return input_error("demo-majority", e.what());
  }
  summary["identical_views"] = exh.identical;
  summary["true_a"] = exh.true_a;
  summary["true_b"] = exh.true_b;
  summary["view"] = exh.view_a;
  text.push_back("run A: true message " + exh.true_a);
  for (const auto& l : exh.trace_a) text.push_back("  " + l);
  text.push_back("run B: true message " + exh.true_b);
  for (const auto& l : exh.trace_b) text.push_back("  " + l);
  text.push_back("receiver views " +
                 std::string(exh.identical ? "IDENTICAL" : "differ") +
                 " though the true messages differ");
  for (const auto& l : exh.view_a) text.push_back("  " + l);
  ex.check("identical_views", bool_str(exh.identical));
  return pack(0, summary, text, &ex);
}

CommandResult cmd_robust_check(const Scenario& sc) {
  if (!sc.game) return input_error("robust-check", "game section missing");
  if (!sc.strategies)
    return input_error("robust-check", "strategy pair missing");
  json summary;
  summary["command"] = "robust-check";
  Expect ex{&sc.expect, {}};
  std::vector<std::string> text;
  RobustCheckConfig rcc;
  rcc.scope = Scope::kSigma;
  rcc.seed = sc.seed;
  rcc.exhaustive_templates = sc.sweep_mode == SweepConfig::Mode::kExhaustive;
  rcc.randomized_schedules = sc.samples;
  auto rep = robust_implementation_check(*sc.game, *sc.strategies, sc.net, rcc);
  if (!rep.refusal.empty()) {
    summary["refused"] = true;
    summary["reason"] = rep.refusal;
    text.push_back("refused: " + rep.refusal);
    ex.check("refused", "true");
    return pack(ex.ok() ? 1 : 1, summary, text, &ex);
  }
  summary["runs"] = rep.runs;
  summary["failures"] = rep.failures;
  json law = json::array();
  for (int w = 0; w < sc.game->n_states(); ++w) {
    json row = json::array();
    for (int a = 0; a < sc.game->n_actions(); ++a)
      row.push_back(rep.outcome_law.weight[w][a].str());
    law.push_back(row);
  }
  summary["outcome_law"] = law;
  text.push_back("runs=" + std::to_string(rep.runs) +
                 " failures=" + std::to_string(rep.failures));
  for (const auto& d : rep.detail) text.push_back("  " + d);
  ex.check("failures", std::to_string(rep.failures));
  return pack(rep.ok ? 0 : 1, summary, text, &ex);
}

}  // namespace robustcomm
