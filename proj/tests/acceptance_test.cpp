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

// Acceptance suite: one case per top-level claim, one printed verdict each.
// Tolerances and budgets are pinned here, in code.

#include <chrono>
#include <cstdio>
#include <filesystem>

#include "core/engine.hpp"
#include "core/games.hpp"
#include "core/mediated.hpp"
#include "core/rng.hpp"
#include "core/scenario.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace robustcomm;

namespace {

struct Verdict {
  const char* id;
  const char* what;
  bool pass = true;
  double seconds = 0;

  ~Verdict() {
    std::printf("ACCEPT %-3s %-58s %s (%.2fs)\n", id, what,
                pass ? "PASS" : "FAIL", seconds);
    std::fflush(stdout);
  }
  void note(bool ok) { pass = pass && ok; }
};

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

Network diamond() {
  return make_network({"S", "1", "2", "R"},
                      {{"S", "1"}, {"S", "2"}, {"1", "R"}, {"2", "R"}}, "S",
                      "R");
}

Network fig1() {
  return make_network({"S", "1", "2", "3", "4", "5", "6", "R"},
                      {{"S", "1"},
                       {"S", "2"},
                       {"S", "3"},
                       {"1", "4"},
                       {"2", "5"},
                       {"3", "6"},
                       {"4", "R"},
                       {"5", "R"},
                       {"6", "R"}},
                      "S", "R");
}

FiniteGame two_state_game() {
  FiniteGame g;
  g.states = {"w1", "w2"};
  g.actions = {"a", "b", "c"};
  g.prior = {Rational(1, 2), Rational(1, 2)};
  g.u_sender = {{2, 0, -1}, {1, 2, 0}};
  g.u_receiver = {{3, 2, 0}, {0, 2, 3}};
  return g;
}

CommDevice mixing_device() {
  return {{Rational(1, 2), Rational(1, 2), Rational(0)},
          {Rational(0), Rational(1), Rational(0)}};
}

}  // namespace

TEST_CASE("criterion 1: stage counts") {
  Verdict v{"1", "stage counts: diamond decodes at 6, grid within 28"};
  Timer timer;
  {
    auto net = diamond();
    auto cfg = build_schedule(4);
    RunConfig rc;
    rc.seed = 7;
    auto out = run_protocol(net, *two_disjoint_paths(net), cfg,
                            AdversaryPlan::honest(), Content::symbol(0), 2, rc);
    v.note(cfg.total_stages == 6);
    v.note(out.report.decoded && *out.report.decoded == Content::symbol(0));
    v.note(out.report.stage_receiver_learn == 6);
    CHECK(out.report.stage_receiver_learn == 6);
  }
  double diamond_time = timer.elapsed();
  {
    Timer t2;
    auto net = fig1();
    auto cfg = build_schedule(6);
    RunConfig rc;
    rc.seed = 7;
    auto out = run_protocol(net, *two_disjoint_paths(net), cfg,
                            AdversaryPlan::honest(), Content::symbol(0), 2, rc);
    v.note(cfg.total_stages == 28);
    v.note(out.report.decoded && *out.report.decoded == Content::symbol(0));
    v.note(out.report.stage_receiver_learn >= 1 &&
           out.report.stage_receiver_learn <= 28);
    CHECK(cfg.total_stages == 28);
    v.note(t2.elapsed() < 1.0);
  }
  v.note(diamond_time < 1.0);
  v.seconds = timer.elapsed();
  CHECK(v.pass);
}

// Shared by criteria 2 and 4.
static SweepSummary g_diamond_sweep;
static SweepSummary g_grid_sweep;

TEST_CASE("criterion 2: strong reliability, exhaustive on the diamond") {
  Verdict v{"2", "exhaustive diamond sweep (Sigma*, |M|=2, symbolic): 0 fail"};
  Timer timer;
  SweepConfig sc;
  sc.scope = Scope::kSigmaStar;
  sc.mode = SweepConfig::Mode::kExhaustive;
  sc.max_combo_events = 2;
  sc.seed = 7;
  auto net = diamond();
  g_diamond_sweep =
      sweep_reliability(net, *two_disjoint_paths(net), build_schedule(4), 2, sc);
  v.note(!g_diamond_sweep.refused);
  v.note(g_diamond_sweep.failures == 0);
  v.note(g_diamond_sweep.schedules_swept == 12500);  // 4 * 5^5 schedules
  v.note(g_diamond_sweep.runs > 1000000);
  v.seconds = timer.elapsed();
  v.note(v.seconds < 600.0);
  CHECK(g_diamond_sweep.failures == 0);
  CHECK_FALSE(g_diamond_sweep.refused);
  CHECK(v.pass);
}

TEST_CASE("criterion 3: strong reliability, randomized on the grid") {
  Verdict v{"3", "randomized grid sweep (Sigma, |M|=2, 10^4): 0 failures"};
  Timer timer;
  SweepConfig sc;
  sc.scope = Scope::kSigma;
  sc.mode = SweepConfig::Mode::kRandomized;
  sc.samples = 10000;
  sc.seed = 11;
  auto net = fig1();
  g_grid_sweep =
      sweep_reliability(net, *two_disjoint_paths(net), build_schedule(6), 2, sc);
  v.note(g_grid_sweep.runs == 10000);
  v.note(g_grid_sweep.failures == 0);
  v.seconds = timer.elapsed();
  v.note(v.seconds < 300.0);
  CHECK(g_grid_sweep.failures == 0);
  CHECK(v.pass);
}

TEST_CASE("criterion 4: lemma suites hold on every sweep trace") {
  Verdict v{"4", "lemmas 1-2 checked on every trace of criteria 2-3"};
  v.note(g_diamond_sweep.lemma1_checked == g_diamond_sweep.runs);
  v.note(g_diamond_sweep.lemma2_checked == g_diamond_sweep.runs);
  v.note(g_diamond_sweep.lemma1_violations == 0);
  v.note(g_diamond_sweep.lemma2_violations == 0);
  v.note(g_grid_sweep.lemma1_checked == g_grid_sweep.runs);
  v.note(g_grid_sweep.lemma2_checked == g_grid_sweep.runs);
  v.note(g_grid_sweep.lemma1_violations == 0);
  v.note(g_grid_sweep.lemma2_violations == 0);
  v.note(g_diamond_sweep.runs > 0 && g_grid_sweep.runs > 0);
  CHECK(v.pass);
}

TEST_CASE("criterion 5: necessity demos") {
  Verdict v{"5", "cut network forces a wrong decode; naive views collide"};
  Timer timer;
  {
    auto net =
        make_network({"S", "1", "R"}, {{"S", "1"}, {"1", "R"}}, "S", "R");
    NodeId n1 = *net.find("1"), s = *net.find("S"), r = *net.find("R");
    auto circle = forced_single_path_circle({s, n1, r});
    auto cfg = build_schedule_unchecked(3);
    std::vector<ScriptEntry> script;
    for (Stage t = 1; t <= cfg.total_stages; ++t) {
      ScriptEntry e;
      e.stage = t;
      e.node = n1;
      e.envelopes.push_back({{s, r}, 3, {}});  // simulate gamma throughout
      script.push_back(e);
    }
    RunConfig rc;
    rc.seed = 5;
    auto out = run_protocol(
        net, circle, cfg,
        AdversaryPlan::from_script(ScriptedAdversary(script, Scope::kSigma)),
        Content::symbol(0), 3, rc);
    v.note(out.report.decoded.has_value());
    v.note(out.report.decoded && *out.report.decoded == Content::symbol(2));
    CHECK(*out.report.decoded == Content::symbol(2));
  }
  {
    auto ex = naive_majority_demo(fig1(), {"alpha", "beta", "gamma"});
    v.note(ex.identical);
    v.note(ex.view_a == ex.view_b);
    v.note(ex.true_a != ex.true_b);
    CHECK(ex.identical);
  }
  v.seconds = timer.elapsed();
  CHECK(v.pass);
}

TEST_CASE("criterion 6: two-state equilibrium numbers, exact") {
  Verdict v{"6", "device accepted with payoff 9/4; revealing device rejected"};
  Timer timer;
  auto g = two_state_game();
  auto rep = verify_comm_eq(g, mixing_device());
  v.note(rep.ok);
  v.note(rep.receiver_payoff == Rational(9, 4));  // zero tolerance
  bool posterior_ok = false;
  for (const auto& [action, post] : rep.posteriors)
    if (action == "b" && post[0] == Rational(1, 3)) posterior_ok = true;
  v.note(posterior_ok);
  CHECK(rep.receiver_payoff == Rational(9, 4));

  CommDevice reveal = {{Rational(1), Rational(0), Rational(0)},
                       {Rational(0), Rational(0), Rational(1)}};
  auto bad = verify_comm_eq(g, reveal);
  v.note(!bad.ok);
  v.note(bad.violation &&
         bad.violation->constraint.find("truthfulness") != std::string::npos &&
         bad.violation->constraint.find("w2") != std::string::npos);
  CHECK_FALSE(bad.ok);
  v.seconds = timer.elapsed();
  CHECK(v.pass);
}

TEST_CASE("criterion 7: mediated distribution and deviation corpus") {
  Verdict v{"7", "10^5 mediated runs: TV<=0.02, payoffs within 0.02; corpus"};
  Timer timer;
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();

  const long kRuns = 100000;
  std::vector<std::pair<int, int>> outcomes;
  outcomes.reserve(kRuns);
  Rational sender_sum, receiver_sum;
  for (long i = 0; i < kRuns; ++i) {
    MediatedConfig mc;
    mc.seed = Rng::derive(2026, i);
    auto r = run_mediated(g, phi, net, {}, mc);
    outcomes.emplace_back(r.state, r.receiver_action);
    sender_sum += g.u_sender[r.state][r.receiver_action];
    receiver_sum += g.u_receiver[r.state][r.receiver_action];
    if (!r.receiver_ignorance_ok || !r.copies_synchronized) v.note(false);
  }
  auto emp = empirical_distribution(outcomes, g.n_states(), g.n_actions());
  Rational tv = tv_distance(emp, device_outcome_law(g, phi));
  Rational n(kRuns);
  Rational tol(1, 50);  // 0.02, exact
  v.note(tv <= tol);
  v.note((sender_sum / n - Rational(3, 2)).abs() <= tol);
  v.note((receiver_sum / n - Rational(9, 4)).abs() <= tol);
  CHECK(tv <= tol);
  CHECK((sender_sum / n - Rational(3, 2)).abs() <= tol);
  CHECK((receiver_sum / n - Rational(9, 4)).abs() <= tol);

  // 100 scripted unilateral phase-3 deviations; the majority must always
  // return the honest recommendation, exactly.
  int cases = 0, corpus_failures = 0;
  for (int node_idx = 0; node_idx < 4 && cases < 100; ++node_idx) {
    NodeId node = *net.find(std::vector<std::string>{"S", "1", "2",
                                                     "R"}[node_idx]);
    for (Stage t = 8; t <= 13 && cases < 100; ++t) {
      for (int behavior = 0; behavior < 4 && cases < 100; ++behavior) {
        MediatedDeviation d;
        d.stage = t;
        d.node = node;
        if (behavior == 3)
          d.mute = true;
        else
          d.action_content = behavior;
        MediatedConfig mc;
        mc.seed = Rng::derive(9999, cases);
        mc.forced_state = cases % 2;
        auto r = run_mediated(g, phi, net, {d}, mc);
        ++cases;
        if (!r.majority || *r.majority != r.honest_recommendation ||
            r.receiver_action != r.honest_recommendation)
          ++corpus_failures;
      }
    }
  }
  // top up to exactly 100 with double-content cases at the broadcast stage
  while (cases < 100) {
    MediatedDeviation d;
    d.stage = 8;
    d.node = *net.find("S");
    d.action_content = cases % 3;
    MediatedConfig mc;
    mc.seed = Rng::derive(31337, cases);
    auto r = run_mediated(g, phi, net, {d}, mc);
    ++cases;
    if (!r.majority || *r.majority != r.honest_recommendation)
      ++corpus_failures;
  }
  v.note(cases == 100);
  v.note(corpus_failures == 0);
  CHECK(corpus_failures == 0);
  v.seconds = timer.elapsed();
  v.note(v.seconds < 600.0);
  CHECK(v.pass);
}

TEST_CASE("criterion 8: lottery exactness on the grid") {
  Verdict v{"8", "JCL pushforward exact for 100 x values; wrap-add uniform"};
  Timer timer;
  // dyadic device rows: counting over the coarsened 2^16 grid is exact
  auto cells = build_partition({Rational(1, 2), Rational(1, 2), Rational(0)});
  auto cells2 =
      build_partition({Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    std::uint64_t x = rng.next_u64();
    long count[3] = {0, 0, 0};
    long count2[3] = {0, 0, 0};
    for (std::uint64_t j = 0; j < (1ULL << 16); ++j) {
      count[jcl_output({x}, {j << 48}, cells)] += 1;
      count2[jcl_output({x}, {j << 48}, cells2)] += 1;
    }
    for (int a = 0; a < 3; ++a) {
      v.note(count[a] == static_cast<long>(cells.width(a) >> 48));
      v.note(count2[a] == static_cast<long>(cells2.width(a) >> 48));
    }
  }
  // wrapping addition: associativity and grid-translation uniformity
  for (int i = 0; i < 1000; ++i) {
    UnitFraction a{rng.next_u64()}, b{rng.next_u64()}, c{rng.next_u64()};
    v.note(wrap_add(wrap_add(a, b), c).bits == wrap_add(a, wrap_add(b, c)).bits);
  }
  for (int trial = 0; trial < 5; ++trial) {
    std::uint64_t x = rng.next_u64();
    std::vector<int> bucket(1 << 16, 0);
    for (std::uint64_t j = 0; j < (1ULL << 16); ++j)
      bucket[(x + (j << 48)) >> 48] += 1;
    for (int b = 0; b < (1 << 16); ++b)
      if (bucket[b] != 1) v.note(false);
  }
  v.seconds = timer.elapsed();
  CHECK(v.pass);
}

TEST_CASE("criterion 9: determinism of traces") {
  Verdict v{"9", "equal seeds give byte-identical traces, every scenario"};
  Timer timer;
  namespace fs = std::filesystem;
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    auto sc = load_scenario_file(entry.path().string());
    auto cp = cmd_check_paths(sc);
    auto j = nlohmann::json::parse(cp.summary_json);
    if (!j["circle_exists"].get<bool>() || !sc.message) continue;
    auto a = cmd_simulate(sc);
    auto b = cmd_simulate(sc);
    v.note(!a.trace_text.empty());
    v.note(a.trace_text == b.trace_text);
    ++compared;
    if (sc.game && sc.device) {
      Scenario one = sc;
      one.mediated_runs = 1;
      auto ma = cmd_mediated(one);
      auto mb = cmd_mediated(one);
      v.note(ma.trace_text == mb.trace_text);
      v.note(!ma.trace_text.empty());
    }
  }
  // numeric key mode as well
  {
    auto sc = load_scenario_file(std::string(SCENARIO_DIR) + "/diamond.json");
    sc.key_mode = KeyMode::kNumeric;
    auto a = cmd_simulate(sc);
    auto b = cmd_simulate(sc);
    v.note(a.trace_text == b.trace_text);
  }
  v.note(compared >= 3);
  v.seconds = timer.elapsed();
  CHECK(v.pass);
}
