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

#include "core/engine.hpp"

#include <stdexcept>

#include "doctest.h"

using namespace robustcomm;

namespace {

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

RunConfig traced(std::uint64_t seed) {
  RunConfig rc;
  rc.seed = seed;
  rc.capture_trace = true;
  return rc;
}

}  // namespace

TEST_CASE("honest diamond run: six stages, decode at stage 6") {
  auto net = diamond();
  auto circle = *two_disjoint_paths(net);
  auto cfg = build_schedule(4);
  auto out = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                          Content::symbol(0), 2, traced(7));
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
  CHECK(out.report.stage_receiver_learn == 6);
  CHECK(out.report.lemma1_ok);
  CHECK(out.report.lemma2_ok);
  CHECK(out.report.broadcast_count == 24);  // 4 circle nodes x 6 stages
  CHECK(*assert_lemma1(out.trace));
  CHECK(*assert_lemma2(out.trace));
}

TEST_CASE("honest grid run: within 28 stages, over a hundred broadcasts") {
  auto net = fig1();
  auto circle = *two_disjoint_paths(net);
  auto cfg = build_schedule(6);
  CHECK(cfg.total_stages == 28);
  auto out = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                          Content::symbol(0), 2, traced(3));
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
  CHECK(out.report.stage_receiver_learn <= 28);
  CHECK(out.report.stage_receiver_learn == 19);  // honest runs finish a block early
  CHECK(out.report.broadcast_count >= 100);
  CHECK(out.report.broadcast_count == 168);
}

TEST_CASE("triple-beta attack still decodes alpha") {
  auto net = diamond();
  NodeId n1 = *net.find("1"), s = *net.find("S"), r = *net.find("R");
  std::vector<ScriptEntry> script;
  for (Stage t : {2, 3, 4}) {
    ScriptEntry e;
    e.stage = t;
    e.node = n1;
    ScriptEnvelope env;
    env.recipients = {s, r};
    env.content_code = 2;  // beta
    e.envelopes.push_back(env);
    script.push_back(e);
  }
  ScriptedAdversary adv(script, Scope::kSigma);
  auto out = run_protocol(net, *two_disjoint_paths(net), build_schedule(4),
                          AdversaryPlan::from_script(adv), Content::symbol(0),
                          2, traced(13));
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
  CHECK(*assert_lemma1(out.trace));
  CHECK(*assert_lemma2(out.trace));
}

TEST_CASE("token passing conspiracy blocks one window but not the block") {
  // S leaks node 1's stage-2 key to node 2 (stage 3, private babble), node 2
  // forges the matching report at stage 4. The window starting at stage 2 is
  // poisoned, the later windows carry the message through.
  auto net = diamond();
  NodeId n1 = *net.find("1"), n2 = *net.find("2"), s = *net.find("S"),
         r = *net.find("R");
  std::vector<ScriptEntry> script(2);
  script[0].stage = 3;
  script[0].node = s;
  {
    ScriptEnvelope pass;
    pass.recipients = {n2};
    pass.content_code = 0;
    ScriptTriplet t;
    t.subject = n1;
    t.stage = 2;
    t.key = {ScriptKeyRef::Kind::kObservedKey, n1, 2};
    pass.triplets.push_back(t);
    script[0].envelopes.push_back(pass);
  }
  script[1].stage = 4;
  script[1].node = n2;
  {
    ScriptEnvelope forge;
    forge.recipients = {s, r};
    forge.content_code = 1;  // keep broadcasting alpha
    ScriptTriplet t;
    t.subject = n1;
    t.stage = 2;
    t.key = {ScriptKeyRef::Kind::kReceivedTripletKey, n1, 2};
    forge.triplets.push_back(t);
    script[1].envelopes.push_back(forge);
  }
  ScriptedAdversary adv(script, Scope::kSigmaStar);
  auto out = run_protocol(net, *two_disjoint_paths(net), build_schedule(4),
                          AdversaryPlan::from_script(adv), Content::symbol(0),
                          2, traced(17));
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
  CHECK(*assert_lemma2(out.trace));
}

TEST_CASE("cut network: the single intermediary simulates a message") {
  auto net = make_network({"S", "1", "R"}, {{"S", "1"}, {"1", "R"}}, "S", "R");
  NodeId n1 = *net.find("1"), s = *net.find("S"), r = *net.find("R");
  auto circle = forced_single_path_circle({s, n1, r});
  auto cfg = build_schedule_unchecked(3);
  std::vector<ScriptEntry> script;
  for (Stage t = 1; t <= cfg.total_stages; ++t) {
    ScriptEntry e;
    e.stage = t;
    e.node = n1;
    ScriptEnvelope env;
    env.recipients = {s, r};
    env.content_code = 3;  // gamma, never sent by S
    e.envelopes.push_back(env);
    script.push_back(e);
  }
  ScriptedAdversary adv(script, Scope::kSigma);
  auto out = run_protocol(net, circle, cfg, AdversaryPlan::from_script(adv),
                          Content::symbol(0), 3, traced(5));
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(2));  // gamma: wrong decode
  CHECK_FALSE(*out.report.decoded == Content::symbol(0));
}

TEST_CASE("naive majority demo: identical receiver views") {
  auto ex = naive_majority_demo(fig1(), {"alpha", "beta", "gamma"});
  CHECK(ex.identical);
  CHECK(ex.view_a == ex.view_b);
  CHECK(ex.true_a == "alpha");
  CHECK(ex.true_b == "beta");
  REQUIRE(ex.view_a.size() == 3);
  // the receiver faces the profile (m', m'', m)
  CHECK(ex.view_a[0].find("beta") != std::string::npos);
  CHECK(ex.view_a[1].find("gamma") != std::string::npos);
  CHECK(ex.view_a[2].find("alpha") != std::string::npos);
  std::vector<std::string> three{"a", "b", "c"};
  std::vector<std::string> two{"a", "b"};
  auto dia = diamond();
  auto grid = fig1();
  CHECK_THROWS_AS(naive_majority_demo(dia, three), std::invalid_argument);
  CHECK_THROWS_AS(naive_majority_demo(grid, two), std::invalid_argument);
}

TEST_CASE("determinism: equal seeds give byte-identical traces") {
  auto net = fig1();
  auto circle = *two_disjoint_paths(net);
  auto cfg = build_schedule(6);
  auto a = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                        Content::symbol(1), 2, traced(1234));
  auto b = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                        Content::symbol(1), 2, traced(1234));
  CHECK(a.trace.text() == b.trace.text());
  auto c = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                        Content::symbol(1), 2, traced(1235));
  CHECK(a.trace.text() != c.trace.text());
}

TEST_CASE("babblers do not affect decoding") {
  auto net = fig1();
  auto circle = *two_disjoint_paths(net);
  auto cfg = build_schedule(6);
  RunConfig with = traced(21);
  RunConfig without = traced(21);
  without.emit_babble = false;
  auto a = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                        Content::symbol(0), 2, with);
  auto b = run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                        Content::symbol(0), 2, without);
  CHECK(a.report.decoded == b.report.decoded);
  CHECK(a.report.stage_receiver_learn == b.report.stage_receiver_learn);
  REQUIRE(a.trace.learns.size() == b.trace.learns.size());
  for (std::size_t i = 0; i < a.trace.learns.size(); ++i) {
    CHECK(a.trace.learns[i].node == b.trace.learns[i].node);
    CHECK(a.trace.learns[i].block == b.trace.learns[i].block);
  }
}

TEST_CASE("schedule rejection and lemma preconditions") {
  auto net = diamond();
  auto circle = *two_disjoint_paths(net);
  auto cfg = build_schedule(4);
  AdversaryPlan plan;
  plan.scope = Scope::kSigmaStar;
  AdversaryPlan::Event ev;
  ev.stage = 1;
  ev.node = net.sender;
  ev.kind = AdversaryPlan::Event::Kind::kEnum;
  plan.events.push_back(ev);
  CHECK_THROWS_AS(run_protocol(net, circle, cfg, plan, Content::symbol(0), 2,
                               traced(1)),
                  std::invalid_argument);

  // crafted two-deviator trace: engine runs it, lemma checks are skipped
  NodeId n1 = *net.find("1"), n2 = *net.find("2"), s = *net.find("S"),
         r = *net.find("R");
  std::vector<ScriptEntry> script(2);
  script[0].stage = 3;
  script[0].node = n1;
  script[0].envelopes.push_back({{s, r}, 2, {}});
  script[1].stage = 3;
  script[1].node = n2;
  script[1].envelopes.push_back({{s, r}, 2, {}});
  ScriptedAdversary crafted(script, Scope::kSigma, true);
  auto out = run_protocol(net, circle, cfg, AdversaryPlan::from_script(crafted),
                          Content::symbol(0), 2, traced(2));
  CHECK_FALSE(assert_lemma1(out.trace).has_value());
  CHECK_FALSE(assert_lemma2(out.trace).has_value());

  CHECK_THROWS_AS(run_protocol(net, circle, cfg, AdversaryPlan::honest(),
                               Content::null(), 2, traced(1)),
                  std::invalid_argument);
}

TEST_CASE("forced reboot demo: interior switches to m0 for the audit") {
  auto net = diamond();
  NodeId n1 = *net.find("1"), n2 = *net.find("2"), r = *net.find("R");
  std::vector<ScriptEntry> script(3);
  script[0].stage = 3;  // S and R both lie at stage 3: multilateral history
  script[0].node = net.sender;
  script[0].envelopes.push_back({{n1, n2}, 2, {}});
  script[1].stage = 3;
  script[1].node = r;
  script[1].envelopes.push_back({{n1, n2}, 2, {}});
  script[2].stage = 4;  // then force what the trigger would conclude anyway
  script[2].node = n1;
  script[2].force_reboot = true;
  ScriptedAdversary crafted(script, Scope::kSigmaStar, true);
  auto out = run_protocol(net, *two_disjoint_paths(net), build_schedule(4),
                          AdversaryPlan::from_script(crafted),
                          Content::symbol(0), 2, traced(4));
  // node 1's envelopes carry m0 from stage 3 on (content trigger at 3)
  int m0_after = 0;
  for (const auto& line : out.trace.lines)
    if (line.find("o=1") != std::string::npos &&
        line.find("c=m0") != std::string::npos)
      m0_after++;
  CHECK(m0_after >= 3);  // stages 4,5,6 at least
}

TEST_CASE("randomized sweep smoke: no failures on either network") {
  {
    SweepConfig sc;
    sc.mode = SweepConfig::Mode::kRandomized;
    sc.samples = 400;
    sc.scope = Scope::kSigmaStar;
    sc.seed = 5;
    auto net = diamond();
    auto sum = sweep_reliability(net, *two_disjoint_paths(net),
                                 build_schedule(4), 2, sc);
    CHECK(sum.runs == 400);
    CHECK(sum.failures == 0);
    CHECK(sum.lemma1_violations == 0);
    CHECK(sum.lemma2_violations == 0);
    CHECK(sum.lemma1_checked == 400);
  }
  {
    SweepConfig sc;
    sc.mode = SweepConfig::Mode::kRandomized;
    sc.samples = 200;
    sc.scope = Scope::kSigma;
    sc.seed = 6;
    auto net = fig1();
    auto sum = sweep_reliability(net, *two_disjoint_paths(net),
                                 build_schedule(6), 2, sc);
    CHECK(sum.failures == 0);
  }
}

TEST_CASE("exhaustive sweep refuses oversized instances") {
  SweepConfig sc;
  sc.mode = SweepConfig::Mode::kExhaustive;
  sc.seed = 1;
  auto net = fig1();
  auto sum =
      sweep_reliability(net, *two_disjoint_paths(net), build_schedule(6), 2, sc);
  CHECK(sum.refused);
  CHECK(sum.refusal_reason.find("exceed") != std::string::npos);
}

TEST_CASE("exhaustive sweep, single-event slice, is clean") {
  SweepConfig sc;
  sc.mode = SweepConfig::Mode::kExhaustive;
  sc.max_combo_events = 1;
  sc.seed = 9;
  auto net = diamond();
  auto sum = sweep_reliability(net, *two_disjoint_paths(net),
                               build_schedule(4), 2, sc);
  CHECK_FALSE(sum.refused);
  CHECK(sum.failures == 0);
  CHECK(sum.lemma1_violations == 0);
  CHECK(sum.lemma2_violations == 0);
  CHECK(sum.schedules_swept == 12500);
  CHECK(sum.templates == 27);
  // part (ii) with one event: the honest run plus every single action
  CHECK(sum.combo_runs > 1800);
}

TEST_CASE("a non-knowing interior flags an announcement it cannot know") {
  // On the grid, node 4 does not know the message during block 1. If its
  // successor R announces an element of M, node 4 reports it with R's true
  // key at the next stage.
  auto net = fig1();
  NodeId r = *net.find("R"), n4 = *net.find("4"), n5 = *net.find("5"),
         n6 = *net.find("6");
  std::vector<ScriptEntry> script(1);
  script[0].stage = 3;
  script[0].node = r;
  script[0].envelopes.push_back({{n4, n5, n6}, 2, {}});
  // R's circle pair is {4, 5}; announcing beta there is the deviation
  script[0].envelopes[0].recipients = {n4, n5};
  ScriptedAdversary adv(script, Scope::kSigmaStar);
  auto out = run_protocol(net, *two_disjoint_paths(net), build_schedule(6),
                          AdversaryPlan::from_script(adv), Content::symbol(0),
                          2, traced(33));
  // find R's stage-3 key, then node 4's stage-4 report about (R, 3)
  std::string r_key;
  bool reported = false;
  for (const auto& line : out.trace.lines) {
    if (line.rfind("E t=3", 0) == 0 && line.find("o=R") != std::string::npos) {
      auto k = line.find("k=");
      r_key = line.substr(k + 2, line.find(' ', k) - k - 2);
    }
    if (line.rfind("E t=4", 0) == 0 && line.find("o=4") != std::string::npos &&
        line.find("(R,3," + r_key + ")") != std::string::npos)
      reported = true;
  }
  CHECK(reported);
  // the run still decodes correctly
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
}

TEST_CASE("asymmetric circle: randomized sweep stays clean") {
  // K=1 against K'=2 exercises interior relay chains and the first-interior
  // special cases on unequal sides.
  auto net = make_network(
      {"S", "a", "b", "x", "R"},
      {{"S", "x"}, {"x", "R"}, {"S", "a"}, {"a", "b"}, {"b", "R"}}, "S", "R");
  auto circle = *two_disjoint_paths(net);
  CHECK(circle.n_circle() == 5);
  CHECK(circle.left.size() != circle.right.size());
  auto cfg = build_schedule(5);
  CHECK(cfg.total_stages == 15);
  SweepConfig sc;
  sc.mode = SweepConfig::Mode::kRandomized;
  sc.samples = 2000;
  sc.scope = Scope::kSigmaStar;
  sc.seed = 404;
  auto sum = sweep_reliability(net, circle, cfg, 3, sc);  // three-letter M
  CHECK(sum.failures == 0);
  CHECK(sum.lemma1_violations == 0);
  CHECK(sum.lemma2_violations == 0);
}

TEST_CASE("numeric keys: the triple-beta attack still loses") {
  auto net = diamond();
  NodeId n1 = *net.find("1"), s = *net.find("S"), r = *net.find("R");
  std::vector<ScriptEntry> script;
  for (Stage t : {2, 3, 4}) {
    ScriptEntry e;
    e.stage = t;
    e.node = n1;
    e.envelopes.push_back({{s, r}, 2, {}});
    script.push_back(e);
  }
  RunConfig rc = traced(2024);
  rc.key_mode = KeyMode::kNumeric;
  auto out = run_protocol(
      net, *two_disjoint_paths(net), build_schedule(4),
      AdversaryPlan::from_script(ScriptedAdversary(script, Scope::kSigma)),
      Content::symbol(0), 2, rc);
  REQUIRE(out.report.decoded.has_value());
  CHECK(*out.report.decoded == Content::symbol(0));
  // and numeric traces are deterministic too
  auto again = run_protocol(
      net, *two_disjoint_paths(net), build_schedule(4),
      AdversaryPlan::from_script(ScriptedAdversary(script, Scope::kSigma)),
      Content::symbol(0), 2, rc);
  CHECK(out.trace.text() == again.trace.text());
}

TEST_CASE("sweeping the forced single path shows failures") {
  // the transmission cannot be reliable when one intermediary carries
  // everything: random deviation schedules produce wrong decodes
  auto net = make_network({"S", "1", "R"}, {{"S", "1"}, {"1", "R"}}, "S", "R");
  NodeId n1 = *net.find("1"), s = *net.find("S"), r = *net.find("R");
  auto circle = forced_single_path_circle({s, n1, r});
  SweepConfig sc;
  sc.mode = SweepConfig::Mode::kRandomized;
  sc.samples = 300;
  sc.scope = Scope::kSigma;
  sc.seed = 12;
  sc.check_lemmas = false;  // the forced circle is outside their scope
  auto sum = sweep_reliability(net, circle, build_schedule_unchecked(3), 2, sc);
  CHECK(sum.failures > 0);
}
