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

#include "core/scenario.hpp"

#include <filesystem>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"

using namespace robustcomm;

TEST_CASE("scenario parsing reports field paths") {
  CHECK_THROWS_WITH_AS(parse_scenario("not json"),
                       doctest::Contains("$: not valid JSON"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_scenario("{}"),
                       doctest::Contains("network: missing section"),
                       std::invalid_argument);
  std::string bad_node = R"({
    "network": {"nodes": ["S","1","R"],
                "edges": [["S","1"],["1","R"]],
                "sender": "S", "receiver": "R"},
    "alphabet": ["alpha"],
    "adversary": {"script": [{"stage": 2, "node": "nope"}]}
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(bad_node),
                       doctest::Contains("adversary.script[0]"),
                       std::invalid_argument);
  std::string bad_rational = R"({
    "network": {"nodes": ["S","1","2","R"],
                "edges": [["S","1"],["S","2"],["1","R"],["2","R"]],
                "sender": "S", "receiver": "R"},
    "game": {"states": ["w"], "prior": ["huh"], "actions": ["a"],
             "sender_payoffs": [["0"]], "receiver_payoffs": [["0"]]}
  })";
  CHECK_THROWS_WITH_AS(parse_scenario(bad_rational),
                       doctest::Contains("game.prior[0]"),
                       std::invalid_argument);
}

TEST_CASE("every shipped scenario passes its embedded expectations") {
  namespace fs = std::filesystem;
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    auto sc = load_scenario_file(entry.path().string());
    ++checked;
    auto has = [&](const char* k) { return sc.expect.count(k) != 0; };

    auto cp = cmd_check_paths(sc);
    auto cp_json = nlohmann::json::parse(cp.summary_json);
    CHECK_MESSAGE(cp_json["expect_ok"].get<bool>(),
                  entry.path().string(), " check-paths: ", cp.summary_json);

    if (has("decoded") && cp_json["circle_exists"].get<bool>()) {
      auto sim = cmd_simulate(sc);
      auto j = nlohmann::json::parse(sim.summary_json);
      CHECK_MESSAGE(j["expect_ok"].get<bool>(), entry.path().string(),
                    " simulate: ", sim.summary_json);
      CHECK(sim.status == 0);
    }
    if (has("device_ok") || has("nash_ok")) {
      auto eq = cmd_verify_eq(sc);
      auto j = nlohmann::json::parse(eq.summary_json);
      CHECK_MESSAGE(j["expect_ok"].get<bool>(), entry.path().string(),
                    " verify-eq: ", eq.summary_json);
    }
    if (has("identical_views")) {
      auto dm = cmd_demo_majority(sc);
      auto j = nlohmann::json::parse(dm.summary_json);
      CHECK_MESSAGE(j["expect_ok"].get<bool>(), entry.path().string(),
                    " demo-majority: ", dm.summary_json);
    }
  }
  CHECK(checked >= 6);
}

TEST_CASE("simulate on a cut network is an input error") {
  auto sc = load_scenario_file(std::string(SCENARIO_DIR) + "/cut_path.json");
  auto r = cmd_simulate(sc);
  CHECK(r.status == 2);
  auto cp = cmd_check_paths(sc);
  CHECK(cp.status == 1);  // property result: no circle, cut vertex named
  auto j = nlohmann::json::parse(cp.summary_json);
  CHECK(j["cut_vertex"] == "1");
  CHECK(j["expect_ok"].get<bool>());
}

TEST_CASE("sweep and mediated commands run from scenario files") {
  auto sc = load_scenario_file(std::string(SCENARIO_DIR) + "/diamond.json");
  sc.sweep_mode = SweepConfig::Mode::kRandomized;
  sc.samples = 200;
  auto sw = cmd_sweep(sc);
  CHECK(sw.status == 0);
  auto j = nlohmann::json::parse(sw.summary_json);
  CHECK(j["failures"].get<long>() == 0);
  CHECK(j["runs"].get<long>() == 200);

  sc.mediated_runs = 500;
  auto med = cmd_mediated(sc);
  CHECK(med.status == 0);
  auto mj = nlohmann::json::parse(med.summary_json);
  CHECK(mj["invariant_violations"].get<int>() == 0);
  CHECK(mj["tv"].get<double>() < 0.1);

  auto rob = cmd_robust_check(sc);
  CHECK(rob.status == 0);
}

TEST_CASE("single mediated run emits a deterministic trace") {
  auto sc = load_scenario_file(std::string(SCENARIO_DIR) + "/diamond.json");
  sc.mediated_runs = 1;
  auto a = cmd_mediated(sc);
  auto b = cmd_mediated(sc);
  CHECK(a.status == 0);
  CHECK_FALSE(a.trace_text.empty());
  CHECK(a.trace_text == b.trace_text);
}
