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

#ifndef ROBUSTCOMM_CORE_SCENARIO_HPP_
#define ROBUSTCOMM_CORE_SCENARIO_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/adversary.hpp"
#include "core/engine.hpp"
#include "core/games.hpp"
#include "core/mediated.hpp"
#include "core/topology.hpp"

namespace robustcomm {

// One structured scenario document drives every subcommand; rationals are
// "p/q" strings so exact values survive the round trip.
struct Scenario {
  Network net;
  std::vector<std::string> alphabet;  // M
  std::optional<int> message;         // index into alphabet
  std::uint64_t seed = 1;
  KeyMode key_mode = KeyMode::kSymbolic;

  std::optional<FiniteGame> game;
  std::optional<DirectStrategyPair> strategies;
  std::optional<CommDevice> device;

  Scope scope = Scope::kSigmaStar;
  SweepConfig::Mode sweep_mode = SweepConfig::Mode::kExhaustive;
  long samples = 10000;
  int combo_events = 2;
  std::vector<ScriptEntry> script;
  bool script_multilateral = false;

  long mediated_runs = 1;
  std::vector<MediatedDeviation> mediated_deviations;

  // Embedded expectations, checked by the subcommand that owns each key.
  std::map<std::string, std::string> expect;
};

// Throws std::invalid_argument with a field path on schema violations.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Command results: exit status 0 (success), 1 (property failure),
// 2 (input error); a machine-readable summary (JSON text, includes a "text"
// array with the human lines) and an optional trace document.
struct CommandResult {
  int status = 0;
  std::string summary_json;
  std::string trace_text;
};

CommandResult cmd_check_paths(const Scenario& sc);
CommandResult cmd_simulate(const Scenario& sc);
CommandResult cmd_sweep(const Scenario& sc);
CommandResult cmd_mediated(const Scenario& sc);
CommandResult cmd_verify_eq(const Scenario& sc);
CommandResult cmd_demo_majority(const Scenario& sc);
CommandResult cmd_robust_check(const Scenario& sc);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_SCENARIO_HPP_
