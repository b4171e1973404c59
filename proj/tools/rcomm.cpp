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

// Command-line front end; links only the public C API.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "robustcomm/robustcomm.h"

namespace {

struct Options {
  std::string scenario;
  std::string seed;
  std::string mode;
  std::string samples;
  std::string message;
  std::string out_dir;
  std::string format = "text";
};

int run(const std::string& name,
        rc_status (*command)(const rc_scenario*, rc_result**),
        const Options& opt) {
  rc_scenario* sc = nullptr;
  if (rc_scenario_load_file(opt.scenario.c_str(), &sc) != RC_OK) {
    std::cerr << "error: " << rc_last_error() << "\n";
    return 2;
  }
  auto override_or_die = [&](const char* key, const std::string& v) {
    if (v.empty()) return true;
    if (rc_scenario_override(sc, key, v.c_str()) != RC_OK) {
      std::cerr << "error: " << rc_last_error() << "\n";
      return false;
    }
    return true;
  };
  if (!override_or_die("seed", opt.seed) ||
      !override_or_die("key_mode", opt.mode) ||
      !override_or_die("samples", opt.samples) ||
      !override_or_die("message", opt.message)) {
    rc_scenario_free(sc);
    return 2;
  }

  rc_result* res = nullptr;
  rc_status st = command(sc, &res);
  rc_scenario_free(sc);
  if (st >= RC_INVALID_INPUT) {
    std::cerr << "error: " << rc_last_error() << "\n";
    return 2;
  }

  std::string summary = rc_result_summary(res);
  std::string trace = rc_result_trace(res);
  if (opt.format == "machine") {
    std::cout << summary << "\n";
  } else {
    auto j = nlohmann::json::parse(summary);
    for (const auto& line : j["text"])
      std::cout << line.get<std::string>() << "\n";
  }
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream(opt.out_dir + "/" + name + "_summary.json") << summary;
    if (!trace.empty())
      std::ofstream(opt.out_dir + "/" + name + "_trace.txt") << trace;
  }
  rc_result_free(res);
  return st == RC_OK ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustcomm: robust message transmission on networks"};
  app.require_subcommand(1);
  Options opt;

  struct Cmd {
    const char* name;
    const char* help;
    rc_status (*fn)(const rc_scenario*, rc_result**);
  };
  const Cmd cmds[] = {
      {"check-paths", "report the circle (two disjoint paths) or a cut vertex",
       rc_check_paths},
      {"simulate", "run the transmission protocol once and print the outcome",
       rc_simulate},
      {"sweep", "reliability sweep over deviation schedules", rc_sweep},
      {"mediated", "run the mediated (lottery) protocol", rc_mediated},
      {"verify-eq", "verify equilibrium conditions with exact rationals",
       rc_verify_eq},
      {"demo-majority", "reproduce the naive forward-copies ambiguity",
       rc_demo_majority},
      {"robust-check", "compose an equilibrium with the protocol and sweep",
       rc_robust_check},
  };

  std::string chosen;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--scenario", opt.scenario, "scenario JSON file")
        ->required();
    sub->add_option("--seed", opt.seed, "override the scenario seed");
    sub->add_option("--mode", opt.mode, "key mode: symbolic|numeric");
    sub->add_option("--samples", opt.samples, "override sweep samples / mediated runs");
    sub->add_option("--message", opt.message, "override the message symbol");
    sub->add_option("--out", opt.out_dir, "write summary and trace files here");
    sub->add_option("--format", opt.format, "text|machine");
    sub->callback([&chosen, name = std::string(c.name)]() { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);
  for (const auto& c : cmds)
    if (chosen == c.name) return run(c.name, c.fn, opt);
  return 2;
}
