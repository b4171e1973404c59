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

#include "robustcomm/robustcomm.h"

#include <cstring>
#include <string>

#include "core/scenario.hpp"

using robustcomm::CommandResult;
using robustcomm::Scenario;

struct rc_scenario {
  Scenario sc;
};

struct rc_result {
  std::string summary;
  std::string trace;
};

namespace {

thread_local std::string g_last_error = "";

rc_status fail(rc_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
rc_status run_command(const rc_scenario* sc, rc_result** out, Fn&& fn) {
  if (!sc || !out) return fail(RC_INVALID_INPUT, "null argument");
  *out = nullptr;
  try {
    CommandResult r = fn(sc->sc);
    if (r.status >= 2) {
      g_last_error = r.summary_json;
      return RC_INVALID_INPUT;
    }
    auto* res = new rc_result{std::move(r.summary_json), std::move(r.trace_text)};
    *out = res;
    return r.status == 0 ? RC_OK : RC_PROPERTY_FAILURE;
  } catch (const std::invalid_argument& e) {
    return fail(RC_INVALID_INPUT, e.what());
  } catch (const std::exception& e) {
    return fail(RC_ERROR, e.what());
  }
}

}  // namespace

extern "C" {

const char* rc_version(void) { return "robustcomm 1.0.0"; }

const char* rc_last_error(void) { return g_last_error.c_str(); }

rc_status rc_scenario_load_json(const char* json_text, rc_scenario** out) {
  if (!json_text || !out) return fail(RC_INVALID_INPUT, "null argument");
  *out = nullptr;
  try {
    auto* sc = new rc_scenario{robustcomm::parse_scenario(json_text)};
    *out = sc;
    return RC_OK;
  } catch (const std::exception& e) {
    return fail(RC_INVALID_INPUT, e.what());
  }
}

rc_status rc_scenario_load_file(const char* path, rc_scenario** out) {
  if (!path || !out) return fail(RC_INVALID_INPUT, "null argument");
  *out = nullptr;
  try {
    auto* sc = new rc_scenario{robustcomm::load_scenario_file(path)};
    *out = sc;
    return RC_OK;
  } catch (const std::exception& e) {
    return fail(RC_INVALID_INPUT, e.what());
  }
}

void rc_scenario_free(rc_scenario* sc) { delete sc; }

rc_status rc_scenario_override(rc_scenario* sc, const char* key,
                               const char* value) {
  if (!sc || !key || !value) return fail(RC_INVALID_INPUT, "null argument");
  try {
    std::string k = key, v = value;
    if (k == "seed") {
      sc->sc.seed = std::stoull(v);
    } else if (k == "key_mode") {
      if (v == "symbolic")
        sc->sc.key_mode = robustcomm::KeyMode::kSymbolic;
      else if (v == "numeric")
        sc->sc.key_mode = robustcomm::KeyMode::kNumeric;
      else
        return fail(RC_INVALID_INPUT, "key_mode must be symbolic|numeric");
    } else if (k == "samples") {
      sc->sc.samples = std::stol(v);
      sc->sc.mediated_runs = sc->sc.samples;
    } else if (k == "message") {
      for (std::size_t i = 0; i < sc->sc.alphabet.size(); ++i)
        if (sc->sc.alphabet[i] == v) {
          sc->sc.message = static_cast<int>(i);
          return RC_OK;
        }
      return fail(RC_INVALID_INPUT, "message not in alphabet");
    } else {
      return fail(RC_INVALID_INPUT, "unknown override key");
    }
    return RC_OK;
  } catch (const std::exception& e) {
    return fail(RC_INVALID_INPUT, e.what());
  }
}

rc_status rc_check_paths(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_check_paths);
}
rc_status rc_simulate(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_simulate);
}
rc_status rc_sweep(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_sweep);
}
rc_status rc_mediated(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_mediated);
}
rc_status rc_verify_eq(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_verify_eq);
}
rc_status rc_demo_majority(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_demo_majority);
}
rc_status rc_robust_check(const rc_scenario* sc, rc_result** out) {
  return run_command(sc, out, robustcomm::cmd_robust_check);
}

const char* rc_result_summary(const rc_result* r) {
  return r ? r->summary.c_str() : "";
}
const char* rc_result_trace(const rc_result* r) {
  return r ? r->trace.c_str() : "";
}
void rc_result_free(rc_result* r) { delete r; }

}  // extern "C"
