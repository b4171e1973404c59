/*
 * Copyright 2026 The RobustComm Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the robustcomm library: simulation and verification of
 * robust message transmission on networks with a per-round adversary, plus
 * the sender-receiver game layer (direct and mediated equilibria).
 *
 * All state lives behind opaque handles. Every entry point returns a status
 * code; rc_last_error() describes the most recent failure on the calling
 * thread. Scenario documents are JSON; see docs/scenario.md.
 */

#ifndef ROBUSTCOMM_ROBUSTCOMM_H_
#define ROBUSTCOMM_ROBUSTCOMM_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rc_scenario rc_scenario;
typedef struct rc_result rc_result;

typedef enum rc_status {
  RC_OK = 0,               /* command ran, all properties/expectations hold */
  RC_PROPERTY_FAILURE = 1, /* command ran, a checked property failed */
  RC_INVALID_INPUT = 2,    /* malformed scenario or unusable parameters */
  RC_ERROR = 3             /* internal error */
} rc_status;

const char* rc_version(void);

/* Thread-local message describing the last failure; never NULL. */
const char* rc_last_error(void);

/* Scenario lifecycle. */
rc_status rc_scenario_load_file(const char* path, rc_scenario** out);
rc_status rc_scenario_load_json(const char* json_text, rc_scenario** out);
void rc_scenario_free(rc_scenario* sc);

/* Field overrides applied after load: "seed", "key_mode"
 * ("symbolic"|"numeric"), "samples", "message". */
rc_status rc_scenario_override(rc_scenario* sc, const char* key,
                               const char* value);

/* Commands. Each allocates a result object on success AND on property
 * failure (status 0 or 1); nothing is allocated for status >= 2. */
rc_status rc_check_paths(const rc_scenario* sc, rc_result** out);
rc_status rc_simulate(const rc_scenario* sc, rc_result** out);
rc_status rc_sweep(const rc_scenario* sc, rc_result** out);
rc_status rc_mediated(const rc_scenario* sc, rc_result** out);
rc_status rc_verify_eq(const rc_scenario* sc, rc_result** out);
rc_status rc_demo_majority(const rc_scenario* sc, rc_result** out);
rc_status rc_robust_check(const rc_scenario* sc, rc_result** out);

/* Machine-readable summary (JSON object with a "text" array of human
 * lines). Owned by the result object. */
const char* rc_result_summary(const rc_result* r);
/* Deterministic trace document; empty string when the command captures no
 * trace. */
const char* rc_result_trace(const rc_result* r);
void rc_result_free(rc_result* r);

#ifdef __cplusplus
}
#endif

#endif /* ROBUSTCOMM_ROBUSTCOMM_H_ */
