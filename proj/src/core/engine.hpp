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

#ifndef ROBUSTCOMM_CORE_ENGINE_HPP_
#define ROBUSTCOMM_CORE_ENGINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/adversary.hpp"
#include "core/messaging.hpp"
#include "core/protocol.hpp"
#include "core/topology.hpp"

namespace robustcomm {

struct RunConfig {
  KeyMode key_mode = KeyMode::kSymbolic;
  std::uint64_t seed = 1;
  bool capture_trace = false;
  bool emit_babble = true;
  bool check_envelopes = true;
};

// Concrete adversary behavior for one run: per deviation event either an
// enumerated action, explicit scripted envelopes, or a forced reboot.
struct AdversaryPlan {
  struct Event {
    enum class Kind : std::uint8_t { kEnum, kScript, kReboot };
    Stage stage = 0;
    NodeId node = -1;
    Kind kind = Kind::kEnum;
    EnumAction action;
    std::vector<ScriptEnvelope> envelopes;
    int instance = 0;
  };
  Scope scope = Scope::kSigmaStar;
  bool multilateral = false;
  std::vector<Event> events;

  static AdversaryPlan honest(Scope scope = Scope::kSigmaStar);
  static AdversaryPlan from_script(const ScriptedAdversary& script);
  DeviationSchedule schedule() const;
  bool has_forced_reboot() const;
};

struct Trace {
  std::uint64_t seed = 0;
  KeyMode key_mode = KeyMode::kSymbolic;
  Content message;
  Circle circle;
  ProtocolConfig cfg;
  DeviationSchedule schedule;
  bool multilateral = false;
  bool forced_reboot = false;
  std::vector<LearnEvent> learns;  // block 0 = knowledge from stage 1
  std::optional<Content> decoded;
  std::vector<std::string> lines;  // filled when capture_trace is set

  std::string text() const;
};

struct RunReport {
  std::optional<Content> decoded;
  bool lemma1_ok = true;
  bool lemma2_ok = true;
  Stage stage_receiver_learn = 0;  // 0 = receiver never validated
  long broadcast_count = 0;        // circle-node protocol envelopes
};

struct RunOutcome {
  Trace trace;
  RunReport report;
};

// Lock-step execution of stages 1..T on the circle; the scheduled deviator's
// emission is replaced by its planned action, delivery is atomic, decoding
// runs at block ends, the receiver reports after stage T. Invalid schedules
// are rejected up front (std::invalid_argument).
RunOutcome run_protocol(const Network& net, const Circle& circle,
                        const ProtocolConfig& cfg, const AdversaryPlan& plan,
                        Content message, int alphabet_size,
                        const RunConfig& rc);

// No player learns a value other than the stage-1 message. Absent when the
// trace's precondition (unilateral, no forced reboots) fails.
std::optional<bool> assert_lemma1(const Trace& trace);

// In every block whose start knowledge is a double prefix, at least one of
// the two frontier successors learns by block end. Absent when the
// precondition fails.
std::optional<bool> assert_lemma2(const Trace& trace);

struct SweepConfig {
  Scope scope = Scope::kSigmaStar;
  enum class Mode : std::uint8_t { kExhaustive, kRandomized };
  Mode mode = Mode::kExhaustive;
  long samples = 10000;     // randomized runs
  int max_combo_events = 2;  // exhaustive: heterogeneous event depth
  std::uint64_t seed = 1;
  double refusal_limit = 2e8;
  EnumCaps caps{1};  // one replay representative per slot
  int threads = 0;   // 0 = hardware concurrency
  bool check_lemmas = true;
};

struct SweepFailure {
  std::vector<std::pair<Stage, std::string>> schedule;
  std::string message;
  std::string decoded;
  std::string detail;
};

struct SweepSummary {
  bool refused = false;
  std::string refusal_reason;
  long runs = 0;
  long failures = 0;
  long lemma1_checked = 0;
  long lemma1_violations = 0;
  long lemma2_checked = 0;
  long lemma2_violations = 0;
  long schedules_swept = 0;   // exhaustive part (i)
  long templates = 0;
  long combo_runs = 0;        // exhaustive part (ii)
  std::vector<SweepFailure> failure_samples;  // capped at 32
};

// Strong-reliability sweep: every run must decode the sent message.
// Exhaustive mode (symbolic keys only) is the composition of
//   (i) every valid schedule x every uniform action template x every m, and
//   (ii) every placement of up to max_combo_events heterogeneous deviation
//        events, with the full capped action enumeration per event.
// Oversized exhaustive instances are refused with a size estimate.
SweepSummary sweep_reliability(const Network& net, const Circle& circle,
                               const ProtocolConfig& cfg, int alphabet_size,
                               const SweepConfig& sc);

// The receiver's three path reports under two different true messages with
// mirrored deviations; bit-identical views certify the ambiguity of the
// naive forward-copies strategy.
struct MajorityExhibit {
  std::vector<std::string> view_a;  // receiver view, true message m
  std::vector<std::string> view_b;  // receiver view, true message m'
  std::string true_a;
  std::string true_b;
  bool identical = false;
  std::vector<std::string> trace_a;
  std::vector<std::string> trace_b;
};

// Requires three vertex-disjoint two-interior S-R paths (the introductory
// grid). Throws std::invalid_argument otherwise.
MajorityExhibit naive_majority_demo(const Network& net,
                                    const std::vector<std::string>& alphabet);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_ENGINE_HPP_
