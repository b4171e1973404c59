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

#ifndef ROBUSTCOMM_CORE_PROTOCOL_HPP_
#define ROBUSTCOMM_CORE_PROTOCOL_HPP_

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "core/messaging.hpp"
#include "core/topology.hpp"

namespace robustcomm {

// Stage schedule. Blocks of 2n-3 stages start at t=2; block b covers
// {t_b, ..., t_b + block_length - 1}. The receiver learns after at most
// T = 1 + (n-3)(2n-3) stages.
struct ProtocolConfig {
  int n_circle = 0;
  int block_length = 0;
  int num_blocks = 0;
  Stage total_stages = 0;
  int max_other_triplets = 0;  // L, list bound per non-neighbor subject
  bool carry_final_detection = true;

  Stage block_start(int b) const { return 2 + (b - 1) * block_length; }
  Stage block_end(int b) const { return block_start(b) + block_length - 1; }
  // 0 for stage 1, else the 1-based block index.
  int block_of(Stage t) const {
    return t < 2 ? 0 : 1 + (t - 2) / block_length;
  }
};

// Throws std::domain_error for n_circle < 4.
ProtocolConfig build_schedule(int n_circle);
// Same formulas without the size guard; only the forced single-path
// necessity demo needs n_circle == 3.
ProtocolConfig build_schedule_unchecked(int n_circle);

struct LearnEvent {
  NodeId node = -1;
  int block = 0;
  Stage stage = 0;  // block-end stage at which the decode validated
  Content value;
};

// Per-player protocol state within one protocol instance.
struct NodeState {
  NodeId id = -1;
  Side side = Side::kLeft;
  bool is_role_sender = false;
  bool is_role_receiver = false;
  bool first_left = false;   // left[1], special-cased routing
  bool first_right = false;  // right[1]

  NodeId nbr[2] = {-1, -1};          // circle neighbors, fixed slot order
  std::vector<NodeId> monitored;     // successors this node watches

  Content knows;                   // null until the message is known
  int learned_at_block = -1;       // 0 = knew from stage 1
  bool rebooted = false;
  Content audit_knows;             // survives reboot, trace audit only
  bool conflicted = false;         // receiver validated two distinct values

  std::vector<std::optional<AuthKey>> key_log[2];      // [slot][stage]
  std::vector<std::optional<Content>> content_log[2];  // [slot][stage]
  std::vector<std::optional<AuthKey>> own_key;         // broadcast key per stage

  struct RecvTriplet {
    Triplet t;
    Stage received_at = 0;
  };
  std::vector<RecvTriplet> triplets_from[2];

  struct PendingTriplet {
    Triplet t;
    Stage queued_at = 0;
  };
  std::vector<PendingTriplet> pending;
  std::vector<Triplet> emitted_triplets;       // value dedup
  std::map<std::pair<NodeId, Stage>, AuthKey> detections;
  std::set<std::pair<NodeId, Stage>> reported_detections;

  bool slot_matches(int slot, NodeId v) const { return nbr[slot] == v; }
  bool knows_effective() const { return rebooted || knows.is_message(); }
  Content content_to_send() const {
    if (rebooted) return Content::null();
    return knows;  // null when unknown
  }
};

// Off-path fallback: continue the protocol as if the known message were m0.
// Keys and triplet handling are untouched; repeated calls are no-ops.
void reboot(NodeState& state);

// One execution of the transmission protocol on a circle: owns all node
// states, performs honest emissions, absorption and block decoding. The
// engine drives stages and substitutes adversarial emissions.
class ProtocolInstance {
 public:
  ProtocolInstance(const Network* net, Circle circle, ProtocolConfig cfg,
                   Content message, int alphabet_size, int instance_id);

  const Circle& circle() const { return circle_; }
  const ProtocolConfig& cfg() const { return cfg_; }
  const Content& message() const { return message_; }
  int id() const { return instance_id_; }
  bool on_circle(NodeId v) const { return state_index_.count(v) != 0; }

  NodeState& state(NodeId v);
  const NodeState& state(NodeId v) const;
  std::vector<NodeId> circle_nodes() const;  // canonical emission order

  // Honest emission of one circle node at `stage` (relative to this
  // instance, stage 1 = sender broadcast): the circle-pair envelope plus
  // babble envelopes to off-circle neighbors. Throws std::domain_error when
  // stage exceeds the schedule.
  std::vector<Envelope> honest_emit(NodeId p, Stage stage, KeySource& keys);

  // Feeds every protocol-slot envelope delivered to p at `stage` into its
  // logs, runs detection, queues forwards, applies the forced-multilateral
  // reboot trigger. Envelopes not addressed to p raise std::logic_error.
  void absorb_inbox(NodeId p, Stage stage,
                    const std::vector<const Envelope*>& delivered,
                    KeySource& keys);

  // Block-end decoding for every circle node that does not yet know the
  // message; returns the learn events, already applied to the states.
  std::vector<LearnEvent> end_of_block_decode(int block);
  // Decode for a single node (no state change); exposed for tests.
  std::optional<Content> decode_candidate(const NodeState& st, int block) const;

  // Final output after the last stage: the known message, or absent when
  // nothing (or two distinct values) validated.
  std::optional<Content> receiver_output() const;

  const std::vector<LearnEvent>& learn_events() const { return learn_events_; }
  void force_reboot(NodeId p) { reboot(state(p)); }

  // True when `recipients` is exactly the certified circle pair of `origin`;
  // only such envelopes count as protocol messages, all else is babble.
  bool is_protocol_slot(NodeId origin,
                        const std::vector<NodeId>& recipients) const;
  std::vector<NodeId> circle_pair(NodeId p) const;

 private:
  struct DecodeSlots {
    int pred_slot;
    int poison_slot;
  };
  std::vector<DecodeSlots> decode_instances(const NodeState& st) const;
  bool subject_on_left(NodeId v) const;
  bool subject_on_right(NodeId v) const;
  void consider_forward(NodeState& st, int from_slot, const Triplet& t,
                        const std::vector<Triplet>& same_envelope, Stage stage,
                        KeySource& keys);
  void queue_pending(NodeState& st, const Triplet& t, Stage stage);

  const Network* net_;
  Circle circle_;
  ProtocolConfig cfg_;
  Content message_;
  int alphabet_size_;
  int instance_id_;
  std::vector<NodeState> states_;
  std::map<NodeId, int> state_index_;
  std::vector<LearnEvent> learn_events_;
};

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_PROTOCOL_HPP_
