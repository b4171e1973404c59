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

#ifndef ROBUSTCOMM_CORE_ADVERSARY_HPP_
#define ROBUSTCOMM_CORE_ADVERSARY_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "core/messaging.hpp"
#include "core/protocol.hpp"
#include "core/topology.hpp"

namespace robustcomm {

// Sigma: only intermediaries deviate. SigmaStar: sender and receiver may
// deviate too, except the sender at stage 1 (the message stage); the
// receiver's final action is not a stage and cannot be scheduled.
enum class Scope : std::uint8_t { kSigma, kSigmaStar };

struct DeviationSchedule {
  std::vector<std::pair<Stage, NodeId>> entries;  // at most one per stage
  Scope scope = Scope::kSigmaStar;

  std::optional<NodeId> deviator_at(Stage t) const {
    for (const auto& e : entries)
      if (e.first == t) return e.second;
    return std::nullopt;
  }
};

// ok (empty) or the violated constraint by name.
std::optional<std::string> validate_schedule(const DeviationSchedule& s,
                                             const ProtocolConfig& cfg,
                                             const Network& net);

// What a deviating node has seen: every token and content from envelopes
// addressed to it, babble included. Grows monotonically.
struct KnowledgeBase {
  std::vector<AuthKey> tokens;  // insertion order
  std::vector<Content> contents;

  bool has_token(const AuthKey& k) const;
  void absorb(const Envelope& env);
};

enum class KeyChoice : std::uint8_t { kTrueObserved, kReplay, kFresh };
enum class RecipientPattern : std::uint8_t { kPredOnly, kSuccOnly, kBoth };

// Enumerable replacement for the deviator's circle envelope at one stage:
// a content, a recipient pattern and one forged triplet per monitored
// successor. The deviator's own key is always fresh.
struct EnumAction {
  int content_code = 0;  // 0 = m0, k > 0 = alphabet symbol k-1
  RecipientPattern pattern = RecipientPattern::kBoth;
  bool has_slots = false;  // stages >= 3 carry monitor-slot triplets
  int n_slots = 0;
  KeyChoice slot_key[2] = {KeyChoice::kFresh, KeyChoice::kFresh};
  std::size_t replay_index[2] = {0, 0};  // kb token when kReplay
};

struct EnumCaps {
  std::size_t replay_cap = static_cast<std::size_t>(-1);
};

// Finite action list for a deviation event. Symbolic key mode only: the
// zero-collision semantics is what makes this space meaningfully
// exhaustive. Throws std::domain_error in numeric mode.
std::vector<EnumAction> enumerate_actions(int n_slots, bool has_slots,
                                          int alphabet_size,
                                          const KnowledgeBase& kb,
                                          const EnumCaps& caps, KeyMode mode);

std::size_t enumerate_actions_count(int n_slots, bool has_slots,
                                    int alphabet_size, std::size_t kb_tokens,
                                    const EnumCaps& caps);

// Stage-independent action shape, applied uniformly whenever the scheduled
// node deviates; instantiated against the node's live view.
struct ActionTemplate {
  int content_code = 0;
  RecipientPattern pattern = RecipientPattern::kBoth;
  KeyChoice key = KeyChoice::kFresh;
};

std::vector<ActionTemplate> enumerate_templates(int alphabet_size);

EnumAction instantiate_template(const ActionTemplate& t, int n_slots,
                                bool has_slots);

// Scripted attacks: fully explicit replacement emissions with key references
// resolved against the deviator's live view at emission time.
struct ScriptKeyRef {
  enum class Kind : std::uint8_t {
    kFresh,          // random draw
    kObservedKey,    // protocol key observed from `node` at `stage`
    kReceivedTripletKey,  // key inside a received triplet (node, stage)
    kOwnKey,         // deviator's own broadcast key at `stage`
  };
  Kind kind = Kind::kFresh;
  NodeId node = -1;
  Stage stage = 0;
};

struct ScriptTriplet {
  NodeId subject = -1;
  Stage stage = 0;
  ScriptKeyRef key;
};

struct ScriptEnvelope {
  std::vector<NodeId> recipients;  // sorted
  int content_code = 0;            // 0 = m0, k > 0 = symbol k-1
  std::vector<ScriptTriplet> triplets;
};

struct ScriptEntry {
  Stage stage = 0;
  NodeId node = -1;
  bool force_reboot = false;           // reboot the node instead of emitting
  std::vector<ScriptEnvelope> envelopes;
};

// Honest behavior at unscripted stages. Construction rejects scripts with
// two deviators at one stage unless allow_multilateral is set (crafted
// off-path demos need that).
class ScriptedAdversary {
 public:
  ScriptedAdversary(std::vector<ScriptEntry> entries, Scope scope,
                    bool allow_multilateral = false);

  const std::vector<ScriptEntry>& entries() const { return entries_; }
  Scope scope() const { return scope_; }
  bool multilateral() const { return multilateral_; }
  std::vector<const ScriptEntry*> at(Stage t) const;
  DeviationSchedule schedule() const;

 private:
  std::vector<ScriptEntry> entries_;
  Scope scope_;
  bool multilateral_;
};

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_ADVERSARY_HPP_
