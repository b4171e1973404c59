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

#include "core/adversary.hpp"

#include <algorithm>
#include <stdexcept>

namespace robustcomm {

std::optional<std::string> validate_schedule(const DeviationSchedule& s,
                                             const ProtocolConfig& cfg,
                                             const Network& net) {
  std::vector<Stage> seen;
  for (const auto& [stage, node] : s.entries) {
    if (stage < 1 || stage > cfg.total_stages) return "stage out of schedule";
    if (node < 0 || node >= net.size()) return "unknown deviator";
    if (std::find(seen.begin(), seen.end(), stage) != seen.end())
      return "two deviators at one stage";
    seen.push_back(stage);
    bool is_terminal = (node == net.sender || node == net.receiver);
    if (s.scope == Scope::kSigma && is_terminal)
      return "sender/receiver deviation outside Sigma";
    if (s.scope == Scope::kSigmaStar && node == net.sender && stage == 1)
      return "sender barred at stage 1";
  }
  return std::nullopt;
}

bool KnowledgeBase::has_token(const AuthKey& k) const {
  return std::find(tokens.begin(), tokens.end(), k) != tokens.end();
}

void KnowledgeBase::absorb(const Envelope& env) {
  auto add_token = [&](const AuthKey& k) {
    if (!has_token(k)) tokens.push_back(k);
  };
  auto add_content = [&](const Content& c) {
    if (std::find(contents.begin(), contents.end(), c) == contents.end())
      contents.push_back(c);
  };
  add_token(env.payload.key);
  add_content(env.payload.content);
  for (const auto& t : env.payload.triplets) add_token(t.key);
}

std::size_t enumerate_actions_count(int n_slots, bool has_slots,
                                    int alphabet_size, std::size_t kb_tokens,
                                    const EnumCaps& caps) {
  std::size_t contents = static_cast<std::size_t>(alphabet_size) + 1;
  std::size_t patterns = 3;
  if (!has_slots || n_slots == 0) return contents * patterns;
  std::size_t per_slot = 2 + std::min(kb_tokens, caps.replay_cap);
  std::size_t slots = 1;
  for (int i = 0; i < n_slots; ++i) slots *= per_slot;
  return contents * slots * patterns;
}

std::vector<EnumAction> enumerate_actions(int n_slots, bool has_slots,
                                          int alphabet_size,
                                          const KnowledgeBase& kb,
                                          const EnumCaps& caps, KeyMode mode) {
  if (mode != KeyMode::kSymbolic)
    throw std::domain_error("enumeration requires symbolic keys");
  std::vector<EnumAction> out;
  std::size_t replays = std::min(kb.tokens.size(), caps.replay_cap);
  // Per slot: the true observed key, each replayable token, one fresh token.
  std::size_t per_slot = has_slots && n_slots > 0 ? 2 + replays : 1;
  std::size_t slot_combos = 1;
  for (int i = 0; i < (has_slots ? n_slots : 0); ++i) slot_combos *= per_slot;

  for (int c = 0; c <= alphabet_size; ++c) {
    for (int pat = 0; pat < 3; ++pat) {
      for (std::size_t combo = 0; combo < slot_combos; ++combo) {
        EnumAction a;
        a.content_code = c;
        a.pattern = static_cast<RecipientPattern>(pat);
        a.has_slots = has_slots && n_slots > 0;
        a.n_slots = n_slots;
        std::size_t rest = combo;
        for (int s = 0; s < n_slots && a.has_slots; ++s) {
          std::size_t pick = rest % per_slot;
          rest /= per_slot;
          if (pick == 0) {
            a.slot_key[s] = KeyChoice::kTrueObserved;
          } else if (pick <= replays) {
            a.slot_key[s] = KeyChoice::kReplay;
            a.replay_index[s] = pick - 1;
          } else {
            a.slot_key[s] = KeyChoice::kFresh;
          }
        }
        out.push_back(a);
      }
    }
  }
  return out;
}

std::vector<ActionTemplate> enumerate_templates(int alphabet_size) {
  std::vector<ActionTemplate> out;
  for (int c = 0; c <= alphabet_size; ++c)
    for (int pat = 0; pat < 3; ++pat)
      for (int k = 0; k < 3; ++k)
        out.push_back({c, static_cast<RecipientPattern>(pat),
                       static_cast<KeyChoice>(k)});
  return out;
}

EnumAction instantiate_template(const ActionTemplate& t, int n_slots,
                                bool has_slots) {
  EnumAction a;
  a.content_code = t.content_code;
  a.pattern = t.pattern;
  a.has_slots = has_slots && n_slots > 0;
  a.n_slots = n_slots;
  a.slot_key[0] = a.slot_key[1] = t.key;
  return a;
}

ScriptedAdversary::ScriptedAdversary(std::vector<ScriptEntry> entries,
                                     Scope scope, bool allow_multilateral)
    : entries_(std::move(entries)), scope_(scope) {
  multilateral_ = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    for (std::size_t j = i + 1; j < entries_.size(); ++j) {
      if (entries_[i].stage == entries_[j].stage &&
          entries_[i].node != entries_[j].node)
        multilateral_ = true;
    }
  }
  if (multilateral_ && !allow_multilateral)
    throw std::invalid_argument("script violates unilaterality");
}

std::vector<const ScriptEntry*> ScriptedAdversary::at(Stage t) const {
  std::vector<const ScriptEntry*> out;
  for (const auto& e : entries_)
    if (e.stage == t) out.push_back(&e);
  return out;
}

DeviationSchedule ScriptedAdversary::schedule() const {
  DeviationSchedule s;
  s.scope = scope_;
  for (const auto& e : entries_) {
    if (e.force_reboot) continue;
    bool seen = false;
    for (const auto& existing : s.entries)
      if (existing.first == e.stage && existing.second == e.node) seen = true;
    if (!seen) s.entries.emplace_back(e.stage, e.node);
  }
  return s;
}

}  // namespace robustcomm
