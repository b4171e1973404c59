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

#include "core/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace robustcomm {

ProtocolConfig build_schedule_unchecked(int n_circle) {
  ProtocolConfig cfg;
  cfg.n_circle = n_circle;
  cfg.block_length = 2 * n_circle - 3;
  cfg.num_blocks = std::max(n_circle - 3, 1);
  cfg.total_stages = 1 + cfg.num_blocks * cfg.block_length;
  cfg.max_other_triplets = 1 + (n_circle - 3) * (2 * n_circle - 3);
  if (cfg.max_other_triplets < 1) cfg.max_other_triplets = 1;
  return cfg;
}

ProtocolConfig build_schedule(int n_circle) {
  if (n_circle < 4)
    throw std::domain_error("circle needs at least four nodes (K, K' >= 1)");
  return build_schedule_unchecked(n_circle);
}

void reboot(NodeState& state) {
  if (state.rebooted) return;
  state.rebooted = true;  // content becomes m0; knowledge kept for audit
}

namespace {

bool contains(const std::vector<NodeId>& v, NodeId x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

bool contains_triplet(const std::vector<Triplet>& v, const Triplet& t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

}  // namespace

ProtocolInstance::ProtocolInstance(const Network* net, Circle circle,
                                   ProtocolConfig cfg, Content message,
                                   int alphabet_size, int instance_id)
    : net_(net),
      circle_(std::move(circle)),
      cfg_(cfg),
      message_(message),
      alphabet_size_(alphabet_size),
      instance_id_(instance_id) {
  const auto& L = circle_.left;
  const auto& R = circle_.right;
  std::vector<NodeId> order(L);
  for (std::size_t i = 1; i + 1 < R.size(); ++i) order.push_back(R[i]);
  for (NodeId v : order) {
    if (state_index_.count(v)) continue;
    NodeState st;
    st.id = v;
    st.is_role_sender = (v == circle_.role_sender());
    st.is_role_receiver = (v == circle_.role_receiver());
    if (st.is_role_sender) {
      st.side = Side::kSender;
      st.nbr[0] = L[1];
      st.nbr[1] = R[1];
    } else if (st.is_role_receiver) {
      st.side = Side::kReceiver;
      st.nbr[0] = L[L.size() - 2];
      st.nbr[1] = R[R.size() - 2];
    } else {
      for (std::size_t i = 1; i + 1 < L.size(); ++i) {
        if (L[i] == v) {
          st.side = Side::kLeft;
          st.nbr[0] = L[i - 1];
          st.nbr[1] = L[i + 1];
        }
      }
      for (std::size_t i = 1; i + 1 < R.size(); ++i) {
        if (R[i] == v && st.nbr[0] < 0) {
          st.side = Side::kRight;
          st.nbr[0] = R[i - 1];
          st.nbr[1] = R[i + 1];
        }
      }
    }
    st.first_left = (L.size() > 2 && v == L[1]);
    st.first_right = (R.size() > 2 && v == R[1]);
    if (st.is_role_sender || st.is_role_receiver) {
      st.monitored.push_back(st.nbr[0]);
      if (st.nbr[1] != st.nbr[0]) st.monitored.push_back(st.nbr[1]);
    } else {
      st.monitored.push_back(st.nbr[1]);
    }
    if (st.is_role_sender) {
      st.knows = message_;
      st.audit_knows = message_;
      st.learned_at_block = 0;
    }
    int sz = cfg_.total_stages + 1;
    for (int s = 0; s < 2; ++s) {
      st.key_log[s].resize(sz);
      st.content_log[s].resize(sz);
    }
    st.own_key.resize(sz);
    state_index_[v] = static_cast<int>(states_.size());
    states_.push_back(std::move(st));
  }
}

NodeState& ProtocolInstance::state(NodeId v) {
  auto it = state_index_.find(v);
  if (it == state_index_.end()) throw std::logic_error("node not on circle");
  return states_[it->second];
}

const NodeState& ProtocolInstance::state(NodeId v) const {
  auto it = state_index_.find(v);
  if (it == state_index_.end()) throw std::logic_error("node not on circle");
  return states_[it->second];
}

std::vector<NodeId> ProtocolInstance::circle_nodes() const {
  std::vector<NodeId> out;
  out.reserve(states_.size());
  for (const auto& st : states_) out.push_back(st.id);
  return out;
}

std::vector<NodeId> ProtocolInstance::circle_pair(NodeId p) const {
  const NodeState& st = state(p);
  std::vector<NodeId> pair{st.nbr[0]};
  if (st.nbr[1] != st.nbr[0]) pair.push_back(st.nbr[1]);
  std::sort(pair.begin(), pair.end());
  return pair;
}

bool ProtocolInstance::is_protocol_slot(
    NodeId origin, const std::vector<NodeId>& recipients) const {
  if (!on_circle(origin)) return false;
  return recipients == circle_pair(origin);
}

bool ProtocolInstance::subject_on_left(NodeId v) const {
  return contains(circle_.left, v);
}

bool ProtocolInstance::subject_on_right(NodeId v) const {
  return contains(circle_.right, v);
}

std::vector<Envelope> ProtocolInstance::honest_emit(NodeId p, Stage stage,
                                                    KeySource& keys) {
  if (stage < 1 || stage > cfg_.total_stages)
    throw std::domain_error("stage outside the schedule");
  NodeState& st = state(p);
  std::vector<Envelope> out;

  Envelope env;
  env.origin = p;
  env.recipients = circle_pair(p);
  env.stage = stage;
  env.instance = instance_id_;
  env.payload.key = keys.fresh();
  st.own_key[stage] = env.payload.key;

  if (stage == 1) {
    env.payload.content =
        st.is_role_sender ? message_ : Content::null();
  } else {
    env.payload.content = st.content_to_send();
  }

  std::vector<NodeId> used_neighbor_subjects;
  if (stage >= 3) {
    Stage ref = stage - 1;
    bool in_window =
        cfg_.carry_final_detection || cfg_.block_of(ref) == cfg_.block_of(stage);
    if (in_window) {
      // One slot per monitored successor: the oldest unreported detection in
      // the reporting window, falling back to a camouflage triplet about the
      // previous stage. Reports missed while deviating go out at the next
      // honest stage.
      int cur_block = std::max(cfg_.block_of(stage), 1);
      Stage lo = cfg_.block_start(cur_block);
      if (cfg_.carry_final_detection && lo > 2) lo -= 1;
      for (NodeId subj : st.monitored) {
        std::optional<Triplet> report;
        for (Stage s = lo; s < stage; ++s) {
          auto it = st.detections.find({subj, s});
          if (it == st.detections.end()) continue;
          if (st.reported_detections.count({subj, s})) continue;
          report = Triplet{subj, s, it->second};
          st.reported_detections.insert({subj, s});
          break;
        }
        Triplet t = report ? *report : Triplet{subj, ref, keys.fresh()};
        env.payload.triplets.push_back(t);
        st.emitted_triplets.push_back(t);
        used_neighbor_subjects.push_back(subj);
      }
    }
  }

  // Drain the forward queue into the remaining triplet slots.
  std::vector<NodeState::PendingTriplet> keep;
  std::map<NodeId, int> other_count;
  Stage tb = cfg_.block_of(stage) >= 1 ? cfg_.block_start(cfg_.block_of(stage))
                                       : 1;
  for (auto& item : st.pending) {
    bool boundary_hop = (stage - item.queued_at) <= 1;
    if (item.t.stage < tb && !boundary_hop) continue;  // stale, drop
    if (contains_triplet(st.emitted_triplets, item.t)) continue;
    bool neighbor_subject = net_->adjacent(p, item.t.subject);
    if (neighbor_subject) {
      if (contains(used_neighbor_subjects, item.t.subject)) {
        keep.push_back(item);  // slot taken, auto-correct next stage
        continue;
      }
      used_neighbor_subjects.push_back(item.t.subject);
    } else {
      if (other_count[item.t.subject] >= cfg_.max_other_triplets) {
        keep.push_back(item);
        continue;
      }
      other_count[item.t.subject] += 1;
    }
    env.payload.triplets.push_back(item.t);
    st.emitted_triplets.push_back(item.t);
  }
  st.pending = std::move(keep);
  out.push_back(std::move(env));

  // Babble to every neighbor outside the circle pair; decoders ignore these.
  auto pair = circle_pair(p);
  for (NodeId nb : net_->neighbors(p)) {
    if (contains(pair, nb)) continue;
    Envelope b;
    b.origin = p;
    b.recipients = {nb};
    b.stage = stage;
    b.instance = instance_id_;
    b.babble = true;
    std::uint64_t pick = keys.rng().next_below(
        static_cast<std::uint64_t>(alphabet_size_) + 1);
    b.payload.content = pick == 0 ? Content::null()
                                  : Content::symbol(pick - 1);
    b.payload.key = keys.fresh();
    out.push_back(std::move(b));
  }
  return out;
}

void ProtocolInstance::queue_pending(NodeState& st, const Triplet& t,
                                     Stage stage) {
  if (contains_triplet(st.emitted_triplets, t)) return;
  for (const auto& item : st.pending)
    if (item.t == t) return;
  st.pending.push_back({t, stage});
}

void ProtocolInstance::consider_forward(NodeState& st, int from_slot,
                                        const Triplet& t,
                                        const std::vector<Triplet>& same_envelope,
                                        Stage stage, KeySource& keys) {
  int block = cfg_.block_of(stage);
  if (block < 1) return;
  Stage tb = cfg_.block_start(block);
  if (!(tb <= t.stage && t.stage < stage)) return;
  NodeId from = st.nbr[from_slot];
  bool subj_left = subject_on_left(t.subject);
  bool subj_right = subject_on_right(t.subject);

  if (st.is_role_sender) {
    // Cross-side relay: left-side reports arriving from i_1 and right-side
    // reports arriving from j_1 are rebroadcast to both successors.
    if ((from == st.nbr[0] && subj_left) || (from == st.nbr[1] && subj_right))
      queue_pending(st, t, stage);
    return;
  }
  if (st.is_role_receiver) {
    if ((from == st.nbr[0] && subj_right) || (from == st.nbr[1] && subj_left))
      queue_pending(st, t, stage);
    return;
  }

  bool own_left = (st.side == Side::kLeft);
  bool subj_same = own_left ? subj_left : subj_right;
  bool subj_opp = own_left ? subj_right : subj_left;
  if (from == st.nbr[1] && subj_same) {
    queue_pending(st, t, stage);
    return;
  }
  if (from == st.nbr[0] && subj_opp) {
    bool first = own_left ? st.first_left : st.first_right;
    if (!first) {
      queue_pending(st, t, stage);
      return;
    }
    // p adjacent to the role sender, report arriving from the role sender
    // about the opposite side. A grand message reading "both first
    // intermediaries deviated at s" (same envelope, key-matching self
    // report) can only come from a deviating sender; its key gets
    // camouflaged away.
    NodeId opposite_first = own_left ? circle_.right[1] : circle_.left[1];
    if (t.subject != opposite_first) {
      queue_pending(st, t, stage);  // (i)
      return;
    }
    bool credible_self = false;
    for (const auto& other : same_envelope) {
      if (other.subject == st.id && other.stage == t.stage &&
          t.stage >= 1 &&
          t.stage < static_cast<Stage>(st.own_key.size()) &&
          st.own_key[t.stage] && other.key == *st.own_key[t.stage]) {
        credible_self = true;
        break;
      }
    }
    if (!credible_self) {
      queue_pending(st, t, stage);  // (ii)
    } else {
      queue_pending(st, Triplet{t.subject, t.stage, keys.fresh()},
                    stage);  // (iii)
    }
  }
}

void ProtocolInstance::absorb_inbox(NodeId p, Stage stage,
                                    const std::vector<const Envelope*>& delivered,
                                    KeySource& keys) {
  NodeState& st = state(p);
  const Envelope* proto[2] = {nullptr, nullptr};
  for (const Envelope* e : delivered) {
    if (!contains(e->recipients, p))
      throw std::logic_error("envelope delivered to a non-recipient");
    if (e->babble) continue;
    if (!is_protocol_slot(e->origin, e->recipients)) continue;
    for (int slot = 0; slot < 2; ++slot)
      if (st.nbr[slot] == e->origin) proto[slot] = e;
  }

  for (int slot = 0; slot < 2; ++slot) {
    if (!proto[slot]) continue;
    st.key_log[slot][stage] = proto[slot]->payload.key;
    st.content_log[slot][stage] = proto[slot]->payload.content;
    for (const auto& t : proto[slot]->payload.triplets)
      st.triplets_from[slot].push_back({t, stage});
  }

  if (stage == 1 && (st.first_left || st.first_right) && proto[0] &&
      st.nbr[0] == circle_.role_sender() && !st.knows.is_message()) {
    const Content& c = proto[0]->payload.content;
    if (c.is_message()) {
      st.knows = c;
      st.audit_knows = c;
      st.learned_at_block = 0;
    }
  }

  if (stage >= 2) {
    for (NodeId subj : st.monitored) {
      for (int slot = 0; slot < 2; ++slot) {
        if (st.nbr[slot] != subj || !proto[slot]) continue;
        const Content& c = proto[slot]->payload.content;
        if (!c.is_message()) continue;
        bool false_announcement;
        if (st.rebooted) {
          false_announcement = true;  // acts as if the message were m0
        } else if (st.knows.is_message()) {
          false_announcement = !(c == st.knows);
        } else {
          // "broadcasting m although he cannot know it": sound only when the
          // watched successor's knowledge must flow through this node. The
          // role receiver's predecessors legitimately learn first.
          false_announcement = !st.is_role_receiver;
        }
        if (false_announcement)
          st.detections[{subj, stage}] = proto[slot]->payload.key;
        break;
      }
    }
    for (int slot = 0; slot < 2; ++slot) {
      if (!proto[slot]) continue;
      if (slot == 1 && st.nbr[1] == st.nbr[0]) continue;
      for (const auto& t : proto[slot]->payload.triplets)
        consider_forward(st, slot, t, proto[slot]->payload.triplets, stage,
                         keys);
    }
  }

  // A player who knows m and watches both circle neighbors broadcast
  // elements of M \ {m} at one stage has proof of a multilateral deviation:
  // under unilateral schedules an honest neighbor only ever broadcasts m or
  // m0. Only intermediaries reboot.
  if (!st.is_role_sender && !st.is_role_receiver && !st.rebooted &&
      st.knows.is_message()) {
    const auto& c0 = st.content_log[0][stage];
    const auto& c1 = st.content_log[1][stage];
    if (c0 && c1 && c0->is_message() && c1->is_message() &&
        !(*c0 == st.knows) && !(*c1 == st.knows)) {
      reboot(st);
    }
  }
}

std::vector<ProtocolInstance::DecodeSlots> ProtocolInstance::decode_instances(
    const NodeState& st) const {
  if (st.is_role_sender) return {};
  if (st.is_role_receiver) return {{0, 1}, {1, 0}};
  return {{0, 1}};
}

namespace {

// Earliest-ending validated sequence from one predecessor, if any.
std::optional<Content> validate_slot(const NodeState& st, int pred_slot,
                                     int poison_slot, Stage tb, Stage te,
                                     int needed) {
  std::vector<std::pair<Content, std::vector<Stage>>> groups;
  for (Stage t = tb; t <= te; ++t) {
    const auto& c = st.content_log[pred_slot][t];
    if (!c || !c->is_message()) continue;
    bool found = false;
    for (auto& g : groups)
      if (g.first == *c) {
        g.second.push_back(t);
        found = true;
      }
    if (!found) groups.push_back({*c, {t}});
  }
  std::optional<Content> best;
  Stage best_end = 0;
  for (const auto& g : groups) {
    int runs = static_cast<int>(g.second.size()) - needed + 1;
    for (int w = 0; w < runs; ++w) {
      Stage s1 = g.second[w];
      Stage send = g.second[w + needed - 1];
      const auto& key = st.key_log[pred_slot][s1];
      bool poisoned = false;
      for (const auto& rt : st.triplets_from[poison_slot]) {
        if (rt.received_at > send) continue;
        if (rt.t.subject != st.nbr[pred_slot] || rt.t.stage != s1) continue;
        if (key && rt.t.key == *key) {
          poisoned = true;
          break;
        }
      }
      if (!poisoned) {
        if (!best || send < best_end) {
          best = g.first;
          best_end = send;
        }
        break;  // later windows of this value end later
      }
    }
  }
  return best;
}

}  // namespace

// Merged decode over the node's instances. A null (m0) content signals that
// two instances validated distinct values; callers mark the state conflicted.
std::optional<Content> ProtocolInstance::decode_candidate(const NodeState& st,
                                                          int block) const {
  Stage tb = cfg_.block_start(block);
  Stage te = std::min<Stage>(cfg_.block_end(block), cfg_.total_stages);
  int needed = cfg_.n_circle - 1;
  std::optional<Content> result;
  for (const auto& inst : decode_instances(st)) {
    auto val =
        validate_slot(st, inst.pred_slot, inst.poison_slot, tb, te, needed);
    if (!val) continue;
    if (result && !(*result == *val)) return Content::null();
    result = val;
  }
  return result;
}

std::vector<LearnEvent> ProtocolInstance::end_of_block_decode(int block) {
  std::vector<LearnEvent> events;
  for (auto& st : states_) {
    if (st.knows.is_message() || st.rebooted || st.conflicted) continue;
    if (st.is_role_sender) continue;
    auto cand = decode_candidate(st, block);
    if (!cand) continue;
    if (!cand->is_message()) {  // sentinel: distinct validated values
      st.conflicted = true;
      continue;
    }
    st.knows = *cand;
    st.audit_knows = *cand;
    st.learned_at_block = block;
    LearnEvent ev{st.id, block, cfg_.block_end(block), *cand};
    events.push_back(ev);
    learn_events_.push_back(ev);
  }
  return events;
}

std::optional<Content> ProtocolInstance::receiver_output() const {
  const NodeState& st = state(circle_.role_receiver());
  if (st.conflicted) return std::nullopt;
  if (st.knows.is_message()) return st.knows;
  return std::nullopt;
}

}  // namespace robustcomm
