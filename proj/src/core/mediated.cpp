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

#include "core/mediated.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

#include "core/engine.hpp"
#include "core/protocol.hpp"
#include "core/rng.hpp"

namespace robustcomm {

namespace {
constexpr unsigned __int128 kOne = static_cast<unsigned __int128>(1) << 64;
}

Partition build_partition(const std::vector<Rational>& phi_row) {
  Rational sum;
  for (const auto& p : phi_row) {
    if (p < Rational(0)) throw std::domain_error("negative device entry");
    sum += p;
  }
  if (!(sum == Rational(1)))
    throw std::domain_error("device row must sum to 1");
  Partition part;
  part.bounds.resize(phi_row.size() + 1);
  part.bounds[0] = 0;
  unsigned __int128 cum = 0;
  for (std::size_t a = 0; a < phi_row.size(); ++a) {
    unsigned __int128 w;
    if (a + 1 == phi_row.size()) {
      w = kOne - cum;  // last cell absorbs the rounding residue
    } else {
      unsigned __int128 num =
          static_cast<unsigned __int128>(phi_row[a].num()) << 64;
      std::uint64_t den = static_cast<std::uint64_t>(phi_row[a].den());
      w = (num + den / 2) / den;
      if (w > kOne - cum) w = kOne - cum;
    }
    cum += w;
    part.bounds[a + 1] = cum;
  }
  return part;
}

int jcl_output(UnitFraction x, UnitFraction y, const Partition& cells) {
  unsigned __int128 v = wrap_add(x, y).bits;
  for (int a = 0; a < cells.n_cells(); ++a)
    if (v < cells.bounds[a + 1]) return a;
  return cells.n_cells() - 1;  // unreachable: bounds end at 2^64 > v
}

std::optional<int> majority_decode(std::optional<int> r1, std::optional<int> r2,
                                   std::optional<int> r3) {
  std::array<std::optional<int>, 3> r{r1, r2, r3};
  for (int i = 0; i < 3; ++i) {
    if (!r[i]) continue;
    int count = 0;
    for (int j = 0; j < 3; ++j)
      if (r[j] && *r[j] == *r[i]) ++count;
    if (count >= 2) return r[i];
  }
  return std::nullopt;
}

namespace {

struct CopySpec {
  NodeId sender;
  bool direct;  // sender adjacent to the receiver on the cycle
  std::unique_ptr<ProtocolInstance> inst;  // protocol copies only
  std::optional<int> direct_decode;        // direct copies: R's record
};

bool cycle_adjacent(const std::vector<NodeId>& cycle, NodeId a, NodeId b) {
  int n = static_cast<int>(cycle.size());
  for (int i = 0; i < n; ++i) {
    if (cycle[i] == a && (cycle[(i + 1) % n] == b || cycle[(i + n - 1) % n] == b))
      return true;
  }
  return false;
}

}  // namespace

MediatedResult run_mediated(const FiniteGame& g, const CommDevice& phi,
                            const Network& net,
                            const std::vector<MediatedDeviation>& deviations,
                            const MediatedConfig& mc) {
  g.validate();
  check_stochastic(phi, g.n_states(), g.n_actions(), "device");
  auto base = two_disjoint_paths(net);
  if (!base) throw std::invalid_argument("network has no two disjoint paths");
  auto cfg = build_schedule(base->n_circle());
  Stage Q = cfg.total_stages - 1;  // block stages of one transmission
  MediatedResult res;
  res.phase3_start = 3 + Q;
  res.total_stages = 3 + 2 * Q;

  KeySource keys(mc.key_mode, mc.seed);
  NodeId S = base->role_sender();
  NodeId R = base->role_receiver();
  NodeId i1 = base->left[1];
  NodeId j1 = base->right[1];
  auto cycle = base->cycle();

  // Nature and the two lottery draws.
  int omega;
  if (mc.forced_state) {
    omega = *mc.forced_state;
  } else {
    std::uint64_t u = keys.rng().next_u64();
    unsigned __int128 cum = 0;
    omega = g.n_states() - 1;
    for (int w = 0; w < g.n_states(); ++w) {
      unsigned __int128 num =
          static_cast<unsigned __int128>(g.prior[w].num()) << 64;
      cum += num / static_cast<std::uint64_t>(g.prior[w].den());
      if (static_cast<unsigned __int128>(u) < cum) {
        omega = w;
        break;
      }
    }
  }
  res.state = omega;
  res.x = keys.rng().next_u64();
  res.y = keys.rng().next_u64();

  std::vector<Partition> cells;
  cells.reserve(g.n_states());
  for (int w = 0; w < g.n_states(); ++w) cells.push_back(build_partition(phi[w]));

  // Instance 1: the y transmission, i1 in the sender role, j1 receiving.
  Circle y_circle = circle_from_cycle(cycle, i1, j1);
  ProtocolInstance y_run(&net, y_circle, cfg, Content::value(res.y), 0, 1);

  std::vector<CopySpec> copies;
  copies.push_back({S, false, nullptr, std::nullopt});
  copies.push_back({i1, cycle_adjacent(cycle, i1, R), nullptr, std::nullopt});
  copies.push_back({j1, cycle_adjacent(cycle, j1, R), nullptr, std::nullopt});

  auto deviation_at = [&](Stage t, NodeId v) -> const MediatedDeviation* {
    for (const auto& d : deviations)
      if (d.stage == t && d.node == v) return &d;
    return nullptr;
  };

  // Runner-level observations (control plane).
  std::uint64_t x_at_i1 = 0, x_at_j1 = 0;
  bool have_x_i1 = false, have_x_j1 = false;
  int omega_at_i1 = -1, omega_at_j1 = -1;

  ProtocolInstance base_probe(&net, *base, cfg, Content::symbol(0),
                              g.n_actions(), 0);
  auto base_pair = [&](NodeId v) { return base_probe.circle_pair(v); };

  auto capture = [&](const Envelope& e) {
    if (mc.capture_trace) res.trace_lines.push_back(trace_line(e, net));
  };
  if (mc.capture_trace) {
    res.trace_lines.push_back(
        "H seed=" + std::to_string(mc.seed) +
        " mode=" + (mc.key_mode == KeyMode::kSymbolic ? "symbolic" : "numeric") +
        " mediated=1");
  }

  std::array<std::optional<int>, 3> recs;  // broadcast at phase 3 start
  EnvelopeBounds bounds{cfg.max_other_triplets};

  for (Stage t = 1; t <= res.total_stages; ++t) {
    std::vector<Envelope> envs;
    auto emit_control = [&](NodeId v, Content c) {
      const MediatedDeviation* dev = deviation_at(t, v);
      if (dev && dev->mute) return;
      Envelope e;
      e.origin = v;
      e.recipients = base_pair(v);
      e.stage = t;
      e.instance = 0;
      e.payload.content =
          dev && dev->action_content ? Content::symbol(*dev->action_content)
                                     : c;
      e.payload.key = keys.fresh();
      envs.push_back(std::move(e));
    };

    if (t == 1) {
      for (NodeId v : base_probe.circle_nodes())
        emit_control(v, v == S ? Content::symbol(omega) : Content::null());
    }
    if (t == 2) emit_control(S, Content::value(res.x));

    // Phase-3 start: compute each broadcaster's recommendation from its own
    // view and spin up the three synchronized copies.
    if (t == res.phase3_start) {
      auto y_out = y_run.receiver_output();
      std::optional<std::uint64_t> y_at_j1;
      if (y_out && y_out->kind == Content::Kind::kValue)
        y_at_j1 = y_out->payload;
      const auto& s_knows = y_run.state(S).knows;
      std::optional<std::uint64_t> y_at_s;
      if (s_knows.kind == Content::Kind::kValue) y_at_s = s_knows.payload;

      auto rec_of = [&](std::optional<std::uint64_t> xv,
                        std::optional<std::uint64_t> yv,
                        int w) -> std::optional<int> {
        if (!xv || !yv || w < 0) return std::nullopt;
        return jcl_output({*xv}, {*yv}, cells[w]);
      };
      recs[0] = rec_of(res.x, y_at_s, omega);
      recs[1] = rec_of(have_x_i1 ? std::optional<std::uint64_t>(x_at_i1)
                                 : std::nullopt,
                       res.y, omega_at_i1);
      recs[2] = rec_of(have_x_j1 ? std::optional<std::uint64_t>(x_at_j1)
                                 : std::nullopt,
                       y_at_j1, omega_at_j1);
      res.honest_recommendation = jcl_output({res.x}, {res.y}, cells[omega]);

      for (int c = 0; c < 3; ++c) {
        if (copies[c].direct) continue;
        int rec = recs[c].value_or(0);
        Circle cc = circle_from_cycle(cycle, copies[c].sender, R);
        copies[c].inst = std::make_unique<ProtocolInstance>(
            &net, cc, cfg, Content::symbol(rec), g.n_actions(), 2 + c);
      }
      res.copies_synchronized = true;  // constructed at one stage by design
    }

    // Direct copies: the adjacent role sender's certified broadcast is the
    // whole transmission; it happens at the phase-3 start stage.
    if (t == res.phase3_start) {
      for (int c = 0; c < 3; ++c) {
        if (!copies[c].direct) continue;
        NodeId v = copies[c].sender;
        const MediatedDeviation* dev = deviation_at(t, v);
        if (dev && dev->mute) continue;
        Envelope e;
        e.origin = v;
        e.recipients = base_pair(v);
        e.stage = t;
        e.instance = 2 + c;
        int rec = recs[c].value_or(0);
        e.payload.content = dev && dev->action_content
                                ? Content::symbol(*dev->action_content)
                                : Content::symbol(rec);
        e.payload.key = keys.fresh();
        envs.push_back(std::move(e));
      }
    }

    // Protocol instances active at this stage.
    struct Active {
      ProtocolInstance* inst;
      Stage local;
    };
    std::vector<Active> active;
    if (t >= 2 && t <= 1 + cfg.total_stages) active.push_back({&y_run, t - 1});
    if (t >= res.phase3_start) {
      for (auto& c : copies)
        if (c.inst) active.push_back({c.inst.get(), t - res.phase3_start + 1});
    }
    for (auto& [inst, local] : active) {
      for (NodeId v : inst->circle_nodes()) {
        const MediatedDeviation* dev = deviation_at(t, v);
        if (dev) {
          if (dev->mute) continue;
          if (dev->action_content) {
            // replace the content, keep an honest-shaped envelope
            Envelope e;
            e.origin = v;
            e.recipients = inst->circle_pair(v);
            e.stage = t;
            e.instance = inst->id();
            e.payload.content = Content::symbol(*dev->action_content);
            e.payload.key = keys.fresh();
            inst->state(v).own_key[local] = e.payload.key;
            envs.push_back(std::move(e));
            continue;
          }
        }
        auto out = inst->honest_emit(v, local, keys);
        for (auto& e : out) {
          if (e.babble && !mc.emit_babble) continue;
          e.stage = t;
          envs.push_back(std::move(e));
        }
      }
    }

    // Validation, receiver-ignorance scan, capture, delivery.
    for (const auto& e : envs) {
      auto viol = validate_envelope(e, net, bounds);
      if (viol) throw std::logic_error("mediated envelope invalid: " + *viol);
      capture(e);
      if (!e.babble && t < res.phase3_start &&
          std::find(e.recipients.begin(), e.recipients.end(), R) !=
              e.recipients.end()) {
        if (e.payload.content.kind == Content::Kind::kSymbol)
          res.receiver_ignorance_ok = false;  // a state symbol reached R
        if (e.payload.content.kind == Content::Kind::kValue &&
            e.payload.content.payload == res.x)
          res.receiver_ignorance_ok = false;  // the sender's draw reached R
      }
    }

    // Control observations at i1 / j1.
    for (const auto& e : envs) {
      if (e.instance != 0 || e.origin != S) continue;
      bool to_i1 = std::find(e.recipients.begin(), e.recipients.end(), i1) !=
                   e.recipients.end();
      bool to_j1 = std::find(e.recipients.begin(), e.recipients.end(), j1) !=
                   e.recipients.end();
      if (t == 1 && e.payload.content.kind == Content::Kind::kSymbol) {
        if (to_i1) omega_at_i1 = static_cast<int>(e.payload.content.payload);
        if (to_j1) omega_at_j1 = static_cast<int>(e.payload.content.payload);
      }
      if (t == 2 && e.payload.content.kind == Content::Kind::kValue) {
        if (to_i1) {
          x_at_i1 = e.payload.content.payload;
          have_x_i1 = true;
        }
        if (to_j1) {
          x_at_j1 = e.payload.content.payload;
          have_x_j1 = true;
        }
      }
    }

    // Direct-copy reception at R.
    if (t == res.phase3_start) {
      for (int c = 0; c < 3; ++c) {
        if (!copies[c].direct) continue;
        for (const auto& e : envs) {
          if (e.instance != 2 + c || e.origin != copies[c].sender) continue;
          if (std::find(e.recipients.begin(), e.recipients.end(), R) ==
              e.recipients.end())
            continue;
          if (e.payload.content.kind == Content::Kind::kSymbol)
            copies[c].direct_decode =
                static_cast<int>(e.payload.content.payload);
        }
      }
    }

    // Per-instance delivery and block decoding.
    for (auto& [inst, local] : active) {
      std::vector<const Envelope*> delivered;
      for (NodeId v : inst->circle_nodes()) {
        delivered.clear();
        for (const auto& e : envs) {
          if (e.instance != inst->id()) continue;
          if (std::find(e.recipients.begin(), e.recipients.end(), v) !=
              e.recipients.end())
            delivered.push_back(&e);
        }
        inst->absorb_inbox(v, local, delivered, keys);
      }
      int b = cfg.block_of(local);
      if (b >= 1 && local == cfg.block_end(b)) {
        auto events = inst->end_of_block_decode(b);
        if (mc.capture_trace) {
          for (const auto& ev : events) {
            res.trace_lines.push_back(
                "L t=" + std::to_string(t) + " i=" +
                std::to_string(inst->id()) + " block=" + std::to_string(b) +
                " node=" + net.name(ev.node));
          }
        }
      }
    }
  }

  for (int c = 0; c < 3; ++c) {
    if (copies[c].direct) {
      res.copy_decodes[c] = copies[c].direct_decode;
    } else if (copies[c].inst) {
      auto out = copies[c].inst->receiver_output();
      if (out && out->kind == Content::Kind::kSymbol)
        res.copy_decodes[c] = static_cast<int>(out->payload);
    }
  }
  res.majority =
      majority_decode(res.copy_decodes[0], res.copy_decodes[1],
                      res.copy_decodes[2]);
  res.receiver_action = res.majority.value_or(0);
  if (mc.capture_trace) {
    std::string line = "O copies=";
    for (int c = 0; c < 3; ++c) {
      if (c) line += ",";
      line += res.copy_decodes[c] ? std::to_string(*res.copy_decodes[c]) : "u";
    }
    line += " action=" + std::to_string(res.receiver_action);
    res.trace_lines.push_back(line);
  }
  return res;
}

}  // namespace robustcomm
