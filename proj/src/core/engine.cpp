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

#include "core/engine.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "core/rng.hpp"

namespace robustcomm {

AdversaryPlan AdversaryPlan::honest(Scope scope) {
  AdversaryPlan p;
  p.scope = scope;
  return p;
}

AdversaryPlan AdversaryPlan::from_script(const ScriptedAdversary& script) {
  AdversaryPlan p;
  p.scope = script.scope();
  p.multilateral = script.multilateral();
  for (const auto& e : script.entries()) {
    Event ev;
    ev.stage = e.stage;
    ev.node = e.node;
    if (e.force_reboot) {
      ev.kind = Event::Kind::kReboot;
    } else {
      ev.kind = Event::Kind::kScript;
      ev.envelopes = e.envelopes;
    }
    p.events.push_back(std::move(ev));
  }
  return p;
}

DeviationSchedule AdversaryPlan::schedule() const {
  DeviationSchedule s;
  s.scope = scope;
  for (const auto& e : events) {
    if (e.kind == Event::Kind::kReboot) continue;
    bool seen = false;
    for (const auto& x : s.entries)
      if (x.first == e.stage && x.second == e.node) seen = true;
    if (!seen) s.entries.emplace_back(e.stage, e.node);
  }
  return s;
}

bool AdversaryPlan::has_forced_reboot() const {
  for (const auto& e : events)
    if (e.kind == Event::Kind::kReboot) return true;
  return false;
}

std::string Trace::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

namespace {

struct ReceivedTripletRec {
  NodeId subject;
  Stage stage;
  AuthKey key;
};

Envelope materialize_enum(ProtocolInstance& inst, const KnowledgeBase& kb,
                          KeySource& keys, NodeId v, Stage t,
                          const EnumAction& a) {
  NodeState& st = inst.state(v);
  Envelope env;
  env.origin = v;
  env.stage = t;
  env.instance = inst.id();
  switch (a.pattern) {
    case RecipientPattern::kBoth:
      env.recipients = inst.circle_pair(v);
      break;
    case RecipientPattern::kPredOnly:
      env.recipients = {st.nbr[0]};
      break;
    case RecipientPattern::kSuccOnly:
      env.recipients = {st.nbr[1]};
      break;
  }
  env.payload.content = a.content_code == 0
                            ? Content::null()
                            : Content::symbol(a.content_code - 1);
  env.payload.key = keys.fresh();
  if (env.recipients == inst.circle_pair(v)) st.own_key[t] = env.payload.key;
  if (t >= 3) {
    Stage ref = t - 1;
    for (std::size_t j = 0; j < st.monitored.size() && j < 2; ++j) {
      NodeId subject = st.monitored[j];
      AuthKey k;
      switch (a.slot_key[j]) {
        case KeyChoice::kTrueObserved: {
          bool found = false;
          for (int s = 0; s < 2 && !found; ++s) {
            if (st.nbr[s] == subject && st.key_log[s][ref]) {
              k = *st.key_log[s][ref];
              found = true;
            }
          }
          if (!found) k = keys.fresh();
          break;
        }
        case KeyChoice::kReplay:
          k = kb.tokens.empty()
                  ? keys.fresh()
                  : kb.tokens[a.replay_index[j] % kb.tokens.size()];
          break;
        case KeyChoice::kFresh:
          k = keys.fresh();
          break;
      }
      env.payload.triplets.push_back({subject, ref, k});
    }
  }
  return env;
}

std::vector<Envelope> materialize_script(
    ProtocolInstance& inst, const std::vector<ReceivedTripletRec>& recv,
    KeySource& keys, NodeId v, Stage t,
    const std::vector<ScriptEnvelope>& specs) {
  NodeState& st = inst.state(v);
  std::vector<Envelope> out;
  for (const auto& spec : specs) {
    Envelope env;
    env.origin = v;
    env.recipients = spec.recipients;
    std::sort(env.recipients.begin(), env.recipients.end());
    env.stage = t;
    env.instance = inst.id();
    env.payload.content = spec.content_code == 0
                              ? Content::null()
                              : Content::symbol(spec.content_code - 1);
    env.payload.key = keys.fresh();
    if (env.recipients == inst.circle_pair(v)) st.own_key[t] = env.payload.key;
    for (const auto& ts : spec.triplets) {
      AuthKey k;
      switch (ts.key.kind) {
        case ScriptKeyRef::Kind::kFresh:
          k = keys.fresh();
          break;
        case ScriptKeyRef::Kind::kObservedKey: {
          bool found = false;
          for (int s = 0; s < 2 && !found; ++s) {
            if (st.nbr[s] == ts.key.node && ts.key.stage >= 0 &&
                ts.key.stage < static_cast<Stage>(st.key_log[s].size()) &&
                st.key_log[s][ts.key.stage]) {
              k = *st.key_log[s][ts.key.stage];
              found = true;
            }
          }
          if (!found)
            throw std::invalid_argument(
                "script references an unobserved key");
          break;
        }
        case ScriptKeyRef::Kind::kReceivedTripletKey: {
          bool found = false;
          for (const auto& r : recv) {
            if (r.subject == ts.key.node && r.stage == ts.key.stage) {
              k = r.key;
              found = true;
              break;
            }
          }
          if (!found)
            throw std::invalid_argument(
                "script references an unreceived triplet key");
          break;
        }
        case ScriptKeyRef::Kind::kOwnKey: {
          if (ts.key.stage < 1 ||
              ts.key.stage >= static_cast<Stage>(st.own_key.size()) ||
              !st.own_key[ts.key.stage])
            throw std::invalid_argument("script references a missing own key");
          k = *st.own_key[ts.key.stage];
          break;
        }
      }
      env.payload.triplets.push_back({ts.subject, ts.stage, k});
    }
    out.push_back(std::move(env));
  }
  return out;
}

// Value-copyable single-instance executor; sweeps branch by copying it at
// deviation points.
struct PlainRun {
  const Network* net;
  RunConfig rc;
  ProtocolInstance inst;
  KeySource keys;
  std::vector<KnowledgeBase> kb;
  std::vector<std::vector<ReceivedTripletRec>> recv_triplets;
  std::vector<NodeId> off_circle;
  Trace trace;
  long broadcast_count = 0;
  std::vector<AdversaryPlan::Event> applied;

  PlainRun(const Network& n, const Circle& circle, const ProtocolConfig& cfg,
           Content message, int alphabet_size, const RunConfig& run_cfg)
      : net(&n),
        rc(run_cfg),
        inst(&n, circle, cfg, message, alphabet_size, 0),
        keys(run_cfg.key_mode, run_cfg.seed) {
    kb.resize(n.size());
    recv_triplets.resize(n.size());
    for (NodeId v = 0; v < n.size(); ++v)
      if (!inst.on_circle(v)) off_circle.push_back(v);
    trace.seed = run_cfg.seed;
    trace.key_mode = run_cfg.key_mode;
    trace.message = message;
    trace.circle = circle;
    trace.cfg = cfg;
  }

  void step(Stage t, const std::vector<const AdversaryPlan::Event*>& evs) {
    std::vector<Envelope> envs;
    std::vector<char> adversarial;
    auto deviation_for = [&](NodeId v) -> const AdversaryPlan::Event* {
      for (const auto* e : evs)
        if (e->node == v) return e;
      return nullptr;
    };
    for (const auto* e : evs)
      if (e->kind == AdversaryPlan::Event::Kind::kReboot)
        inst.force_reboot(e->node);

    for (NodeId v : inst.circle_nodes()) {
      const auto* ev = deviation_for(v);
      if (ev && ev->kind == AdversaryPlan::Event::Kind::kEnum) {
        envs.push_back(materialize_enum(inst, kb[v], keys, v, t, ev->action));
        adversarial.push_back(1);
        applied.push_back(*ev);
        continue;
      }
      if (ev && ev->kind == AdversaryPlan::Event::Kind::kScript) {
        auto scripted =
            materialize_script(inst, recv_triplets[v], keys, v, t,
                               ev->envelopes);
        for (auto& e : scripted) {
          envs.push_back(std::move(e));
          adversarial.push_back(1);
        }
        applied.push_back(*ev);
        continue;
      }
      auto honest = inst.honest_emit(v, t, keys);
      for (auto& e : honest) {
        if (e.babble && !rc.emit_babble) continue;
        envs.push_back(std::move(e));
        adversarial.push_back(0);
      }
    }
    if (rc.emit_babble) {
      for (NodeId v : off_circle) {
        for (NodeId nb : net->neighbors(v)) {
          Envelope b;
          b.origin = v;
          b.recipients = {nb};
          b.stage = t;
          b.babble = true;
          std::uint64_t pick = keys.rng().next_below(3);
          b.payload.content =
              pick == 0 ? Content::null() : Content::symbol(pick - 1);
          b.payload.key = keys.fresh();
          envs.push_back(std::move(b));
          adversarial.push_back(0);
        }
      }
    }

    EnvelopeBounds bounds{inst.cfg().max_other_triplets};
    for (std::size_t i = 0; i < envs.size(); ++i) {
      if (!rc.check_envelopes) break;
      auto viol = validate_envelope(envs[i], *net, bounds);
      if (viol) {
        if (adversarial[i])
          throw std::invalid_argument("adversary envelope invalid: " + *viol);
        throw std::logic_error("honest envelope invalid: " + *viol);
      }
    }

    for (std::size_t i = 0; i < envs.size(); ++i)
      if (!envs[i].babble && inst.on_circle(envs[i].origin))
        broadcast_count += 1;
    if (rc.capture_trace)
      for (const auto& e : envs) trace.lines.push_back(trace_line(e, *net));

    std::vector<const Envelope*> delivered;
    for (NodeId v : inst.circle_nodes()) {
      delivered.clear();
      for (const auto& e : envs)
        if (std::find(e.recipients.begin(), e.recipients.end(), v) !=
            e.recipients.end())
          delivered.push_back(&e);
      inst.absorb_inbox(v, t, delivered, keys);
    }
    for (const auto& e : envs) {
      for (NodeId r : e.recipients) {
        kb[r].absorb(e);
        for (const auto& tr : e.payload.triplets)
          recv_triplets[r].push_back({tr.subject, tr.stage, tr.key});
      }
    }

    if (t == 1) {
      // stage-1 knowledge at the sender's circle neighbors
      for (NodeId v : {inst.circle().left[1], inst.circle().right[1]}) {
        const NodeState& st = inst.state(v);
        if (!st.is_role_sender && st.knows.is_message() &&
            st.learned_at_block == 0) {
          bool seen = false;
          for (const auto& l : trace.learns)
            if (l.node == v) seen = true;
          if (!seen) {
            trace.learns.push_back({v, 0, 1, st.knows});
            if (rc.capture_trace)
              trace.lines.push_back("L t=1 block=0 node=" + net->name(v) +
                                    " m=M" +
                                    std::to_string(st.knows.payload));
          }
        }
      }
    }
    int b = inst.cfg().block_of(t);
    if (b >= 1 && t == inst.cfg().block_end(b)) {
      auto events = inst.end_of_block_decode(b);
      for (const auto& ev : events) {
        trace.learns.push_back(ev);
        if (rc.capture_trace) {
          std::string val =
              ev.value.kind == Content::Kind::kSymbol
                  ? "M" + std::to_string(ev.value.payload)
                  : content_str(ev.value, {});
          trace.lines.push_back("L t=" + std::to_string(ev.stage) +
                                " block=" + std::to_string(ev.block) +
                                " node=" + net->name(ev.node) + " m=" + val);
        }
      }
    }
  }

  RunOutcome finish() {
    trace.decoded = inst.receiver_output();
    if (rc.capture_trace) {
      std::string line = "O decoded=";
      if (trace.decoded) {
        line += trace.decoded->kind == Content::Kind::kSymbol
                    ? "M" + std::to_string(trace.decoded->payload)
                    : content_str(*trace.decoded, {});
      } else {
        line += "undecided";
      }
      trace.lines.push_back(line);
    }
    RunOutcome out;
    out.trace = trace;
    out.report.decoded = trace.decoded;
    out.report.broadcast_count = broadcast_count;
    for (const auto& l : trace.learns)
      if (l.node == inst.circle().role_receiver())
        out.report.stage_receiver_learn = l.stage;
    auto l1 = assert_lemma1(out.trace);
    auto l2 = assert_lemma2(out.trace);
    out.report.lemma1_ok = l1.value_or(true);
    out.report.lemma2_ok = l2.value_or(true);
    return out;
  }
};

void finalize_trace_plan(Trace& trace, const AdversaryPlan& plan) {
  trace.schedule = plan.schedule();
  trace.multilateral = plan.multilateral;
  trace.forced_reboot = plan.has_forced_reboot();
}

}  // namespace

RunOutcome run_protocol(const Network& net, const Circle& circle,
                        const ProtocolConfig& cfg, const AdversaryPlan& plan,
                        Content message, int alphabet_size,
                        const RunConfig& rc) {
  if (message.kind == Content::Kind::kNull)
    throw std::invalid_argument("message must be an element of M");
  if (message.kind == Content::Kind::kSymbol &&
      message.payload >= static_cast<std::uint64_t>(alphabet_size))
    throw std::invalid_argument("message outside the alphabet");
  auto sched = plan.schedule();
  if (!plan.multilateral) {
    auto viol = validate_schedule(sched, cfg, net);
    if (viol) throw std::invalid_argument("invalid schedule: " + *viol);
  }

  PlainRun run(net, circle, cfg, message, alphabet_size, rc);
  finalize_trace_plan(run.trace, plan);
  if (rc.capture_trace) {
    run.trace.lines.push_back(
        "H seed=" + std::to_string(rc.seed) +
        " mode=" + (rc.key_mode == KeyMode::kSymbolic ? "symbolic" : "numeric"));
    auto entries = sched.entries;
    std::sort(entries.begin(), entries.end());
    for (const auto& [t, v] : entries)
      run.trace.lines.push_back("D t=" + std::to_string(t) +
                                " node=" + net.name(v));
  }
  std::vector<const AdversaryPlan::Event*> evs;
  for (Stage t = 1; t <= cfg.total_stages; ++t) {
    evs.clear();
    for (const auto& e : plan.events)
      if (e.stage == t) evs.push_back(&e);
    run.step(t, evs);
  }
  return run.finish();
}

std::optional<bool> assert_lemma1(const Trace& trace) {
  if (trace.multilateral || trace.forced_reboot) return std::nullopt;
  for (const auto& l : trace.learns)
    if (!(l.value == trace.message)) return false;
  return true;
}

std::optional<bool> assert_lemma2(const Trace& trace) {
  if (trace.multilateral || trace.forced_reboot) return std::nullopt;
  const auto& left = trace.circle.left;
  const auto& right = trace.circle.right;
  NodeId receiver = trace.circle.role_receiver();
  int K = static_cast<int>(left.size()) - 2;
  int Kp = static_cast<int>(right.size()) - 2;
  auto known_before = [&](int block, NodeId v) {
    for (const auto& l : trace.learns)
      if (l.node == v && l.block < block) return true;
    return false;
  };
  auto learned_at = [&](int block, NodeId v) {
    for (const auto& l : trace.learns)
      if (l.node == v && l.block == block) return true;
    return false;
  };
  for (int b = 1; b <= trace.cfg.num_blocks; ++b) {
    if (known_before(b, receiver)) break;  // receiver done, rest vacuous
    int k = 0;
    while (k < K && known_before(b, left[1 + k])) ++k;
    bool prefix = true;
    for (int j = k; j < K; ++j)
      if (known_before(b, left[1 + j])) prefix = false;
    int kp = 0;
    while (kp < Kp && known_before(b, right[1 + kp])) ++kp;
    for (int j = kp; j < Kp; ++j)
      if (known_before(b, right[1 + j])) prefix = false;
    if (!prefix) continue;  // hypothesis fails for this block
    NodeId frontier_left = k < K ? left[1 + k] : receiver;
    NodeId frontier_right = kp < Kp ? right[1 + kp] : receiver;
    if (!learned_at(b, frontier_left) && !learned_at(b, frontier_right))
      return false;
  }
  return true;
}

namespace {

std::vector<NodeId> eligible_deviators(const Network& net,
                                       const ProtocolInstance& inst,
                                       Scope scope, Stage t) {
  std::vector<NodeId> out;
  for (NodeId v : inst.circle_nodes()) {
    bool terminal = (v == net.sender || v == net.receiver);
    if (scope == Scope::kSigma && terminal) continue;
    if (scope == Scope::kSigmaStar && v == net.sender && t == 1) continue;
    out.push_back(v);
  }
  return out;
}

struct SweepWorkspace {
  SweepSummary sum;
  void note_run(const Network& net, const RunOutcome& out, Content m,
                const std::vector<std::pair<Stage, NodeId>>& sched,
                const std::string& detail, bool check_lemmas) {
    sum.runs += 1;
    bool ok = out.report.decoded && *out.report.decoded == m;
    if (check_lemmas) {
      auto l1 = assert_lemma1(out.trace);
      if (l1) {
        sum.lemma1_checked += 1;
        if (!*l1) sum.lemma1_violations += 1;
      }
      auto l2 = assert_lemma2(out.trace);
      if (l2) {
        sum.lemma2_checked += 1;
        if (!*l2) sum.lemma2_violations += 1;
      }
    }
    if (!ok) {
      sum.failures += 1;
      if (sum.failure_samples.size() < 32) {
        SweepFailure f;
        for (const auto& [t, v] : sched) f.schedule.emplace_back(t, net.name(v));
        f.message = "M" + std::to_string(m.payload);
        f.decoded = out.report.decoded
                        ? "M" + std::to_string(out.report.decoded->payload)
                        : "undecided";
        f.detail = detail;
        sum.failure_samples.push_back(std::move(f));
      }
    }
  }
  void merge(const SweepWorkspace& o) {
    sum.runs += o.sum.runs;
    sum.failures += o.sum.failures;
    sum.lemma1_checked += o.sum.lemma1_checked;
    sum.lemma1_violations += o.sum.lemma1_violations;
    sum.lemma2_checked += o.sum.lemma2_checked;
    sum.lemma2_violations += o.sum.lemma2_violations;
    sum.schedules_swept += o.sum.schedules_swept;
    sum.combo_runs += o.sum.combo_runs;
    for (const auto& f : o.sum.failure_samples)
      if (sum.failure_samples.size() < 32) sum.failure_samples.push_back(f);
  }
};

// Combined run used by exhaustive part (i): one template applied at every
// deviating stage of one schedule.
RunOutcome run_with_template(const Network& net, const Circle& circle,
                             const ProtocolConfig& cfg, int alphabet_size,
                             Content m, const RunConfig& rc,
                             const std::vector<std::pair<Stage, NodeId>>& sched,
                             const ActionTemplate& tpl, Scope scope) {
  AdversaryPlan plan;
  plan.scope = scope;
  for (const auto& [t, v] : sched) {
    AdversaryPlan::Event ev;
    ev.stage = t;
    ev.node = v;
    ev.kind = AdversaryPlan::Event::Kind::kEnum;
    ev.action = instantiate_template(tpl, 2, true);
    plan.events.push_back(ev);
  }
  return run_protocol(net, circle, cfg, plan, m, alphabet_size, rc);
}

void run_tasks(int threads, int n_tasks, const std::function<void(int)>& task) {
  if (threads <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  int workers = std::min(threads, n_tasks);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        int i = next.fetch_add(1);
        if (i >= n_tasks) return;
        task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SweepSummary sweep_reliability(const Network& net, const Circle& circle,
                               const ProtocolConfig& cfg, int alphabet_size,
                               const SweepConfig& sc) {
  SweepSummary summary;
  RunConfig rc;
  rc.key_mode = KeyMode::kSymbolic;
  rc.capture_trace = false;
  rc.emit_babble = false;  // decode-inert; sweeps skip the noise
  ProtocolInstance probe(&net, circle, cfg, Content::symbol(0), alphabet_size,
                         0);
  int threads = sc.threads > 0
                    ? sc.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 0) threads = 1;

  if (sc.mode == SweepConfig::Mode::kRandomized) {
    std::vector<NodeId> off_circle_intermediaries;
    for (NodeId v = 0; v < net.size(); ++v)
      if (!probe.on_circle(v) && v != net.sender && v != net.receiver)
        off_circle_intermediaries.push_back(v);
    std::vector<std::vector<NodeId>> elig(cfg.total_stages + 1);
    for (Stage t = 1; t <= cfg.total_stages; ++t)
      elig[t] = eligible_deviators(net, probe, sc.scope, t);
    int n_chunks = static_cast<int>(
        std::min<long>(threads * 4, std::max<long>(sc.samples, 1)));
    std::vector<SweepWorkspace> parts(n_chunks);
    long per = (sc.samples + n_chunks - 1) / n_chunks;
    run_tasks(threads, n_chunks, [&](int ci) {
      SweepWorkspace& ws = parts[ci];
      long lo = ci * per, hi = std::min<long>(sc.samples, lo + per);
      for (long i = lo; i < hi; ++i) {
        std::uint64_t run_seed = Rng::derive(sc.seed, 0x5a5a + i);
        Rng pick(Rng::derive(sc.seed, i));
        Content m = Content::symbol(pick.next_below(alphabet_size));
        AdversaryPlan plan;
        plan.scope = sc.scope;
        for (Stage t = 1; t <= cfg.total_stages; ++t) {
          if (pick.next_bool()) continue;  // honest stage
          bool off = !off_circle_intermediaries.empty() &&
                     pick.next_below(10) == 0;
          AdversaryPlan::Event ev;
          ev.stage = t;
          if (off) {
            ev.node = off_circle_intermediaries[pick.next_below(
                off_circle_intermediaries.size())];
            ev.kind = AdversaryPlan::Event::Kind::kScript;  // mute
          } else if (!elig[t].empty()) {
            ev.node = elig[t][pick.next_below(elig[t].size())];
            ev.kind = AdversaryPlan::Event::Kind::kEnum;
            EnumAction a;
            a.content_code =
                static_cast<int>(pick.next_below(alphabet_size + 1));
            a.pattern = static_cast<RecipientPattern>(pick.next_below(3));
            for (int s = 0; s < 2; ++s) {
              a.slot_key[s] = static_cast<KeyChoice>(pick.next_below(3));
              a.replay_index[s] = pick.next_below(64);
            }
            ev.action = a;
          } else {
            continue;
          }
          plan.events.push_back(ev);
        }
        RunConfig rci = rc;
        rci.seed = run_seed;
        auto out = run_protocol(net, circle, cfg, plan, m, alphabet_size, rci);
        ws.note_run(net, out, m, plan.schedule().entries, "randomized",
                    sc.check_lemmas);
      }
    });
    SweepWorkspace total;
    for (const auto& p : parts) total.merge(p);
    summary = total.sum;
    return summary;
  }

  // Exhaustive mode. Size estimate first.
  std::vector<std::vector<NodeId>> elig(cfg.total_stages + 1);
  double schedules = 1.0;
  double event_sum = 0.0;
  for (Stage t = 1; t <= cfg.total_stages; ++t) {
    elig[t] = eligible_deviators(net, probe, sc.scope, t);
    schedules *= 1.0 + static_cast<double>(elig[t].size());
    double per_slot = 2.0 + static_cast<double>(std::min<std::size_t>(
                                sc.caps.replay_cap, 8));
    for (NodeId v : elig[t]) {
      int slots = static_cast<int>(probe.state(v).monitored.size());
      double acts = (alphabet_size + 1) * 3.0;
      if (t >= 3)
        for (int s = 0; s < slots; ++s) acts *= per_slot;
      event_sum += acts;
    }
  }
  auto templates = enumerate_templates(alphabet_size);
  double part1 = schedules * templates.size() * alphabet_size;
  double part2 = 1.0;
  for (int k = 0; k < sc.max_combo_events; ++k) part2 *= event_sum;
  part2 *= alphabet_size;
  if (part1 + part2 > sc.refusal_limit) {
    summary.refused = true;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "estimated %.3g runs exceed limit %.3g", part1 + part2,
                  sc.refusal_limit);
    summary.refusal_reason = buf;
    return summary;
  }
  summary.templates = static_cast<long>(templates.size());

  // Part (i): every schedule x every template x every message.
  {
    int n_tasks = static_cast<int>(templates.size()) * alphabet_size;
    std::vector<SweepWorkspace> parts(n_tasks);
    std::atomic<long> schedules_counted{0};
    run_tasks(threads, n_tasks, [&](int ti) {
      const ActionTemplate& tpl = templates[ti / alphabet_size];
      Content m = Content::symbol(ti % alphabet_size);
      SweepWorkspace& ws = parts[ti];
      std::vector<int> odo(cfg.total_stages + 1, -1);  // -1 = honest
      long count = 0;
      while (true) {
        std::vector<std::pair<Stage, NodeId>> sched;
        for (Stage t = 1; t <= cfg.total_stages; ++t)
          if (odo[t] >= 0) sched.emplace_back(t, elig[t][odo[t]]);
        RunConfig rci = rc;
        rci.seed = Rng::derive(sc.seed, 17 * ti + 101 * count);
        auto out = run_with_template(net, circle, cfg, alphabet_size, m, rci,
                                     sched, tpl, sc.scope);
        ws.note_run(net, out, m, sched, "template", sc.check_lemmas);
        ++count;
        Stage t = 1;
        while (t <= cfg.total_stages) {
          odo[t] += 1;
          if (odo[t] < static_cast<int>(elig[t].size())) break;
          odo[t] = -1;
          ++t;
        }
        if (t > cfg.total_stages) break;
      }
      if (ti == 0) schedules_counted = count;
    });
    SweepWorkspace total;
    for (const auto& p : parts) total.merge(p);
    summary.runs += total.sum.runs;
    summary.failures += total.sum.failures;
    summary.lemma1_checked += total.sum.lemma1_checked;
    summary.lemma1_violations += total.sum.lemma1_violations;
    summary.lemma2_checked += total.sum.lemma2_checked;
    summary.lemma2_violations += total.sum.lemma2_violations;
    summary.schedules_swept = schedules_counted.load();
    for (const auto& f : total.sum.failure_samples)
      if (summary.failure_samples.size() < 32)
        summary.failure_samples.push_back(f);
  }

  // Part (ii): every placement of up to max_combo_events heterogeneous
  // events, full capped enumeration per event, branched over live state.
  {
    std::vector<SweepWorkspace> parts(alphabet_size);
    run_tasks(threads, alphabet_size, [&](int mi) {
      Content m = Content::symbol(mi);
      SweepWorkspace& ws = parts[mi];
      RunConfig rci = rc;
      rci.seed = Rng::derive(sc.seed, 7777 + mi);

      std::function<void(PlainRun&, Stage, int)> explore =
          [&](PlainRun& run, Stage t, int budget) {
            while (t <= cfg.total_stages) {
              if (budget > 0) {
                for (NodeId v : elig[t]) {
                  const NodeState& st = run.inst.state(v);
                  auto actions = enumerate_actions(
                      static_cast<int>(st.monitored.size()), t >= 3,
                      alphabet_size, run.kb[v], sc.caps, KeyMode::kSymbolic);
                  for (const auto& a : actions) {
                    PlainRun branch = run;
                    AdversaryPlan::Event ev;
                    ev.stage = t;
                    ev.node = v;
                    ev.kind = AdversaryPlan::Event::Kind::kEnum;
                    ev.action = a;
                    branch.step(t, {&ev});
                    explore(branch, t + 1, budget - 1);
                  }
                }
              }
              run.step(t, {});
              ++t;
            }
            // leaf: complete run
            for (const auto& e : run.applied)
              run.trace.schedule.entries.emplace_back(e.stage, e.node);
            run.trace.schedule.scope = sc.scope;
            RunOutcome out = run.finish();
            ws.note_run(net, out, m, out.trace.schedule.entries, "combo",
                        sc.check_lemmas);
            ws.sum.combo_runs += 1;
          };
      PlainRun base(net, circle, cfg, m, alphabet_size, rci);
      explore(base, 1, sc.max_combo_events);
    });
    SweepWorkspace total;
    for (const auto& p : parts) total.merge(p);
    summary.runs += total.sum.runs;
    summary.failures += total.sum.failures;
    summary.lemma1_checked += total.sum.lemma1_checked;
    summary.lemma1_violations += total.sum.lemma1_violations;
    summary.lemma2_checked += total.sum.lemma2_checked;
    summary.lemma2_violations += total.sum.lemma2_violations;
    summary.combo_runs = total.sum.combo_runs;
    for (const auto& f : total.sum.failure_samples)
      if (summary.failure_samples.size() < 32)
        summary.failure_samples.push_back(f);
  }
  return summary;
}

MajorityExhibit naive_majority_demo(const Network& net,
                                    const std::vector<std::string>& alphabet) {
  if (alphabet.size() < 3)
    throw std::invalid_argument(
        "naive demo needs three distinct messages (m, m', m'')");
  // three vertex-disjoint S-a-b-R paths, sorted by the a-node id
  struct Path {
    NodeId a, b;
  };
  std::vector<Path> paths;
  std::set<NodeId> used;
  for (NodeId a : net.neighbors(net.sender)) {
    if (used.count(a)) continue;
    for (NodeId b : net.neighbors(a)) {
      if (b == net.sender || used.count(b) || !net.adjacent(b, net.receiver))
        continue;
      if (b == net.receiver) continue;
      paths.push_back({a, b});
      used.insert(a);
      used.insert(b);
      break;
    }
  }
  if (paths.size() < 3)
    throw std::invalid_argument(
        "network lacks three disjoint two-intermediary paths");
  paths.resize(3);

  const std::string& m = alphabet[0];
  const std::string& m1 = alphabet[1];
  const std::string& m2 = alphabet[2];

  // Naive protocol: t1 sender fans out, t2 first layer forwards, t3 second
  // layer forwards. The receiver's view lists the second-layer reports.
  auto run_naive = [&](const std::string& truth,
                       const std::map<std::pair<Stage, NodeId>, std::string>&
                           deviations) {
    std::pair<std::vector<std::string>, std::vector<std::string>> result;
    std::vector<std::string> relay(3), final(3);
    auto content_of = [&](Stage t, NodeId v,
                          const std::string& honest) -> std::string {
      auto it = deviations.find({t, v});
      return it == deviations.end() ? honest : it->second;
    };
    std::vector<std::string>& tr = result.second;
    tr.push_back("N t=1 " + net.name(net.sender) + " -> " +
                 net.name(paths[0].a) + "," + net.name(paths[1].a) + "," +
                 net.name(paths[2].a) + " : " + truth);
    for (int i = 0; i < 3; ++i) {
      relay[i] = content_of(2, paths[i].a, truth);
      tr.push_back("N t=2 " + net.name(paths[i].a) + " -> " +
                   net.name(paths[i].b) + " : " + relay[i]);
    }
    for (int i = 0; i < 3; ++i) {
      final[i] = content_of(3, paths[i].b, relay[i]);
      tr.push_back("N t=3 " + net.name(paths[i].b) + " -> " +
                   net.name(net.receiver) + " : " + final[i]);
    }
    for (int i = 0; i < 3; ++i)
      result.first.push_back("path " + std::to_string(i) + " via " +
                             net.name(paths[i].b) + " : " + final[i]);
    return result;
  };

  MajorityExhibit ex;
  ex.true_a = m;
  ex.true_b = m1;
  auto a = run_naive(m, {{{2, paths[0].a}, m1}, {{3, paths[1].b}, m2}});
  auto b = run_naive(m1, {{{2, paths[2].a}, m}, {{3, paths[1].b}, m2}});
  ex.view_a = a.first;
  ex.trace_a = a.second;
  ex.view_b = b.first;
  ex.trace_b = b.second;
  ex.identical = (ex.view_a == ex.view_b);
  return ex;
}

}  // namespace robustcomm
