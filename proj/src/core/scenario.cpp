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

#include "core/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace robustcomm {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

std::string str_at(const json& j, const std::string& path,
                   const std::string& key) {
  if (!j.contains(key) || !j[key].is_string())
    fail(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

int resolve_node(const Network& net, const std::string& name,
                 const std::string& path) {
  auto v = net.find(name);
  if (!v) fail(path, "unknown node id '" + name + "'");
  return *v;
}

int resolve_symbol(const std::vector<std::string>& names,
                   const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  fail(path, "unknown symbol '" + name + "'");
}

StochasticMatrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  StochasticMatrix m;
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) fail(path + "[" + std::to_string(r) + "]",
                               "expected an array");
    std::vector<Rational> row;
    for (std::size_t c = 0; c < j[r].size(); ++c) {
      const auto& cell = j[r][c];
      std::string cp = path + "[" + std::to_string(r) + "][" +
                       std::to_string(c) + "]";
      try {
        if (cell.is_string())
          row.push_back(Rational::parse(cell.get<std::string>()));
        else if (cell.is_number_integer())
          row.push_back(Rational(cell.get<std::int64_t>()));
        else
          fail(cp, "expected \"p/q\" string or integer");
      } catch (const std::invalid_argument& e) {
        fail(cp, e.what());
      }
    }
    m.push_back(std::move(row));
  }
  return m;
}

ScriptKeyRef parse_key_ref(const Network& net, const std::string& spec,
                           const std::string& path) {
  ScriptKeyRef ref;
  if (spec == "fresh") {
    ref.kind = ScriptKeyRef::Kind::kFresh;
    return ref;
  }
  auto first = spec.find(':');
  if (first == std::string::npos) fail(path, "bad key spec '" + spec + "'");
  std::string kind = spec.substr(0, first);
  std::string rest = spec.substr(first + 1);
  if (kind == "own") {
    ref.kind = ScriptKeyRef::Kind::kOwnKey;
    ref.stage = std::stoi(rest);
    return ref;
  }
  auto second = rest.find(':');
  if (second == std::string::npos) fail(path, "bad key spec '" + spec + "'");
  ref.node = resolve_node(net, rest.substr(0, second), path);
  ref.stage = std::stoi(rest.substr(second + 1));
  if (kind == "observed")
    ref.kind = ScriptKeyRef::Kind::kObservedKey;
  else if (kind == "received")
    ref.kind = ScriptKeyRef::Kind::kReceivedTripletKey;
  else
    fail(path, "bad key spec kind '" + kind + "'");
  return ref;
}

int parse_content_code(const Scenario& sc, const json& j,
                       const std::string& path) {
  std::string s = j.get<std::string>();
  if (s == "m0") return 0;
  return 1 + resolve_symbol(sc.alphabet, s, path);
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("$", std::string("not valid JSON: ") + e.what());
  }
  Scenario sc;

  if (!j.contains("network")) fail("network", "missing section");
  const json& jn = j["network"];
  std::vector<std::string> nodes;
  if (!jn.contains("nodes") || !jn["nodes"].is_array())
    fail("network.nodes", "expected an array");
  for (const auto& n : jn["nodes"]) nodes.push_back(n.get<std::string>());
  std::vector<std::pair<std::string, std::string>> edges;
  if (!jn.contains("edges") || !jn["edges"].is_array())
    fail("network.edges", "expected an array of pairs");
  for (std::size_t i = 0; i < jn["edges"].size(); ++i) {
    const auto& e = jn["edges"][i];
    if (!e.is_array() || e.size() != 2)
      fail("network.edges[" + std::to_string(i) + "]", "expected a pair");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  try {
    sc.net = make_network(nodes, edges, str_at(jn, "network", "sender"),
                          str_at(jn, "network", "receiver"));
  } catch (const std::invalid_argument& e) {
    fail("network", e.what());
  }

  if (j.contains("alphabet"))
    for (const auto& a : j["alphabet"])
      sc.alphabet.push_back(a.get<std::string>());
  if (j.contains("message"))
    sc.message =
        resolve_symbol(sc.alphabet, j["message"].get<std::string>(), "message");
  if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("key_mode")) {
    std::string m = j["key_mode"].get<std::string>();
    if (m == "symbolic")
      sc.key_mode = KeyMode::kSymbolic;
    else if (m == "numeric")
      sc.key_mode = KeyMode::kNumeric;
    else
      fail("key_mode", "expected symbolic|numeric");
  }

  if (j.contains("game")) {
    const json& jg = j["game"];
    FiniteGame g;
    for (const auto& s : jg["states"]) g.states.push_back(s.get<std::string>());
    for (const auto& a : jg["actions"])
      g.actions.push_back(a.get<std::string>());
    auto prior = parse_matrix(json::array({jg["prior"]}), "game.prior");
    g.prior = prior[0];
    g.u_sender = parse_matrix(jg["sender_payoffs"], "game.sender_payoffs");
    g.u_receiver = parse_matrix(jg["receiver_payoffs"], "game.receiver_payoffs");
    try {
      g.validate();
    } catch (const std::invalid_argument& e) {
      fail("game", e.what());
    }
    sc.game = std::move(g);
  }
  if (j.contains("sender_strategy") || j.contains("receiver_strategy")) {
    if (!j.contains("sender_strategy") || !j.contains("receiver_strategy"))
      fail("sender_strategy", "both strategies are required together");
    DirectStrategyPair pair;
    pair.sender = parse_matrix(j["sender_strategy"], "sender_strategy");
    pair.receiver = parse_matrix(j["receiver_strategy"], "receiver_strategy");
    sc.strategies = std::move(pair);
  }
  if (j.contains("device")) sc.device = parse_matrix(j["device"], "device");

  if (j.contains("adversary")) {
    const json& ja = j["adversary"];
    if (ja.contains("scope")) {
      std::string s = ja["scope"].get<std::string>();
      if (s == "sigma")
        sc.scope = Scope::kSigma;
      else if (s == "sigma_star")
        sc.scope = Scope::kSigmaStar;
      else
        fail("adversary.scope", "expected sigma|sigma_star");
    }
    if (ja.contains("mode")) {
      std::string m = ja["mode"].get<std::string>();
      if (m == "exhaustive")
        sc.sweep_mode = SweepConfig::Mode::kExhaustive;
      else if (m == "randomized")
        sc.sweep_mode = SweepConfig::Mode::kRandomized;
      else
        fail("adversary.mode", "expected exhaustive|randomized");
    }
    if (ja.contains("samples")) sc.samples = ja["samples"].get<long>();
    if (ja.contains("combo_events"))
      sc.combo_events = ja["combo_events"].get<int>();
    if (ja.contains("allow_multilateral"))
      sc.script_multilateral = ja["allow_multilateral"].get<bool>();
    if (ja.contains("script")) {
      for (std::size_t i = 0; i < ja["script"].size(); ++i) {
        const json& je = ja["script"][i];
        std::string path = "adversary.script[" + std::to_string(i) + "]";
        ScriptEntry entry;
        entry.stage = je["stage"].get<int>();
        entry.node = resolve_node(sc.net, je["node"].get<std::string>(), path);
        if (je.contains("force_reboot"))
          entry.force_reboot = je["force_reboot"].get<bool>();
        if (je.contains("envelopes")) {
          for (std::size_t k = 0; k < je["envelopes"].size(); ++k) {
            const json& jv = je["envelopes"][k];
            std::string ep = path + ".envelopes[" + std::to_string(k) + "]";
            ScriptEnvelope env;
            for (const auto& r : jv["recipients"])
              env.recipients.push_back(
                  resolve_node(sc.net, r.get<std::string>(), ep));
            if (jv.contains("content"))
              env.content_code = parse_content_code(sc, jv["content"], ep);
            if (jv.contains("triplets")) {
              for (const auto& jt : jv["triplets"]) {
                ScriptTriplet t;
                t.subject =
                    resolve_node(sc.net, jt["subject"].get<std::string>(), ep);
                t.stage = jt["stage"].get<int>();
                t.key = parse_key_ref(sc.net, jt["key"].get<std::string>(), ep);
                env.triplets.push_back(t);
              }
            }
            entry.envelopes.push_back(std::move(env));
          }
        }
        sc.script.push_back(std::move(entry));
      }
    }
  }

  if (j.contains("mediated")) {
    const json& jm = j["mediated"];
    if (jm.contains("runs")) sc.mediated_runs = jm["runs"].get<long>();
    if (jm.contains("deviations")) {
      for (std::size_t i = 0; i < jm["deviations"].size(); ++i) {
        const json& jd = jm["deviations"][i];
        std::string path = "mediated.deviations[" + std::to_string(i) + "]";
        MediatedDeviation d;
        d.stage = jd["stage"].get<int>();
        d.node = resolve_node(sc.net, jd["node"].get<std::string>(), path);
        if (jd.contains("mute")) d.mute = jd["mute"].get<bool>();
        if (jd.contains("content")) {
          if (!sc.game) fail(path, "mediated deviations need a game section");
          d.action_content = resolve_symbol(
              sc.game->actions, jd["content"].get<std::string>(), path);
        }
        sc.mediated_deviations.push_back(d);
      }
    }
  }

  if (j.contains("expect")) {
    for (auto it = j["expect"].begin(); it != j["expect"].end(); ++it) {
      if (it.value().is_string())
        sc.expect[it.key()] = it.value().get<std::string>();
      else
        sc.expect[it.key()] = it.value().dump();
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace robustcomm
