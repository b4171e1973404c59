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

#include "core/messaging.hpp"

#include <algorithm>
#include <map>

namespace robustcomm {

std::optional<std::string> validate_envelope(const Envelope& env,
                                             const Network& net,
                                             const EnvelopeBounds& bounds) {
  if (env.origin < 0 || env.origin >= net.size()) return "unknown origin";
  if (env.recipients.empty()) return "empty recipient set";
  for (std::size_t i = 0; i < env.recipients.size(); ++i) {
    NodeId r = env.recipients[i];
    if (r < 0 || r >= net.size()) return "unknown recipient";
    if (!net.adjacent(env.origin, r)) return "recipient not a neighbor";
    if (i > 0 && env.recipients[i - 1] >= r) return "unsorted recipient set";
  }
  if (env.stage < 1) return "stage out of range";
  std::map<NodeId, int> per_subject;
  for (const auto& t : env.payload.triplets) {
    if (t.subject < 0 || t.subject >= net.size()) return "unknown subject";
    if (t.stage < 1) return "triplet stage out of range";
    int c = ++per_subject[t.subject];
    if (net.adjacent(env.origin, t.subject)) {
      if (c > 1) return "duplicate neighbor triplet";
    } else if (c > bounds.max_other) {
      return "non-neighbor triplet list over bound";
    }
  }
  return std::nullopt;
}

namespace {

std::string key_str(const AuthKey& k) {
  if (k.mode == KeyMode::kSymbolic) return "s" + std::to_string(k.bits);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "x%016llx",
                static_cast<unsigned long long>(k.bits));
  return buf;
}

}  // namespace

std::string content_str(const Content& c,
                        const std::vector<std::string>& alphabet) {
  switch (c.kind) {
    case Content::Kind::kNull:
      return "m0";
    case Content::Kind::kSymbol:
      if (c.payload < alphabet.size()) return alphabet[c.payload];
      return "sym" + std::to_string(c.payload);
    case Content::Kind::kValue: {
      char buf[24];
      std::snprintf(buf, sizeof(buf), "#%016llx",
                    static_cast<unsigned long long>(c.payload));
      return buf;
    }
  }
  return "?";
}

std::string trace_line(const Envelope& env, const Network& net) {
  std::string out = "E t=" + std::to_string(env.stage);
  out += " i=" + std::to_string(env.instance);
  out += " o=" + net.name(env.origin);
  out += " r=";
  for (std::size_t i = 0; i < env.recipients.size(); ++i) {
    if (i) out += ",";
    out += net.name(env.recipients[i]);
  }
  out += env.babble ? " b=1" : " b=0";
  switch (env.payload.content.kind) {
    case Content::Kind::kNull:
      out += " c=m0";
      break;
    case Content::Kind::kSymbol:
      out += " c=M" + std::to_string(env.payload.content.payload);
      break;
    case Content::Kind::kValue: {
      char buf[24];
      std::snprintf(buf, sizeof(buf), " c=#%016llx",
                    static_cast<unsigned long long>(env.payload.content.payload));
      out += buf;
      break;
    }
  }
  out += " k=" + key_str(env.payload.key);
  out += " T=[";
  for (std::size_t i = 0; i < env.payload.triplets.size(); ++i) {
    const auto& t = env.payload.triplets[i];
    if (i) out += ";";
    out += "(" + net.name(t.subject) + "," + std::to_string(t.stage) + "," +
           key_str(t.key) + ")";
  }
  out += "]";
  return out;
}

}  // namespace robustcomm
