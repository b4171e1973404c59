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

#ifndef ROBUSTCOMM_CORE_MESSAGING_HPP_
#define ROBUSTCOMM_CORE_MESSAGING_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/topology.hpp"

namespace robustcomm {

using Stage = int;

// A protocol content is the null symbol m0, a symbol of the finite alphabet
// M, or an opaque 64-bit value (used when the transmitted message is itself a
// random draw, as in the lottery phase). m0 is never an element of M.
struct Content {
  enum class Kind : std::uint8_t { kNull, kSymbol, kValue };
  Kind kind = Kind::kNull;
  std::uint64_t payload = 0;

  static Content null() { return {}; }
  static Content symbol(std::uint64_t idx) { return {Kind::kSymbol, idx}; }
  static Content value(std::uint64_t v) { return {Kind::kValue, v}; }

  // True for any element of M (anything except m0).
  bool is_message() const { return kind != Kind::kNull; }
  bool operator==(const Content& o) const = default;
};

enum class KeyMode : std::uint8_t { kSymbolic, kNumeric };

// Authentication key: a symbolic nonce (exact zero-collision semantics) or a
// numeric 64-bit fraction of [0,1). Equality is exact in both modes.
struct AuthKey {
  KeyMode mode = KeyMode::kSymbolic;
  std::uint64_t bits = 0;
  bool operator==(const AuthKey& o) const = default;
};

// (subject, stage, key): "subject deviated at stage; this was his key".
struct Triplet {
  NodeId subject = -1;
  Stage stage = 0;
  AuthKey key;
  bool operator==(const Triplet& o) const = default;
};

struct GrandMessage {
  Content content;
  AuthKey key;
  std::vector<Triplet> triplets;
};

struct Envelope {
  NodeId origin = -1;
  std::vector<NodeId> recipients;  // sorted by node index
  Stage stage = 0;
  int instance = 0;  // protocol copy this envelope belongs to
  bool babble = false;
  GrandMessage payload;
};

// Owns the key counter of one simulation; symbolic tokens are unique per run.
class KeySource {
 public:
  KeySource(KeyMode mode, std::uint64_t seed) : mode_(mode), rng_(seed) {}

  AuthKey fresh() {
    if (mode_ == KeyMode::kSymbolic) return {mode_, ++counter_};
    return {mode_, rng_.next_u64()};
  }
  KeyMode mode() const { return mode_; }
  Rng& rng() { return rng_; }

 private:
  KeyMode mode_;
  Rng rng_;
  std::uint64_t counter_ = 0;
};

// Message-space bounds: per stage at most one triplet about each neighbor of
// the emitter and at most `max_other` (the schedule constant L) about each
// non-neighbor.
struct EnvelopeBounds {
  int max_other = 1;
};

// ok (empty) or the name of the first violated invariant.
std::optional<std::string> validate_envelope(const Envelope& env,
                                             const Network& net,
                                             const EnvelopeBounds& bounds);

// One line per envelope; bit-exact for equal seeds.
std::string trace_line(const Envelope& env, const Network& net);
std::string content_str(const Content& c,
                        const std::vector<std::string>& alphabet);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_MESSAGING_HPP_
