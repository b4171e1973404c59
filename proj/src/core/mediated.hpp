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

#ifndef ROBUSTCOMM_CORE_MEDIATED_HPP_
#define ROBUSTCOMM_CORE_MEDIATED_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/games.hpp"
#include "core/topology.hpp"

namespace robustcomm {

// Fraction of the unit interval on the 2^64 grid; addition mod 1 is exact
// wrapping addition.
struct UnitFraction {
  std::uint64_t bits = 0;
};

inline UnitFraction wrap_add(UnitFraction a, UnitFraction b) {
  return {a.bits + b.bits};
}

// Partition of [0,1) into one cell per action. Cell widths round
// phi(a|w) * 2^64 to nearest; the last cell absorbs the rounding residue so
// the widths sum to exactly 2^64.
struct Partition {
  // bounds[a] .. bounds[a+1] is action a's cell; size |A|+1, 0 .. 2^64.
  std::vector<unsigned __int128> bounds;

  int n_cells() const { return static_cast<int>(bounds.size()) - 1; }
  unsigned __int128 width(int a) const { return bounds[a + 1] - bounds[a]; }
};

// Throws std::domain_error on a negative entry or a row not summing to 1.
Partition build_partition(const std::vector<Rational>& phi_row);

// Action whose cell contains x + y mod 1.
int jcl_output(UnitFraction x, UnitFraction y, const Partition& cells);

// Majority of the three decoded recommendations, if any.
std::optional<int> majority_decode(std::optional<int> r1, std::optional<int> r2,
                                   std::optional<int> r3);

// Single content lie or silence by one node at one stage, applied to every
// protocol copy active at that stage.
struct MediatedDeviation {
  Stage stage = 0;
  NodeId node = -1;
  bool mute = false;
  std::optional<int> action_content;  // broadcast this action symbol instead
};

struct MediatedConfig {
  std::uint64_t seed = 1;
  KeyMode key_mode = KeyMode::kSymbolic;
  bool capture_trace = false;
  bool emit_babble = true;
  std::optional<int> forced_state;  // fix omega instead of drawing from nu
};

struct MediatedResult {
  int state = -1;                  // omega index
  std::uint64_t x = 0, y = 0;      // the two lottery draws
  int honest_recommendation = -1;  // jcl output under honest play
  std::array<std::optional<int>, 3> copy_decodes;  // senders S, i1, j1
  std::optional<int> majority;
  int receiver_action = -1;  // majority, or first action when none
  bool receiver_ignorance_ok = true;  // no omega/x on R's inbox before phase 3
  bool copies_synchronized = true;
  Stage total_stages = 0;
  Stage phase3_start = 0;
  std::vector<std::string> trace_lines;
};

// Three-phase mediator replication on the network's circle:
//   t=1                 sender broadcasts omega to i1, j1
//   t=2                 sender broadcasts x; i1 starts transmitting y to j1
//   t=3 .. 2+Q          transmission protocol, i1 -> j1, message y
//   t=3+Q               S, i1, j1 broadcast the lottery recommendation
//   t=4+Q .. 3+2Q       three synchronized protocol copies deliver it to R
// with Q = (2n-3)(n-3) block stages. The receiver plays the majority
// recommendation. Throws std::invalid_argument when the network has no two
// disjoint paths.
MediatedResult run_mediated(const FiniteGame& g, const CommDevice& phi,
                            const Network& net,
                            const std::vector<MediatedDeviation>& deviations,
                            const MediatedConfig& mc);

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_MEDIATED_HPP_
