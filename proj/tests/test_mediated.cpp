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

#include <stdexcept>

#include "core/rng.hpp"
#include "doctest.h"

using namespace robustcomm;

namespace {

constexpr std::uint64_t kHalf = 1ULL << 63;
constexpr std::uint64_t kQuarter = 1ULL << 62;

FiniteGame two_state_game() {
  FiniteGame g;
  g.states = {"w1", "w2"};
  g.actions = {"a", "b", "c"};
  g.prior = {Rational(1, 2), Rational(1, 2)};
  g.u_sender = {{2, 0, -1}, {1, 2, 0}};
  g.u_receiver = {{3, 2, 0}, {0, 2, 3}};
  return g;
}

CommDevice mixing_device() {
  return {{Rational(1, 2), Rational(1, 2), Rational(0)},
          {Rational(0), Rational(1), Rational(0)}};
}

Network diamond() {
  return make_network({"S", "1", "2", "R"},
                      {{"S", "1"}, {"S", "2"}, {"1", "R"}, {"2", "R"}}, "S",
                      "R");
}

}  // namespace

TEST_CASE("partition boundaries") {
  auto half = build_partition({Rational(1, 2), Rational(1, 2), Rational(0)});
  REQUIRE(half.n_cells() == 3);
  CHECK(half.bounds[0] == 0);
  CHECK(half.bounds[1] == static_cast<unsigned __int128>(kHalf));
  CHECK(half.bounds[2] == (static_cast<unsigned __int128>(1) << 64));
  CHECK(half.bounds[3] == (static_cast<unsigned __int128>(1) << 64));

  auto point = build_partition({Rational(0), Rational(1), Rational(0)});
  CHECK(point.width(0) == 0);
  CHECK(point.width(1) == (static_cast<unsigned __int128>(1) << 64));
  CHECK(point.width(2) == 0);

  auto thirds =
      build_partition({Rational(1, 3), Rational(1, 3), Rational(1, 3)});
  unsigned __int128 one = static_cast<unsigned __int128>(1) << 64;
  unsigned __int128 sum = 0;
  for (int a = 0; a < 3; ++a) {
    auto w = thirds.width(a);
    auto ideal = one / 3;
    CHECK((w > ideal ? w - ideal : ideal - w) <= 1);
    sum += w;
  }
  CHECK(sum == one);

  CHECK_THROWS_AS(build_partition({Rational(1, 2)}), std::domain_error);
  CHECK_THROWS_AS(build_partition({Rational(-1, 2), Rational(3, 2)}),
                  std::domain_error);
}

TEST_CASE("lottery output: direct evaluation") {
  auto cells = build_partition({Rational(1, 2), Rational(1, 2)});
  // 1/4 + 1/2 = 3/4, in the second cell
  CHECK(jcl_output({kQuarter}, {kHalf}, cells) == 1);
  CHECK(jcl_output({0}, {0}, cells) == 0);
  CHECK(jcl_output({kHalf}, {kHalf}, cells) == 0);  // wraps to 0
}

TEST_CASE("wrapping addition is associative and commutative") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    UnitFraction a{rng.next_u64()}, b{rng.next_u64()}, c{rng.next_u64()};
    CHECK(wrap_add(wrap_add(a, b), c).bits == wrap_add(a, wrap_add(b, c)).bits);
    CHECK(wrap_add(a, b).bits == wrap_add(b, a).bits);
  }
}

TEST_CASE("translation permutes the coarse grid exactly") {
  // x + j*2^48 over j < 2^16 hits every top-16-bit bucket exactly once
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::uint64_t x = rng.next_u64();
    std::vector<int> bucket(1 << 16, 0);
    for (std::uint64_t j = 0; j < (1ULL << 16); ++j)
      bucket[(x + (j << 48)) >> 48] += 1;
    for (int b = 0; b < (1 << 16); ++b) CHECK(bucket[b] == 1);
  }
}

TEST_CASE("pushforward of the grid equals cell widths exactly") {
  // dyadic devices: counting over the 2^16 grid is exact for every x
  auto cells = build_partition({Rational(1, 4), Rational(1, 4), Rational(1, 2)});
  Rng rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    std::uint64_t x = rng.next_u64();
    std::vector<long> count(3, 0);
    for (std::uint64_t j = 0; j < (1ULL << 16); ++j)
      count[jcl_output({x}, {j << 48}, cells)] += 1;
    for (int a = 0; a < 3; ++a)
      CHECK(count[a] ==
            static_cast<long>(cells.width(a) >> 48));
  }
}

TEST_CASE("majority of three recommendations") {
  using O = std::optional<int>;
  CHECK(*majority_decode(O{0}, O{0}, O{1}) == 0);
  CHECK(*majority_decode(O{0}, O{0}, O{0}) == 0);
  CHECK_FALSE(majority_decode(O{0}, O{1}, O{2}).has_value());
  CHECK(*majority_decode(O{1}, O{}, O{1}) == 1);
  CHECK_FALSE(majority_decode(O{1}, O{}, O{}).has_value());
  CHECK_FALSE(majority_decode(O{}, O{}, O{}).has_value());
}

TEST_CASE("honest mediated run follows the device") {
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();
  MediatedConfig mc;
  mc.seed = 5;
  mc.capture_trace = true;

  // at w2 the device recommends b with probability one
  mc.forced_state = 1;
  for (int i = 0; i < 20; ++i) {
    mc.seed = 100 + i;
    auto r = run_mediated(g, phi, net, {}, mc);
    CHECK(r.receiver_action == 1);
    CHECK(r.honest_recommendation == 1);
    CHECK(*r.majority == 1);
    CHECK(r.receiver_ignorance_ok);
    CHECK(r.copies_synchronized);
    CHECK(r.total_stages == 13);  // 3 + 2*(2n-3)(n-3) on the diamond
    CHECK(r.phase3_start == 8);
  }

  // at w1 the recommendation splits between a and b and all three copies
  // agree with the lottery output
  mc.forced_state = 0;
  bool saw_a = false, saw_b = false;
  for (int i = 0; i < 40; ++i) {
    mc.seed = 300 + i;
    auto r = run_mediated(g, phi, net, {}, mc);
    CHECK(r.receiver_action == r.honest_recommendation);
    if (r.receiver_action == 0) saw_a = true;
    if (r.receiver_action == 1) saw_b = true;
    for (int c = 0; c < 3; ++c) {
      REQUIRE(r.copy_decodes[c].has_value());
      CHECK(*r.copy_decodes[c] == r.honest_recommendation);
    }
  }
  CHECK(saw_a);
  CHECK(saw_b);
}

TEST_CASE("phase-3 deviations lose against the majority") {
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();
  MediatedConfig mc;
  mc.key_mode = KeyMode::kSymbolic;
  for (int sender_idx = 0; sender_idx < 3; ++sender_idx) {
    NodeId node = sender_idx == 0   ? *net.find("S")
                  : sender_idx == 1 ? *net.find("1")
                                    : *net.find("2");
    for (int wrong = 0; wrong < 3; ++wrong) {
      MediatedDeviation d;
      d.stage = 8;  // the recommendation broadcast
      d.node = node;
      d.action_content = wrong;
      mc.seed = 900 + 10 * sender_idx + wrong;
      mc.forced_state = 1;
      auto r = run_mediated(g, phi, net, {d}, mc);
      CHECK(r.receiver_action == r.honest_recommendation);
      REQUIRE(r.majority.has_value());
      CHECK(*r.majority == r.honest_recommendation);
    }
  }
}

TEST_CASE("mediated statistics stay near the target law") {
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();
  std::vector<std::pair<int, int>> outcomes;
  for (long i = 0; i < 3000; ++i) {
    MediatedConfig mc;
    mc.seed = Rng::derive(42, i);
    auto r = run_mediated(g, phi, net, {}, mc);
    outcomes.emplace_back(r.state, r.receiver_action);
    CHECK(r.receiver_ignorance_ok);
  }
  auto emp = empirical_distribution(outcomes, 2, 3);
  auto target = device_outcome_law(g, phi);
  CHECK(tv_distance(emp, target) < Rational(1, 20));
}

TEST_CASE("mediated run requires two disjoint paths") {
  auto g = two_state_game();
  auto phi = mixing_device();
  auto cut = make_network({"S", "1", "R"}, {{"S", "1"}, {"1", "R"}}, "S", "R");
  MediatedConfig mc;
  CHECK_THROWS_AS(run_mediated(g, phi, cut, {}, mc), std::invalid_argument);
}

TEST_CASE("phase-2 deviations: the relay still carries y") {
  // content lies by relays during the y transmission (global stages 3..7 on
  // the diamond) cannot change what j1 decodes, so the lottery inputs agree
  // and the receiver still plays the honest recommendation.
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();
  for (const char* who : {"S", "2", "R"}) {
    for (Stage t = 3; t <= 7; ++t) {
      MediatedDeviation d;
      d.stage = t;
      d.node = *net.find(who);
      d.action_content = 2;  // broadcast "c" instead of the honest content
      MediatedConfig mc;
      mc.seed = 7000 + 10 * t + who[0];
      mc.forced_state = 0;
      auto r = run_mediated(g, phi, net, {d}, mc);
      REQUIRE(r.majority.has_value());
      CHECK(*r.majority == r.honest_recommendation);
      CHECK(r.receiver_action == r.honest_recommendation);
    }
  }
}

TEST_CASE("pushforward over x for a fixed adversarial y is exact too") {
  auto cells = build_partition({Rational(1, 2), Rational(1, 2), Rational(0)});
  Rng rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    std::uint64_t y = rng.next_u64();  // adversary picks y, x stays uniform
    long count[3] = {0, 0, 0};
    for (std::uint64_t j = 0; j < (1ULL << 16); ++j)
      count[jcl_output({j << 48}, {y}, cells)] += 1;
    for (int a = 0; a < 3; ++a)
      CHECK(count[a] == static_cast<long>(cells.width(a) >> 48));
  }
}

TEST_CASE("numeric-mode mediated traces are deterministic") {
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = diamond();
  MediatedConfig mc;
  mc.seed = 31;
  mc.key_mode = KeyMode::kNumeric;
  mc.capture_trace = true;
  auto a = run_mediated(g, phi, net, {}, mc);
  auto b = run_mediated(g, phi, net, {}, mc);
  CHECK(a.trace_lines == b.trace_lines);
  CHECK(a.receiver_action == b.receiver_action);
}

TEST_CASE("mediated protocol on the six-node grid") {
  // All three phase-3 copies are full protocol runs here (no role sender is
  // adjacent to R), and the base sender relays inside the re-rooted circles.
  auto g = two_state_game();
  auto phi = mixing_device();
  auto net = make_network({"S", "1", "2", "3", "4", "5", "6", "R"},
                          {{"S", "1"},
                           {"S", "2"},
                           {"S", "3"},
                           {"1", "4"},
                           {"2", "5"},
                           {"3", "6"},
                           {"4", "R"},
                           {"5", "R"},
                           {"6", "R"}},
                          "S", "R");
  for (int i = 0; i < 25; ++i) {
    MediatedConfig mc;
    mc.seed = Rng::derive(1001, i);
    auto r = run_mediated(g, phi, net, {}, mc);
    CHECK(r.total_stages == 57);  // 3 + 2*(2n-3)(n-3), n = 6
    CHECK(r.phase3_start == 30);
    CHECK(r.receiver_action == r.honest_recommendation);
    CHECK(r.receiver_ignorance_ok);
    CHECK(r.copies_synchronized);
    for (int c = 0; c < 3; ++c) {
      REQUIRE(r.copy_decodes[c].has_value());
      CHECK(*r.copy_decodes[c] == r.honest_recommendation);
    }
  }
  // a wrong recommendation by any broadcaster loses 2-1
  for (int i = 0; i < 12; ++i) {
    MediatedDeviation d;
    d.stage = 30;
    d.node = *net.find(std::vector<std::string>{"S", "1", "2"}[i % 3]);
    d.action_content = i % 3;
    MediatedConfig mc;
    mc.seed = Rng::derive(2002, i);
    mc.forced_state = i % 2;
    auto r = run_mediated(g, phi, net, {d}, mc);
    REQUIRE(r.majority.has_value());
    CHECK(*r.majority == r.honest_recommendation);
  }
}
