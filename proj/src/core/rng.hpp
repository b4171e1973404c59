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

#ifndef ROBUSTCOMM_CORE_RNG_HPP_
#define ROBUSTCOMM_CORE_RNG_HPP_

#include <cstdint>

namespace robustcomm {

// SplitMix64. Standard-library engines are portable but the distributions are
// not; traces must be bit-identical across toolchains, so we draw bits
// ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, n) via 128-bit multiply with rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool next_bool() { return (next_u64() & 1) != 0; }

  // Derives an independent stream, used to give each run of a sweep its own
  // deterministic seed regardless of worker scheduling.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL));
    r.next_u64();
    return r.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace robustcomm

#endif  // ROBUSTCOMM_CORE_RNG_HPP_
