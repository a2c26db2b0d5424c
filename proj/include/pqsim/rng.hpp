// Copyright 2026 The pqsim Authors
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

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

// Counter-based random numbers (Philox4x32-10, Salmon et al., "Parallel
// random numbers: as easy as 1, 2, 3", SC'11). Each trajectory owns a
// counter block derived from (master_seed, shot_index), so any shot can be
// regenerated in isolation and results never depend on worker scheduling.

namespace pqsim {

namespace philox {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

}  // namespace philox

// Stream of doubles for one trajectory. The key is the master seed; the
// counter carries (block index, shot index), so streams for different shots
// never overlap and draws are a pure function of (seed, shot, position).
class ShotRng {
 public:
  ShotRng(std::uint64_t master_seed, std::uint64_t shot_index)
      : key_{static_cast<std::uint32_t>(master_seed),
             static_cast<std::uint32_t>(master_seed >> 32)},
        shot_lo_(static_cast<std::uint32_t>(shot_index)),
        shot_hi_(static_cast<std::uint32_t>(shot_index >> 32)) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t bits = next64();
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  // Two independent standard normals via Box-Muller.
  std::pair<double, double> gaussian_pair() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }

 private:
  std::uint64_t next64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const philox::Counter out = philox::block(
        {static_cast<std::uint32_t>(block_index_),
         static_cast<std::uint32_t>(block_index_ >> 32), shot_lo_, shot_hi_},
        key_);
    ++block_index_;
    spare_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    have_spare_ = true;
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  }

  philox::Key key_;
  std::uint32_t shot_lo_;
  std::uint32_t shot_hi_;
  std::uint64_t block_index_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace pqsim
