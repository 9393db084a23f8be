// Copyright 2026 The qnt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * Counter-based random numbers (Philox4x32-10).
 *
 * A stream is addressed by (seed, experiment, trial); the draw index fills the
 * low 64 counter bits. Streams with different (experiment, trial) never share
 * a counter, so trials can run on any worker in any order.
 */

#include <array>
#include <cstdint>
#include <stdexcept>

namespace qnt {

using Philox4x32Block = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                       std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

constexpr Philox4x32Block philox4x32_10(Philox4x32Block ctr,
                                        Philox4x32Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
    detail::mulhilo(detail::kPhiloxM0, ctr[0], hi0, lo0);
    detail::mulhilo(detail::kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += detail::kPhiloxW0;
    key[1] += detail::kPhiloxW1;
  }
  return ctr;
}

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t experiment = 0;
  std::uint32_t trial = 0;
};

class RandomStream {
 public:
  explicit RandomStream(StreamKey key) : key_(key) {}
  RandomStream(std::uint64_t seed, std::uint32_t experiment,
               std::uint32_t trial)
      : key_{seed, experiment, trial} {}

  const StreamKey& key() const { return key_; }
  std::uint64_t draws() const { return draw_; }

  std::uint64_t next_u64() {
    if (buffered_ == 0) refill();
    buffered_ -= 2;
    const std::uint64_t hi = block_[buffered_ + 1];
    const std::uint64_t lo = block_[buffered_];
    return (hi << 32) | lo;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RandomStream::below(0)");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Independent child stream for a sub-experiment.
  RandomStream child(std::uint32_t salt) const {
    return RandomStream(key_.seed ^ (0x9E3779B97F4A7C15ull * (salt + 1ull)),
                        key_.experiment, key_.trial);
  }

 private:
  void refill() {
    const Philox4x32Block ctr = {static_cast<std::uint32_t>(draw_),
                                 static_cast<std::uint32_t>(draw_ >> 32),
                                 key_.trial, key_.experiment};
    const Philox4x32Key k = {static_cast<std::uint32_t>(key_.seed),
                             static_cast<std::uint32_t>(key_.seed >> 32)};
    const auto out = philox4x32_10(ctr, k);
    // Consumed from the back, so words (0,1) come out first.
    block_ = {out[2], out[3], out[0], out[1]};
    buffered_ = 4;
    ++draw_;
  }

  StreamKey key_;
  std::uint64_t draw_ = 0;
  Philox4x32Block block_{};
  int buffered_ = 0;
};

}  // namespace qnt
