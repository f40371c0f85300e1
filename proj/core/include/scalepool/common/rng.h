// Copyright 2026 The Scalepool Authors.
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

#ifndef SCALEPOOL_COMMON_RNG_H_
#define SCALEPOOL_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace scalepool {

// Portable seeded generator. The raw engine is std::mt19937_64, whose output
// sequence the standard fixes; range mapping is done here rather than with
// std::*_distribution, whose algorithms vary between standard libraries.
// Independent streams come from fork(), which seeds a child engine with
// splitmix64(seed ^ splitmix64(stream)).
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, n); n > 0. Multiply-shift (Lemire) without rejection: the
  // bias is below 2^-40 for the ranges used here.
  uint64_t below(uint64_t n) {
    __extension__ typedef unsigned __int128 u128;
    return static_cast<uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

  // Uniform in [lo, hi]; lo <= hi.
  int64_t between(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
  }

  Rng fork(uint64_t stream) const { return Rng(splitmix64(seed_ ^ splitmix64(stream))); }
  Rng fork(std::string_view stream) const { return fork(fnv1a(stream)); }

  uint64_t seed() const { return seed_; }

  static constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static constexpr uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace scalepool

#endif  // SCALEPOOL_COMMON_RNG_H_
