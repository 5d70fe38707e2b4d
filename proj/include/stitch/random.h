// Copyright 2026 The Stitch Authors.
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

#ifndef STITCH_RANDOM_H_
#define STITCH_RANDOM_H_

#include <cstdint>
#include <random>

namespace stitch {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; decorrelates nearby seeds.
inline uint64_t MixSeed(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the index-th independent stream under `seed`. Tasks that draw from
// DeriveSeed(seed, i) are independent of execution order.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t index) {
  return MixSeed(seed ^ MixSeed(index));
}

inline Rng MakeRng(uint64_t seed) { return Rng(MixSeed(seed)); }

// Uniform double in [0, 1) from the top 53 bits.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline uint64_t UniformIndex(Rng& rng, uint64_t n) {
  return std::uniform_int_distribution<uint64_t>(0, n - 1)(rng);
}

}  // namespace stitch

#endif  // STITCH_RANDOM_H_
