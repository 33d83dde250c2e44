/**
 * Copyright 2026 The VCForge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>

namespace vcforge {

/// SplitMix64: a 64-bit counter-based generator (Steele et al.).  The state
/// advances by a fixed odd constant and the output is a bijective mix of it,
/// so every seed yields a full-period, platform-independent stream.  All
/// randomized behavior in this project (weight init, segment sampling, noise
/// excitation, toy corpora) draws from instances of this generator, which is
/// what makes runs bit-reproducible for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  float uniform_float(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

  /// Uniform integer in [0, n). n must be positive.
  uint64_t next_below(uint64_t n) {
    return static_cast<uint64_t>(next_double() * static_cast<double>(n)) % n;
  }

  /// Derives an independent stream seed; used to give submodules their own
  /// generators without correlating their draws.
  uint64_t fork_seed() { return next_u64(); }

 private:
  uint64_t state_;
};

}  // namespace vcforge
