// Copyright 2026 The PASS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pass {

// Named phases of a run. Each phase draws from its own sub-stream so that
// enabling or reordering one phase never perturbs the draws of another.
enum class Stream : std::uint64_t {
  kData = 1,
  kSubstitute = 2,
  kInit = 3,
  kBatching = 4,
  kInference = 5,
  kProbe = 6,
  kAttack = 7,
  kDiagnostics = 8,
  kAdversarial = 9,
};

// SplitMix64 finalizer.
inline std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed from a parent seed and a path of indices.
inline std::uint64_t DeriveSeed(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = Mix64(seed);
  for (std::uint64_t p : path) s = Mix64(s ^ Mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline std::uint64_t DeriveSeed(std::uint64_t seed, Stream stream,
                                std::initializer_list<std::uint64_t> path = {}) {
  std::uint64_t s = DeriveSeed(seed, {static_cast<std::uint64_t>(stream)});
  return path.size() == 0 ? s : DeriveSeed(s, path);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pass
