// Copyright 2026 The Logits-MMD Authors.
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

#ifndef LOGITS_MMD_RANDOM_H_
#define LOGITS_MMD_RANDOM_H_

#include <cstdint>
#include <random>

namespace logits_mmd {

using Rng = std::mt19937_64;

// Fixed fan-out of one experiment seed into independent streams
// (splitmix64 of seed combined with the stream tag).
inline uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags used across the project.
enum SeedStream : uint64_t {
  kStreamData = 1,
  kStreamSplit = 2,
  kStreamInit = 3,
  kStreamBatches = 4,
  kStreamToyTarget = 5,
  kStreamToyNoise = 6,
  kStreamToyEval = 7,
};

}  // namespace logits_mmd

#endif  // LOGITS_MMD_RANDOM_H_
