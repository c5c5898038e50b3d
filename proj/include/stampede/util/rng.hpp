// Copyright 2026 The Stampede Authors
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

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace stampede::util {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed for the stream identified by (seed, tag_a, tag_b). Streams for
// different tags are independent, so disabling one consumer (for example
// perturbations) cannot shift the draws seen by another.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
  return mix64(mix64(mix64(seed) ^ tag_a) ^ tag_b);
}

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(eng);
}

inline int uniform_int(std::mt19937_64& eng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(eng);
}

// Distributions are constructed per call so engines carry the only state
// that has to be checkpointed.
inline double normal(std::mt19937_64& eng) {
  return std::normal_distribution<double>(0.0, 1.0)(eng);
}

inline std::string save_engine(const std::mt19937_64& eng) {
  std::ostringstream os;
  os << eng;
  return os.str();
}

inline void load_engine(std::mt19937_64& eng, const std::string& text) {
  std::istringstream is(text);
  is >> eng;
}

}  // namespace stampede::util
