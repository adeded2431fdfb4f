// Copyright 2026 The Cutremain Authors.
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

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cutremain {

// Fixed default so that runs without an explicit seed still replay.
inline constexpr std::uint64_t kDefaultSeed = 20210817;

// Seeded generator with distributions implemented here rather than taken
// from <random>: the standard distributions are implementation-defined, and
// augmentation output must be bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  // Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  // Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi);

  double normal();
  double gamma(double shape);
  double beta(double a, double b);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

  // Random permutation of [0, n).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Deterministic child seed for (master, stream label, index). Distinct
// labels give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index = 0);

}  // namespace cutremain
