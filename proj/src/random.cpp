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

#include "cutremain/random.hpp"

#include <cmath>
#include <numeric>

#include "cutremain/error.hpp"

namespace cutremain {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) fail(ErrorCode::kInvalidParameter, "uniform_index: empty range");
  const std::uint64_t range = n;
  // Rejection on the top of the 64-bit range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range);
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return static_cast<std::size_t>(draw % range);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) fail(ErrorCode::kInvalidParameter, "uniform_int: hi < lo");
  const auto span = static_cast<std::size_t>(static_cast<long long>(hi) - lo + 1);
  return lo + static_cast<int>(uniform_index(span));
}

double Rng::normal() {
  // Marsaglia polar method; the spare value is discarded to keep the
  // generator state a pure function of the number of calls.
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) fail(ErrorCode::kInvalidParameter, "gamma: shape must be > 0");
  if (shape < 1.0) {
    // Shape boosting: G(a) = G(a + 1) * U^(1/a).
    const double g = gamma(shape + 1.0);
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double Rng::beta(double a, double b) {
  const double x = gamma(a);
  const double y = gamma(b);
  return x / (x + y);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order);
  return order;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                          std::uint64_t index) {
  // FNV-1a over the label, then mixed with master and index.
  std::uint64_t label = 0xcbf29ce484222325ULL;
  for (const char ch : stream) {
    label ^= static_cast<unsigned char>(ch);
    label *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(master ^ label) + splitmix64(index));
}

}  // namespace cutremain
