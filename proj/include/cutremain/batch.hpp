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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cutremain/augment.hpp"
#include "cutremain/dataset.hpp"
#include "cutremain/geometry.hpp"
#include "cutremain/random.hpp"

namespace cutremain {

enum class Method { kOriginal, kCutAndRemain, kSupMixup, kSupCutout, kSupCutmix };

std::string to_string(Method method);
Method parse_method(std::string_view name);
bool is_pairing(Method method);

// Fraction of the training set that receives the augmentation.
class GammaSchedule {
 public:
  explicit GammaSchedule(double gamma);
  double gamma() const { return gamma_; }
  // floor(gamma * n); a 1e-9 guard absorbs decimal fractions such as
  // 0.29 * 100 = 28.999999999999996.
  std::size_t selected_count(std::size_t n) const;

 private:
  double gamma_;
};

struct BatchEntry {
  std::string source_id;
  Method method = Method::kOriginal;
  std::optional<std::pair<double, double>> ratio;  // cut-and-remain
  std::optional<std::string> partner_id;            // mixup, cutmix
  std::optional<double> lambda;                     // mixup
  std::optional<std::uint64_t> seed;                // cutout

  friend bool operator==(const BatchEntry&, const BatchEntry&) = default;
};

struct BatchManifest {
  std::vector<BatchEntry> entries;
  std::uint64_t master_seed = kDefaultSeed;
  Method method = Method::kOriginal;
  double gamma = 0.0;
  AspectRatioSet ratios;
  std::size_t batch_size = 32;
  std::size_t dataset_size = 0;
  // 0 means default_cutout_side() of each image.
  int cutout_side = 0;

  // Distinct sources that received an augmented entry, in first-seen order.
  std::vector<std::string> augmented_sources() const;
  std::size_t original_count() const;

  friend bool operator==(const BatchManifest&, const BatchManifest&) = default;
};

struct ComposeOptions {
  Method method = Method::kCutAndRemain;
  double gamma = 1.0;
  AspectRatioSet ratios;
  std::uint64_t seed = kDefaultSeed;
  std::size_t batch_size = 32;
  // Keep only this many ratio variants per selected sample. Unset keeps all.
  std::optional<std::size_t> variants_per_sample;
  double mix_alpha = 1.0;
  int cutout_side = 0;
};

// Every original once, plus augmented entries for a seeded choice of
// floor(gamma * N) samples (all ratio variants each, for cut-and-remain).
// The choice is a prefix of one seeded ordering of the dataset, so for a
// fixed seed the augmented sources are nested across gamma. Entry order is
// a seeded permutation.
BatchManifest compose(const DatasetManifest& dataset, const ComposeOptions& options);

std::string batch_to_jsonl(const BatchManifest& batch);
BatchManifest batch_from_jsonl(std::string_view text);

using ImageLoader = std::function<ImageTensor(const AnnotatedSample&)>;
using SampleSink = std::function<void(std::size_t entry_index, AugmentedSample sample)>;

// Executes one entry with the augment kernels.
AugmentedSample materialize_entry(const BatchManifest& batch, std::size_t index,
                                  const DatasetManifest& dataset, const ImageLoader& loader);

// Executes every entry, handing samples to `sink` in manifest order. Up to
// `jobs` entries run concurrently; the output does not depend on `jobs`.
void materialize(const BatchManifest& batch, const DatasetManifest& dataset,
                 const ImageLoader& loader, const SampleSink& sink, unsigned jobs = 1);

std::vector<AugmentedSample> materialize_all(const BatchManifest& batch,
                                             const DatasetManifest& dataset,
                                             const ImageLoader& loader, unsigned jobs = 1);

}  // namespace cutremain
