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
#include <span>
#include <vector>

#include "cutremain/augment.hpp"
#include "cutremain/batch.hpp"
#include "cutremain/dataset.hpp"
#include "cutremain/image.hpp"

namespace cutremain {

// Subtle-target classification task: positives hold one faint square near
// the image center among brighter look-alike distractors; negatives hold
// distractors only. Every sample carries a box at the (would-be) target.
struct SyntheticTask {
  int width = 32;
  int height = 32;
  int min_distractors = 6;
  int max_distractors = 10;
  int distractor_size = 4;
  float distractor_intensity = 0.8f;
  int target_size = 4;
  // Target intensity above background. Zero makes the classes identical.
  float target_delta = 0.55f;
  float background = 0.0f;
  double positive_fraction = 0.5;
  // Uniform per-axis offset of the target from the image center.
  int jitter = 6;
};

void validate(const SyntheticTask& task);

struct SyntheticDataset {
  DatasetManifest manifest;
  std::vector<ImageTensor> images;  // parallel to manifest.samples

  // Serves images from memory by sample id.
  ImageLoader loader() const;
  std::vector<int> binary_labels() const;
};

inline constexpr std::size_t kPositiveClass = 1;

SyntheticDataset generate_task(const SyntheticTask& task, std::size_t n, std::uint64_t seed);

struct ProbeParams {
  double learning_rate = 0.01;
  int epochs = 10;
  double l2 = 1e-4;
  std::uint64_t seed = kDefaultSeed;
};

// Logistic regression over flattened pixels.
struct LinearProbe {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> weights;
  double bias = 0.0;

  static LinearProbe zeros(int width, int height, int channels);

  double logit(const ImageTensor& image) const;
  double score(const ImageTensor& image) const;
};

// Training target: the label's entry for kPositiveClass (soft labels keep
// their mixing weight).
double probe_target(const Label& label);

// Mean binary cross-entropy plus (l2 / 2) * |w|^2.
double probe_loss(const LinearProbe& probe, std::span<const AugmentedSample> data, double l2);

// Gradient of probe_loss; the bias derivative is the last element.
std::vector<double> probe_gradient(const LinearProbe& probe,
                                   std::span<const AugmentedSample> data, double l2);

// Seeded per-sample SGD starting from zero weights.
LinearProbe train_probe(std::span<const AugmentedSample> data, const ProbeParams& params);

// AUC of sigmoid(w.x + b) on held-out images. Takes no annotations.
double evaluate_probe(const LinearProbe& probe, std::span<const ImageTensor> images,
                      std::span<const int> labels);

struct ProbeExperimentConfig {
  SyntheticTask task;
  std::size_t train_size = 500;
  std::size_t test_size = 500;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  // Extra gamma values to sweep; 0 and 1 are always run.
  std::vector<double> gammas;
  AspectRatioSet ratios;
  ProbeParams probe;
};

struct ProbeReport {
  std::vector<std::uint64_t> seeds;
  std::vector<double> gammas;  // sorted, includes 0 and 1
  // auc[g][s]: gamma index g, seed index s.
  std::vector<std::vector<double>> auc;

  std::vector<double> baseline() const;        // gamma 0
  std::vector<double> cut_and_remain() const;  // gamma 1
  std::vector<double> mean_by_gamma() const;
  // Per-seed cut_and_remain - baseline.
  std::vector<double> paired_difference() const;
  double mean_paired_difference() const;
};

ProbeReport run_probe_experiment(const ProbeExperimentConfig& config);

}  // namespace cutremain
