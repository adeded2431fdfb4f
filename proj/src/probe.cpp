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

#include "cutremain/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "cutremain/error.hpp"
#include "cutremain/metrics.hpp"

namespace cutremain {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

int target_origin(int extent, int size) { return extent / 2 - size / 2; }

bool overlaps(int ax, int ay, int asize, int bx, int by, int bsize) {
  return ax < bx + bsize && bx < ax + asize && ay < by + bsize && by < ay + asize;
}

void paint(ImageTensor& image, int x0, int y0, int size, float value) {
  for (int y = y0; y < y0 + size; ++y) {
    for (int x = x0; x < x0 + size; ++x) image.at(x, y) = value;
  }
}

void check_probe_shape(const LinearProbe& probe, const ImageTensor& image) {
  if (image.width() != probe.width || image.height() != probe.height ||
      image.channels() != probe.channels) {
    fail(ErrorCode::kShape, "probe expects " + std::to_string(probe.width) + "x" +
                                std::to_string(probe.height) + "x" +
                                std::to_string(probe.channels) + " images, got " +
                                std::to_string(image.width()) + "x" +
                                std::to_string(image.height()) + "x" +
                                std::to_string(image.channels()));
  }
}

}  // namespace

void validate(const SyntheticTask& t) {
  auto bad = [](const std::string& what) { fail(ErrorCode::kInvalidParameter, "synthetic task: " + what); };
  if (t.width < 1 || t.height < 1) bad("image size must be positive");
  if (t.target_size < 1 || t.distractor_size < 1) bad("square sizes must be >= 1");
  if (t.distractor_size > t.width || t.distractor_size > t.height) bad("distractor does not fit");
  if (t.min_distractors < 0 || t.max_distractors < t.min_distractors) bad("bad distractor range");
  if (t.jitter < 0) bad("jitter must be >= 0");
  if (!(t.target_delta >= 0.0f) || !(t.background >= 0.0f) ||
      t.background + t.target_delta > 1.0f || !(t.distractor_intensity >= 0.0f) ||
      t.distractor_intensity > 1.0f) {
    bad("intensities must stay within [0, 1]");
  }
  if (!(t.positive_fraction >= 0.0 && t.positive_fraction <= 1.0)) {
    bad("positive fraction must lie in [0, 1]");
  }
  const int ox = target_origin(t.width, t.target_size);
  const int oy = target_origin(t.height, t.target_size);
  if (ox - t.jitter < 0 || oy - t.jitter < 0 || ox + t.jitter + t.target_size > t.width ||
      oy + t.jitter + t.target_size > t.height) {
    bad("target of size " + std::to_string(t.target_size) + " with jitter " +
        std::to_string(t.jitter) + " does not fit a " + std::to_string(t.width) + "x" +
        std::to_string(t.height) + " image");
  }
}

ImageLoader SyntheticDataset::loader() const {
  auto index = std::make_shared<std::unordered_map<std::string, std::size_t>>();
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    index->emplace(manifest.samples[i].id, i);
  }
  return [this, index](const AnnotatedSample& sample) -> ImageTensor {
    const auto it = index->find(sample.id);
    if (it == index->end()) fail(ErrorCode::kIo, "no in-memory image for " + sample.id);
    return images[it->second];
  };
}

std::vector<int> SyntheticDataset::binary_labels() const {
  std::vector<int> out;
  out.reserve(manifest.samples.size());
  for (const auto& s : manifest.samples) {
    out.push_back(s.label.class_index() == kPositiveClass ? 1 : 0);
  }
  return out;
}

SyntheticDataset generate_task(const SyntheticTask& task, std::size_t n, std::uint64_t seed) {
  validate(task);
  SyntheticDataset out;
  out.manifest.class_names = {"normal", "lesion"};
  out.manifest.provenance["generator"] = "synthetic-subtle-target";
  out.manifest.provenance["seed"] = seed;

  const auto positives = static_cast<std::size_t>(
      std::llround(task.positive_fraction * static_cast<double>(n)));
  std::vector<bool> is_positive(n, false);
  const auto order = Rng(derive_seed(seed, "classes")).permutation(n);
  for (std::size_t i = 0; i < positives && i < n; ++i) is_positive[order[i]] = true;

  const int ox = target_origin(task.width, task.target_size);
  const int oy = target_origin(task.height, task.target_size);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, "sample", i));
    ImageTensor image = ImageTensor::filled(task.width, task.height, 1, task.background);
    const int tx = ox + rng.uniform_int(-task.jitter, task.jitter);
    const int ty = oy + rng.uniform_int(-task.jitter, task.jitter);

    const int count = rng.uniform_int(task.min_distractors, task.max_distractors);
    for (int d = 0; d < count; ++d) {
      // Distractors never cover the target square; give up on a distractor
      // after a bounded number of tries in crowded configurations.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const int dx = rng.uniform_int(0, task.width - task.distractor_size);
        const int dy = rng.uniform_int(0, task.height - task.distractor_size);
        if (overlaps(dx, dy, task.distractor_size, tx, ty, task.target_size)) continue;
        paint(image, dx, dy, task.distractor_size, task.distractor_intensity);
        break;
      }
    }
    if (is_positive[i]) {
      paint(image, tx, ty, task.target_size, task.background + task.target_delta);
    }

    char id[32];
    std::snprintf(id, sizeof(id), "syn-%05zu", i);
    AnnotatedSample sample;
    sample.id = id;
    sample.path = sample.id + ".png";
    sample.size = ImageSize{task.width, task.height, 1};
    const std::size_t cls = is_positive[i] ? kPositiveClass : 0;
    sample.label = Label::single(cls, 2);
    const double half = task.target_size / 2.0;
    sample.annotations.push_back(
        Annotation{BoundingBox{tx + half, ty + half, static_cast<double>(task.target_size),
                               static_cast<double>(task.target_size)},
                   cls});
    out.manifest.samples.push_back(std::move(sample));
    out.images.push_back(std::move(image));
  }
  return out;
}

LinearProbe LinearProbe::zeros(int width, int height, int channels) {
  LinearProbe probe;
  probe.width = width;
  probe.height = height;
  probe.channels = channels;
  probe.weights.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                           static_cast<std::size_t>(channels),
                       0.0);
  return probe;
}

double LinearProbe::logit(const ImageTensor& image) const {
  check_probe_shape(*this, image);
  const auto x = image.values();
  double z = bias;
  for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
  return z;
}

double LinearProbe::score(const ImageTensor& image) const { return sigmoid(logit(image)); }

double probe_target(const Label& label) {
  if (label.num_classes() <= kPositiveClass) {
    fail(ErrorCode::kShape, "probe labels need a positive class entry");
  }
  return label.values()[kPositiveClass];
}

double probe_loss(const LinearProbe& probe, std::span<const AugmentedSample> data, double l2) {
  if (data.empty()) fail(ErrorCode::kInvalidParameter, "probe_loss: no data");
  double total = 0.0;
  for (const auto& s : data) {
    const double z = probe.logit(s.image);
    const double y = probe_target(s.label);
    // -y log σ(z) - (1 - y) log(1 - σ(z)) = softplus(z) - y z
    total += softplus(z) - y * z;
  }
  double norm = 0.0;
  for (const double w : probe.weights) norm += w * w;
  return total / static_cast<double>(data.size()) + 0.5 * l2 * norm;
}

std::vector<double> probe_gradient(const LinearProbe& probe,
                                   std::span<const AugmentedSample> data, double l2) {
  if (data.empty()) fail(ErrorCode::kInvalidParameter, "probe_gradient: no data");
  const std::size_t d = probe.weights.size();
  std::vector<double> grad(d + 1, 0.0);
  for (const auto& s : data) {
    const double r = sigmoid(probe.logit(s.image)) - probe_target(s.label);
    const auto x = s.image.values();
    for (std::size_t i = 0; i < d; ++i) grad[i] += r * x[i];
    grad[d] += r;
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (std::size_t i = 0; i < d; ++i) grad[i] = grad[i] * inv_n + l2 * probe.weights[i];
  grad[d] *= inv_n;
  return grad;
}

LinearProbe train_probe(std::span<const AugmentedSample> data, const ProbeParams& params) {
  if (data.empty()) fail(ErrorCode::kInvalidParameter, "train_probe: empty training stream");
  if (params.epochs < 0 || !(params.learning_rate > 0.0) || !(params.l2 >= 0.0)) {
    fail(ErrorCode::kInvalidParameter, "train_probe: invalid hyper-parameters");
  }
  const auto& first = data.front().image;
  LinearProbe probe = LinearProbe::zeros(first.width(), first.height(), first.channels());
  for (std::size_t i = 0; i < data.size(); ++i) {
    try {
      check_probe_shape(probe, data[i].image);
      probe_target(data[i].label);
    } catch (const Error& e) {
      rethrow_with_context(e, "training sample " + std::to_string(i));
    }
  }

  const std::size_t d = probe.weights.size();
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    Rng rng(derive_seed(params.seed, "epoch", static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order);
    for (const std::size_t i : order) {
      const auto x = data[i].image.values();
      const double r = sigmoid(probe.logit(data[i].image)) - probe_target(data[i].label);
      for (std::size_t j = 0; j < d; ++j) {
        probe.weights[j] -= params.learning_rate * (r * x[j] + params.l2 * probe.weights[j]);
      }
      probe.bias -= params.learning_rate * r;
    }
  }
  return probe;
}

double evaluate_probe(const LinearProbe& probe, std::span<const ImageTensor> images,
                      std::span<const int> labels) {
  std::vector<double> scores;
  scores.reserve(images.size());
  for (const auto& image : images) scores.push_back(probe.score(image));
  return auc_roc(scores, labels);
}

std::vector<double> ProbeReport::baseline() const { return auc.front(); }
std::vector<double> ProbeReport::cut_and_remain() const { return auc.back(); }

std::vector<double> ProbeReport::mean_by_gamma() const {
  std::vector<double> out;
  for (const auto& row : auc) {
    out.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
  }
  return out;
}

std::vector<double> ProbeReport::paired_difference() const {
  std::vector<double> out;
  const auto base = baseline();
  const auto cr = cut_and_remain();
  for (std::size_t s = 0; s < base.size(); ++s) out.push_back(cr[s] - base[s]);
  return out;
}

double ProbeReport::mean_paired_difference() const {
  const auto diff = paired_difference();
  return std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(diff.size());
}

ProbeReport run_probe_experiment(const ProbeExperimentConfig& config) {
  if (config.seeds.empty()) fail(ErrorCode::kInvalidParameter, "probe experiment needs seeds");
  if (config.train_size == 0 || config.test_size < 2) {
    fail(ErrorCode::kInvalidParameter, "probe experiment needs training and test samples");
  }
  ProbeReport report;
  report.seeds = config.seeds;
  report.gammas = config.gammas;
  report.gammas.push_back(0.0);
  report.gammas.push_back(1.0);
  for (const double g : report.gammas) GammaSchedule{g};
  std::sort(report.gammas.begin(), report.gammas.end());
  report.gammas.erase(std::unique(report.gammas.begin(), report.gammas.end()),
                      report.gammas.end());
  report.auc.assign(report.gammas.size(), std::vector<double>(config.seeds.size(), 0.0));

  for (std::size_t s = 0; s < config.seeds.size(); ++s) {
    const std::uint64_t seed = config.seeds[s];
    const SyntheticDataset train =
        generate_task(config.task, config.train_size, derive_seed(seed, "train"));
    const SyntheticDataset test =
        generate_task(config.task, config.test_size, derive_seed(seed, "test"));
    const auto test_labels = test.binary_labels();
    const auto loader = train.loader();

    ProbeParams params = config.probe;
    params.seed = derive_seed(seed, "probe");
    for (std::size_t g = 0; g < report.gammas.size(); ++g) {
      ComposeOptions options;
      options.method = Method::kCutAndRemain;
      options.gamma = report.gammas[g];
      options.ratios = config.ratios;
      options.seed = derive_seed(seed, "compose");
      const BatchManifest batch = compose(train.manifest, options);
      const auto samples = materialize_all(batch, train.manifest, loader);
      const LinearProbe probe = train_probe(samples, params);
      report.auc[g][s] = evaluate_probe(probe, test.images, test_labels);
    }
  }
  return report;
}

}  // namespace cutremain
