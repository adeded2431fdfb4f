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

#include "cutremain/augment.hpp"

#include <algorithm>
#include <cmath>

#include "cutremain/error.hpp"

namespace cutremain {

namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* kernel) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::kShape,
         std::string(kernel) + ": operand shapes differ (" + std::to_string(a.width()) +
             "x" + std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
             " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
             "x" + std::to_string(b.channels()) + ")");
  }
}

void require_nonempty(const BinaryMask& mask, const char* kernel) {
  if (mask.all_zero()) fail(ErrorCode::kEmptyMask, std::string(kernel) + ": mask is empty");
}

std::vector<std::string> source_list(const std::string& id) {
  if (id.empty()) return {};
  return {id};
}

}  // namespace

ImageTensor apply_mask(const ImageTensor& image, const BinaryMask& mask) {
  check_mask_shape(image, mask);
  ImageTensor out(image.width(), image.height(), image.channels());
  const auto src = image.values();
  auto dst = out.values();
  const auto bits = mask.values();
  const auto channels = static_cast<std::size_t>(image.channels());
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (!bits[p]) continue;
    for (std::size_t c = 0; c < channels; ++c) dst[p * channels + c] = src[p * channels + c];
  }
  return out;
}

AugmentedSample cut_and_remain_variant(const ImageTensor& image, const Label& label,
                                       std::span<const BoundingBox> boxes, double rw,
                                       double rh, const std::string& source_id) {
  if (boxes.empty()) fail(ErrorCode::kInvalidParameter, "cut_and_remain: no annotations");
  std::vector<BoundingBox> expanded;
  expanded.reserve(boxes.size());
  for (const auto& box : boxes) {
    validate(box);
    expanded.push_back(expand_box(box, rw, rh));
  }
  const BinaryMask mask = rasterize_mask(expanded, image.width(), image.height());
  Provenance provenance;
  provenance.method = kMethodCutAndRemain;
  provenance.ratio = std::make_pair(rw, rh);
  provenance.sources = source_list(source_id);
  return AugmentedSample{apply_mask(image, mask), label, std::move(provenance)};
}

std::vector<AugmentedSample> cut_and_remain(const ImageTensor& image, const Label& label,
                                            std::span<const BoundingBox> boxes,
                                            const AspectRatioSet& ratios,
                                            const std::string& source_id) {
  std::vector<AugmentedSample> out;
  out.reserve(ratios.pair_count());
  for (const auto& [rw, rh] : ratios.pairs()) {
    out.push_back(cut_and_remain_variant(image, label, boxes, rw, rh, source_id));
  }
  return out;
}

double draw_mix_lambda(double alpha, Rng& rng) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "mixup alpha must be > 0");
  }
  return rng.beta(alpha, alpha);
}

AugmentedSample sup_mixup(const MaskedSample& a, const MaskedSample& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    fail(ErrorCode::kInvalidParameter,
         "mixup lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  require_same_shape(a.image, b.image, "sup_mixup");
  check_mask_shape(a.image, a.mask);
  check_mask_shape(b.image, b.mask);
  if (a.label.num_classes() != b.label.num_classes()) {
    fail(ErrorCode::kShape, "sup_mixup: labels have different class counts");
  }

  ImageTensor out(a.image.width(), a.image.height(), a.image.channels());
  const auto xa = a.image.values();
  const auto xb = b.image.values();
  const auto ma = a.mask.values();
  const auto mb = b.mask.values();
  auto dst = out.values();
  const auto channels = static_cast<std::size_t>(a.image.channels());
  for (std::size_t p = 0; p < ma.size(); ++p) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t i = p * channels + c;
      const double va = ma[p] ? xa[i] : 0.0;
      const double vb = mb[p] ? xb[i] : 0.0;
      dst[i] = static_cast<float>(lambda * va + (1.0 - lambda) * vb);
    }
  }

  std::vector<double> mixed(a.label.num_classes());
  for (std::size_t k = 0; k < mixed.size(); ++k) {
    mixed[k] = lambda * a.label.values()[k] + (1.0 - lambda) * b.label.values()[k];
  }

  Provenance provenance;
  provenance.method = kMethodSupMixup;
  provenance.lambda = lambda;
  return AugmentedSample{std::move(out), Label::soft(std::move(mixed)),
                         std::move(provenance)};
}

AugmentedSample sup_mixup(const MaskedSample& a, const MaskedSample& b,
                          const MixParams& params, Rng& rng) {
  const double lambda = params.lambda ? *params.lambda : draw_mix_lambda(params.alpha, rng);
  return sup_mixup(a, b, lambda);
}

int default_cutout_side(int width, int height) {
  return std::max(1, std::min(width, height) / 4);
}

namespace {

// Top-left corners of every side x side square with no mask pixel inside,
// in row-major order.
std::vector<std::pair<int, int>> cutout_placements(const BinaryMask& mask, int side) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::pair<int, int>> out;
  if (side > w || side > h) return out;
  // Summed-area table with a zero border row and column.
  const auto stride = static_cast<std::size_t>(w) + 1;
  std::vector<std::uint32_t> sat(stride * (static_cast<std::size_t>(h) + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::uint32_t row = 0;
    for (int x = 0; x < w; ++x) {
      row += mask.at(x, y);
      sat[(y + 1) * stride + (x + 1)] = sat[y * stride + (x + 1)] + row;
    }
  }
  for (int y = 0; y + side <= h; ++y) {
    for (int x = 0; x + side <= w; ++x) {
      const std::uint32_t covered = sat[(y + side) * stride + (x + side)] -
                                    sat[y * stride + (x + side)] -
                                    sat[(y + side) * stride + x] + sat[y * stride + x];
      if (covered == 0) out.emplace_back(x, y);
    }
  }
  return out;
}

}  // namespace

std::size_t count_cutout_placements(const BinaryMask& mask, int side) {
  if (side < 1) fail(ErrorCode::kInvalidParameter, "cutout side must be >= 1");
  return cutout_placements(mask, side).size();
}

AugmentedSample sup_cutout(const ImageTensor& image, const Label& label,
                           const BinaryMask& mask, int side, Rng& rng) {
  if (side < 1) fail(ErrorCode::kInvalidParameter, "cutout side must be >= 1");
  check_mask_shape(image, mask);
  require_nonempty(mask, "sup_cutout");

  const auto placements = cutout_placements(mask, side);
  if (placements.empty()) {
    fail(ErrorCode::kPlacementFailure,
         "sup_cutout: no " + std::to_string(side) + "x" + std::to_string(side) +
             " square fits outside the annotation mask");
  }
  const auto [x0, y0] = placements[rng.uniform_index(placements.size())];

  ImageTensor out = image;
  for (int y = y0; y < y0 + side; ++y) {
    for (int x = x0; x < x0 + side; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = 0.0f;
    }
  }
  Provenance provenance;
  provenance.method = kMethodSupCutout;
  provenance.erased = PixelRegion{x0, y0, x0 + side, y0 + side};
  return AugmentedSample{std::move(out), label, std::move(provenance)};
}

AugmentedSample sup_cutmix(const MaskedSample& a, const ImageTensor& b_image,
                           const Label& b_label) {
  require_same_shape(a.image, b_image, "sup_cutmix");
  check_mask_shape(a.image, a.mask);
  require_nonempty(a.mask, "sup_cutmix");
  if (a.label.num_classes() != b_label.num_classes()) {
    fail(ErrorCode::kShape, "sup_cutmix: labels have different class counts");
  }

  ImageTensor out = b_image;
  const auto xa = a.image.values();
  const auto bits = a.mask.values();
  auto dst = out.values();
  const auto channels = static_cast<std::size_t>(a.image.channels());
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (!bits[p]) continue;
    for (std::size_t c = 0; c < channels; ++c) dst[p * channels + c] = xa[p * channels + c];
  }
  Provenance provenance;
  provenance.method = kMethodSupCutmix;
  return AugmentedSample{std::move(out), a.label, std::move(provenance)};
}

}  // namespace cutremain
