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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cutremain/geometry.hpp"
#include "cutremain/image.hpp"
#include "cutremain/random.hpp"

namespace cutremain {

inline constexpr const char* kMethodOriginal = "original";
inline constexpr const char* kMethodCutAndRemain = "cut-and-remain";
inline constexpr const char* kMethodSupMixup = "sup-mixup";
inline constexpr const char* kMethodSupCutout = "sup-cutout";
inline constexpr const char* kMethodSupCutmix = "sup-cutmix";

struct Provenance {
  std::string method;
  std::optional<std::pair<double, double>> ratio;
  std::vector<std::string> sources;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  // Square zeroed by sup-cutout.
  std::optional<PixelRegion> erased;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct AugmentedSample {
  ImageTensor image;
  Label label;
  Provenance provenance;

  friend bool operator==(const AugmentedSample&, const AugmentedSample&) = default;
};

// An operand of the two-sample kernels. Only borrowed for the duration of
// the call.
struct MaskedSample {
  const ImageTensor& image;
  const Label& label;
  const BinaryMask& mask;
};

struct MixParams {
  // Drawn from Beta(alpha, alpha) when absent.
  std::optional<double> lambda;
  double alpha = 1.0;
};

// Element-wise mask * image over every channel.
ImageTensor apply_mask(const ImageTensor& image, const BinaryMask& mask);

// One sample for a single (rw, rh) pair: the union over `boxes` of the
// expanded boxes is kept, everything else is zeroed, the label is kept.
AugmentedSample cut_and_remain_variant(const ImageTensor& image, const Label& label,
                                       std::span<const BoundingBox> boxes, double rw,
                                       double rh, const std::string& source_id = {});

// All |ratios|^2 variants, in AspectRatioSet::pairs() order.
std::vector<AugmentedSample> cut_and_remain(const ImageTensor& image, const Label& label,
                                            std::span<const BoundingBox> boxes,
                                            const AspectRatioSet& ratios,
                                            const std::string& source_id = {});

double draw_mix_lambda(double alpha, Rng& rng);

// image = lambda * (M_A . x_A) + (1 - lambda) * (M_B . x_B)
// label = lambda * y_A + (1 - lambda) * y_B, as a soft label.
AugmentedSample sup_mixup(const MaskedSample& a, const MaskedSample& b, double lambda);
AugmentedSample sup_mixup(const MaskedSample& a, const MaskedSample& b,
                          const MixParams& params, Rng& rng);

// floor(min(W, H) / 4), at least 1.
int default_cutout_side(int width, int height);

// Number of side x side placements lying entirely where mask == 0.
std::size_t count_cutout_placements(const BinaryMask& mask, int side);

// Zeroes a side x side square drawn uniformly from the placements that lie
// entirely outside the mask. Pixels under the mask are never touched.
// Throws kPlacementFailure when no such placement exists.
AugmentedSample sup_cutout(const ImageTensor& image, const Label& label,
                           const BinaryMask& mask, int side, Rng& rng);

// x_A where M_A = 1, x_B elsewhere; label y_A.
AugmentedSample sup_cutmix(const MaskedSample& a, const ImageTensor& b_image,
                           const Label& b_label);

}  // namespace cutremain
