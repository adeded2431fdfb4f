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

#include "cutremain/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cutremain/error.hpp"

namespace cutremain {

namespace {

std::string describe(const BoundingBox& box) {
  std::ostringstream os;
  os << "(" << box.cx << ", " << box.cy << ", " << box.w << ", " << box.h << ")";
  return os.str();
}

void check_dimensions(int width, int height) {
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::kInvalidParameter, "image dimensions must be positive, got " +
                                           std::to_string(width) + "x" +
                                           std::to_string(height));
  }
}

// Smallest i in [0, limit] with i + 0.5 >= edge, or limit when none is.
int first_center_at_or_after(double edge, int limit) {
  if (edge <= 0.5) return 0;
  if (edge > static_cast<double>(limit) + 0.5) return limit;
  int i = std::clamp(static_cast<int>(std::ceil(edge - 0.5)), 0, limit);
  // The ceil estimate can be off by one after rounding in edge - 0.5; settle
  // on the exact predicate.
  while (i > 0 && (i - 1) + 0.5 >= edge) --i;
  while (i < limit && !(i + 0.5 >= edge)) ++i;
  return i;
}

}  // namespace

void validate(const BoundingBox& box) {
  if (!std::isfinite(box.cx) || !std::isfinite(box.cy) || !std::isfinite(box.w) ||
      !std::isfinite(box.h)) {
    fail(ErrorCode::kInvalidParameter, "box has non-finite coordinates " + describe(box));
  }
  if (!(box.w > 0.0) || !(box.h > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "box width and height must be > 0, got " +
                                           describe(box));
  }
}

BoundingBox BoundingBox::make(double cx, double cy, double w, double h) {
  BoundingBox box{cx, cy, w, h};
  validate(box);
  return box;
}

AspectRatioSet::AspectRatioSet() : ratios_{1.0, 1.5, 2.0} {}

AspectRatioSet::AspectRatioSet(std::initializer_list<double> ratios)
    : AspectRatioSet(std::vector<double>(ratios)) {}

AspectRatioSet::AspectRatioSet(std::vector<double> ratios) : ratios_(std::move(ratios)) {
  if (ratios_.empty()) fail(ErrorCode::kInvalidParameter, "aspect ratio set is empty");
  for (std::size_t i = 0; i < ratios_.size(); ++i) {
    if (!std::isfinite(ratios_[i]) || !(ratios_[i] > 0.0)) {
      fail(ErrorCode::kInvalidParameter,
           "aspect ratio must be a positive finite factor, got " +
               std::to_string(ratios_[i]));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (ratios_[j] == ratios_[i]) {
        fail(ErrorCode::kInvalidParameter,
             "duplicate aspect ratio " + std::to_string(ratios_[i]));
      }
    }
  }
}

std::vector<std::pair<double, double>> AspectRatioSet::pairs() const {
  std::vector<std::pair<double, double>> out;
  out.reserve(pair_count());
  for (const double rw : ratios_) {
    for (const double rh : ratios_) out.emplace_back(rw, rh);
  }
  return out;
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill ? 1 : 0);
}

void BinaryMask::fill(const PixelRegion& region) {
  const int x0 = std::max(region.x0, 0);
  const int y0 = std::max(region.y0, 0);
  const int x1 = std::min(region.x1, width_);
  const int y1 = std::min(region.y1, height_);
  for (int y = y0; y < y1; ++y) {
    std::fill_n(values_.begin() + static_cast<std::ptrdiff_t>(index(x0, y)),
                std::max(x1 - x0, 0), std::uint8_t{1});
  }
}

std::size_t BinaryMask::popcount() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), 1));
}

BoundingBox expand_box(const BoundingBox& box, double rw, double rh) {
  if (!std::isfinite(rw) || !std::isfinite(rh) || !(rw > 0.0) || !(rh > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "expansion factors must be > 0, got (" +
                                           std::to_string(rw) + ", " +
                                           std::to_string(rh) + ")");
  }
  return BoundingBox{box.cx, box.cy, box.w * rw, box.h * rh};
}

std::vector<BoundingBox> variant_boxes(const BoundingBox& box,
                                       const AspectRatioSet& ratios) {
  validate(box);
  std::vector<BoundingBox> out;
  out.reserve(ratios.pair_count());
  for (const auto& [rw, rh] : ratios.pairs()) out.push_back(expand_box(box, rw, rh));
  return out;
}

bool covers_pixel_center(const BoundingBox& box, int ix, int iy) {
  const double px = ix + 0.5;
  const double py = iy + 0.5;
  return box.left() <= px && px < box.right() && box.top() <= py && py < box.bottom();
}

PixelRegion clip_to_image(const BoundingBox& box, int width, int height) {
  validate(box);
  check_dimensions(width, height);
  PixelRegion region{
      first_center_at_or_after(box.left(), width),
      first_center_at_or_after(box.top(), height),
      first_center_at_or_after(box.right(), width),
      first_center_at_or_after(box.bottom(), height),
  };
  if (region.empty()) {
    fail(ErrorCode::kEmptyRegion, "box " + describe(box) + " covers no pixel of a " +
                                      std::to_string(width) + "x" +
                                      std::to_string(height) + " image");
  }
  return region;
}

BinaryMask rasterize_mask(std::span<const BoundingBox> boxes, int width, int height) {
  if (boxes.empty()) fail(ErrorCode::kInvalidParameter, "rasterize_mask: no boxes");
  BinaryMask mask(width, height);
  bool any = false;
  for (const auto& box : boxes) {
    try {
      mask.fill(clip_to_image(box, width, height));
      any = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyRegion) throw;
    }
  }
  if (!any) {
    fail(ErrorCode::kEmptyMask, "all " + std::to_string(boxes.size()) +
                                    " box(es) fall outside the " + std::to_string(width) +
                                    "x" + std::to_string(height) + " image");
  }
  return mask;
}

}  // namespace cutremain
