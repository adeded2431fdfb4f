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
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace cutremain {

// Center-form box annotation in pixel units.
struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  // Throws kInvalidParameter unless w > 0, h > 0 and all fields are finite.
  static BoundingBox make(double cx, double cy, double w, double h);

  double left() const { return cx - w / 2.0; }
  double right() const { return cx + w / 2.0; }
  double top() const { return cy - h / 2.0; }
  double bottom() const { return cy + h / 2.0; }
  double area() const { return w * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

void validate(const BoundingBox& box);

// Ordered, duplicate-free list of positive scale factors.
class AspectRatioSet {
 public:
  // {1.0, 1.5, 2.0}
  AspectRatioSet();
  AspectRatioSet(std::initializer_list<double> ratios);
  explicit AspectRatioSet(std::vector<double> ratios);

  const std::vector<double>& ratios() const { return ratios_; }
  std::size_t size() const { return ratios_.size(); }
  // Number of (rw, rh) pairs, size()^2.
  std::size_t pair_count() const { return ratios_.size() * ratios_.size(); }

  // Row-major over (rw, rh): rw is the outer loop.
  std::vector<std::pair<double, double>> pairs() const;

  friend bool operator==(const AspectRatioSet&, const AspectRatioSet&) = default;

 private:
  std::vector<double> ratios_;
};

// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRegion {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  std::size_t area() const {
    return static_cast<std::size_t>(width()) * static_cast<std::size_t>(height());
  }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }

  friend bool operator==(const PixelRegion&, const PixelRegion&) = default;
};

// W x H array over {0, 1}, row-major.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, std::uint8_t fill = 0);

  static BinaryMask ones(int width, int height) { return BinaryMask(width, height, 1); }

  int width() const { return width_; }
  int height() const { return height_; }

  std::uint8_t at(int x, int y) const { return values_[index(x, y)]; }
  void set(int x, int y, bool on) { values_[index(x, y)] = on ? 1 : 0; }
  void fill(const PixelRegion& region);

  std::span<const std::uint8_t> values() const { return values_; }
  std::size_t popcount() const;
  bool all_zero() const { return popcount() == 0; }
  bool all_ones() const { return popcount() == values_.size(); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> values_;
};

// (cx, cy, w * rw, h * rh). Throws kInvalidParameter for non-positive factors.
BoundingBox expand_box(const BoundingBox& box, double rw, double rh);

// One expanded box per (rw, rh) pair, in AspectRatioSet::pairs() order.
std::vector<BoundingBox> variant_boxes(const BoundingBox& box,
                                       const AspectRatioSet& ratios);

// True when the center of pixel (ix, iy) lies in the half-open box
// [cx - w/2, cx + w/2) x [cy - h/2, cy + h/2).
bool covers_pixel_center(const BoundingBox& box, int ix, int iy);

// Tight pixel region of `box` under the pixel-center rule, intersected with
// the image. Throws kEmptyRegion when no pixel center of the image is covered.
PixelRegion clip_to_image(const BoundingBox& box, int width, int height);

// Union of the clipped regions. Boxes that clip to nothing are skipped;
// throws kEmptyMask if every box does.
BinaryMask rasterize_mask(std::span<const BoundingBox> boxes, int width, int height);

}  // namespace cutremain
