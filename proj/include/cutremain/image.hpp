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
#include <span>
#include <string>
#include <vector>

#include "cutremain/geometry.hpp"

namespace cutremain {

// W x H x C intensities in [0, 1], stored row-major with interleaved
// channels: value(x, y, c) = data[(y * W + x) * C + c].
class ImageTensor {
 public:
  ImageTensor() = default;
  // Zero-filled image.
  ImageTensor(int width, int height, int channels);
  // Takes ownership of `values`; throws kShape on a length mismatch and
  // kInvalidParameter on values outside [0, 1].
  ImageTensor(int width, int height, int channels, std::vector<float> values);

  static ImageTensor filled(int width, int height, int channels, float value);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }

  std::span<const float> values() const { return data_; }
  std::span<float> values() { return data_; }

  bool same_shape(const ImageTensor& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  // Columns [x0, x0 + width) as a new image.
  ImageTensor crop_columns(int x0, int width) const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Throws kShape when the mask and image planes differ in size.
void check_mask_shape(const ImageTensor& image, const BinaryMask& mask);

// Class label in one of three encodings. All encodings expose a dense
// per-class vector through values().
class Label {
 public:
  enum class Kind { kSingleClass, kMultiLabel, kSoft };

  Label() = default;

  static Label single(std::size_t index, std::size_t num_classes);
  static Label multi(const std::vector<bool>& active);
  static Label soft(std::vector<double> probabilities);

  Kind kind() const { return kind_; }
  std::size_t num_classes() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

  // Index of the active class; throws kInvalidParameter unless kSingleClass.
  std::size_t class_index() const;
  // Classes with a non-zero entry.
  std::vector<std::size_t> active_classes() const;

  friend bool operator==(const Label&, const Label&) = default;

 private:
  Kind kind_ = Kind::kSingleClass;
  std::vector<double> values_;
};

std::string to_string(Label::Kind kind);

}  // namespace cutremain
