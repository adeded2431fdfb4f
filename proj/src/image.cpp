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

#include "cutremain/image.hpp"

#include <algorithm>
#include <cmath>

#include "cutremain/error.hpp"

namespace cutremain {

ImageTensor::ImageTensor(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || channels < 1) {
    fail(ErrorCode::kShape, "image dimensions must be >= 1, got " + std::to_string(width) +
                                "x" + std::to_string(height) + "x" +
                                std::to_string(channels));
  }
  data_.assign(pixel_count() * static_cast<std::size_t>(channels), 0.0f);
}

ImageTensor::ImageTensor(int width, int height, int channels, std::vector<float> values)
    : ImageTensor(width, height, channels) {
  if (values.size() != data_.size()) {
    fail(ErrorCode::kShape, "image buffer holds " + std::to_string(values.size()) +
                                " values, expected " + std::to_string(data_.size()));
  }
  for (const float v : values) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      fail(ErrorCode::kInvalidParameter,
           "image intensity outside [0, 1]: " + std::to_string(v));
    }
  }
  data_ = std::move(values);
}

ImageTensor ImageTensor::filled(int width, int height, int channels, float value) {
  ImageTensor image(width, height, channels);
  if (!(value >= 0.0f && value <= 1.0f)) {
    fail(ErrorCode::kInvalidParameter, "fill value outside [0, 1]");
  }
  std::fill(image.data_.begin(), image.data_.end(), value);
  return image;
}

ImageTensor ImageTensor::crop_columns(int x0, int width) const {
  if (x0 < 0 || width < 1 || x0 + width > width_) {
    fail(ErrorCode::kShape, "column crop [" + std::to_string(x0) + ", " +
                                std::to_string(x0 + width) + ") outside image of width " +
                                std::to_string(width_));
  }
  ImageTensor out(width, height_, channels_);
  const auto row = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels_);
  for (int y = 0; y < height_; ++y) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(index(x0, y, 0)), row,
                out.data_.begin() + static_cast<std::ptrdiff_t>(out.index(0, y, 0)));
  }
  return out;
}

void check_mask_shape(const ImageTensor& image, const BinaryMask& mask) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    fail(ErrorCode::kShape, "mask is " + std::to_string(mask.width()) + "x" +
                                std::to_string(mask.height()) + " but image is " +
                                std::to_string(image.width()) + "x" +
                                std::to_string(image.height()));
  }
}

Label Label::single(std::size_t index, std::size_t num_classes) {
  if (index >= num_classes) {
    fail(ErrorCode::kInvalidParameter, "class index " + std::to_string(index) +
                                           " out of range for " +
                                           std::to_string(num_classes) + " classes");
  }
  Label label;
  label.kind_ = Kind::kSingleClass;
  label.values_.assign(num_classes, 0.0);
  label.values_[index] = 1.0;
  return label;
}

Label Label::multi(const std::vector<bool>& active) {
  Label label;
  label.kind_ = Kind::kMultiLabel;
  label.values_.reserve(active.size());
  for (const bool on : active) label.values_.push_back(on ? 1.0 : 0.0);
  return label;
}

Label Label::soft(std::vector<double> probabilities) {
  for (const double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      fail(ErrorCode::kInvalidParameter,
           "soft label entry outside [0, 1]: " + std::to_string(p));
    }
  }
  Label label;
  label.kind_ = Kind::kSoft;
  label.values_ = std::move(probabilities);
  return label;
}

std::size_t Label::class_index() const {
  if (kind_ != Kind::kSingleClass) {
    fail(ErrorCode::kInvalidParameter, "class_index() on a " + to_string(kind_) + " label");
  }
  return static_cast<std::size_t>(
      std::find(values_.begin(), values_.end(), 1.0) - values_.begin());
}

std::vector<std::size_t> Label::active_classes() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (values_[k] != 0.0) out.push_back(k);
  }
  return out;
}

std::string to_string(Label::Kind kind) {
  switch (kind) {
    case Label::Kind::kSingleClass:
      return "single";
    case Label::Kind::kMultiLabel:
      return "multi";
    case Label::Kind::kSoft:
      return "soft";
  }
  return "unknown";
}

}  // namespace cutremain
