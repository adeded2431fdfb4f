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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cutremain/geometry.hpp"
#include "cutremain/image.hpp"

namespace cutremain {

struct ImageSize {
  int width = 0;  // 0 when unknown until the image is read
  int height = 0;
  int channels = 0;

  bool known() const { return width > 0 && height > 0; }
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct Annotation {
  BoundingBox box;
  // Index into DatasetManifest::class_names, when the source records one.
  std::optional<std::size_t> category;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Column window of the stored image that the sample actually covers; set by
// split_vertical.
struct ColumnCrop {
  int x0 = 0;
  int width = 0;

  friend bool operator==(const ColumnCrop&, const ColumnCrop&) = default;
};

struct AnnotatedSample {
  std::string id;
  std::string path;
  ImageSize size;
  Label label;
  std::vector<Annotation> annotations;
  std::optional<ColumnCrop> crop;

  std::vector<BoundingBox> boxes() const;

  friend bool operator==(const AnnotatedSample&, const AnnotatedSample&) = default;
};

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split split);
Split parse_split(std::string_view text);

struct DatasetManifest {
  std::vector<AnnotatedSample> samples;
  std::vector<std::string> class_names;
  Split split = Split::kTrain;
  // Ids of samples accepted without any annotation.
  std::vector<std::string> flagged;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  std::size_t box_count() const;
  const AnnotatedSample* find(std::string_view id) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

// Unique ids, consistent label widths, and every box of a sample with known
// size covering at least one pixel. Throws kInvalidParameter.
void validate(const DatasetManifest& manifest);

// COCO-2017 instance JSON. Corner-form boxes become center-form and each
// image gets a multi-label vector over the listed categories.
DatasetManifest parse_coco(std::string_view json_text, Split split = Split::kTrain);

// Header "path,label,cx,cy,w,h", optionally followed by "width,height" or
// "width,height,channels". Rows sharing path and label merge into one sample.
DatasetManifest parse_csv(std::string_view text, Split split = Split::kTrain);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);

// Reads the sample's PNG below `image_root`, applying its column crop.
ImageTensor load_sample_image(const AnnotatedSample& sample,
                              const std::filesystem::path& image_root);

// Left half covers columns [0, W/2), right half [W/2, W). Each annotation
// goes to the half holding its center and is clipped to it. A half left
// without annotations gets `background_label` when given, otherwise the
// source label.
std::pair<AnnotatedSample, AnnotatedSample> split_vertical(
    const AnnotatedSample& sample, const std::optional<Label>& background_label = {});

DatasetManifest split_manifest_vertical(const DatasetManifest& manifest,
                                        const std::optional<Label>& background_label = {});

// Mean over annotation instances of box area / image area.
double mean_relative_area(const AnnotatedSample& sample);

struct SubsetReport {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  // No annotations (after category restriction): the mean is undefined.
  std::vector<std::string> excluded;
};

struct SubsetResult {
  DatasetManifest manifest;
  SubsetReport report;
};

// Keeps images whose mean relative instance area is below `threshold`,
// optionally restricting annotations and labels to `categories` first.
// Classes without a supporting image are dropped and labels re-indexed.
SubsetResult build_small_subset(const DatasetManifest& manifest, double threshold = 0.02,
                                const std::optional<std::vector<std::string>>& categories = {});

}  // namespace cutremain
