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

#include "cutremain/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "cutremain/error.hpp"
#include "cutremain/image_io.hpp"
#include "cutremain/version.hpp"

namespace cutremain {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  fail(ErrorCode::kParse, where + ": " + what);
}

const ojson& member(const ojson& object, const char* key, const std::string& where) {
  if (!object.is_object()) parse_error(where, "expected an object");
  const auto it = object.find(key);
  if (it == object.end()) parse_error(where, std::string("missing \"") + key + "\"");
  return *it;
}

double number(const ojson& value, const std::string& where) {
  if (!value.is_number()) parse_error(where, "expected a number");
  return value.get<double>();
}

std::string id_string(const ojson& value, const std::string& where) {
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_string()) return value.get<std::string>();
  parse_error(where, "expected an integer or string id");
}

bool covers_any_pixel(const BoundingBox& box, const ImageSize& size) {
  try {
    clip_to_image(box, size.width, size.height);
    return true;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyRegion) throw;
    return false;
  }
}

}  // namespace

std::vector<BoundingBox> AnnotatedSample::boxes() const {
  std::vector<BoundingBox> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) out.push_back(a.box);
  return out;
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  fail(ErrorCode::kInvalidParameter, "unknown split \"" + std::string(text) + "\"");
}

std::size_t DatasetManifest::box_count() const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.annotations.size();
  return n;
}

const AnnotatedSample* DatasetManifest::find(std::string_view id) const {
  for (const auto& s : samples) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

void validate(const DatasetManifest& manifest) {
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const auto& s = manifest.samples[i];
    const std::string where = "sample " + std::to_string(i) + " (" + s.id + ")";
    if (!ids.insert(s.id).second) {
      fail(ErrorCode::kInvalidParameter, where + ": duplicate sample id");
    }
    if (s.label.num_classes() != manifest.class_names.size()) {
      fail(ErrorCode::kInvalidParameter,
           where + ": label has " + std::to_string(s.label.num_classes()) +
               " classes, manifest lists " + std::to_string(manifest.class_names.size()));
    }
    for (const auto& a : s.annotations) {
      validate(a.box);
      if (a.category && *a.category >= manifest.class_names.size()) {
        fail(ErrorCode::kInvalidParameter, where + ": annotation category out of range");
      }
      if (s.size.known() && !covers_any_pixel(a.box, s.size)) {
        fail(ErrorCode::kInvalidParameter, where + ": box covers no pixel of the image");
      }
    }
  }
}

DatasetManifest parse_coco(std::string_view json_text, Split split) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    fail(ErrorCode::kParse, "malformed JSON at byte " + std::to_string(e.byte) + ": " +
                                e.what());
  }

  DatasetManifest manifest;
  manifest.split = split;

  const auto& categories = member(doc, "categories", "document");
  const auto& images = member(doc, "images", "document");
  const auto& annotations = member(doc, "annotations", "document");
  if (!categories.is_array() || !images.is_array() || !annotations.is_array()) {
    parse_error("document", "\"images\", \"annotations\" and \"categories\" must be arrays");
  }

  std::unordered_map<std::string, std::size_t> category_index;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const std::string where = "categories[" + std::to_string(i) + "]";
    const std::string id = id_string(member(categories[i], "id", where), where);
    const auto& name = member(categories[i], "name", where);
    if (!name.is_string()) parse_error(where, "\"name\" must be a string");
    if (!category_index.emplace(id, i).second) parse_error(where, "duplicate category id " + id);
    manifest.class_names.push_back(name.get<std::string>());
  }

  std::unordered_map<std::string, std::size_t> image_index;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    const auto& record = images[i];
    AnnotatedSample sample;
    sample.id = id_string(member(record, "id", where), where);
    const auto& file = member(record, "file_name", where);
    if (!file.is_string()) parse_error(where, "\"file_name\" must be a string");
    sample.path = file.get<std::string>();
    const double width = number(member(record, "width", where), where);
    const double height = number(member(record, "height", where), where);
    if (!(width >= 1) || !(height >= 1) || width != std::floor(width) ||
        height != std::floor(height)) {
      parse_error(where, "width and height must be positive integers");
    }
    int channels = 3;
    if (record.contains("channels")) {
      channels = static_cast<int>(number(record["channels"], where));
    }
    sample.size = ImageSize{static_cast<int>(width), static_cast<int>(height), channels};
    if (!image_index.emplace(sample.id, i).second) {
      parse_error(where, "duplicate image id " + sample.id);
    }
    manifest.samples.push_back(std::move(sample));
  }

  std::vector<std::vector<bool>> active(manifest.samples.size(),
                                        std::vector<bool>(manifest.class_names.size(), false));
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const auto& record = annotations[i];
    const std::string image_id = id_string(member(record, "image_id", where), where);
    const std::string category_id = id_string(member(record, "category_id", where), where);
    const auto img = image_index.find(image_id);
    if (img == image_index.end()) parse_error(where, "unknown image_id " + image_id);
    const auto cat = category_index.find(category_id);
    if (cat == category_index.end()) parse_error(where, "unknown category_id " + category_id);

    const auto& bbox = member(record, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4) parse_error(where, "\"bbox\" must hold 4 numbers");
    const double x = number(bbox[0], where);
    const double y = number(bbox[1], where);
    const double w = number(bbox[2], where);
    const double h = number(bbox[3], where);
    if (!std::isfinite(x) || !std::isfinite(y) || !(w > 0) || !(h > 0) ||
        !std::isfinite(w) || !std::isfinite(h)) {
      parse_error(where, "bbox must be finite with positive width and height");
    }
    auto& sample = manifest.samples[img->second];
    const BoundingBox box{x + w / 2.0, y + h / 2.0, w, h};
    if (!covers_any_pixel(box, sample.size)) {
      parse_error(where, "bbox covers no pixel of image " + image_id);
    }
    sample.annotations.push_back(Annotation{box, cat->second});
    active[img->second][cat->second] = true;
  }

  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    auto& sample = manifest.samples[i];
    sample.label = Label::multi(active[i]);
    if (sample.annotations.empty()) manifest.flagged.push_back(sample.id);
  }
  manifest.provenance["tool_version"] = kToolVersion;
  manifest.provenance["source_format"] = "coco";
  return manifest;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view text, const std::string& where, const char* column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    parse_error(where, std::string("column ") + column + ": cannot parse \"" +
                           std::string(text) + "\" as a number");
  }
  return value;
}

int parse_dimension(std::string_view text, const std::string& where, const char* column) {
  const double v = parse_double(text, where, column);
  if (!(v >= 1) || v != std::floor(v) || v > 1e9) {
    parse_error(where, std::string("column ") + column + " must be a positive integer");
  }
  return static_cast<int>(v);
}

}  // namespace

DatasetManifest parse_csv(std::string_view text, Split split) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto nl = text.find('\n', start);
      auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
    }
  }
  if (lines.empty() || lines.front().empty()) parse_error("row 0", "missing header");

  static const std::vector<std::string_view> kRequired = {"path", "label", "cx", "cy", "w", "h"};
  const auto header = split_fields(lines.front());
  if (header.size() < kRequired.size() ||
      !std::equal(kRequired.begin(), kRequired.end(), header.begin())) {
    parse_error("row 0", "header must start with path,label,cx,cy,w,h");
  }
  const bool has_size = header.size() >= 8;
  const bool has_channels = header.size() == 9;
  if ((header.size() == 8 && (header[6] != "width" || header[7] != "height")) ||
      (header.size() == 9 &&
       (header[6] != "width" || header[7] != "height" || header[8] != "channels")) ||
      header.size() == 7 || header.size() > 9) {
    parse_error("row 0", "optional trailing columns must be width,height[,channels]");
  }

  struct Row {
    std::string path;
    std::string label;
    BoundingBox box;
    ImageSize size;
  };
  std::vector<Row> rows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].empty()) continue;
    const std::string where = "row " + std::to_string(r);
    const auto fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      parse_error(where, "expected " + std::to_string(header.size()) + " columns, found " +
                             std::to_string(fields.size()));
    }
    if (fields[0].empty()) parse_error(where, "empty path");
    if (fields[1].empty()) parse_error(where, "empty label");
    Row row;
    row.path = std::string(fields[0]);
    row.label = std::string(fields[1]);
    row.box.cx = parse_double(fields[2], where, "cx");
    row.box.cy = parse_double(fields[3], where, "cy");
    row.box.w = parse_double(fields[4], where, "w");
    row.box.h = parse_double(fields[5], where, "h");
    if (!std::isfinite(row.box.cx) || !std::isfinite(row.box.cy)) {
      parse_error(where, "non-finite box center");
    }
    if (!(row.box.w > 0) || !(row.box.h > 0) || !std::isfinite(row.box.w) ||
        !std::isfinite(row.box.h)) {
      parse_error(where, "box width and height must be > 0");
    }
    if (has_size) {
      row.size.width = parse_dimension(fields[6], where, "width");
      row.size.height = parse_dimension(fields[7], where, "height");
      row.size.channels = has_channels ? parse_dimension(fields[8], where, "channels") : 1;
      if (!covers_any_pixel(row.box, row.size)) parse_error(where, "box covers no pixel");
    }
    rows.push_back(std::move(row));
  }

  DatasetManifest manifest;
  manifest.split = split;
  std::unordered_map<std::string, std::size_t> class_index;
  for (const auto& row : rows) {
    if (class_index.emplace(row.label, manifest.class_names.size()).second) {
      manifest.class_names.push_back(row.label);
    }
  }

  std::unordered_map<std::string, std::size_t> sample_index;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "row " + std::to_string(r + 1);
    const std::size_t k = class_index.at(row.label);
    const auto [it, inserted] = sample_index.emplace(row.path, manifest.samples.size());
    if (inserted) {
      AnnotatedSample sample;
      sample.id = row.path;
      sample.path = row.path;
      sample.size = row.size;
      sample.label = Label::single(k, manifest.class_names.size());
      manifest.samples.push_back(std::move(sample));
    }
    auto& sample = manifest.samples[it->second];
    if (sample.label.class_index() != k) {
      parse_error(where, "path " + row.path + " already has label " +
                             manifest.class_names[sample.label.class_index()]);
    }
    if (!(sample.size == row.size)) parse_error(where, "image size differs from earlier rows");
    sample.annotations.push_back(Annotation{row.box, k});
  }
  manifest.provenance["tool_version"] = kToolVersion;
  manifest.provenance["source_format"] = "csv";
  return manifest;
}

namespace {

ojson label_to_json(const Label& label) {
  ojson out = ojson::object();
  out["kind"] = to_string(label.kind());
  switch (label.kind()) {
    case Label::Kind::kSingleClass:
      out["index"] = label.class_index();
      break;
    case Label::Kind::kMultiLabel:
      out["active"] = label.active_classes();
      break;
    case Label::Kind::kSoft:
      out["values"] = label.values();
      break;
  }
  return out;
}

Label label_from_json(const ojson& value, std::size_t num_classes, const std::string& where) {
  const auto kind = member(value, "kind", where).get<std::string>();
  if (kind == "single") {
    return Label::single(member(value, "index", where).get<std::size_t>(), num_classes);
  }
  if (kind == "multi") {
    std::vector<bool> active(num_classes, false);
    for (const auto& k : member(value, "active", where)) {
      const auto index = k.get<std::size_t>();
      if (index >= num_classes) parse_error(where, "active class out of range");
      active[index] = true;
    }
    return Label::multi(active);
  }
  if (kind == "soft") {
    auto values = member(value, "values", where).get<std::vector<double>>();
    if (values.size() != num_classes) parse_error(where, "soft label width mismatch");
    return Label::soft(std::move(values));
  }
  parse_error(where, "unknown label kind \"" + kind + "\"");
}

}  // namespace

std::string manifest_to_json(const DatasetManifest& manifest) {
  ojson doc = ojson::object();
  doc["format"] = "cutremain-manifest";
  doc["version"] = 1;
  doc["provenance"] = manifest.provenance;
  doc["split"] = to_string(manifest.split);
  doc["classes"] = manifest.class_names;
  doc["flagged"] = manifest.flagged;
  ojson samples = ojson::array();
  for (const auto& s : manifest.samples) {
    ojson item = ojson::object();
    item["id"] = s.id;
    item["path"] = s.path;
    item["size"] = {s.size.width, s.size.height, s.size.channels};
    item["label"] = label_to_json(s.label);
    ojson annotations = ojson::array();
    for (const auto& a : s.annotations) {
      ojson entry = ojson::object();
      entry["box"] = {a.box.cx, a.box.cy, a.box.w, a.box.h};
      if (a.category) entry["category"] = *a.category;
      annotations.push_back(std::move(entry));
    }
    item["annotations"] = std::move(annotations);
    if (s.crop) item["crop"] = {{"x0", s.crop->x0}, {"width", s.crop->width}};
    samples.push_back(std::move(item));
  }
  doc["samples"] = std::move(samples);
  return doc.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    fail(ErrorCode::kParse, "malformed manifest JSON at byte " + std::to_string(e.byte));
  }
  try {
    if (member(doc, "format", "manifest") != "cutremain-manifest") {
      parse_error("manifest", "not a cutremain manifest");
    }
    DatasetManifest manifest;
    manifest.provenance = member(doc, "provenance", "manifest");
    manifest.split = parse_split(member(doc, "split", "manifest").get<std::string>());
    manifest.class_names = member(doc, "classes", "manifest").get<std::vector<std::string>>();
    manifest.flagged = member(doc, "flagged", "manifest").get<std::vector<std::string>>();
    const auto& samples = member(doc, "samples", "manifest");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::string where = "samples[" + std::to_string(i) + "]";
      const auto& item = samples[i];
      AnnotatedSample s;
      s.id = member(item, "id", where).get<std::string>();
      s.path = member(item, "path", where).get<std::string>();
      const auto size = member(item, "size", where).get<std::vector<int>>();
      if (size.size() != 3) parse_error(where, "\"size\" must hold 3 integers");
      s.size = ImageSize{size[0], size[1], size[2]};
      s.label = label_from_json(member(item, "label", where), manifest.class_names.size(), where);
      for (const auto& entry : member(item, "annotations", where)) {
        const auto box = member(entry, "box", where).get<std::vector<double>>();
        if (box.size() != 4) parse_error(where, "\"box\" must hold 4 numbers");
        Annotation a{BoundingBox{box[0], box[1], box[2], box[3]}, std::nullopt};
        if (entry.contains("category")) a.category = entry["category"].get<std::size_t>();
        s.annotations.push_back(a);
      }
      if (item.contains("crop")) {
        s.crop = ColumnCrop{item["crop"]["x0"].get<int>(), item["crop"]["width"].get<int>()};
      }
      manifest.samples.push_back(std::move(s));
    }
    validate(manifest);
    return manifest;
  } catch (const ojson::exception& e) {
    fail(ErrorCode::kParse, std::string("manifest: ") + e.what());
  }
}

ImageTensor load_sample_image(const AnnotatedSample& sample,
                              const std::filesystem::path& image_root) {
  ImageTensor image = read_png(image_root / sample.path);
  if (sample.crop) image = image.crop_columns(sample.crop->x0, sample.crop->width);
  if (sample.size.known() &&
      (image.width() != sample.size.width || image.height() != sample.size.height)) {
    fail(ErrorCode::kShape, "image " + sample.path + " is " + std::to_string(image.width()) +
                                "x" + std::to_string(image.height()) + ", manifest records " +
                                std::to_string(sample.size.width) + "x" +
                                std::to_string(sample.size.height));
  }
  return image;
}

namespace {

// The box's horizontal extent clipped to [lo, hi) and re-expressed relative
// to lo, or nullopt when it covers no pixel center of that column range.
std::optional<BoundingBox> reframe(const BoundingBox& box, int lo, int hi, int height) {
  const double l = std::max(box.left(), static_cast<double>(lo)) - lo;
  const double r = std::min(box.right(), static_cast<double>(hi)) - lo;
  if (!(r > l)) return std::nullopt;
  const BoundingBox out{(l + r) / 2.0, box.cy, r - l, box.h};
  if (!covers_any_pixel(out, ImageSize{hi - lo, height, 1})) return std::nullopt;
  return out;
}

}  // namespace

std::pair<AnnotatedSample, AnnotatedSample> split_vertical(
    const AnnotatedSample& sample, const std::optional<Label>& background_label) {
  if (!sample.size.known() || sample.size.width < 2) {
    fail(ErrorCode::kInvalidParameter,
         "split_vertical: sample " + sample.id + " needs a known width >= 2");
  }
  const int width = sample.size.width;
  const int mid = width / 2;
  const int base = sample.crop ? sample.crop->x0 : 0;

  AnnotatedSample halves[2];
  const int lo[2] = {0, mid};
  const int hi[2] = {mid, width};
  const char* suffix[2] = {"/left", "/right"};
  for (int side = 0; side < 2; ++side) {
    auto& half = halves[side];
    half.id = sample.id + suffix[side];
    half.path = sample.path;
    half.size = ImageSize{hi[side] - lo[side], sample.size.height, sample.size.channels};
    half.label = sample.label;
    half.crop = ColumnCrop{base + lo[side], hi[side] - lo[side]};
  }

  for (const auto& a : sample.annotations) {
    int side = a.box.cx < mid ? 0 : 1;
    auto moved = reframe(a.box, lo[side], hi[side], sample.size.height);
    if (!moved) {
      // A box centred on the seam can cover pixels on one side only, e.g.
      // [mid - 0.5, mid + 0.5) covers only column mid - 1.
      side = 1 - side;
      moved = reframe(a.box, lo[side], hi[side], sample.size.height);
    }
    if (!moved) {
      fail(ErrorCode::kEmptyRegion,
           "split_vertical: annotation of " + sample.id + " covers no pixel in either half");
    }
    halves[side].annotations.push_back(Annotation{*moved, a.category});
  }

  if (background_label) {
    for (auto& half : halves) {
      if (half.annotations.empty()) half.label = *background_label;
    }
  }
  return {std::move(halves[0]), std::move(halves[1])};
}

DatasetManifest split_manifest_vertical(const DatasetManifest& manifest,
                                        const std::optional<Label>& background_label) {
  DatasetManifest out;
  out.class_names = manifest.class_names;
  out.split = manifest.split;
  out.provenance = manifest.provenance;
  out.provenance["vertical_split"] = true;
  for (const auto& sample : manifest.samples) {
    auto [left, right] = split_vertical(sample, background_label);
    for (auto* half : {&left, &right}) {
      if (half->annotations.empty()) out.flagged.push_back(half->id);
      out.samples.push_back(std::move(*half));
    }
  }
  return out;
}

double mean_relative_area(const AnnotatedSample& sample) {
  if (!sample.size.known()) {
    fail(ErrorCode::kInvalidParameter, "sample " + sample.id + " has no recorded size");
  }
  if (sample.annotations.empty()) {
    fail(ErrorCode::kInvalidParameter, "sample " + sample.id + " has no annotations");
  }
  const double image_area =
      static_cast<double>(sample.size.width) * static_cast<double>(sample.size.height);
  double total = 0.0;
  for (const auto& a : sample.annotations) total += a.box.area() / image_area;
  return total / static_cast<double>(sample.annotations.size());
}

SubsetResult build_small_subset(const DatasetManifest& manifest, double threshold,
                                const std::optional<std::vector<std::string>>& categories) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    fail(ErrorCode::kInvalidParameter,
         "subset threshold must lie in (0, 1], got " + std::to_string(threshold));
  }
  const std::size_t num_classes = manifest.class_names.size();
  std::vector<bool> allowed(num_classes, !categories.has_value());
  if (categories) {
    for (const auto& name : *categories) {
      const auto it = std::find(manifest.class_names.begin(), manifest.class_names.end(), name);
      if (it == manifest.class_names.end()) {
        fail(ErrorCode::kInvalidParameter, "unknown category \"" + name + "\"");
      }
      allowed[static_cast<std::size_t>(it - manifest.class_names.begin())] = true;
    }
  }

  SubsetResult result;
  std::vector<AnnotatedSample> kept;
  for (const auto& sample : manifest.samples) {
    AnnotatedSample candidate = sample;
    candidate.annotations.clear();
    for (const auto& a : sample.annotations) {
      if (!a.category || allowed[*a.category]) candidate.annotations.push_back(a);
    }
    if (sample.label.kind() == Label::Kind::kSingleClass &&
        !allowed[sample.label.class_index()]) {
      candidate.annotations.clear();
    }
    if (candidate.annotations.empty()) {
      result.report.excluded.push_back(sample.id);
      continue;
    }
    if (mean_relative_area(candidate) < threshold) {
      result.report.kept.push_back(sample.id);
      kept.push_back(std::move(candidate));
    } else {
      result.report.dropped.push_back(sample.id);
    }
  }

  // Retained classes: allowed and carried by at least one kept label.
  std::vector<std::size_t> remap(num_classes, num_classes);
  auto& out = result.manifest;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (!allowed[k]) continue;
    const bool supported = std::any_of(kept.begin(), kept.end(), [k](const auto& s) {
      return s.label.values()[k] != 0.0;
    });
    if (supported) {
      remap[k] = out.class_names.size();
      out.class_names.push_back(manifest.class_names[k]);
    }
  }

  const std::size_t new_count = out.class_names.size();
  for (auto& sample : kept) {
    const auto& values = sample.label.values();
    switch (sample.label.kind()) {
      case Label::Kind::kSingleClass:
        sample.label = Label::single(remap[sample.label.class_index()], new_count);
        break;
      case Label::Kind::kMultiLabel: {
        std::vector<bool> active(new_count, false);
        for (std::size_t k = 0; k < num_classes; ++k) {
          if (remap[k] < new_count && values[k] != 0.0) active[remap[k]] = true;
        }
        sample.label = Label::multi(active);
        break;
      }
      case Label::Kind::kSoft: {
        std::vector<double> soft(new_count, 0.0);
        for (std::size_t k = 0; k < num_classes; ++k) {
          if (remap[k] < new_count) soft[remap[k]] = values[k];
        }
        sample.label = Label::soft(std::move(soft));
        break;
      }
    }
    for (auto& a : sample.annotations) {
      if (a.category) {
        a.category = remap[*a.category] < new_count
                         ? std::optional<std::size_t>(remap[*a.category])
                         : std::nullopt;
      }
    }
    out.samples.push_back(std::move(sample));
  }

  out.split = manifest.split;
  out.provenance = manifest.provenance;
  ojson filter = ojson::object();
  filter["threshold"] = threshold;
  if (categories) filter["categories"] = *categories;
  filter["kept"] = result.report.kept.size();
  filter["dropped"] = result.report.dropped.size();
  filter["excluded_without_annotations"] = result.report.excluded.size();
  out.provenance["tool_version"] = kToolVersion;
  out.provenance["subset"] = std::move(filter);
  return result;
}

}  // namespace cutremain
