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

#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "cutremain/dataset.hpp"
#include "cutremain/error.hpp"

using namespace cutremain;

namespace {

const char* kCoco = R"({
  "images": [
    {"id": 1, "file_name": "a.png", "width": 100, "height": 80},
    {"id": 2, "file_name": "b.png", "width": 64, "height": 64, "channels": 1},
    {"id": 3, "file_name": "c.png", "width": 50, "height": 50}
  ],
  "categories": [
    {"id": 3, "name": "car"},
    {"id": 5, "name": "kite"},
    {"id": 7, "name": "cup"}
  ],
  "annotations": [
    {"id": 10, "image_id": 1, "category_id": 3, "bbox": [10, 20, 4, 6]},
    {"id": 11, "image_id": 1, "category_id": 7, "bbox": [50, 40, 10, 10]},
    {"id": 12, "image_id": 1, "category_id": 3, "bbox": [70, 10, 2, 2]},
    {"id": 13, "image_id": 2, "category_id": 5, "bbox": [0, 0, 8, 8]}
  ]
})";

ErrorCode parse_code(const std::string& text, std::string* message = nullptr) {
  try {
    parse_coco(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  return ErrorCode::kIo;
}

AnnotatedSample sample_with(int w, int h, std::vector<BoundingBox> boxes) {
  AnnotatedSample s;
  s.id = "s";
  s.path = "s.png";
  s.size = ImageSize{w, h, 1};
  s.label = Label::single(0, 2);
  for (const auto& b : boxes) s.annotations.push_back(Annotation{b, std::nullopt});
  return s;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("coco corner boxes become center boxes") {
    const auto m = parse_coco(kCoco);
    REQUIRE(m.samples.size() == 3);
    CHECK(m.samples[0].annotations[0].box == BoundingBox{12, 23, 4, 6});
    CHECK(m.class_names == std::vector<std::string>{"car", "kite", "cup"});
    CHECK(m.samples[0].size == ImageSize{100, 80, 3});
    CHECK(m.samples[1].size.channels == 1);
  }

  TEST_CASE("coco multi-label is the set of categories") {
    const auto m = parse_coco(kCoco);
    const auto& label = m.samples[0].label;
    CHECK(label.kind() == Label::Kind::kMultiLabel);
    CHECK(label.active_classes() == std::vector<std::size_t>{0, 2});
    CHECK(m.samples[0].annotations.size() == 3);
  }

  TEST_CASE("coco image without annotations is kept and flagged") {
    const auto m = parse_coco(kCoco);
    CHECK(m.samples[2].annotations.empty());
    CHECK(m.flagged == std::vector<std::string>{"3"});
    CHECK(m.box_count() == 4);
  }

  TEST_CASE("coco errors carry positions") {
    std::string msg;
    CHECK(parse_code("{\"images\": [", &msg) == ErrorCode::kParse);
    CHECK(msg.find("byte") != std::string::npos);

    std::string bad = kCoco;
    bad.replace(bad.find("\"image_id\": 2"), 13, "\"image_id\": 9");
    CHECK(parse_code(bad, &msg) == ErrorCode::kParse);
    CHECK(msg.find("annotations[3]") != std::string::npos);

    bad = kCoco;
    bad.replace(bad.find("\"category_id\": 7"), 16, "\"category_id\": 8");
    CHECK(parse_code(bad, &msg) == ErrorCode::kParse);
    CHECK(msg.find("annotations[1]") != std::string::npos);

    bad = kCoco;
    bad.replace(bad.find("[70, 10, 2, 2]"), 14, "[70, 10, 0, 2]");
    CHECK(parse_code(bad, &msg) == ErrorCode::kParse);
    CHECK(msg.find("annotations[2]") != std::string::npos);
  }

  TEST_CASE("csv: one row, merged rows, bad rows") {
    const auto one = parse_csv("path,label,cx,cy,w,h\nimg1.png,fracture,10,10,4,4\n");
    REQUIRE(one.samples.size() == 1);
    CHECK(one.box_count() == 1);

    const auto merged = parse_csv(
        "path,label,cx,cy,w,h\nimg1.png,fracture,10,10,4,4\nimg1.png,fracture,20,20,2,2\n"
        "img2.png,normal,5,5,3,3\n");
    REQUIRE(merged.samples.size() == 2);
    CHECK(merged.samples[0].annotations.size() == 2);
    CHECK(merged.class_names == std::vector<std::string>{"fracture", "normal"});
    CHECK(merged.samples[1].label.class_index() == 1);

    try {
      parse_csv("path,label,cx,cy,w,h\na.png,x,1,1,1,1\nb.png,x,10,10,0,4\n");
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv("path,label,cx,cy\na.png,x,1,1\n"), Error);
    CHECK_THROWS_AS(parse_csv("path,label,cx,cy,w,h\na.png,x,1,abc,1,1\n"), Error);
    CHECK_THROWS_AS(parse_csv("path,label,cx,cy,w,h\na.png,x,1,1,1,1\na.png,y,1,1,1,1\n"), Error);
  }

  TEST_CASE("csv with image size columns") {
    const auto m = parse_csv("path,label,cx,cy,w,h,width,height\na.png,x,4,4,2,2,8,8\n");
    CHECK(m.samples[0].size == ImageSize{8, 8, 1});
    CHECK_THROWS_AS(parse_csv("path,label,cx,cy,w,h,width,height\na.png,x,40,40,2,2,8,8\n"),
                    Error);
  }

  TEST_CASE("manifest json round trip") {
    auto m = parse_coco(kCoco, Split::kVal);
    m.samples[1].crop = ColumnCrop{32, 32};
    const auto text = manifest_to_json(m);
    const auto back = manifest_from_json(text);
    CHECK(back == m);
    CHECK(manifest_to_json(back) == text);

    const auto csv = parse_csv("path,label,cx,cy,w,h\na.png,x,1.25,1,1,1\n");
    CHECK(manifest_from_json(manifest_to_json(csv)) == csv);
    CHECK_THROWS_AS(manifest_from_json("{\"format\": \"other\"}"), Error);
  }

  TEST_CASE("validate catches duplicate ids") {
    auto m = parse_coco(kCoco);
    m.samples[1].id = m.samples[0].id;
    CHECK_THROWS_AS(validate(m), Error);
  }

  TEST_CASE("split: box at cx=30 stays left") {
    const auto s = sample_with(100, 40, {BoundingBox{30, 20, 10, 10}});
    const auto [left, right] = split_vertical(s);
    REQUIRE(left.annotations.size() == 1);
    CHECK(left.annotations[0].box == BoundingBox{30, 20, 10, 10});
    CHECK(right.annotations.empty());
    CHECK(left.crop == ColumnCrop{0, 50});
    CHECK(right.crop == ColumnCrop{50, 50});
    CHECK(left.id == "s/left");
  }

  TEST_CASE("split: box at cx=70 moves to the right frame") {
    const auto s = sample_with(100, 40, {BoundingBox{70, 20, 10, 10}});
    const auto [left, right] = split_vertical(s);
    REQUIRE(right.annotations.size() == 1);
    CHECK(right.annotations[0].box.cx == 20.0);
    CHECK(right.annotations[0].box.w == 10.0);
  }

  TEST_CASE("split: straddling box goes right and is clipped") {
    const auto s = sample_with(100, 40, {BoundingBox{50, 20, 10, 10}});
    const auto [left, right] = split_vertical(s);
    CHECK(left.annotations.empty());
    REQUIRE(right.annotations.size() == 1);
    CHECK(right.annotations[0].box == BoundingBox{2.5, 20, 5, 10});
  }

  TEST_CASE("split: background label for empty halves") {
    const auto s = sample_with(100, 40, {BoundingBox{30, 20, 10, 10}});
    const auto [left, right] = split_vertical(s, Label::single(1, 2));
    CHECK(left.label.class_index() == 0);
    CHECK(right.label.class_index() == 1);
    CHECK_THROWS_AS(split_vertical(sample_with(1, 4, {BoundingBox{0.5, 2, 1, 1}})), Error);
  }

  TEST_CASE("split conserves boxes and their pixels") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<int> dim(2, 40);
    for (int trial = 0; trial < 600; ++trial) {
      const int w = dim(gen), h = dim(gen);
      const auto box = oracle::random_covering_boxes(gen, w, h, 1).front();
      const auto [left, right] = split_vertical(sample_with(w, h, {box}));
      REQUIRE(left.annotations.size() + right.annotations.size() == 1);
      const bool to_left = !left.annotations.empty();
      const auto& half = to_left ? left : right;
      const int lo = to_left ? 0 : w / 2;
      // The re-framed box covers exactly the pixels the original covered in
      // its half.
      const auto original = oracle::enumerate_mask({box}, w, h);
      const auto moved = oracle::enumerate_mask({half.annotations[0].box}, half.size.width, h);
      bool same = true;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < half.size.width; ++x) {
          same = same && moved[static_cast<std::size_t>(y) * half.size.width + x] ==
                             original[static_cast<std::size_t>(y) * w + x + lo];
        }
      }
      CHECK(same);
    }
  }

  TEST_CASE("subset: worked areas") {
    DatasetManifest m;
    m.class_names = {"a"};
    auto kept = sample_with(100, 100, {BoundingBox{10, 10, 10, 10}, BoundingBox{50, 50, 10, 20}});
    kept.id = "kept";
    kept.label = Label::single(0, 1);
    auto dropped = sample_with(100, 100, {BoundingBox{50, 50, 20, 25}});
    dropped.id = "dropped";
    dropped.label = Label::single(0, 1);
    auto empty = sample_with(100, 100, {});
    empty.id = "empty";
    empty.label = Label::single(0, 1);
    m.samples = {kept, dropped, empty};
    CHECK(mean_relative_area(kept) == doctest::Approx(0.015));
    const auto r = build_small_subset(m, 0.02);
    CHECK(r.report.kept == std::vector<std::string>{"kept"});
    CHECK(r.report.dropped == std::vector<std::string>{"dropped"});
    CHECK(r.report.excluded == std::vector<std::string>{"empty"});
    CHECK(r.manifest.samples.size() == 1);
    CHECK_THROWS_AS(build_small_subset(m, 0.0), Error);
    CHECK_THROWS_AS(build_small_subset(m, 1.5), Error);
  }

  TEST_CASE("subset: categories restrict and re-index") {
    auto m = parse_coco(kCoco);
    const auto r = build_small_subset(m, 1.0, std::vector<std::string>{"cup"});
    REQUIRE(r.manifest.samples.size() == 1);
    CHECK(r.manifest.class_names == std::vector<std::string>{"cup"});
    CHECK(r.manifest.samples[0].label.active_classes() == std::vector<std::size_t>{0});
    CHECK(r.manifest.samples[0].annotations.size() == 1);
    CHECK(r.manifest.samples[0].annotations[0].category == std::size_t{0});
    CHECK_THROWS_AS(build_small_subset(m, 0.02, std::vector<std::string>{"dog"}), Error);
  }

  TEST_CASE("subset: threshold 1 keeps every annotated image") {
    const auto m = parse_coco(kCoco);
    const auto r = build_small_subset(m, 1.0);
    CHECK(r.report.kept == std::vector<std::string>{"1", "2"});
    CHECK(r.report.excluded == std::vector<std::string>{"3"});
  }

  TEST_CASE("subset: kept sets grow with the threshold") {
    std::mt19937_64 gen(23);
    DatasetManifest m;
    m.class_names = {"a", "b", "c"};
    std::uniform_int_distribution<int> count(1, 4), cls(0, 2);
    std::uniform_real_distribution<double> side(1.0, 30.0);
    for (int i = 0; i < 60; ++i) {
      std::vector<BoundingBox> boxes;
      const int n = count(gen);
      for (int j = 0; j < n; ++j) boxes.push_back(BoundingBox{50, 50, side(gen), side(gen)});
      auto s = sample_with(100, 100, boxes);
      s.id = "img" + std::to_string(i);
      s.label = Label::single(static_cast<std::size_t>(cls(gen)), 3);
      m.samples.push_back(s);
    }
    std::set<std::string> previous;
    for (const double t : {0.005, 0.01, 0.02, 0.04, 0.08}) {
      const auto r = build_small_subset(m, t);
      const std::set<std::string> now(r.report.kept.begin(), r.report.kept.end());
      CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
      for (const auto& s : m.samples) {
        CHECK(now.count(s.id) == (oracle::mean_area_fraction(s) < t ? 1u : 0u));
      }
      for (std::size_t k = 0; k < r.manifest.class_names.size(); ++k) {
        const bool supported = std::any_of(
            r.manifest.samples.begin(), r.manifest.samples.end(),
            [k](const auto& s) { return s.label.class_index() == k; });
        CHECK(supported);
      }
      previous = now;
    }
  }
}
