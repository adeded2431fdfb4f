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

// Acceptance suite: prints one PASS/FAIL line per acceptance criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "json.hpp"
#include "oracles.hpp"

#include "cutremain/augment.hpp"
#include "cutremain/batch.hpp"
#include "cutremain/dataset.hpp"
#include "cutremain/digest.hpp"
#include "cutremain/error.hpp"
#include "cutremain/image_io.hpp"
#include "cutremain/metrics.hpp"
#include "cutremain/probe.hpp"

using namespace cutremain;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Check = std::function<Outcome()>;

int failures = 0;

void report(const std::string& name, const Check& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = Outcome{false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %-34s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a);
  return buf;
}

// Every output pixel of every ratio variant equals mask x input.
Outcome mask_product_exactness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1001);
  std::uniform_int_distribution<int> dim(1, 64), ch(1, 3);
  const auto pairs = oracle::ratio_pairs({1.0, 1.5, 2.0});
  std::size_t mismatched = 0, checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = dim(gen), h = dim(gen);
    const auto image = oracle::random_image(gen, w, h, ch(gen));
    const auto boxes = oracle::random_covering_boxes(gen, w, h, 3);
    const auto label = Label::multi({trial % 2 == 0, true, false});
    const auto out = cut_and_remain(image, label, boxes, AspectRatioSet{});
    if (out.size() != pairs.size()) return {false, "wrong variant count"};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto bits =
          oracle::enumerate_mask(oracle::scaled(boxes, pairs[i].first, pairs[i].second), w, h);
      const auto expected = oracle::masked_values(image, bits);
      const auto got = out[i].image.values();
      ++checked;
      if (!out[i].image.same_shape(image) || !(out[i].label == label) ||
          !std::equal(got.begin(), got.end(), expected.begin(), expected.end())) {
        ++mismatched;
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream os;
  os << checked << " outputs from 1000 fixtures, " << mismatched << " mismatches, "
     << fmt("%.2fs", secs) << " (limit 10s)";
  return {mismatched == 0 && secs < 10.0, os.str()};
}

Outcome nine_variants() {
  std::mt19937_64 gen(1002);
  std::uniform_int_distribution<int> dim(2, 48);
  std::size_t bad_count = 0, bad_identity = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int w = dim(gen), h = dim(gen);
    const auto image = oracle::random_image(gen, w, h, 1);
    const auto boxes = oracle::random_covering_boxes(gen, w, h, 2);
    const auto out = cut_and_remain(image, Label::single(0, 1), boxes, AspectRatioSet{});
    if (out.size() != 9) ++bad_count;
    // Variant (1.0, 1.0) keeps exactly the raw annotation region.
    const auto raw = oracle::enumerate_mask(boxes, w, h);
    const auto expected = oracle::masked_values(image, raw);
    const auto got = out[0].image.values();
    if (out[0].provenance.ratio != std::pair{1.0, 1.0} ||
        !std::equal(got.begin(), got.end(), expected.begin(), expected.end()) ||
        !oracle::mask_equals(rasterize_mask(boxes, w, h), raw)) {
      ++bad_identity;
    }
  }
  // Through compose: each annotated sample contributes exactly nine entries.
  const auto d = generate_task(SyntheticTask{}, 25, 3);
  ComposeOptions o;
  o.gamma = 1.0;
  const auto batch = compose(d.manifest, o);
  std::map<std::string, int> per_source;
  for (const auto& e : batch.entries) {
    if (e.method == Method::kCutAndRemain) per_source[e.source_id]++;
  }
  const bool compose_ok =
      per_source.size() == 25 &&
      std::all_of(per_source.begin(), per_source.end(), [](const auto& kv) { return kv.second == 9; });
  std::ostringstream os;
  os << "500 samples: " << bad_count << " without 9 outputs, " << bad_identity
     << " (1,1) variants differing from the raw region; compose 25x9 "
     << (compose_ok ? "ok" : "wrong");
  return {bad_count == 0 && bad_identity == 0 && compose_ok, os.str()};
}

Outcome kernel_oracles() {
  std::mt19937_64 gen(1003);
  std::uniform_int_distribution<int> dim(2, 32), ch(1, 3);
  std::uniform_real_distribution<double> density(0.05, 0.6);
  std::size_t cutmix_bad = 0, mixup_bad = 0, cutout_bad = 0, cutout_skipped = 0;

  for (int trial = 0; trial < 1000; ++trial) {
    const int w = dim(gen), h = dim(gen), c = ch(gen);
    const auto xa = oracle::random_image(gen, w, h, c);
    const auto xb = oracle::random_image(gen, w, h, c);
    auto bits = oracle::random_bits(gen, static_cast<std::size_t>(w) * h, density(gen));
    bits[0] = 1;
    const auto ma = oracle::to_mask(bits, w, h);
    const auto ya = Label::single(0, 2), yb = Label::single(1, 2);
    const auto out = sup_cutmix({xa, ya, ma}, xb, yb);
    bool ok = out.label == ya && out.image.same_shape(xa);
    for (int y = 0; y < h && ok; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int k = 0; k < c; ++k) {
          ok = ok && out.image.at(x, y, k) == (bits[y * w + x] ? xa.at(x, y, k) : xb.at(x, y, k));
        }
      }
    }
    cutmix_bad += ok ? 0 : 1;
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const int w = dim(gen), h = dim(gen), c = ch(gen);
    const auto xa = oracle::random_image(gen, w, h, c);
    const auto xb = oracle::random_image(gen, w, h, c);
    auto ba = oracle::random_bits(gen, static_cast<std::size_t>(w) * h, density(gen));
    auto bb = oracle::random_bits(gen, static_cast<std::size_t>(w) * h, density(gen));
    ba[0] = 1;
    bb.back() = 1;
    const auto ma = oracle::to_mask(ba, w, h), mb = oracle::to_mask(bb, w, h);
    const auto ya = Label::multi({true, false, true}), yb = Label::multi({false, true, true});
    bool ok = true;
    for (const double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto out = sup_mixup({xa, ya, ma}, {xb, yb, mb}, lambda);
      for (int y = 0; y < h && ok; ++y) {
        for (int x = 0; x < w; ++x) {
          for (int k = 0; k < c; ++k) {
            const double va = ba[y * w + x] ? xa.at(x, y, k) : 0.0;
            const double vb = bb[y * w + x] ? xb.at(x, y, k) : 0.0;
            ok = ok && out.image.at(x, y, k) == static_cast<float>(lambda * va + (1 - lambda) * vb);
          }
        }
      }
      for (std::size_t k = 0; k < 3; ++k) {
        ok = ok && out.label.values()[k] == lambda * ya.values()[k] + (1 - lambda) * yb.values()[k];
      }
      if (lambda == 1.0) ok = ok && out.image == apply_mask(xa, ma) && out.label.values() == ya.values();
      if (lambda == 0.0) ok = ok && out.image == apply_mask(xb, mb) && out.label.values() == yb.values();
    }
    mixup_bad += ok ? 0 : 1;
  }

  std::uniform_int_distribution<int> side_dist(1, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = dim(gen), h = dim(gen), c = ch(gen);
    const auto x = oracle::random_image(gen, w, h, c);
    const auto boxes = oracle::random_covering_boxes(gen, w, h, 2);
    const auto bits = oracle::enumerate_mask(boxes, w, h);
    const auto mask = oracle::to_mask(bits, w, h);
    const int side = std::min({side_dist(gen), w, h});
    if (count_cutout_placements(mask, side) == 0) {
      ++cutout_skipped;
      continue;
    }
    Rng rng(static_cast<std::uint64_t>(trial));
    const auto label = Label::single(0, 1);
    const auto out = sup_cutout(x, label, mask, side, rng);
    bool ok = out.label == label && out.image.same_shape(x);
    const auto r = *out.provenance.erased;
    ok = ok && r.width() == side && r.height() == side;
    for (int y = 0; y < h && ok; ++y) {
      for (int xx = 0; xx < w; ++xx) {
        const bool erased = r.contains(xx, y);
        for (int k = 0; k < c; ++k) {
          const float v = out.image.at(xx, y, k);
          if (bits[y * w + xx]) ok = ok && !erased && v == x.at(xx, y, k);
          else ok = ok && v == (erased ? 0.0f : x.at(xx, y, k));
        }
      }
    }
    cutout_bad += ok ? 0 : 1;
  }
  std::ostringstream os;
  os << "cutmix " << cutmix_bad << "/1000, mixup " << mixup_bad << "/1000, cutout "
     << cutout_bad << "/" << 1000 - cutout_skipped << " mismatches (" << cutout_skipped
     << " fixtures without a feasible square)";
  return {cutmix_bad == 0 && mixup_bad == 0 && cutout_bad == 0 && cutout_skipped < 500, os.str()};
}

Outcome geometry_oracle() {
  std::mt19937_64 gen(1004);
  const std::vector<int> sizes{1, 2, 3, 5, 8, 13, 21, 34, 55, 64};
  std::size_t checked = 0, bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto box = oracle::random_box(gen, 64, 64);
    const auto full = oracle::enumerate_mask({box}, 64, 64);
    for (const int w : sizes) {
      for (const int h : sizes) {
        ++checked;
        // Membership is a per-pixel predicate, so the WxH answer is the
        // top-left crop of the 64x64 enumeration.
        std::vector<std::uint8_t> expected;
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) expected.push_back(full[y * 64 + x]);
        }
        const bool any = std::find(expected.begin(), expected.end(), 1) != expected.end();
        try {
          const auto mask = rasterize_mask(std::vector{box}, w, h);
          if (!any || !oracle::mask_equals(mask, expected)) ++bad;
        } catch (const Error& e) {
          if (any || e.code() != ErrorCode::kEmptyMask) ++bad;
        }
      }
    }
  }
  std::ostringstream os;
  os << "1000 boxes x 100 image sizes up to 64x64, " << checked << " masks, " << bad
     << " mismatches";
  return {bad == 0, os.str()};
}

Outcome metrics_oracles() {
  // Worked values first confirmed by the oracles.
  const bool auc_fixture = oracle::auc_pairs({0.9, 0.6, 0.4, 0.2}, {1, 0, 1, 0}) == 0.75 &&
                           auc_roc(std::vector{0.9, 0.6, 0.4, 0.2}, std::vector{1, 0, 1, 0}) == 0.75;
  const bool ap_fixture =
      std::abs(oracle::ap_rank_walk({0.9, 0.8, 0.7}, {1, 0, 1}) - 5.0 / 6.0) < 1e-15 &&
      std::abs(average_precision(std::vector{0.9, 0.8, 0.7}, std::vector{1, 0, 1}) - 5.0 / 6.0) <
          1e-15;

  std::mt19937_64 gen(1005);
  std::uniform_int_distribution<std::size_t> rows(2, 200), classes(2, 10);
  std::uniform_real_distribution<double> u;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    PredictionSet p;
    p.rows = rows(gen);
    p.classes = classes(gen);
    const bool ties = trial % 2 == 0;
    const double rate = 0.05 + 0.5 * u(gen);
    for (std::size_t i = 0; i < p.rows * p.classes; ++i) {
      p.scores.push_back(ties ? std::round(u(gen) * 10) / 10 : u(gen));
      p.labels.push_back(u(gen) < rate ? 1 : 0);
    }
    const auto r = multilabel_suite(p);
    for (std::size_t k = 0; k < p.classes; ++k) {
      const auto s = p.score_column(k);
      const auto y = p.label_column(k);
      const auto pos = std::count(y.begin(), y.end(), 1);
      if (pos > 0) {
        worst = std::max(worst, std::abs(average_precision(s, y) - oracle::ap_rank_walk(s, y)));
        worst = std::max(worst, std::abs(r.per_class_ap[k] - oracle::ap_rank_walk(s, y)));
      }
      if (pos > 0 && pos < static_cast<long>(y.size())) {
        worst = std::max(worst, std::abs(auc_roc(s, y) - oracle::auc_pairs(s, y)));
      }
    }
    worst = std::max(worst, std::abs(r.of1 - oracle::of1_pooled(p.scores, p.labels, 0.5)));
  }
  std::ostringstream os;
  os << "AUC fixture 0.75 " << (auc_fixture ? "confirmed" : "WRONG") << ", AP fixture 5/6 "
     << (ap_fixture ? "confirmed" : "WRONG") << ", 500 instances max |diff| "
     << fmt("%.3g", worst) << " (limit 1e-9)";
  return {auc_fixture && ap_fixture && worst <= 1e-9, os.str()};
}

Outcome batch_counting() {
  const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t bad_counts = 0, bad_nesting = 0, manifests = 0;
  for (const std::size_t n : {1u, 2u, 5u, 7u, 10u, 13u, 50u}) {
    const auto d = generate_task(SyntheticTask{}, n, 40 + n);
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
      std::set<std::string> previous;
      for (const double g : grid) {
        ComposeOptions o;
        o.gamma = g;
        o.seed = seed;
        const auto b = compose(d.manifest, o);
        ++manifests;
        const auto selected = static_cast<std::size_t>(std::floor(g * static_cast<double>(n) + 1e-9));
        if (b.entries.size() != n + selected * 9 || b.original_count() != n) ++bad_counts;
        const auto src = b.augmented_sources();
        const std::set<std::string> now(src.begin(), src.end());
        if (now.size() != selected ||
            !std::includes(now.begin(), now.end(), previous.begin(), previous.end())) {
          ++bad_nesting;
        }
        previous = now;
      }
      if (previous.size() != n) ++bad_nesting;
    }
  }
  std::ostringstream os;
  os << manifests << " manifests over the gamma grid: " << bad_counts << " count errors, "
     << bad_nesting << " nesting violations";
  return {bad_counts == 0 && bad_nesting == 0, os.str()};
}

int run_cli(std::vector<std::string> args, std::string& out) {
  args.insert(args.begin(), "cutremain");
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  out = code == 0 ? o.str() : e.str();
  return code;
}

Outcome determinism() {
  oracle::TempDir dir("accept-det");
  const auto d = generate_task(SyntheticTask{}, 12, 5);
  for (std::size_t i = 0; i < d.images.size(); ++i) {
    write_png(dir / d.manifest.samples[i].path, d.images[i]);
  }
  const auto manifest = dir / "manifest.json";
  write_text_file(manifest, manifest_to_json(d.manifest));

  std::ostringstream os;
  bool ok = true;
  for (const char* method : {"cut-and-remain", "sup-mixup", "sup-cutout", "sup-cutmix"}) {
    std::vector<std::string> digests;
    for (int rep = 0; rep < 2; ++rep) {
      std::string out;
      const auto target = dir / (std::string("aug-") + method + std::to_string(rep));
      if (run_cli({"augment", "--manifest", manifest.string(), "--images", dir.path().string(),
                   "--method", method, "--seed", "7", "--jobs", rep == 0 ? "1" : "4", "--out",
                   target.string()},
                  out) != 0) {
        return {false, std::string("augment failed: ") + out};
      }
      digests.push_back(json::parse(out)["digest"].get<std::string>());
    }
    ok = ok && digests[0] == digests[1];
  }
  os << "augment x4 methods " << (ok ? "identical" : "DIFFER");
  bool compose_ok = true;
  for (const char* method : {"cut-and-remain", "sup-mixup", "sup-cutout", "sup-cutmix"}) {
    std::vector<std::string> digests;
    for (int rep = 0; rep < 2; ++rep) {
      std::string out;
      const auto target = dir / (std::string("batch-") + method + std::to_string(rep) + ".jsonl");
      if (run_cli({"compose", "--manifest", manifest.string(), "--method", method, "--gamma",
                   "0.5", "--seed", "7", "--out", target.string()},
                  out) != 0) {
        return {false, std::string("compose failed: ") + out};
      }
      digests.push_back(json::parse(out)["digest"].get<std::string>());
      compose_ok = compose_ok && digests.back() == sha256_file(target);
    }
    compose_ok = compose_ok && digests[0] == digests[1];
  }
  os << ", compose x4 methods " << (compose_ok ? "identical" : "DIFFER");
  return {ok && compose_ok, os.str()};
}

Outcome directional_probe() {
  ProbeExperimentConfig config;
  config.gammas = {0.2, 0.4, 0.6, 0.8};
  const auto r = run_probe_experiment(config);
  const auto means = r.mean_by_gamma();
  const double diff = r.mean_paired_difference();
  bool monotone = true;
  for (std::size_t g = 1; g < means.size(); ++g) monotone = monotone && means[g] >= means[g - 1] - 0.01;

  ProbeExperimentConfig null_config;
  null_config.task.target_delta = 0.0f;
  const auto null_report = run_probe_experiment(null_config);
  const auto null_means = null_report.mean_by_gamma();
  const bool null_ok = null_means.front() >= 0.4 && null_means.front() <= 0.6 &&
                       null_means.back() >= 0.4 && null_means.back() <= 0.6;

  std::ostringstream os;
  os << "diff " << fmt("%+.4f", diff) << " (need > 0.02); gamma means";
  for (const double m : means) os << " " << fmt("%.4f", m);
  os << (monotone ? " non-decreasing" : " NOT monotone") << " within 0.01; null delta=0: baseline "
     << fmt("%.4f", null_means.front()) << ", cut&remain " << fmt("%.4f", null_means.back())
     << ", gap " << fmt("%+.4f", null_report.mean_paired_difference());
  return {diff > 0.02 && monotone && null_ok, os.str()};
}

Outcome subset_filter() {
  std::mt19937_64 gen(1006);
  std::uniform_int_distribution<int> dim(40, 640), count(0, 5), cat(1, 6);
  std::uniform_real_distribution<double> frac(0.01, 0.3);
  json coco;
  coco["categories"] = json::array();
  for (int c = 1; c <= 6; ++c) coco["categories"].push_back({{"id", c}, {"name", "c" + std::to_string(c)}});
  coco["images"] = json::array();
  coco["annotations"] = json::array();
  int ann = 0;
  for (int i = 0; i < 400; ++i) {
    const int w = dim(gen), h = dim(gen);
    coco["images"].push_back({{"id", i}, {"file_name", "i.png"}, {"width", w}, {"height", h}});
    const int n = count(gen);
    for (int j = 0; j < n; ++j) {
      const double bw = std::max(1.0, std::floor(frac(gen) * w));
      const double bh = std::max(1.0, std::floor(frac(gen) * h));
      coco["annotations"].push_back({{"id", ann++},
                                     {"image_id", i},
                                     {"category_id", cat(gen)},
                                     {"bbox", {std::floor((w - bw) / 2), std::floor((h - bh) / 2), bw, bh}}});
    }
  }
  // Brute force straight from the JSON records.
  std::set<std::string> expected_kept, expected_excluded;
  for (const auto& img : coco["images"]) {
    double sum = 0.0;
    int n = 0;
    for (const auto& a : coco["annotations"]) {
      if (a["image_id"] != img["id"]) continue;
      sum += a["bbox"][2].get<double>() * a["bbox"][3].get<double>() /
             (img["width"].get<double>() * img["height"].get<double>());
      ++n;
    }
    const std::string id = std::to_string(img["id"].get<int>());
    if (n == 0) expected_excluded.insert(id);
    else if (sum / n < 0.02) expected_kept.insert(id);
  }
  const auto result = build_small_subset(parse_coco(coco.dump()), 0.02);
  const std::set<std::string> kept(result.report.kept.begin(), result.report.kept.end());
  const std::set<std::string> excluded(result.report.excluded.begin(), result.report.excluded.end());
  std::set<std::string> in_manifest;
  for (const auto& s : result.manifest.samples) in_manifest.insert(s.id);
  const bool ok = kept == expected_kept && excluded == expected_excluded && in_manifest == kept &&
                  !expected_kept.empty() && !result.report.dropped.empty();
  std::ostringstream os;
  os << "400 images: kept " << kept.size() << " (brute force " << expected_kept.size()
     << "), dropped " << result.report.dropped.size() << ", excluded " << excluded.size();
  return {ok, os.str()};
}

Outcome gradient_check() {
  const auto d = generate_task(SyntheticTask{}, 30, 6);
  std::vector<AugmentedSample> data;
  for (std::size_t i = 0; i < d.images.size(); ++i) {
    data.push_back(AugmentedSample{d.images[i], d.manifest.samples[i].label, {}});
  }
  std::mt19937_64 gen(1007);
  std::normal_distribution<double> z(0.0, 0.2);
  std::uniform_int_distribution<std::size_t> pick(0, 32 * 32);
  const double l2 = 1e-4, h = 1e-5;
  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    auto probe = LinearProbe::zeros(32, 32, 1);
    for (auto& w : probe.weights) w = z(gen);
    probe.bias = z(gen);
    const auto grad = probe_gradient(probe, data, l2);
    // Every point checks the bias and four random weights.
    std::vector<std::size_t> coords{grad.size() - 1};
    for (int k = 0; k < 4; ++k) coords.push_back(pick(gen) % (grad.size() - 1));
    for (const std::size_t j : coords) {
      auto plus = probe, minus = probe;
      if (j == grad.size() - 1) {
        plus.bias += h;
        minus.bias -= h;
      } else {
        plus.weights[j] += h;
        minus.weights[j] -= h;
      }
      const double numeric = (probe_loss(plus, data, l2) - probe_loss(minus, data, l2)) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(grad[j]), 1e-8});
      worst = std::max(worst, std::abs(numeric - grad[j]) / scale);
    }
  }
  return {worst < 1e-5, "10 points x 5 coordinates, max relative error " + fmt("%.3g", worst) +
                            " (limit 1e-5)"};
}

}  // namespace

int main() {
  report("mask-product-exactness", mask_product_exactness);
  report("nine-variant-contract", nine_variants);
  report("kernel-oracles", kernel_oracles);
  report("geometry-oracle", geometry_oracle);
  report("metrics-oracles", metrics_oracles);
  report("batch-counting-gamma-nesting", batch_counting);
  report("determinism-augment-compose", determinism);
  report("directional-probe", directional_probe);
  report("subset-filter", subset_filter);
  report("probe-gradient-check", gradient_check);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
