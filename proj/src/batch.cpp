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

#include "cutremain/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "cutremain/error.hpp"
#include "cutremain/version.hpp"

namespace cutremain {

using ojson = nlohmann::ordered_json;

std::string to_string(Method method) {
  switch (method) {
    case Method::kOriginal:
      return kMethodOriginal;
    case Method::kCutAndRemain:
      return kMethodCutAndRemain;
    case Method::kSupMixup:
      return kMethodSupMixup;
    case Method::kSupCutout:
      return kMethodSupCutout;
    case Method::kSupCutmix:
      return kMethodSupCutmix;
  }
  return kMethodOriginal;
}

Method parse_method(std::string_view name) {
  for (const Method m : {Method::kOriginal, Method::kCutAndRemain, Method::kSupMixup,
                         Method::kSupCutout, Method::kSupCutmix}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorCode::kInvalidParameter, "unknown method \"" + std::string(name) + "\"");
}

bool is_pairing(Method method) {
  return method == Method::kSupMixup || method == Method::kSupCutmix;
}

GammaSchedule::GammaSchedule(double gamma) : gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    fail(ErrorCode::kInvalidParameter,
         "gamma must lie in [0, 1], got " + std::to_string(gamma));
  }
}

std::size_t GammaSchedule::selected_count(std::size_t n) const {
  const auto count =
      static_cast<std::size_t>(std::floor(gamma_ * static_cast<double>(n) + 1e-9));
  return std::min(count, n);
}

std::vector<std::string> BatchManifest::augmented_sources() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& e : entries) {
    if (e.method != Method::kOriginal && seen.insert(e.source_id).second) {
      out.push_back(e.source_id);
    }
  }
  return out;
}

std::size_t BatchManifest::original_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const auto& e) { return e.method == Method::kOriginal; }));
}

namespace {

BatchEntry entry_for(const std::string& id, Method method) {
  BatchEntry e;
  e.source_id = id;
  e.method = method;
  return e;
}

}  // namespace

BatchManifest compose(const DatasetManifest& dataset, const ComposeOptions& options) {
  const GammaSchedule schedule(options.gamma);
  const std::size_t n = dataset.samples.size();
  if (n == 0) fail(ErrorCode::kInvalidParameter, "compose: dataset is empty");
  if (options.batch_size == 0) fail(ErrorCode::kInvalidParameter, "batch size must be >= 1");
  if (options.cutout_side < 0) fail(ErrorCode::kInvalidParameter, "cutout side must be >= 0");
  if (is_pairing(options.method) && n < 2) {
    fail(ErrorCode::kPairing, to_string(options.method) +
                                  " needs at least 2 samples to pair, dataset has " +
                                  std::to_string(n));
  }
  if (options.variants_per_sample &&
      (*options.variants_per_sample == 0 ||
       *options.variants_per_sample > options.ratios.pair_count())) {
    fail(ErrorCode::kInvalidParameter, "variants per sample must lie in [1, " +
                                           std::to_string(options.ratios.pair_count()) + "]");
  }
  if (options.method == Method::kSupMixup && !(options.mix_alpha > 0.0)) {
    fail(ErrorCode::kInvalidParameter, "mixup alpha must be > 0");
  }

  BatchManifest batch;
  batch.master_seed = options.seed;
  batch.method = options.method;
  batch.gamma = options.gamma;
  batch.ratios = options.ratios;
  batch.batch_size = options.batch_size;
  batch.dataset_size = n;
  batch.cutout_side = options.cutout_side;

  for (const auto& s : dataset.samples) batch.entries.push_back(entry_for(s.id, Method::kOriginal));

  const std::size_t selected =
      options.method == Method::kOriginal ? 0 : schedule.selected_count(n);
  // One ordering per seed, independent of gamma and method.
  const auto priority = Rng(derive_seed(options.seed, "select")).permutation(n);
  const auto pairs = options.ratios.pairs();
  for (std::size_t rank = 0; rank < selected; ++rank) {
    const std::size_t source = priority[rank];
    const std::string& id = dataset.samples[source].id;
    switch (options.method) {
      case Method::kCutAndRemain: {
        std::vector<std::size_t> chosen(pairs.size());
        std::iota(chosen.begin(), chosen.end(), std::size_t{0});
        if (options.variants_per_sample) {
          Rng rng(derive_seed(options.seed, "variants", source));
          rng.shuffle(chosen);
          chosen.resize(*options.variants_per_sample);
          std::sort(chosen.begin(), chosen.end());
        }
        for (const std::size_t p : chosen) {
          BatchEntry e = entry_for(id, Method::kCutAndRemain);
          e.ratio = pairs[p];
          batch.entries.push_back(std::move(e));
        }
        break;
      }
      case Method::kSupMixup:
      case Method::kSupCutmix: {
        Rng rng(derive_seed(options.seed, "pair", source));
        std::size_t partner = rng.uniform_index(n - 1);
        if (partner >= source) ++partner;
        BatchEntry e = entry_for(id, options.method);
        e.partner_id = dataset.samples[partner].id;
        if (options.method == Method::kSupMixup) {
          e.lambda = draw_mix_lambda(options.mix_alpha, rng);
        }
        batch.entries.push_back(std::move(e));
        break;
      }
      case Method::kSupCutout: {
        BatchEntry e = entry_for(id, Method::kSupCutout);
        e.seed = derive_seed(options.seed, "cutout", source);
        batch.entries.push_back(std::move(e));
        break;
      }
      case Method::kOriginal:
        break;
    }
  }

  const auto order = Rng(derive_seed(options.seed, "order")).permutation(batch.entries.size());
  std::vector<BatchEntry> shuffled;
  shuffled.reserve(order.size());
  for (const std::size_t i : order) shuffled.push_back(std::move(batch.entries[i]));
  batch.entries = std::move(shuffled);
  return batch;
}

std::string batch_to_jsonl(const BatchManifest& batch) {
  ojson header = ojson::object();
  header["format"] = "cutremain-batch";
  header["version"] = 1;
  header["tool_version"] = kToolVersion;
  header["master_seed"] = batch.master_seed;
  header["method"] = to_string(batch.method);
  header["gamma"] = batch.gamma;
  header["ratios"] = batch.ratios.ratios();
  header["batch_size"] = batch.batch_size;
  header["dataset_size"] = batch.dataset_size;
  header["cutout_side"] = batch.cutout_side;
  header["entries"] = batch.entries.size();
  std::string out = header.dump() + "\n";
  for (std::size_t i = 0; i < batch.entries.size(); ++i) {
    const auto& e = batch.entries[i];
    ojson line = ojson::object();
    line["index"] = i;
    line["source"] = e.source_id;
    line["method"] = to_string(e.method);
    if (e.ratio) line["ratio"] = {e.ratio->first, e.ratio->second};
    if (e.partner_id) line["partner"] = *e.partner_id;
    if (e.lambda) line["lambda"] = *e.lambda;
    if (e.seed) line["seed"] = *e.seed;
    out += line.dump();
    out += "\n";
  }
  return out;
}

BatchManifest batch_from_jsonl(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto line = text.substr(start, nl == text.npos ? text.npos : nl - start);
    if (!line.empty()) lines.push_back(line);
    if (nl == text.npos) break;
    start = nl + 1;
  }
  if (lines.empty()) fail(ErrorCode::kParse, "batch manifest: missing header line");

  BatchManifest batch;
  std::size_t line_no = 1;
  try {
    const auto header = ojson::parse(lines[0]);
    if (header.at("format") != "cutremain-batch") {
      fail(ErrorCode::kParse, "batch manifest: not a cutremain batch file");
    }
    batch.master_seed = header.at("master_seed").get<std::uint64_t>();
    batch.method = parse_method(header.at("method").get<std::string>());
    batch.gamma = header.at("gamma").get<double>();
    batch.ratios = AspectRatioSet(header.at("ratios").get<std::vector<double>>());
    batch.batch_size = header.at("batch_size").get<std::size_t>();
    batch.dataset_size = header.at("dataset_size").get<std::size_t>();
    batch.cutout_side = header.at("cutout_side").get<int>();
    for (line_no = 2; line_no <= lines.size(); ++line_no) {
      const auto line = ojson::parse(lines[line_no - 1]);
      BatchEntry e;
      e.source_id = line.at("source").get<std::string>();
      e.method = parse_method(line.at("method").get<std::string>());
      if (line.contains("ratio")) {
        const auto r = line["ratio"].get<std::vector<double>>();
        if (r.size() != 2) fail(ErrorCode::kParse, "ratio must hold 2 numbers");
        e.ratio = std::make_pair(r[0], r[1]);
      }
      if (line.contains("partner")) e.partner_id = line["partner"].get<std::string>();
      if (line.contains("lambda")) e.lambda = line["lambda"].get<double>();
      if (line.contains("seed")) e.seed = line["seed"].get<std::uint64_t>();
      batch.entries.push_back(std::move(e));
    }
    if (header.at("entries").get<std::size_t>() != batch.entries.size()) {
      fail(ErrorCode::kParse, "batch manifest: header announces " +
                                  header.at("entries").dump() + " entries, found " +
                                  std::to_string(batch.entries.size()));
    }
  } catch (const ojson::exception& e) {
    fail(ErrorCode::kParse, "batch manifest line " + std::to_string(line_no) + ": " + e.what());
  }
  return batch;
}

namespace {

class SampleIndex {
 public:
  explicit SampleIndex(const DatasetManifest& dataset) {
    for (const auto& s : dataset.samples) by_id_.emplace(s.id, &s);
  }

  const AnnotatedSample& at(const std::string& id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) fail(ErrorCode::kInvalidParameter, "unknown sample id \"" + id + "\"");
    return *it->second;
  }

 private:
  std::unordered_map<std::string, const AnnotatedSample*> by_id_;
};

AugmentedSample run_entry(const BatchManifest& batch, const BatchEntry& entry,
                          const SampleIndex& index, const ImageLoader& loader) {
  const AnnotatedSample& source = index.at(entry.source_id);
  const ImageTensor image = loader(source);

  switch (entry.method) {
    case Method::kOriginal:
      return AugmentedSample{image, source.label,
                             Provenance{kMethodOriginal, std::nullopt, {source.id}, {}, {}, {}}};
    case Method::kCutAndRemain: {
      if (!entry.ratio) fail(ErrorCode::kInvalidParameter, "cut-and-remain entry lacks a ratio");
      const auto boxes = source.boxes();
      return cut_and_remain_variant(image, source.label, boxes, entry.ratio->first,
                                    entry.ratio->second, source.id);
    }
    case Method::kSupCutout: {
      if (!entry.seed) fail(ErrorCode::kInvalidParameter, "sup-cutout entry lacks a seed");
      const auto boxes = source.boxes();
      if (boxes.empty()) fail(ErrorCode::kEmptyMask, "sample has no annotations");
      const BinaryMask mask = rasterize_mask(boxes, image.width(), image.height());
      const int side = batch.cutout_side > 0 ? batch.cutout_side
                                             : default_cutout_side(image.width(), image.height());
      Rng rng(*entry.seed);
      AugmentedSample out = sup_cutout(image, source.label, mask, side, rng);
      out.provenance.sources = {source.id};
      out.provenance.seed = entry.seed;
      return out;
    }
    case Method::kSupMixup:
    case Method::kSupCutmix: {
      if (!entry.partner_id) fail(ErrorCode::kInvalidParameter, "pairing entry lacks a partner");
      const AnnotatedSample& partner = index.at(*entry.partner_id);
      const ImageTensor partner_image = loader(partner);
      const auto boxes = source.boxes();
      if (boxes.empty()) fail(ErrorCode::kEmptyMask, "sample has no annotations");
      const BinaryMask mask = rasterize_mask(boxes, image.width(), image.height());
      AugmentedSample out;
      if (entry.method == Method::kSupMixup) {
        if (!entry.lambda) fail(ErrorCode::kInvalidParameter, "sup-mixup entry lacks lambda");
        const auto partner_boxes = partner.boxes();
        if (partner_boxes.empty()) fail(ErrorCode::kEmptyMask, "partner has no annotations");
        const BinaryMask partner_mask =
            rasterize_mask(partner_boxes, partner_image.width(), partner_image.height());
        out = sup_mixup(MaskedSample{image, source.label, mask},
                        MaskedSample{partner_image, partner.label, partner_mask}, *entry.lambda);
      } else {
        out = sup_cutmix(MaskedSample{image, source.label, mask}, partner_image, partner.label);
      }
      out.provenance.sources = {source.id, partner.id};
      return out;
    }
  }
  fail(ErrorCode::kInvalidParameter, "unhandled method");
}

AugmentedSample run_indexed(const BatchManifest& batch, std::size_t i,
                            const SampleIndex& index, const ImageLoader& loader) {
  const BatchEntry& entry = batch.entries.at(i);
  try {
    return run_entry(batch, entry, index, loader);
  } catch (const Error& e) {
    rethrow_with_context(e, "entry " + std::to_string(i) + " (" + to_string(entry.method) +
                                " of " + entry.source_id + ")");
  }
}

}  // namespace

AugmentedSample materialize_entry(const BatchManifest& batch, std::size_t index,
                                  const DatasetManifest& dataset, const ImageLoader& loader) {
  return run_indexed(batch, index, SampleIndex(dataset), loader);
}

void materialize(const BatchManifest& batch, const DatasetManifest& dataset,
                 const ImageLoader& loader, const SampleSink& sink, unsigned jobs) {
  const SampleIndex index(dataset);
  for (std::size_t i = 0; i < batch.entries.size(); ++i) {
    const auto& e = batch.entries[i];
    try {
      index.at(e.source_id);
      if (e.partner_id) index.at(*e.partner_id);
    } catch (const Error& err) {
      rethrow_with_context(err, "entry " + std::to_string(i));
    }
  }

  jobs = std::max(1u, jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < batch.entries.size(); ++i) {
      sink(i, run_indexed(batch, i, index, loader));
    }
    return;
  }

  // Work proceeds in windows so memory stays bounded; each window is filled
  // concurrently and then drained in order.
  const std::size_t window = static_cast<std::size_t>(jobs) * 8;
  std::vector<std::optional<AugmentedSample>> slots(window);
  std::vector<std::exception_ptr> errors(window);
  for (std::size_t base = 0; base < batch.entries.size(); base += window) {
    const std::size_t count = std::min(window, batch.entries.size() - base);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          slots[k] = run_indexed(batch, base + k, index, loader);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    for (std::size_t k = 0; k < count; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      sink(base + k, std::move(*slots[k]));
      slots[k].reset();
    }
  }
}

std::vector<AugmentedSample> materialize_all(const BatchManifest& batch,
                                             const DatasetManifest& dataset,
                                             const ImageLoader& loader, unsigned jobs) {
  std::vector<AugmentedSample> out;
  out.reserve(batch.entries.size());
  materialize(batch, dataset, loader,
              [&out](std::size_t, AugmentedSample sample) { out.push_back(std::move(sample)); },
              jobs);
  return out;
}

}  // namespace cutremain
