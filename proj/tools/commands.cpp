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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cutremain/augment.hpp"
#include "cutremain/batch.hpp"
#include "cutremain/dataset.hpp"
#include "cutremain/digest.hpp"
#include "cutremain/error.hpp"
#include "cutremain/image_io.hpp"
#include "cutremain/metrics.hpp"
#include "cutremain/probe.hpp"
#include "cutremain/version.hpp"

namespace cutremain::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct CommonOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned jobs = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App& cmd, CommonOptions& common, bool out_required) {
  cmd.add_option("--seed", common.seed, "Master seed")->capture_default_str();
  cmd.add_option("--jobs", common.jobs, "Parallel workers (output does not depend on it)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  auto* out = cmd.add_option("--out", common.out, "Output path");
  if (out_required) out->required();
  cmd.add_option("--format", common.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

// "key,value" lines with nested keys joined by '.'.
void flatten(const ojson& value, const std::string& prefix, std::ostream& os) {
  if (value.is_object()) {
    for (const auto& [k, v] : value.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      flatten(value[i], prefix + "." + std::to_string(i), os);
    }
  } else if (value.is_string()) {
    os << prefix << "," << value.get<std::string>() << "\n";
  } else {
    os << prefix << "," << value.dump() << "\n";
  }
}

std::string render(const ojson& report, const std::string& format) {
  if (format == "csv") {
    std::ostringstream os;
    os << "key,value\n";
    flatten(report, "", os);
    return os.str();
  }
  return report.dump(2) + "\n";
}

// Writes the report to --out when given, else to `out`.
void emit(const ojson& report, const CommonOptions& common, std::ostream& out) {
  const std::string text = render(report, common.format);
  if (common.out.empty()) {
    out << text;
  } else {
    write_text_file(common.out, text);
  }
}

double json_safe(double v) { return std::isfinite(v) ? v : 0.0; }

ojson nullable(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

AspectRatioSet ratios_from(const std::vector<double>& values) { return AspectRatioSet(values); }

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

std::string sanitize(const std::string& id) {
  std::string out;
  for (const char c : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_');
  }
  return out;
}

std::string format_ratio(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  CommonOptions common;
  std::string coco;
  std::string csv;
  std::string split = "train";
  bool split_vertical = false;
  std::string background_class;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  DatasetManifest manifest;
  if (!a.coco.empty()) {
    manifest = parse_coco(read_text_file(a.coco), parse_split(a.split));
  } else {
    manifest = parse_csv(read_text_file(a.csv), parse_split(a.split));
  }
  if (a.split_vertical) {
    std::optional<Label> background;
    if (!a.background_class.empty()) {
      const auto it = std::find(manifest.class_names.begin(), manifest.class_names.end(),
                                a.background_class);
      if (it == manifest.class_names.end()) {
        fail(ErrorCode::kInvalidParameter, "unknown background class \"" + a.background_class + "\"");
      }
      const auto k = static_cast<std::size_t>(it - manifest.class_names.begin());
      const bool multi = !manifest.samples.empty() &&
                         manifest.samples.front().label.kind() == Label::Kind::kMultiLabel;
      if (multi) {
        std::vector<bool> active(manifest.class_names.size(), false);
        active[k] = true;
        background = Label::multi(active);
      } else {
        background = Label::single(k, manifest.class_names.size());
      }
    }
    manifest = split_manifest_vertical(manifest, background);
  }
  validate(manifest);

  ojson config = ojson::object();
  config["command"] = "ingest";
  config["input"] = a.coco.empty() ? a.csv : a.coco;
  config["format"] = a.coco.empty() ? "csv" : "coco";
  config["split"] = a.split;
  config["split_vertical"] = a.split_vertical;
  if (!a.background_class.empty()) config["background_class"] = a.background_class;
  manifest.provenance["config"] = config;

  ensure_parent(a.common.out);
  const std::string text = manifest_to_json(manifest);
  write_text_file(a.common.out, text);

  ojson report = ojson::object();
  report["command"] = "ingest";
  report["images"] = manifest.samples.size();
  report["boxes"] = manifest.box_count();
  report["classes"] = manifest.class_names.size();
  report["flagged"] = manifest.flagged.size();
  report["output"] = a.common.out;
  report["digest"] = sha256_hex(text);
  report["config"] = config;
  out << render(report, a.common.format);
  return 0;
}

// ---------------------------------------------------------------- subset

struct SubsetArgs {
  CommonOptions common;
  std::string manifest;
  double threshold = 0.02;
  std::vector<std::string> categories;
};

int cmd_subset(const SubsetArgs& a, std::ostream& out) {
  const DatasetManifest input = manifest_from_json(read_text_file(a.manifest));
  std::optional<std::vector<std::string>> categories;
  if (!a.categories.empty()) categories = a.categories;
  SubsetResult result = build_small_subset(input, a.threshold, categories);

  ojson config = ojson::object();
  config["command"] = "subset";
  config["manifest"] = a.manifest;
  config["threshold"] = a.threshold;
  config["categories"] = a.categories;
  result.manifest.provenance["config"] = config;

  ensure_parent(a.common.out);
  const std::string text = manifest_to_json(result.manifest);
  write_text_file(a.common.out, text);

  ojson report = ojson::object();
  report["command"] = "subset";
  report["threshold"] = a.threshold;
  report["kept"] = result.report.kept.size();
  report["dropped"] = result.report.dropped.size();
  report["excluded_without_annotations"] = result.report.excluded.size();
  report["classes"] = result.manifest.class_names;
  report["output"] = a.common.out;
  report["digest"] = sha256_hex(text);
  report["config"] = config;
  out << render(report, a.common.format);
  return 0;
}

// ---------------------------------------------------------------- augment

struct AugmentArgs {
  CommonOptions common;
  std::string manifest;
  std::string images = ".";
  std::string method = kMethodCutAndRemain;
  std::vector<double> ratios = {1.0, 1.5, 2.0};
  double alpha = 1.0;
  int cutout_side = 0;
  int bit_depth = 8;
  bool force = false;
};

ojson provenance_json(const Provenance& p) {
  ojson j = ojson::object();
  j["method"] = p.method;
  j["sources"] = p.sources;
  j["ratio"] = p.ratio ? ojson{p.ratio->first, p.ratio->second} : ojson(nullptr);
  j["seed"] = p.seed ? ojson(*p.seed) : ojson(nullptr);
  if (p.lambda) j["lambda"] = *p.lambda;
  if (p.erased) j["erased"] = {p.erased->x0, p.erased->y0, p.erased->x1, p.erased->y1};
  return j;
}

void prepare_output_dir(const fs::path& dir, bool force) {
  if (fs::exists(dir) && !fs::is_empty(dir)) {
    if (!force) {
      fail(ErrorCode::kIo, "output directory " + dir.string() + " is not empty (use --force)");
    }
    if (!fs::exists(dir / "config.json")) {
      fail(ErrorCode::kIo, "refusing to clear " + dir.string() + ": not an augment output");
    }
    fs::remove_all(dir / "images");
    fs::remove(dir / "records.jsonl");
    fs::remove(dir / "config.json");
  }
  fs::create_directories(dir / "images");
}

int cmd_augment(const AugmentArgs& a, std::ostream& out) {
  const DatasetManifest dataset = manifest_from_json(read_text_file(a.manifest));
  const Method method = parse_method(a.method);
  if (method == Method::kOriginal) {
    fail(ErrorCode::kInvalidParameter, "augment needs an augmentation method");
  }

  ComposeOptions options;
  options.method = method;
  options.gamma = 1.0;
  options.ratios = ratios_from(a.ratios);
  options.seed = a.common.seed;
  options.mix_alpha = a.alpha;
  options.cutout_side = a.cutout_side;
  BatchManifest batch = compose(dataset, options);

  // Keep augmented entries only, in dataset order then recipe order.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) position[dataset.samples[i].id] = i;
  std::vector<BatchEntry> augmented;
  for (const auto& e : batch.entries) {
    if (e.method != Method::kOriginal) augmented.push_back(e);
  }
  const auto pairs = options.ratios.pairs();
  auto pair_rank = [&pairs](const BatchEntry& e) -> std::size_t {
    if (!e.ratio) return 0;
    return static_cast<std::size_t>(std::find(pairs.begin(), pairs.end(), *e.ratio) - pairs.begin());
  };
  std::stable_sort(augmented.begin(), augmented.end(), [&](const auto& x, const auto& y) {
    const auto px = position.at(x.source_id);
    const auto py = position.at(y.source_id);
    return px != py ? px < py : pair_rank(x) < pair_rank(y);
  });
  batch.entries = std::move(augmented);

  const fs::path dir = a.common.out;
  prepare_output_dir(dir, a.force);

  const fs::path image_root = a.images;
  ImageLoader loader = [image_root](const AnnotatedSample& s) {
    return load_sample_image(s, image_root);
  };

  std::string records;
  std::size_t written = 0;
  materialize(
      batch, dataset, loader,
      [&](std::size_t index, AugmentedSample sample) {
        char prefix[16];
        std::snprintf(prefix, sizeof(prefix), "%05zu", index);
        std::string name = std::string(prefix) + "_" + sanitize(batch.entries[index].source_id) +
                           "_" + sample.provenance.method;
        if (sample.provenance.ratio) {
          name += "_w" + format_ratio(sample.provenance.ratio->first) + "_h" +
                  format_ratio(sample.provenance.ratio->second);
        }
        name += ".png";
        write_png(dir / "images" / name, sample.image, a.bit_depth);
        ojson record = ojson::object();
        record["file"] = "images/" + name;
        record["provenance"] = provenance_json(sample.provenance);
        record["label"] = sample.label.values();
        records += record.dump() + "\n";
        ++written;
      },
      a.common.jobs);
  write_text_file(dir / "records.jsonl", records);

  ojson config = ojson::object();
  config["command"] = "augment";
  config["tool_version"] = kToolVersion;
  config["manifest"] = a.manifest;
  config["method"] = a.method;
  config["ratios"] = a.ratios;
  config["seed"] = a.common.seed;
  config["alpha"] = a.alpha;
  config["cutout_side"] = a.cutout_side;
  config["bit_depth"] = a.bit_depth;
  write_text_file(dir / "config.json", config.dump(2) + "\n");

  ojson report = ojson::object();
  report["command"] = "augment";
  report["images_written"] = written;
  report["output"] = dir.string();
  report["digest"] = directory_digest(dir);
  report["config"] = config;
  out << render(report, a.common.format);
  return 0;
}

// ---------------------------------------------------------------- compose

struct ComposeArgs {
  CommonOptions common;
  std::string manifest;
  std::string method = kMethodCutAndRemain;
  double gamma = 1.0;
  std::vector<double> ratios = {1.0, 1.5, 2.0};
  std::size_t batch_size = 32;
  std::size_t variants = 0;
  double alpha = 1.0;
  int cutout_side = 0;
};

int cmd_compose(const ComposeArgs& a, std::ostream& out) {
  const DatasetManifest dataset = manifest_from_json(read_text_file(a.manifest));
  ComposeOptions options;
  options.method = parse_method(a.method);
  options.gamma = a.gamma;
  options.ratios = ratios_from(a.ratios);
  options.seed = a.common.seed;
  options.batch_size = a.batch_size;
  if (a.variants > 0) options.variants_per_sample = a.variants;
  options.mix_alpha = a.alpha;
  options.cutout_side = a.cutout_side;
  const BatchManifest batch = compose(dataset, options);

  ensure_parent(a.common.out);
  const std::string text = batch_to_jsonl(batch);
  write_text_file(a.common.out, text);

  ojson config = ojson::object();
  config["command"] = "compose";
  config["manifest"] = a.manifest;
  config["method"] = a.method;
  config["gamma"] = a.gamma;
  config["ratios"] = a.ratios;
  config["seed"] = a.common.seed;
  config["batch_size"] = a.batch_size;
  config["variants_per_sample"] = a.variants;

  ojson report = ojson::object();
  report["command"] = "compose";
  report["entries"] = batch.entries.size();
  report["originals"] = batch.original_count();
  report["augmented"] = batch.entries.size() - batch.original_count();
  report["augmented_sources"] = batch.augmented_sources().size();
  report["output"] = a.common.out;
  report["digest"] = sha256_hex(text);
  report["config"] = config;
  out << render(report, a.common.format);
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  CommonOptions common;
  std::string scores;
  std::string labels;
  double threshold = 0.5;
};

std::vector<std::vector<double>> align_rows(const NumericTable& reference,
                                            const NumericTable& other, const char* what) {
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < other.ids.size(); ++i) {
    if (!by_id.emplace(other.ids[i], i).second) {
      fail(ErrorCode::kParse, std::string(what) + ": duplicate id " + other.ids[i]);
    }
  }
  if (other.ids.size() != reference.ids.size()) {
    fail(ErrorCode::kShape, std::string(what) + ": row count differs from scores");
  }
  std::vector<std::vector<double>> rows;
  for (const auto& id : reference.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) fail(ErrorCode::kShape, std::string(what) + ": missing id " + id);
    rows.push_back(other.rows[it->second]);
  }
  return rows;
}

int as_binary(double v, const std::string& where) {
  if (v != 0.0 && v != 1.0) fail(ErrorCode::kParse, where + ": labels must be 0 or 1");
  return static_cast<int>(v);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const std::string score_text = read_text_file(a.scores);
  const std::string label_text = read_text_file(a.labels);
  const NumericTable scores = parse_numeric_csv(score_text);
  const NumericTable labels = parse_numeric_csv(label_text);
  const auto label_rows = align_rows(scores, labels, "labels");
  const std::size_t n = scores.ids.size();
  const std::size_t k = scores.columns.size();

  ojson report = ojson::object();
  report["command"] = "eval";
  if (labels.columns.size() == k && k >= 2) {
    report["mode"] = "multilabel";
    PredictionSet set;
    set.rows = n;
    set.classes = k;
    set.threshold = a.threshold;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        set.scores.push_back(scores.rows[i][c]);
        set.labels.push_back(as_binary(label_rows[i][c], "labels row " + std::to_string(i + 1)));
      }
    }
    const MultilabelReport m = multilabel_suite(set);
    report["mAP"] = m.map;
    report["CF1"] = m.cf1;
    report["OF1"] = m.of1;
    report["CP"] = m.cp;
    report["CR"] = m.cr;
    report["OP"] = m.op;
    report["OR"] = m.orr;
    ojson per_class = ojson::object();
    std::vector<std::string> excluded;
    for (std::size_t c = 0; c < k; ++c) {
      ojson entry = ojson::object();
      entry["ap"] = nullable(m.per_class_ap[c]);
      try {
        entry["auc"] = auc_roc(set.score_column(c), set.label_column(c));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetric) throw;
        entry["auc"] = nullptr;
      }
      per_class[scores.columns[c]] = entry;
    }
    for (const auto c : m.excluded) excluded.push_back(scores.columns[c]);
    report["per_class"] = per_class;
    report["excluded"] = excluded;
  } else if (labels.columns.size() == 1 && k == 1) {
    report["mode"] = "binary";
    std::vector<double> s(n);
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = scores.rows[i][0];
      y[i] = as_binary(label_rows[i][0], "labels row " + std::to_string(i + 1));
      p[i] = s[i] >= a.threshold ? 1 : 0;
    }
    report["auc_roc"] = auc_roc(s, y);
    report["f1"] = f1(p, y);
    report["excluded"] = ojson::array();
  } else if (labels.columns.size() == 1 && k >= 2) {
    report["mode"] = "multiclass";
    std::vector<std::size_t> truth(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = label_rows[i][0];
      if (v < 0 || v != std::floor(v) || v >= static_cast<double>(k)) {
        fail(ErrorCode::kParse, "labels row " + std::to_string(i + 1) + ": class index out of range");
      }
      truth[i] = static_cast<std::size_t>(v);
      const auto& row = scores.rows[i];
      predicted[i] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    const MacroF1 macro = macro_f1(predicted, truth, k);
    ojson per_class = ojson::object();
    std::vector<std::string> excluded;
    double auc_sum = 0.0;
    std::size_t auc_count = 0;
    for (std::size_t c = 0; c < k; ++c) {
      std::vector<double> s(n);
      std::vector<int> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = scores.rows[i][c];
        y[i] = truth[i] == c ? 1 : 0;
      }
      ojson entry = ojson::object();
      try {
        const double auc = auc_roc(s, y);
        entry["auc"] = auc;
        auc_sum += auc;
        ++auc_count;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedMetric) throw;
        entry["auc"] = nullptr;
        excluded.push_back(scores.columns[c]);
      }
      entry["f1"] = macro.per_class[c];
      per_class[scores.columns[c]] = entry;
    }
    report["macro_auc"] = auc_count ? ojson(auc_sum / static_cast<double>(auc_count)) : ojson(nullptr);
    report["macro_f1"] = macro.macro;
    report["per_class"] = per_class;
    report["excluded"] = excluded;
  } else {
    fail(ErrorCode::kShape, "labels must have 1 column or one column per score column");
  }
  report["samples"] = n;
  report["threshold"] = a.threshold;
  report["input_digest"] = sha256_hex(sha256_hex(score_text) + sha256_hex(label_text));
  ojson config = ojson::object();
  config["command"] = "eval";
  config["scores"] = a.scores;
  config["labels"] = a.labels;
  config["threshold"] = a.threshold;
  report["config"] = config;
  emit(report, a.common, out);
  return 0;
}

// ---------------------------------------------------------------- similarity

struct SimilarityArgs {
  CommonOptions common;
  std::string originals;
  std::string augmented;
};

int cmd_similarity(const SimilarityArgs& a, std::ostream& out) {
  const std::string orig_text = read_text_file(a.originals);
  const std::string aug_text = read_text_file(a.augmented);
  const NumericTable originals = parse_numeric_csv(orig_text);
  const NumericTable augmented = parse_numeric_csv(aug_text);
  if (originals.columns.size() != augmented.columns.size()) {
    fail(ErrorCode::kShape, "feature dimensions differ");
  }
  const auto aligned = align_rows(originals, augmented, "augmented");
  const FeatureReport r = pairwise_feature_report(originals.rows, aligned);

  ojson report = ojson::object();
  report["command"] = "similarity";
  report["pairs"] = r.pairs;
  report["euclidean"] = {{"mean", r.euclidean.mean}, {"std", r.euclidean.std}};
  report["cosine"] = {{"mean", r.cosine.mean}, {"std", r.cosine.std}};
  report["input_digest"] = sha256_hex(sha256_hex(orig_text) + sha256_hex(aug_text));
  ojson config = ojson::object();
  config["command"] = "similarity";
  config["originals"] = a.originals;
  config["augmented"] = a.augmented;
  report["config"] = config;
  emit(report, a.common, out);
  return 0;
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
  CommonOptions common;
  std::size_t seeds = 5;
  std::size_t train = 500;
  std::size_t test = 500;
  std::vector<double> gammas;
  double delta = SyntheticTask{}.target_delta;
  int epochs = ProbeParams{}.epochs;
  double learning_rate = ProbeParams{}.learning_rate;
  double l2 = ProbeParams{}.l2;
  std::vector<double> ratios = {1.0, 1.5, 2.0};
};

int cmd_probe(const ProbeArgs& a, std::ostream& out) {
  ProbeExperimentConfig config;
  config.train_size = a.train;
  config.test_size = a.test;
  config.seeds.clear();
  for (std::size_t i = 0; i < a.seeds; ++i) config.seeds.push_back(a.common.seed + i);
  config.gammas = a.gammas;
  config.task.target_delta = static_cast<float>(a.delta);
  config.probe.epochs = a.epochs;
  config.probe.learning_rate = a.learning_rate;
  config.probe.l2 = a.l2;
  config.ratios = ratios_from(a.ratios);
  const ProbeReport r = run_probe_experiment(config);

  const auto base = r.baseline();
  const auto cr = r.cut_and_remain();
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  ojson report = ojson::object();
  report["command"] = "probe";
  report["seeds"] = r.seeds;
  report["baseline_auc"] = base;
  report["cut_and_remain_auc"] = cr;
  report["mean_baseline_auc"] = mean(base);
  report["mean_cut_and_remain_auc"] = mean(cr);
  report["paired_difference"] = {{"per_seed", r.paired_difference()},
                                 {"mean", r.mean_paired_difference()}};
  ojson sweep = ojson::array();
  const auto means = r.mean_by_gamma();
  for (std::size_t g = 0; g < r.gammas.size(); ++g) {
    sweep.push_back({{"gamma", r.gammas[g]}, {"auc", r.auc[g]}, {"mean", json_safe(means[g])}});
  }
  report["gamma_sweep"] = sweep;
  ojson cfg = ojson::object();
  cfg["command"] = "probe";
  cfg["seed"] = a.common.seed;
  cfg["seeds"] = a.seeds;
  cfg["train"] = a.train;
  cfg["test"] = a.test;
  cfg["gammas"] = a.gammas;
  cfg["delta"] = a.delta;
  cfg["epochs"] = a.epochs;
  cfg["learning_rate"] = a.learning_rate;
  cfg["l2"] = a.l2;
  cfg["ratios"] = a.ratios;
  report["config"] = cfg;
  emit(report, a.common, out);
  return 0;
}

void print_error(std::ostream& err, std::string_view code, const std::string& message) {
  ojson line = ojson::object();
  line["code"] = code;
  line["message"] = message;
  err << "error: " << line.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervised region-keeping augmentation toolkit", "cutremain"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert COCO JSON or CSV annotations to a manifest");
  add_common(*ingest_cmd, ingest.common, true);
  auto* coco_opt = ingest_cmd->add_option("--coco", ingest.coco, "COCO instances JSON")
                       ->check(CLI::ExistingFile);
  auto* csv_opt = ingest_cmd->add_option("--csv", ingest.csv, "CSV path,label,cx,cy,w,h")
                      ->check(CLI::ExistingFile);
  coco_opt->excludes(csv_opt);
  ingest_cmd->add_option("--split", ingest.split, "Split tag")
      ->check(CLI::IsMember({"train", "val", "test"}))
      ->capture_default_str();
  ingest_cmd->add_flag("--split-vertical", ingest.split_vertical,
                       "Cut every image into left and right halves");
  ingest_cmd->add_option("--background-class", ingest.background_class,
                         "Label for halves left without annotations");

  SubsetArgs subset;
  auto* subset_cmd = app.add_subcommand("subset", "Keep images whose objects are small on average");
  add_common(*subset_cmd, subset.common, true);
  subset_cmd->add_option("--manifest", subset.manifest, "Input manifest")
      ->required()
      ->check(CLI::ExistingFile);
  subset_cmd->add_option("--threshold", subset.threshold, "Mean relative area cut-off")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  subset_cmd->add_option("--categories", subset.categories, "Restrict to these class names")
      ->delimiter(',');

  AugmentArgs augment;
  auto* augment_cmd = app.add_subcommand("augment", "Write augmented PNGs and sidecar records");
  add_common(*augment_cmd, augment.common, true);
  augment_cmd->add_option("--manifest", augment.manifest, "Input manifest")
      ->required()
      ->check(CLI::ExistingFile);
  augment_cmd->add_option("--images", augment.images, "Directory image paths are relative to")
      ->capture_default_str();
  augment_cmd->add_option("--method", augment.method, "Augmentation")
      ->check(CLI::IsMember({kMethodCutAndRemain, kMethodSupMixup, kMethodSupCutout,
                             kMethodSupCutmix}))
      ->capture_default_str();
  augment_cmd->add_option("--ratios", augment.ratios, "Aspect-ratio factors")
      ->delimiter(',')
      ->capture_default_str();
  augment_cmd->add_option("--alpha", augment.alpha, "Beta(alpha, alpha) for mixup")
      ->capture_default_str();
  augment_cmd->add_option("--cutout-side", augment.cutout_side, "Cutout square side, 0 = min(W,H)/4")
      ->capture_default_str();
  augment_cmd->add_option("--bit-depth", augment.bit_depth, "PNG bit depth")
      ->check(CLI::IsMember({8, 16}))
      ->capture_default_str();
  augment_cmd->add_flag("--force", augment.force, "Replace a previous augment output in --out");

  ComposeArgs compose_args;
  auto* compose_cmd = app.add_subcommand("compose", "Write a replayable batch manifest (JSON lines)");
  add_common(*compose_cmd, compose_args.common, true);
  compose_cmd->add_option("--manifest", compose_args.manifest, "Input manifest")
      ->required()
      ->check(CLI::ExistingFile);
  compose_cmd->add_option("--method", compose_args.method, "Augmentation")
      ->check(CLI::IsMember({kMethodOriginal, kMethodCutAndRemain, kMethodSupMixup,
                             kMethodSupCutout, kMethodSupCutmix}))
      ->capture_default_str();
  compose_cmd->add_option("--gamma", compose_args.gamma, "Fraction of samples augmented")
      ->capture_default_str();
  compose_cmd->add_option("--ratios", compose_args.ratios, "Aspect-ratio factors")
      ->delimiter(',')
      ->capture_default_str();
  compose_cmd->add_option("--batch-size", compose_args.batch_size, "Recorded mini-batch size")
      ->capture_default_str();
  compose_cmd->add_option("--variants-per-sample", compose_args.variants,
                          "Keep this many ratio variants per sample, 0 = all")
      ->capture_default_str();
  compose_cmd->add_option("--alpha", compose_args.alpha, "Beta(alpha, alpha) for mixup")
      ->capture_default_str();
  compose_cmd->add_option("--cutout-side", compose_args.cutout_side,
                          "Cutout square side, 0 = min(W,H)/4")
      ->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "AUC-ROC, F1, mAP, CF1 and OF1 from CSV predictions");
  add_common(*eval_cmd, eval.common, false);
  eval_cmd->add_option("--scores", eval.scores, "CSV: id then one score column per class")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--labels", eval.labels,
                       "CSV: id then binary columns, or one class-index column")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--threshold", eval.threshold, "Decision threshold for F1 metrics")
      ->capture_default_str();

  SimilarityArgs similarity;
  auto* similarity_cmd =
      app.add_subcommand("similarity", "Euclidean and cosine distance between feature vectors");
  add_common(*similarity_cmd, similarity.common, false);
  similarity_cmd->add_option("--originals", similarity.originals, "CSV: id then features")
      ->required()
      ->check(CLI::ExistingFile);
  similarity_cmd->add_option("--augmented", similarity.augmented, "CSV: id then features")
      ->required()
      ->check(CLI::ExistingFile);

  ProbeArgs probe;
  auto* probe_cmd =
      app.add_subcommand("probe", "Synthetic linear-probe experiment, baseline vs cut-and-remain");
  add_common(*probe_cmd, probe.common, false);
  probe_cmd->add_option("--seeds", probe.seeds, "Number of seeds")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  probe_cmd->add_option("--train", probe.train, "Training images per seed")->capture_default_str();
  probe_cmd->add_option("--test", probe.test, "Test images per seed")->capture_default_str();
  probe_cmd->add_option("--gammas", probe.gammas, "Extra gamma values to sweep")->delimiter(',');
  probe_cmd->add_option("--delta", probe.delta, "Target intensity above background")
      ->capture_default_str();
  probe_cmd->add_option("--epochs", probe.epochs, "SGD epochs")->capture_default_str();
  probe_cmd->add_option("--lr", probe.learning_rate, "SGD learning rate")->capture_default_str();
  probe_cmd->add_option("--l2", probe.l2, "L2 coefficient")->capture_default_str();
  probe_cmd->add_option("--ratios", probe.ratios, "Aspect-ratio factors")
      ->delimiter(',')
      ->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (ingest_cmd->parsed()) {
      if (ingest.coco.empty() && ingest.csv.empty()) {
        fail(ErrorCode::kInvalidParameter, "ingest needs --coco or --csv");
      }
      return cmd_ingest(ingest, out);
    }
    if (subset_cmd->parsed()) return cmd_subset(subset, out);
    if (augment_cmd->parsed()) return cmd_augment(augment, out);
    if (compose_cmd->parsed()) return cmd_compose(compose_args, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (similarity_cmd->parsed()) return cmd_similarity(similarity, out);
    if (probe_cmd->parsed()) return cmd_probe(probe, out);
  } catch (const Error& e) {
    print_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    print_error(err, to_string(ErrorCode::kIo), e.what());
    return 1;
  }
  print_error(err, "usage", "no subcommand");
  return 2;
}

}  // namespace cutremain::cli
