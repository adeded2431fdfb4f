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

#include "cutremain/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "cutremain/error.hpp"

namespace cutremain {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorCode::kShape, std::string(what) + ": lengths differ (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

void require_binary(std::span<const int> labels, const char* what) {
  for (const int l : labels) {
    if (l != 0 && l != 1) {
      fail(ErrorCode::kInvalidParameter, std::string(what) + ": labels must be 0 or 1");
    }
  }
}

void require_finite(std::span<const double> values, const char* what) {
  for (const double v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kInvalidParameter, std::string(what) + ": non-finite value");
    }
  }
}

double ratio_or_zero(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size(), "auc_roc");
  require_binary(labels, "auc_roc");
  require_finite(scores, "auc_roc");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) {
    fail(ErrorCode::kUndefinedMetric, "auc_roc needs both positive and negative labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of mid-ranks of the positives; ties share the average rank, which
  // counts each tied positive-negative pair as one half.
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) positive_rank_sum += mid_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double BinaryCounts::precision() const { return ratio_or_zero(tp, tp + fp); }
double BinaryCounts::recall() const { return ratio_or_zero(tp, tp + fn); }
double BinaryCounts::f1() const { return harmonic(precision(), recall()); }

BinaryCounts& BinaryCounts::operator+=(const BinaryCounts& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

BinaryCounts count_binary(std::span<const int> predictions, std::span<const int> labels) {
  require_same_length(predictions.size(), labels.size(), "f1");
  require_binary(predictions, "f1");
  require_binary(labels, "f1");
  BinaryCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] && labels[i]) ++c.tp;
    else if (predictions[i]) ++c.fp;
    else if (labels[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1(std::span<const int> predictions, std::span<const int> labels) {
  return count_binary(predictions, labels).f1();
}

MacroF1 macro_f1(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                 std::size_t num_classes) {
  require_same_length(predicted.size(), truth.size(), "macro_f1");
  if (num_classes == 0) fail(ErrorCode::kInvalidParameter, "macro_f1: no classes");
  std::vector<BinaryCounts> counts(num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] >= num_classes || truth[i] >= num_classes) {
      fail(ErrorCode::kInvalidParameter, "macro_f1: class index out of range");
    }
    for (std::size_t k = 0; k < num_classes; ++k) {
      const bool p = predicted[i] == k;
      const bool t = truth[i] == k;
      if (p && t) ++counts[k].tp;
      else if (p) ++counts[k].fp;
      else if (t) ++counts[k].fn;
      else ++counts[k].tn;
    }
  }
  MacroF1 out;
  for (const auto& c : counts) out.per_class.push_back(c.f1());
  out.macro = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
              static_cast<double>(num_classes);
  return out;
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  require_same_length(scores.size(), labels.size(), "average_precision");
  require_binary(labels, "average_precision");
  require_finite(scores, "average_precision");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) fail(ErrorCode::kUndefinedMetric, "average_precision: no positive labels");
  return sum / static_cast<double>(hits);
}

std::vector<double> PredictionSet::score_column(std::size_t k) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = score(i, k);
  return out;
}

std::vector<int> PredictionSet::label_column(std::size_t k) const {
  std::vector<int> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = label(i, k);
  return out;
}

MultilabelReport multilabel_suite(const PredictionSet& predictions) {
  const auto& p = predictions;
  if (p.rows == 0) fail(ErrorCode::kUndefinedMetric, "multilabel_suite: empty prediction set");
  if (p.classes == 0) fail(ErrorCode::kInvalidParameter, "multilabel_suite: no classes");
  require_same_length(p.scores.size(), p.rows * p.classes, "multilabel_suite scores");
  require_same_length(p.labels.size(), p.rows * p.classes, "multilabel_suite labels");
  require_binary(p.labels, "multilabel_suite");
  require_finite(p.scores, "multilabel_suite");

  MultilabelReport report;
  BinaryCounts pooled;
  double ap_sum = 0.0;
  std::size_t ap_count = 0;
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  for (std::size_t k = 0; k < p.classes; ++k) {
    const auto scores = p.score_column(k);
    const auto labels = p.label_column(k);
    if (std::find(labels.begin(), labels.end(), 1) == labels.end()) {
      report.excluded.push_back(k);
      report.per_class_ap.push_back(std::numeric_limits<double>::quiet_NaN());
    } else {
      const double ap = average_precision(scores, labels);
      report.per_class_ap.push_back(ap);
      ap_sum += ap;
      ++ap_count;
    }
    std::vector<int> decided(p.rows);
    for (std::size_t i = 0; i < p.rows; ++i) decided[i] = scores[i] >= p.threshold ? 1 : 0;
    const BinaryCounts c = count_binary(decided, labels);
    precision_sum += c.precision();
    recall_sum += c.recall();
    pooled += c;
  }
  if (ap_count == 0) fail(ErrorCode::kUndefinedMetric, "multilabel_suite: no class has a positive");
  const auto k = static_cast<double>(p.classes);
  report.map = ap_sum / static_cast<double>(ap_count);
  report.cp = precision_sum / k;
  report.cr = recall_sum / k;
  report.cf1 = harmonic(report.cp, report.cr);
  report.op = pooled.precision();
  report.orr = pooled.recall();
  report.of1 = pooled.f1();
  return report;
}

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  require_same_length(u.size(), v.size(), "euclidean_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  require_same_length(u.size(), v.size(), "cosine_distance");
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (!(uu > 0.0) || !(vv > 0.0)) {
    fail(ErrorCode::kUndefinedMetric, "cosine_distance: zero-norm vector");
  }
  double norms = std::sqrt(uu * vv);
  if (!std::isfinite(norms)) norms = std::sqrt(uu) * std::sqrt(vv);
  const double cosine = std::clamp(dot / norms, -1.0, 1.0);
  return 1.0 - cosine;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) fail(ErrorCode::kUndefinedMetric, "mean_std: no values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return MeanStd{mean, std::sqrt(ss / n)};
}

FeatureReport pairwise_feature_report(const std::vector<std::vector<double>>& originals,
                                      const std::vector<std::vector<double>>& augmented) {
  require_same_length(originals.size(), augmented.size(), "pairwise_feature_report");
  if (originals.empty()) fail(ErrorCode::kUndefinedMetric, "pairwise_feature_report: no pairs");
  std::vector<double> euclid, cosine;
  for (std::size_t i = 0; i < originals.size(); ++i) {
    euclid.push_back(euclidean_distance(originals[i], augmented[i]));
    cosine.push_back(cosine_distance(originals[i], augmented[i]));
  }
  return FeatureReport{mean_std(euclid), mean_std(cosine), originals.size()};
}

NumericTable parse_numeric_csv(std::string_view text) {
  NumericTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == text.npos ? text.npos : nl - start);
    start = nl == text.npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t from = 0;
    while (true) {
      const auto comma = line.find(',', from);
      auto f = line.substr(from, comma == line.npos ? line.npos : comma - from);
      while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
      while (!f.empty() && f.back() == ' ') f.remove_suffix(1);
      fields.push_back(f);
      if (comma == line.npos) break;
      from = comma + 1;
    }

    const std::string where = "line " + std::to_string(line_no);
    if (table.columns.empty()) {
      if (fields.size() < 2) fail(ErrorCode::kParse, where + ": header needs id and >= 1 column");
      for (std::size_t c = 1; c < fields.size(); ++c) table.columns.emplace_back(fields[c]);
      continue;
    }
    if (fields.size() != table.columns.size() + 1) {
      fail(ErrorCode::kParse, where + ": expected " + std::to_string(table.columns.size() + 1) +
                                  " fields, found " + std::to_string(fields.size()));
    }
    table.ids.emplace_back(fields[0]);
    std::vector<double> row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        fail(ErrorCode::kParse, where + ": cannot parse \"" + std::string(f) + "\"");
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.columns.empty()) fail(ErrorCode::kParse, "empty CSV");
  return table;
}

}  // namespace cutremain
