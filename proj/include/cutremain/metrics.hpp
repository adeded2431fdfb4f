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
#include <string_view>
#include <vector>

namespace cutremain {

// Mann-Whitney AUC: (concordant + tied / 2) / (P * N). Labels are 0 or 1.
// Throws kUndefinedMetric unless both classes are present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct BinaryCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  // Zero when the denominator is zero.
  double precision() const;
  double recall() const;
  double f1() const;

  BinaryCounts& operator+=(const BinaryCounts& other);
};

BinaryCounts count_binary(std::span<const int> predictions, std::span<const int> labels);

// 2PR / (P + R), 0 when P + R = 0.
double f1(std::span<const int> predictions, std::span<const int> labels);

struct MacroF1 {
  std::vector<double> per_class;
  double macro = 0.0;
};

// One-vs-rest F1 per class over class-index vectors, and their mean.
MacroF1 macro_f1(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                 std::size_t num_classes);

// Un-interpolated AP: mean of precision at each positive, ranking by
// descending score with ties kept in input order. Throws kUndefinedMetric
// when there are no positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// N x K scores and binary labels, row-major.
struct PredictionSet {
  std::size_t rows = 0;
  std::size_t classes = 0;
  std::vector<double> scores;
  std::vector<int> labels;
  double threshold = 0.5;

  double score(std::size_t i, std::size_t k) const { return scores[i * classes + k]; }
  int label(std::size_t i, std::size_t k) const { return labels[i * classes + k]; }
  std::vector<double> score_column(std::size_t k) const;
  std::vector<int> label_column(std::size_t k) const;
};

struct MultilabelReport {
  double map = 0.0;
  double cp = 0.0;  // class-averaged precision
  double cr = 0.0;  // class-averaged recall
  double cf1 = 0.0;
  double op = 0.0;  // pooled precision
  double orr = 0.0;  // pooled recall
  double of1 = 0.0;
  std::vector<double> per_class_ap;  // NaN for excluded classes
  std::vector<std::size_t> excluded;  // classes without positives
};

// mAP over classes with at least one positive; CF1 and OF1 at the set's
// threshold over all classes.
MultilabelReport multilabel_suite(const PredictionSet& predictions);

double euclidean_distance(std::span<const double> u, std::span<const double> v);

// 1 - cos(u, v), in [0, 2]. Throws kUndefinedMetric on a zero-norm input.
double cosine_distance(std::span<const double> u, std::span<const double> v);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
};

MeanStd mean_std(std::span<const double> values);

struct FeatureReport {
  MeanStd euclidean;
  MeanStd cosine;
  std::size_t pairs = 0;
};

// Distances between originals[i] and augmented[i], aggregated.
FeatureReport pairwise_feature_report(const std::vector<std::vector<double>>& originals,
                                      const std::vector<std::vector<double>>& augmented);

// CSV with a header "id,<col>,<col>...", one row per sample.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
};

NumericTable parse_numeric_csv(std::string_view text);

}  // namespace cutremain
