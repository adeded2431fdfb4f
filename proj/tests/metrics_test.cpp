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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "cutremain/error.hpp"
#include "cutremain/metrics.hpp"

using namespace cutremain;

namespace {

using D = std::vector<double>;
using I = std::vector<int>;

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("auc worked values") {
    CHECK(auc_roc(D{0.9, 0.8, 0.3, 0.2}, I{1, 1, 0, 0}) == 1.0);
    CHECK(auc_roc(D{0.2, 0.3, 0.8, 0.9}, I{1, 1, 0, 0}) == 0.0);
    const D s{0.9, 0.6, 0.4, 0.2};
    const I y{1, 0, 1, 0};
    REQUIRE(oracle::auc_pairs(s, y) == 0.75);
    CHECK(auc_roc(s, y) == 0.75);
    CHECK(auc_roc(D{0.5, 0.5, 0.5}, I{1, 0, 1}) == 0.5);
  }

  TEST_CASE("auc needs both classes") {
    try {
      auc_roc(D{0.1, 0.2}, I{1, 1});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUndefinedMetric);
    }
    CHECK_THROWS_AS(auc_roc(D{0.1}, I{1, 0}), Error);
    CHECK_THROWS_AS(auc_roc(D{0.1, 0.2}, I{1, 2}), Error);
    CHECK_THROWS_AS(auc_roc(D{NAN, 0.2}, I{1, 0}), Error);
  }

  TEST_CASE("auc matches pair enumeration with ties") {
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<int> len(2, 120), level(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = len(gen);
      D s(n);
      I y(n);
      for (int i = 0; i < n; ++i) {
        s[i] = level(gen) / 10.0;
        y[i] = level(gen) < 4 ? 1 : 0;
      }
      y[0] = 1;
      y[1] = 0;
      CHECK(std::abs(auc_roc(s, y) - oracle::auc_pairs(s, y)) <= 1e-12);
    }
  }

  TEST_CASE("auc invariances") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> z;
    D s(50), neg(50), mono(50);
    I y(50);
    for (int i = 0; i < 50; ++i) {
      s[i] = z(gen);
      y[i] = i % 3 == 0 ? 1 : 0;
      neg[i] = -s[i];
      mono[i] = std::exp(3.0 * s[i]) + 1.0;
    }
    CHECK(auc_roc(s, y) + auc_roc(neg, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(auc_roc(s, y) == auc_roc(mono, y));
  }

  TEST_CASE("f1 worked values") {
    CHECK(f1(I{1, 0, 1}, I{1, 0, 1}) == 1.0);
    // TP=1, FP=1, FN=1.
    CHECK(f1(I{1, 1, 0, 0}, I{1, 0, 1, 0}) == 0.5);
    CHECK(f1(I{0, 0, 0}, I{1, 1, 0}) == 0.0);
    const auto c = count_binary(I{1, 1, 0, 0}, I{1, 0, 1, 0});
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 1);
    CHECK(c.tn == 1);
    CHECK_THROWS_AS(f1(I{1}, I{1, 0}), Error);
  }

  TEST_CASE("macro f1") {
    const std::vector<std::size_t> truth{0, 0, 1, 1, 2, 2};
    const auto perfect = macro_f1(truth, truth, 3);
    CHECK(perfect.macro == 1.0);
    const std::vector<std::size_t> pred{0, 1, 1, 1, 2, 0};
    const auto m = macro_f1(pred, truth, 3);
    // class 0: tp1 fp1 fn1 -> 0.5; class 1: tp2 fp1 -> 0.8; class 2: tp1 fn1 -> 2/3.
    CHECK(m.per_class[0] == doctest::Approx(0.5));
    CHECK(m.per_class[1] == doctest::Approx(0.8));
    CHECK(m.per_class[2] == doctest::Approx(2.0 / 3.0));
    CHECK(m.macro == doctest::Approx((0.5 + 0.8 + 2.0 / 3.0) / 3.0));
    CHECK_THROWS_AS(macro_f1(std::vector<std::size_t>{3}, std::vector<std::size_t>{0}, 3), Error);
  }

  TEST_CASE("average precision worked value") {
    const D s{0.9, 0.8, 0.7};
    const I y{1, 0, 1};
    REQUIRE(std::abs(oracle::ap_rank_walk(s, y) - 5.0 / 6.0) < 1e-15);
    CHECK(average_precision(s, y) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(average_precision(s, I{0, 0, 0}), Error);
  }

  TEST_CASE("ap matches rank walk") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u;
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(u(gen) * 150);
      D s(n);
      I y(n);
      for (int i = 0; i < n; ++i) {
        s[i] = std::round(u(gen) * 20) / 20;
        y[i] = u(gen) < 0.3 ? 1 : 0;
      }
      y[0] = 1;
      CHECK(std::abs(average_precision(s, y) - oracle::ap_rank_walk(s, y)) <= 1e-12);
    }
  }

  TEST_CASE("multilabel perfect ranking") {
    PredictionSet p;
    p.rows = 4;
    p.classes = 2;
    p.scores = {0.9, 0.1, 0.2, 0.8, 0.7, 0.6, 0.3, 0.4};
    p.labels = {1, 0, 0, 1, 1, 1, 0, 0};
    const auto r = multilabel_suite(p);
    CHECK(r.map == 1.0);
    CHECK(r.cf1 == 1.0);
    CHECK(r.of1 == 1.0);
    CHECK(r.excluded.empty());
  }

  TEST_CASE("symmetric classes give equal CF1 and OF1") {
    PredictionSet p;
    p.rows = 4;
    p.classes = 2;
    p.scores = {0.9, 0.9, 0.6, 0.6, 0.2, 0.2, 0.1, 0.1};
    p.labels = {1, 1, 0, 0, 1, 1, 0, 0};
    const auto r = multilabel_suite(p);
    CHECK(r.cf1 == doctest::Approx(r.of1).epsilon(1e-15));
  }

  TEST_CASE("classes without positives are excluded from mAP") {
    PredictionSet p;
    p.rows = 3;
    p.classes = 3;
    p.scores = {0.9, 0.1, 0.5, 0.2, 0.8, 0.5, 0.6, 0.3, 0.5};
    p.labels = {1, 0, 0, 0, 1, 0, 1, 0, 0};
    const auto r = multilabel_suite(p);
    CHECK(r.excluded == std::vector<std::size_t>{2});
    CHECK(std::isnan(r.per_class_ap[2]));
    CHECK(r.map == doctest::Approx((1.0 + 1.0) / 2.0));
    CHECK_THROWS_AS(multilabel_suite(PredictionSet{}), Error);
  }

  TEST_CASE("multilabel matches oracles") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u;
    for (int trial = 0; trial < 100; ++trial) {
      PredictionSet p;
      p.rows = 2 + static_cast<std::size_t>(u(gen) * 60);
      p.classes = 2 + static_cast<std::size_t>(u(gen) * 6);
      for (std::size_t i = 0; i < p.rows * p.classes; ++i) {
        p.scores.push_back(u(gen));
        p.labels.push_back(u(gen) < 0.4 ? 1 : 0);
      }
      const auto r = multilabel_suite(p);
      CHECK(std::abs(r.of1 - oracle::of1_pooled(p.scores, p.labels, 0.5)) <= 1e-12);
      CHECK(std::abs(r.cf1 - oracle::cf1_averaged(p.scores, p.labels, p.classes, 0.5)) <= 1e-12);
      CHECK(r.map >= 0.0);
      CHECK(r.map <= 1.0);
    }
  }

  TEST_CASE("distances") {
    const D u{1.5, -2.0, 3.0};
    CHECK(euclidean_distance(u, u) == 0.0);
    CHECK(euclidean_distance(D{0, 0}, D{3, 4}) == 5.0);
    CHECK(cosine_distance(u, u) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(cosine_distance(D{1, 0}, D{0, 1}) == 1.0);
    CHECK(cosine_distance(D{1, 0}, D{1, 1}) == doctest::Approx(1.0 - 1.0 / std::sqrt(2.0)));
    CHECK(cosine_distance(D{1, 2}, D{3, -1}) ==
          doctest::Approx(cosine_distance(D{4, 8}, D{0.3, -0.1})).epsilon(1e-14));
    CHECK_THROWS_AS(euclidean_distance(D{1}, D{1, 2}), Error);
    try {
      cosine_distance(D{0, 0}, D{1, 2});
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUndefinedMetric);
    }
  }

  TEST_CASE("euclidean matches a naive loop") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> z(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
      D a(64), b(64);
      double sum = 0.0;
      for (int i = 0; i < 64; ++i) {
        a[i] = z(gen);
        b[i] = z(gen);
        sum += (a[i] - b[i]) * (a[i] - b[i]);
      }
      CHECK(euclidean_distance(a, b) == doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
    }
  }

  TEST_CASE("feature report") {
    const std::vector<D> orig{{1, 0}, {1, 1}};
    CHECK(pairwise_feature_report(orig, orig).euclidean.mean == 0.0);
    CHECK(pairwise_feature_report(orig, orig).cosine.std == 0.0);
    const std::vector<D> a{{1, 0}, {0, 1}}, b{{4, 0}, {0, 6}};
    const auto r = pairwise_feature_report(a, b);
    CHECK(r.euclidean.mean == 4.0);
    CHECK(r.euclidean.std == 1.0);
    CHECK(r.pairs == 2);
    CHECK(r.cosine.mean == 0.0);
    const auto single = pairwise_feature_report({{1, 2}}, {{2, 1}});
    CHECK(single.euclidean.std == 0.0);
    CHECK_THROWS_AS(pairwise_feature_report(a, {{1, 1}}), Error);
  }

  TEST_CASE("numeric csv") {
    const auto t = parse_numeric_csv("id,a,b\nx,0.5,1\ny,2,-3e-1\n");
    CHECK(t.columns == std::vector<std::string>{"a", "b"});
    CHECK(t.ids == std::vector<std::string>{"x", "y"});
    CHECK(t.rows[1][1] == -0.3);
    CHECK_THROWS_AS(parse_numeric_csv("id,a\nx,1,2\n"), Error);
    CHECK_THROWS_AS(parse_numeric_csv("id,a\nx,abc\n"), Error);
    CHECK_THROWS_AS(parse_numeric_csv(""), Error);
  }
}
