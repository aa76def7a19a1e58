/* Copyright 2026 The commentclf Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <random>

#include "cclf/error.hpp"
#include "cclf/metrics.hpp"
#include "printed_results.hpp"

using namespace cclf;
using cclf::testing::kPrintedResults;

TEST_CASE("confusion counts") {
  std::vector<int> a{1, 0}, b{1, 0};
  auto c = confusion_counts(a, b);
  CHECK(c.tp == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 0);
  CHECK(c.fn == 0);
  std::vector<int> p{1, 1}, y{0, 0};
  CHECK(confusion_counts(p, y).fp == 2);
  std::vector<int> shorter{1};
  CHECK_THROWS_AS(confusion_counts(shorter, y), ContractError);
}

TEST_CASE("metrics match a brute-force recount") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> p(1000), y(1000);
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = coin(rng);
      y[i] = coin(rng);
    }
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] && y[i]) tp += 1;
      if (p[i] && !y[i]) fp += 1;
      if (!p[i] && y[i]) fn += 1;
    }
    auto c = confusion_counts(p, y);
    CHECK(c.total() == 1000);
    auto m = category_metrics(c);
    CHECK(std::abs(m.precision - tp / (tp + fp)) < 1e-12);
    CHECK(std::abs(m.recall - tp / (tp + fn)) < 1e-12);
    CHECK(std::abs(m.f1 - tp / (tp + (fp + fn) / 2)) < 1e-12);
  }
}

TEST_CASE("category metric conventions") {
  auto all = category_metrics({1, 0, 0, 0});
  CHECK(all.precision == 1.0);
  CHECK(all.recall == 1.0);
  CHECK(all.f1 == 1.0);
  auto none = category_metrics({0, 0, 0, 5});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(f1_from(0.93, 0.67) == doctest::Approx(0.779).epsilon(1e-3));
  CHECK(std::round(f1_from(0.93, 0.67) * 100) / 100 == 0.78);
}

TEST_CASE("printed precision and recall reproduce printed F1") {
  for (const auto& row : kPrintedResults) {
    CAPTURE(row.category);
    CHECK(std::abs(f1_from(row.baseline_p, row.baseline_r) - row.baseline_f1) <= 0.01);
    CHECK(std::abs(f1_from(row.proposed_p, row.proposed_r) - row.proposed_f1) <= 0.01);
  }
}

TEST_CASE("aggregate means") {
  std::vector<Metrics> proposed, baseline;
  for (const auto& row : kPrintedResults) {
    proposed.push_back({row.proposed_p, row.proposed_r, row.proposed_f1});
    baseline.push_back({row.baseline_p, row.baseline_r, row.baseline_f1});
  }
  CHECK(std::abs(aggregate_metrics(proposed).f1 - 0.74) <= 0.01);
  CHECK(std::abs(aggregate_metrics(baseline).f1 - 0.71) <= 0.01);
  CHECK(aggregate_metrics(proposed).f1 == doctest::Approx(0.7384).epsilon(1e-3));

  std::vector<Metrics> one{{0.2, 0.3, 0.4}};
  auto m = aggregate_metrics(one);
  CHECK(m.precision == 0.2);
  CHECK(m.recall == 0.3);
  CHECK(m.f1 == 0.4);

  auto shuffled = proposed;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CHECK(aggregate_metrics(shuffled).f1 == doctest::Approx(aggregate_metrics(proposed).f1).epsilon(1e-15));
  CHECK_THROWS_AS(aggregate_metrics(std::vector<Metrics>{}), ContractError);
}

TEST_CASE("submission score") {
  CHECK(submission_score(0.8, 0.0, 10.0).score == 0.75 * 0.8 + 0.25);
  CHECK(submission_score(0.8, 10.0, 10.0).score == 0.75 * 0.8);
  auto over = submission_score(0.8, 12.0, 10.0);
  CHECK(over.clamped);
  CHECK(over.score == 0.75 * 0.8);
  CHECK_FALSE(submission_score(0.8, 5.0, 10.0).clamped);
  CHECK_THROWS_AS(submission_score(0.8, 1.0, 0.0), ContractError);
  const double term = (0.703 - 0.75 * 0.7384) / 0.25;
  CHECK(std::abs(term - 0.597) <= 0.005);
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK_THROWS_AS(median({}), ContractError);
}

TEST_CASE("report csv round trips at full precision") {
  std::vector<ReportRow> rows{{"java", "summary", {1.0 / 3.0, 0.1, 2.0 / 7.0}, 0.012345678901},
                              {"python", "usage", {0.5, 0.25, 1.0 / 3.0}, 0.0}};
  auto report = make_report(rows, 5.0);
  auto back = parse_report_csv(report_csv(report));
  REQUIRE(back.size() == 2);
  CHECK(back[0].metrics.precision == rows[0].metrics.precision);
  CHECK(back[0].metrics.f1 == rows[0].metrics.f1);
  CHECK(back[0].runtime_s == rows[0].runtime_s);
  CHECK(back[1].category == "usage");
  CHECK(report.measured_avg_runtime == doctest::Approx(0.0061728).epsilon(1e-4));

  auto table = report_table(report);
  CHECK(table.find("Summary") != std::string::npos);
  CHECK(table.find("0.33") != std::string::npos);
  CHECK(table.find("Overall") != std::string::npos);
  CHECK(table.find("submission_score=") != std::string::npos);
  CHECK_THROWS_AS(parse_report_csv("a,b\n"), SchemaError);
}
