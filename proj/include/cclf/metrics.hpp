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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cclf {

// Label 1 is the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::uint64_t total() const { return tp + fp + fn + tn; }
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Throws ContractError on length mismatch.
ConfusionCounts confusion_counts(std::span<const int> predictions,
                                 std::span<const int> labels);

// A rate whose denominator is zero is reported as 0.
Metrics category_metrics(const ConfusionCounts& c);

// F1 from already-computed precision and recall.
double f1_from(double precision, double recall);

// Unweighted means. Throws ContractError on empty input.
Metrics aggregate_metrics(std::span<const Metrics> rows);

struct SubmissionScore {
  double score = 0.0;
  double runtime_term = 0.0;
  bool clamped = false;  // measured runtime exceeded the budget
};

// 0.75 * avg_f1 + 0.25 * (max - measured) / max, runtime term clamped to
// [0, 1]. Throws ContractError unless max_avg_runtime > 0.
SubmissionScore submission_score(double avg_f1, double measured_avg_runtime,
                                 double max_avg_runtime);

// Median of the samples (mean of the middle two for even counts).
double median(std::vector<double> samples);

struct ReportRow {
  std::string language;
  std::string category;
  Metrics metrics;
  double runtime_s = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  Metrics average;
  double measured_avg_runtime = 0.0;
  double max_avg_runtime = 0.0;
  SubmissionScore submission;
};

Report make_report(std::vector<ReportRow> rows, double max_avg_runtime);

// language,category,precision,recall,f1,runtime_s with round-trip precision.
std::string report_csv(const Report& report);

// Fixed-width table with two decimals, an Overall row and the score line.
std::string report_table(const Report& report);

std::string score_line(const Report& report);

// Parses report_csv output. Throws SchemaError or ValueError.
std::vector<ReportRow> parse_report_csv(const std::string& text);

}  // namespace cclf
