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

#include "cclf/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "cclf/csv.hpp"
#include "cclf/error.hpp"

namespace cclf {
namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string full_precision(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string fixed(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double parse_double(const std::string& s, std::size_t row) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ValueError("report row " + std::to_string(row) + ": '" + s +
                     "' is not a number");
  }
  return v;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string capitalized(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

ConfusionCounts confusion_counts(std::span<const int> predictions,
                                 std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ContractError("confusion_counts: " + std::to_string(predictions.size()) +
                        " predictions for " + std::to_string(labels.size()) +
                        " labels");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool y = labels[i] == 1;
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1_from(double precision, double recall) {
  const double den = precision + recall;
  return den == 0.0 ? 0.0 : 2.0 * precision * recall / den;
}

Metrics category_metrics(const ConfusionCounts& c) {
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f1 = f1_from(m.precision, m.recall);
  return m;
}

Metrics aggregate_metrics(std::span<const Metrics> rows) {
  if (rows.empty()) throw ContractError("aggregate_metrics: no rows");
  Metrics m;
  for (const auto& r : rows) {
    m.precision += r.precision;
    m.recall += r.recall;
    m.f1 += r.f1;
  }
  const double n = static_cast<double>(rows.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

SubmissionScore submission_score(double avg_f1, double measured_avg_runtime,
                                 double max_avg_runtime) {
  if (!(max_avg_runtime > 0.0)) {
    throw ContractError("submission_score: max_avg_runtime must be positive");
  }
  SubmissionScore s;
  double term = (max_avg_runtime - measured_avg_runtime) / max_avg_runtime;
  if (term < 0.0) {
    term = 0.0;
    s.clamped = true;
  }
  s.runtime_term = std::min(term, 1.0);
  s.score = 0.75 * avg_f1 + 0.25 * s.runtime_term;
  return s;
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw ContractError("median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

Report make_report(std::vector<ReportRow> rows, double max_avg_runtime) {
  Report r;
  r.rows = std::move(rows);
  r.max_avg_runtime = max_avg_runtime;
  std::vector<Metrics> ms;
  double runtime = 0.0;
  for (const auto& row : r.rows) {
    ms.push_back(row.metrics);
    runtime += row.runtime_s;
  }
  r.average = aggregate_metrics(ms);
  r.measured_avg_runtime = runtime / static_cast<double>(r.rows.size());
  r.submission = submission_score(r.average.f1, r.measured_avg_runtime, max_avg_runtime);
  return r;
}

std::string report_csv(const Report& report) {
  std::string out = "language,category,precision,recall,f1,runtime_s\n";
  for (const auto& row : report.rows) {
    out += csv::format_row({row.language, row.category,
                            full_precision(row.metrics.precision),
                            full_precision(row.metrics.recall),
                            full_precision(row.metrics.f1),
                            full_precision(row.runtime_s)});
    out += '\n';
  }
  return out;
}

std::string score_line(const Report& report) {
  std::string line = "submission_score=" + fixed(report.submission.score, 4) +
                     " avg_f1=" + fixed(report.average.f1, 4) +
                     " measured_avg_runtime=" + fixed(report.measured_avg_runtime, 4) +
                     " max_avg_runtime=" + fixed(report.max_avg_runtime, 4);
  if (report.submission.clamped) line += " (warning: runtime over budget, term clamped to 0)";
  return line;
}

std::string report_table(const Report& report) {
  std::size_t lang_w = 8, cat_w = 8;
  for (const auto& row : report.rows) {
    lang_w = std::max(lang_w, row.language.size());
    cat_w = std::max(cat_w, row.category.size());
  }
  auto line = [&](const std::string& l, const std::string& c, const std::string& p,
                  const std::string& r, const std::string& f, const std::string& t) {
    return pad(l, lang_w + 2) + pad(c, cat_w + 2) + pad(p, 7) + pad(r, 7) + pad(f, 7) + t +
           "\n";
  };
  std::string out = line("Language", "Category", "P_c", "R_c", "F1_c", "runtime_s");
  for (const auto& row : report.rows) {
    out += line(capitalized(row.language), capitalized(row.category),
                fixed(row.metrics.precision, 2), fixed(row.metrics.recall, 2),
                fixed(row.metrics.f1, 2), fixed(row.runtime_s, 2));
  }
  out += line("Overall", "", fixed(report.average.precision, 2),
              fixed(report.average.recall, 2), fixed(report.average.f1, 2),
              fixed(report.measured_avg_runtime, 2));
  out += score_line(report) + "\n";
  return out;
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  auto rows = csv::parse(text);
  const csv::Row header{"language", "category", "precision", "recall", "f1", "runtime_s"};
  if (rows.empty() || rows[0] != header) throw SchemaError("report header mismatch");
  std::vector<ReportRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != header.size()) {
      throw ValueError("report row " + std::to_string(i) + ": wrong field count");
    }
    out.push_back({r[0], r[1],
                   {parse_double(r[2], i), parse_double(r[3], i), parse_double(r[4], i)},
                   parse_double(r[5], i)});
  }
  return out;
}

}  // namespace cclf
