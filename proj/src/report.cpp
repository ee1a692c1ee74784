// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/report.hpp"

#include <cstdio>
#include <vector>

#include "lightstack/io.hpp"

namespace lightstack {

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

namespace {

// Display width of UTF-8 text: counts code points.
std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string pad(const std::string& s, std::size_t width, bool right) {
  const std::string fill(width - display_width(s), ' ');
  return right ? fill + s : s + fill;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_text(const StudyReport& report) {
  const bool with_std = report.trials > 1;
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"Train", "Test", "Precision", "Recall", "F1-score", "AP"});
  for (const StudyRow& row : report.rows) {
    std::string ap = format_percent(row.metrics.ap);
    if (with_std && row.ap_std) ap += " ± " + format_percent(*row.ap_std);
    cells.push_back({row.train, row.test, format_percent(row.metrics.precision),
                     format_percent(row.metrics.recall),
                     format_percent(row.metrics.f1), ap});
  }

  std::vector<std::size_t> widths(cells[0].size(), 0);
  for (const auto& r : cells) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      widths[c] = std::max(widths[c], display_width(r[c]));
    }
  }

  std::string out = "Study " + std::to_string(report.study_id);
  if (with_std) out += " (N=" + std::to_string(report.trials) + ")";
  out += "\n";
  auto emit = [&](const std::vector<std::string>& r) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) line += "  ";
      line += pad(r[c], widths[c], c >= 2);
    }
    out += line + "\n";
  };
  emit(cells[0]);
  std::size_t total = 2 * (widths.size() - 1);
  for (std::size_t w : widths) total += w;
  out += std::string(total, '-') + "\n";
  for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
  return out;
}

std::string render_csv(const StudyReport& report) {
  std::string out = "study_id,train,test,metric,value,trials";
  for (const auto& [key, value] : report.provenance) {
    (void)value;
    out += "," + csv_field(key);
  }
  out += "\n";
  std::string tail;
  for (const auto& [key, value] : report.provenance) {
    (void)key;
    tail += "," + csv_field(value);
  }
  const std::string trials = std::to_string(report.trials);
  for (const StudyRow& row : report.rows) {
    const std::string head = std::to_string(report.study_id) + "," +
                             csv_field(row.train) + "," + csv_field(row.test);
    auto cell = [&](const char* metric, double v) {
      out += head + "," + metric + "," + format_double(v) + "," + trials +
             tail + "\n";
    };
    cell("precision", row.metrics.precision);
    cell("recall", row.metrics.recall);
    cell("f1", row.metrics.f1);
    cell("ap", row.metrics.ap);
    if (row.ap_std) cell("ap_std", *row.ap_std);
  }
  return out;
}

}  // namespace lightstack
