// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "lightstack/plot.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include "lightstack/error.hpp"
#include "lightstack/io.hpp"

namespace lightstack {

void save_scored(const ScoredData& data, std::ostream& out) {
  out << "# lightstack-scored v1\n";
  out << "# ground_truth=" << data.ground_truth << "\n";
  out << "confidence,is_tp\n";
  for (const ScoredDetection& s : data.scored) {
    out << format_double(s.confidence) << "," << (s.is_tp ? 1 : 0) << "\n";
  }
}

ScoredData load_scored(std::istream& in, const std::string& source) {
  ScoredData out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool have_gt = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      const std::size_t start = body.find_first_not_of(' ');
      const std::string_view kv =
          start == std::string_view::npos ? "" : body.substr(start);
      if (kv.starts_with("ground_truth=")) {
        const std::string value(kv.substr(13));
        try {
          std::size_t used = 0;
          out.ground_truth = std::stoull(value, &used);
          if (used != value.size() || value.front() == '-') {
            throw std::invalid_argument(value);
          }
        } catch (const std::exception&) {
          throw ParseError(source, line_no, "ground_truth",
                           "not an unsigned integer");
        }
        have_gt = true;
      }
      continue;
    }
    if (!have_header) {
      if (line != "confidence,is_tp") {
        throw ParseError(source, line_no, "",
                         "expected header 'confidence,is_tp'");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_fields(line, ',');
    if (fields.size() != 2) {
      throw ParseError(source, line_no, "", "expected 'confidence,is_tp'");
    }
    ScoredDetection s;
    if (!parse_double(fields[0], s.confidence) || !(s.confidence >= 0.0) ||
        !(s.confidence <= 1.0)) {
      throw ParseError(source, line_no, "confidence",
                       "expected a number in [0, 1]");
    }
    if (fields[1] == "1") {
      s.is_tp = true;
    } else if (fields[1] != "0") {
      throw ParseError(source, line_no, "is_tp", "expected 0 or 1");
    }
    out.scored.push_back(s);
  }
  if (!have_gt) {
    throw ParseError(source, line_no, "ground_truth", "missing header line");
  }
  if (!have_header) {
    throw ParseError(source, line_no, "", "missing 'confidence,is_tp' header");
  }
  std::size_t tp = 0;
  for (const ScoredDetection& s : out.scored) tp += s.is_tp ? 1 : 0;
  if (tp > out.ground_truth) {
    throw ValidationError(source + ": " + std::to_string(tp) +
                          " true positives exceed ground_truth=" +
                          std::to_string(out.ground_truth));
  }
  return out;
}

PRCurve make_curve(std::string label, const ScoredData& data,
                   std::span<const double> thresholds) {
  if (data.scored.empty() && data.ground_truth == 0) {
    throw ValidationError("no scored detections for curve '" + label + "'");
  }
  return {std::move(label), pr_curve(data.scored, data.ground_truth, thresholds)};
}

std::string render_pr_csv(std::span<const PRCurve> curves) {
  std::string out = "label,threshold,precision,recall\n";
  for (const PRCurve& c : curves) {
    for (const PRPoint& p : c.points) {
      out += c.label + "," + format_double(p.threshold) + "," +
             format_double(p.precision) + "," + format_double(p.recall) + "\n";
    }
  }
  return out;
}

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double px(double recall) {
  return kLeft + recall * (kWidth - kLeft - kRight);
}

double py(double precision) {
  return kHeight - kBottom - precision * (kHeight - kTop - kBottom);
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_pr_svg(std::span<const PRCurve> curves) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) +
         " " + num(kHeight) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" fill=\"white\"/>\n";

  // Axes with ticks every 0.2.
  out += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
         num(px(1)) + "\" y2=\"" + num(py(0)) + "\"/>\n";
  out += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
         num(px(0)) + "\" y2=\"" + num(py(1)) + "\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    out += "<line x1=\"" + num(px(v)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
           num(px(v)) + "\" y2=\"" + num(py(0) + 5) + "\"/>\n";
    out += "<line x1=\"" + num(px(0) - 5) + "\" y1=\"" + num(py(v)) +
           "\" x2=\"" + num(px(0)) + "\" y2=\"" + num(py(v)) + "\"/>\n";
  }
  out += "</g>\n";
  out += "<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    char tick[8];
    std::snprintf(tick, sizeof(tick), "%.1f", v);
    out += "<text x=\"" + num(px(v)) + "\" y=\"" + num(py(0) + 18) +
           "\" text-anchor=\"middle\">" + tick + "</text>\n";
    out += "<text x=\"" + num(px(0) - 8) + "\" y=\"" + num(py(v) + 4) +
           "\" text-anchor=\"end\">" + tick + "</text>\n";
  }
  out += "<text x=\"" + num(px(0.5)) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">Recall</text>\n";
  out += "<text x=\"15\" y=\"" + num(py(0.5)) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " +
         num(py(0.5)) + ")\">Precision</text>\n";
  out += "</g>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const PRCurve& c = curves[i];
    const char* color = kColors[i % std::size(kColors)];
    out += "<g class=\"curve\" data-label=\"" + escape_xml(c.label) + "\">\n";
    std::string pts;
    for (const PRPoint& p : c.points) {
      if (!pts.empty()) pts += " ";
      pts += num(px(p.recall)) + "," + num(py(p.precision));
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    for (const PRPoint& p : c.points) {
      out += "<circle cx=\"" + num(px(p.recall)) + "\" cy=\"" +
             num(py(p.precision)) + "\" r=\"3\" fill=\"" + color +
             "\"><title>t=" + format_double(p.threshold) + "</title></circle>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(i + 1);
    out += "<text x=\"" + num(px(1) - 4) + "\" y=\"" + num(ly) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"" + color + "\">" + escape_xml(c.label) + "</text>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace lightstack
