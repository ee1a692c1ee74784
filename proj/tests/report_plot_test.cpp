// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "lightstack/error.hpp"
#include "lightstack/plot.hpp"
#include "lightstack/report.hpp"

namespace lightstack {
namespace {

StudyReport two_row_report(std::size_t trials) {
  StudyReport r;
  r.study_id = 2;
  r.trials = trials;
  StudyRow a;
  a.train = "random_modalities";
  a.test = "C";
  a.metrics = {0.5, 0.25, 1.0 / 3.0, 0.123456};
  if (trials > 1) a.ap_std = 0.01;
  StudyRow b;
  b.train = "quarter_regions";
  b.test = "UDLR";
  b.metrics = {1.0, 1.0, 1.0, 1.0};
  if (trials > 1) b.ap_std = 0.0;
  r.rows = {a, b};
  r.provenance = {{"seed", "7"}, {"ratios", "0.7,0.15,0.15"}};
  return r;
}

TEST(ReportTest, FormatPercent) {
  EXPECT_EQ(format_percent(0.5325), "53.25");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(1.0 / 3.0), "33.33");
}

TEST(ReportTest, TextTable) {
  EXPECT_EQ(render_text(two_row_report(1)),
            "Study 2\n"
            "Train              Test  Precision  Recall  F1-score      AP\n"
            "------------------------------------------------------------\n"
            "random_modalities  C         50.00   25.00     33.33   12.35\n"
            "quarter_regions    UDLR     100.00  100.00    100.00  100.00\n");
  const std::string with_std = render_text(two_row_report(5));
  EXPECT_EQ(with_std.substr(0, with_std.find('\n')), "Study 2 (N=5)");
  EXPECT_NE(with_std.find("12.35 ± 1.00\n"), std::string::npos) << with_std;
  EXPECT_NE(with_std.find("100.00 ± 0.00\n"), std::string::npos) << with_std;
}

TEST(ReportTest, CsvLayout) {
  const std::string csv = render_csv(two_row_report(3));
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 11u);
  EXPECT_EQ(lines[0], "study_id,train,test,metric,value,trials,seed,ratios");
  EXPECT_EQ(lines[1], "2,random_modalities,C,precision,0.5,3,7,\"0.7,0.15,0.15\"");
  EXPECT_EQ(lines[4], "2,random_modalities,C,ap,0.123456,3,7,\"0.7,0.15,0.15\"");
  EXPECT_EQ(lines[5], "2,random_modalities,C,ap_std,0.01,3,7,\"0.7,0.15,0.15\"");
  EXPECT_EQ(lines[10], "2,quarter_regions,UDLR,ap_std,0,3,7,\"0.7,0.15,0.15\"");
}

TEST(ScoredFileTest, RoundTrip) {
  const ScoredData data{5, {{0.9, true}, {0.1 + 0.2, false}, {1.0, true}}};
  std::ostringstream out;
  save_scored(data, out);
  EXPECT_EQ(out.str(),
            "# lightstack-scored v1\n# ground_truth=5\nconfidence,is_tp\n"
            "0.9,1\n0.30000000000000004,0\n1,1\n");
  std::istringstream in(out.str());
  EXPECT_EQ(load_scored(in), data);
}

TEST(ScoredFileTest, Errors) {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return load_scored(in, "s.csv");
  };
  EXPECT_THROW(load("confidence,is_tp\n0.5,1\n"), ParseError);
  EXPECT_THROW(load("# ground_truth=x\nconfidence,is_tp\n"), ParseError);
  EXPECT_THROW(load("# ground_truth=1\nconfidence,tp\n"), ParseError);
  EXPECT_THROW(load("# ground_truth=1\nconfidence,is_tp\n0.5,2\n"), ParseError);
  EXPECT_THROW(load("# ground_truth=1\nconfidence,is_tp\n1.5,1\n"), ParseError);
  EXPECT_THROW(load("# ground_truth=1\nconfidence,is_tp\n0.5,1\n0.4,1\n"),
               Error);
  EXPECT_NO_THROW(load("# ground_truth=0\nconfidence,is_tp\n"));
}

TEST(PlotTest, PerfectDetectorIsFlatAtOne) {
  const ScoredData data{3, {{0.95, true}, {0.97, true}, {0.99, true}}};
  const std::vector<double> grid = default_threshold_grid();
  const PRCurve curve = make_curve("perfect", data, grid);
  ASSERT_EQ(curve.points.size(), 9u);
  for (const PRPoint& p : curve.points) {
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 1.0);
  }
  const std::vector<PRCurve> curves = {curve};
  const std::string csv = render_pr_csv(curves);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "label,threshold,precision,recall");
  EXPECT_NE(csv.find("\nperfect,0.1,1,1\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nperfect,0.9,1,1\n"), std::string::npos) << csv;
}

TEST(PlotTest, TwoThresholdFixture) {
  const ScoredData data{2, {{0.9, true}, {0.8, false}, {0.7, true}}};
  const std::vector<double> grid = {0.75, 0.85};
  const std::vector<PRCurve> curves = {make_curve("a", data, grid)};
  EXPECT_EQ(render_pr_csv(curves),
            "label,threshold,precision,recall\n"
            "a,0.75,0.5,0.5\n"
            "a,0.85,1,0.5\n");
  EXPECT_THROW(make_curve("empty", ScoredData{}, grid), ValidationError);
}

TEST(PlotTest, SvgStructure) {
  const ScoredData data{2, {{0.9, true}, {0.8, false}, {0.7, true}}};
  const std::vector<double> grid = default_threshold_grid();
  const std::vector<PRCurve> curves = {make_curve("fused <A&B>", data, grid),
                                       make_curve("plain", data, grid)};
  const std::string svg = render_pr_svg(curves);
  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t at = svg.find(needle); at != std::string::npos;
         at = svg.find(needle, at + 1)) {
      ++n;
    }
    return n;
  };
  EXPECT_EQ(count("<svg "), 1u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_EQ(count("<g class=\"curve\""), 2u);
  EXPECT_EQ(count("<polyline"), 2u);
  EXPECT_EQ(count("<circle"), 18u);
  EXPECT_EQ(count("<title>"), count("</title>"));
  EXPECT_NE(svg.find("fused &lt;A&amp;B&gt;"), std::string::npos);
  EXPECT_EQ(svg.find("<A&B>"), std::string::npos);
}

}  // namespace
}  // namespace lightstack
