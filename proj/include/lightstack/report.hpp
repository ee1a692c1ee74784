// Copyright 2026 The Lightstack Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Study report rendering: an aligned text table with percentages at two
// decimals, and a CSV with one row per (train, test, metric) cell.

#ifndef LIGHTSTACK_REPORT_HPP_
#define LIGHTSTACK_REPORT_HPP_

#include <string>

#include "lightstack/study.hpp"

namespace lightstack {

// "53.25" for 0.5325.
std::string format_percent(double fraction);

// Columns Train, Test, Precision, Recall, F1-score, AP. AP reads
// "25.74 ± 2.75" when the report has more than one trial.
std::string render_text(const StudyReport& report);

// Header:
//   study_id,train,test,metric,value,trials,<provenance keys...>
// `metric` is precision, recall, f1, ap or ap_std; values are fractions in
// shortest round-trip form. Provenance values repeat on every row.
std::string render_csv(const StudyReport& report);

}  // namespace lightstack

#endif  // LIGHTSTACK_REPORT_HPP_
