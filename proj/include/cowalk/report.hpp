#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cowalk/exact_oracle.hpp"
#include "cowalk/finance.hpp"
#include "cowalk/mc_stats.hpp"

namespace cowalk {

enum class OutputFormat { json, csv, table };

OutputFormat output_format_from_string(std::string_view name);

struct ReportSet {
  std::vector<ExactReport> exact;
  std::vector<TestReport> tests;
  std::vector<TrendReport> trends;

  bool empty() const noexcept { return exact.empty() && tests.empty() && trends.empty(); }
  /// Every exact report matched its expectation and every test passed.
  bool all_as_expected() const noexcept;
};

/// Schema (json): {"schema": "cowalk.report/1", "summary": {...},
/// "exact_reports": [...], "test_reports": [...], "trend_reports": [...]}.
/// All sections are always present. csv: one block per non-empty section,
/// each with its own header row, separated by a blank line. table: aligned
/// plain text. Output depends only on the contents of the set.
std::string emit_report(const ReportSet& set, OutputFormat format);

nlohmann::json report_set_to_json(const ReportSet& set);

}  // namespace cowalk
