#include "cowalk/report.hpp"

#include <algorithm>
#include <sstream>

namespace cowalk {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string number(double v) { return nlohmann::json(v).dump(); }

std::string optional_number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::string join_indices(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::string expectation_name(Expectation e) { return e == Expectation::holds ? "holds" : "fails"; }

std::string verdict(const ExactReport& r) {
  if (r.expectation == Expectation::fails) return r.pass ? "UNEXPECTED PASS" : "fails as expected";
  return r.pass ? "pass" : "FAIL";
}

std::string verdict(const TestReport& r) {
  if (r.expectation == Expectation::fails) return r.pass ? "UNEXPECTED PASS" : "rejects as expected";
  return r.pass ? "pass" : "FAIL";
}

using Grid = std::vector<std::vector<std::string>>;

void write_table(std::ostringstream& os, const std::string& title, const Grid& grid) {
  os << title << '\n';
  std::vector<std::size_t> width(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : grid) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << line << '\n';
  }
}

void write_csv(std::ostringstream& os, const Grid& grid) {
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << csv_field(row[c]);
    os << '\n';
  }
}

Grid exact_grid(const std::vector<ExactReport>& reports) {
  Grid g{{"claim", "model", "N", "n_indices", "m_indices", "lhs", "rhs", "pass", "expectation", "identities",
          "witnesses", "verdict"}};
  for (const auto& r : reports) {
    g.push_back({r.claim, r.model, std::to_string(r.horizon), join_indices(r.n_indices), join_indices(r.m_indices),
                 to_string(r.lhs), to_string(r.rhs), r.pass ? "true" : "false", expectation_name(r.expectation),
                 std::to_string(r.identities), std::to_string(r.witnesses.size()), verdict(r)});
  }
  return g;
}

Grid test_grid(const std::vector<TestReport>& reports) {
  Grid g{{"test", "model", "sample_size", "statistic", "df", "p_value", "estimate", "standard_error", "target",
          "alternative", "significance", "verdict"}};
  for (const auto& r : reports) {
    g.push_back({r.name, r.model, std::to_string(r.sample_size), number(r.statistic),
                 std::to_string(r.degrees_of_freedom), number(r.p_value), optional_number(r.estimate),
                 optional_number(r.standard_error), optional_number(r.target), r.alternative, number(r.significance),
                 verdict(r)});
  }
  return g;
}

Grid trend_grid(const std::vector<TrendReport>& reports) {
  Grid g{{"first", "second", "range", "steps", "X", "Y", "T", "S", "co_movement_ratio", "trend_sign",
          "relative_sign", "regime"}};
  for (const auto& r : reports) {
    for (const auto* s : {&r.full, &r.window}) {
      g.push_back({r.first_name, r.second_name, s == &r.full ? "full" : "window",
                   std::to_string(s->first_step) + "-" + std::to_string(s->last_step), std::to_string(s->X_final),
                   std::to_string(s->Y_final), std::to_string(s->T_final), std::to_string(s->S_final),
                   number(s->co_movement_ratio), std::to_string(s->market_trend_sign),
                   std::to_string(s->relative_strength_sign), s->regime});
    }
  }
  return g;
}

}  // namespace

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  if (name == "table") return OutputFormat::table;
  throw std::invalid_argument("unknown format '" + std::string(name) + "' (expected json, csv or table)");
}

bool ReportSet::all_as_expected() const noexcept {
  return std::all_of(exact.begin(), exact.end(), [](const ExactReport& r) { return r.as_expected(); }) &&
         std::all_of(tests.begin(), tests.end(), [](const TestReport& r) { return r.as_expected(); });
}

nlohmann::json report_set_to_json(const ReportSet& set) {
  nlohmann::json exact = nlohmann::json::array();
  for (const auto& r : set.exact) exact.push_back(exact_report_to_json(r));
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& r : set.tests) tests.push_back(test_report_to_json(r));
  nlohmann::json trends = nlohmann::json::array();
  for (const auto& r : set.trends) trends.push_back(trend_report_to_json(r));
  const auto unexpected = std::count_if(set.exact.begin(), set.exact.end(),
                                        [](const ExactReport& r) { return !r.as_expected(); });
  const auto failed = std::count_if(set.tests.begin(), set.tests.end(), [](const TestReport& r) { return !r.as_expected(); });
  return nlohmann::json{
      {"schema", "cowalk.report/1"},
      {"summary",
       {{"exact_reports", set.exact.size()},
        {"test_reports", set.tests.size()},
        {"trend_reports", set.trends.size()},
        {"unexpected_exact_results", unexpected},
        {"unexpected_test_results", failed},
        {"all_as_expected", set.all_as_expected()}}},
      {"exact_reports", std::move(exact)},
      {"test_reports", std::move(tests)},
      {"trend_reports", std::move(trends)},
  };
}

std::string emit_report(const ReportSet& set, OutputFormat format) {
  std::ostringstream os;
  switch (format) {
    case OutputFormat::json:
      os << report_set_to_json(set).dump(2) << '\n';
      break;
    case OutputFormat::csv: {
      bool first = true;
      auto block = [&](const Grid& g, bool present) {
        if (!present) return;
        if (!first) os << '\n';
        first = false;
        write_csv(os, g);
      };
      block(exact_grid(set.exact), !set.exact.empty());
      block(test_grid(set.tests), !set.tests.empty());
      block(trend_grid(set.trends), !set.trends.empty());
      break;
    }
    case OutputFormat::table: {
      if (set.empty()) {
        os << "(no results)\n";
        break;
      }
      bool first = true;
      auto block = [&](const std::string& title, const Grid& g, bool present) {
        if (!present) return;
        if (!first) os << '\n';
        first = false;
        write_table(os, title, g);
      };
      block("Exact checks", exact_grid(set.exact), !set.exact.empty());
      block("Statistical tests", test_grid(set.tests), !set.tests.empty());
      block("Trend reports", trend_grid(set.trends), !set.trends.empty());
      for (const auto& r : set.exact) {
        if (r.witnesses.empty()) continue;
        os << "\nWitnesses for " << r.claim << " (" << r.model << ")\n";
        for (const auto& w : r.witnesses) {
          os << "  " << w.description << ": " << to_string(w.lhs) << " vs " << to_string(w.rhs) << '\n';
        }
      }
      break;
    }
  }
  return os.str();
}

}  // namespace cowalk
