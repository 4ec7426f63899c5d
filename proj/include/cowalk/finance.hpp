#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cowalk/decomposition.hpp"
#include "json.hpp"

namespace cowalk {

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Strictly increasing timestamps and positive prices of equal length >= 2.
struct PriceSeries {
  std::string name;
  std::vector<std::string> timestamps;
  std::vector<double> prices;

  std::size_t size() const noexcept { return prices.size(); }
};

/// Column selection for parse_csv. Empty names pick columns 0, 1, 2.
struct CsvColumns {
  std::string timestamp;
  std::string first;
  std::string second;
};

/// RFC-4180 rows (quoted fields, doubled quotes, CRLF or LF).
std::vector<std::vector<std::string>> read_csv_rows(std::string_view text);

/// Header row, then one row per timestamp. Rows missing either price are
/// dropped from both series. Row numbers in errors are 1-based file lines
/// of the data (header is row 1).
std::pair<PriceSeries, PriceSeries> parse_csv(std::string_view text, const CsvColumns& columns = {});

/// One series from a two-column file (timestamp, price by default).
PriceSeries parse_series_csv(std::string_view text, const std::string& timestamp_column = {},
                             const std::string& price_column = {});

/// Keeps timestamps present in both series, in order.
std::pair<PriceSeries, PriceSeries> inner_join(const PriceSeries& a, const PriceSeries& b);

/// sign_n = +1 iff price_n > price_{n-1}; ties and falls give -1.
std::vector<int> to_signs(const PriceSeries& series);

struct TrendSummary {
  std::size_t first_step = 0;  // 1-based, inclusive
  std::size_t last_step = 0;   // 1-based, inclusive
  int X_final = 0;
  int Y_final = 0;
  std::size_t T_final = 0;
  std::size_t S_final = 0;
  /// Per step of the range: contributions accumulated from first_step.
  std::vector<int> X_series;
  std::vector<int> Y_series;
  std::vector<std::size_t> T_series;
  std::vector<std::size_t> S_series;
  double co_movement_ratio = 0.0;
  int market_trend_sign = 0;      // sign of X_final, 0 when flat
  int relative_strength_sign = 0;  // sign of Y_final, 0 when flat
  /// "rising co-trend", "falling co-trend", "divergence" or "mixed".
  std::string regime;

  std::size_t length() const noexcept { return last_step - first_step + 1; }
};

struct TrendReport {
  std::string first_name;
  std::string second_name;
  std::size_t steps = 0;
  std::string first_timestamp;
  std::string last_timestamp;
  TrendSummary full;
  TrendSummary window;
};

/// window = 0 or window > steps uses the full range as the window.
TrendReport analyze(const PriceSeries& s1, const PriceSeries& s2, std::size_t window = 0);

nlohmann::json trend_report_to_json(const TrendReport& report);

/// Joint path of the two sign sequences (for the decomposition CSV).
JointPath price_path(const PriceSeries& s1, const PriceSeries& s2);

/// Two log-price series driven by correlated Gaussian increments
/// (unit variance, correlation rho), `steps` intervals long.
std::pair<PriceSeries, PriceSeries> synthetic_gaussian_series(double rho, std::size_t steps, std::uint64_t seed);

std::string series_pair_csv(const PriceSeries& s1, const PriceSeries& s2);

}  // namespace cowalk
