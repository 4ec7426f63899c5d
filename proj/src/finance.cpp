#include "cowalk/finance.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "cowalk/rng.hpp"

namespace cowalk {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Numeric timestamps compare as numbers, anything else lexicographically
// (ISO 8601 dates sort correctly that way).
bool timestamp_less(const std::string& a, const std::string& b) {
  const auto x = parse_number(a);
  const auto y = parse_number(b);
  if (x && y) return *x < *y;
  return a < b;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name, std::size_t fallback,
                         const char* role) {
  if (name.empty()) {
    if (fallback >= header.size()) {
      throw InputError("header has " + std::to_string(header.size()) + " columns; need a " + role + " column");
    }
    return fallback;
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == name) return i;
  }
  throw InputError(std::string("no ") + role + " column named '" + name + "' in the header");
}

struct Row {
  std::size_t line;
  std::string timestamp;
  std::vector<std::optional<double>> values;
};

std::vector<Row> read_table(std::string_view text, const std::string& ts_name,
                            const std::vector<std::pair<std::string, const char*>>& price_names) {
  const auto rows = read_csv_rows(text);
  if (rows.empty()) throw InputError("empty CSV input");
  const auto& header = rows.front();
  const std::size_t ts_col = column_index(header, ts_name, 0, "timestamp");
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < price_names.size(); ++i) {
    cols.push_back(column_index(header, price_names[i].first, i + 1, price_names[i].second));
  }

  std::vector<Row> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    auto field = [&](std::size_t c) -> std::string_view { return c < row.size() ? trim(row[c]) : std::string_view{}; };
    Row parsed{line, std::string(field(ts_col)), {}};
    if (parsed.timestamp.empty()) throw InputError("row " + std::to_string(line) + ": missing timestamp");
    for (std::size_t c : cols) {
      const std::string_view f = field(c);
      if (f.empty() || f == "NA" || f == "NaN" || f == "null") {
        parsed.values.emplace_back();
        continue;
      }
      const auto v = parse_number(f);
      if (!v || !std::isfinite(*v)) {
        throw InputError("row " + std::to_string(line) + ": cannot parse price '" + std::string(f) + "'");
      }
      if (*v <= 0.0) {
        throw InputError("row " + std::to_string(line) + ": price " + std::string(f) + " is not positive");
      }
      parsed.values.emplace_back(*v);
    }
    bool complete = true;
    for (const auto& v : parsed.values) complete = complete && v.has_value();
    if (!complete) continue;
    if (!out.empty() && !timestamp_less(out.back().timestamp, parsed.timestamp)) {
      throw InputError("row " + std::to_string(line) + ": timestamp '" + parsed.timestamp +
                       "' does not follow '" + out.back().timestamp + "' (timestamps must strictly increase)");
    }
    out.push_back(std::move(parsed));
  }
  if (out.size() < 2) {
    throw InputError("need at least 2 usable rows, found " + std::to_string(out.size()));
  }
  return out;
}

std::string column_label(const std::vector<std::string>& header, const std::string& name, std::size_t fallback) {
  if (!name.empty()) return name;
  return fallback < header.size() ? std::string(trim(header[fallback])) : std::string();
}

int sign_of(long long v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

TrendSummary summarize(const std::vector<int>& a, const std::vector<int>& b, std::size_t first, std::size_t last) {
  std::vector<SignPair> pairs;
  for (std::size_t n = first; n <= last; ++n) pairs.emplace_back(a[n - 1], b[n - 1]);
  const JointPath path(std::move(pairs));
  const Decomposition d = decompose(path);

  TrendSummary s;
  s.first_step = first;
  s.last_step = last;
  for (std::size_t n = 1; n <= path.size(); ++n) {
    const std::size_t t = d.counters.T[n];
    const std::size_t m = d.counters.S[n];
    s.T_series.push_back(t);
    s.S_series.push_back(m);
    s.X_series.push_back(d.X[t]);
    s.Y_series.push_back(d.Y[m]);
  }
  s.T_final = s.T_series.back();
  s.S_final = s.S_series.back();
  s.X_final = s.X_series.back();
  s.Y_final = s.Y_series.back();
  s.co_movement_ratio = static_cast<double>(s.T_final) / static_cast<double>(s.T_final + s.S_final);
  s.market_trend_sign = sign_of(s.X_final);
  s.relative_strength_sign = sign_of(s.Y_final);
  if (s.T_final > s.S_final && s.X_final > 0) {
    s.regime = "rising co-trend";
  } else if (s.T_final > s.S_final && s.X_final < 0) {
    s.regime = "falling co-trend";
  } else if (s.T_final < s.S_final) {
    s.regime = "divergence";
  } else {
    s.regime = "mixed";
  }
  return s;
}

nlohmann::json summary_to_json(const TrendSummary& s) {
  return nlohmann::json{
      {"first_step", s.first_step},
      {"last_step", s.last_step},
      {"length", s.length()},
      {"X_final", s.X_final},
      {"Y_final", s.Y_final},
      {"T_final", s.T_final},
      {"S_final", s.S_final},
      {"co_movement_ratio", s.co_movement_ratio},
      {"market_trend_sign", s.market_trend_sign},
      {"relative_strength_sign", s.relative_strength_sign},
      {"regime", s.regime},
      {"X", s.X_series},
      {"Y", s.Y_series},
      {"T", s.T_series},
      {"S", s.S_series},
  };
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_rows(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
      row.clear();
      field.clear();
      field_started = false;
      ++line;
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw InputError("unterminated quoted field starting before line " + std::to_string(line));
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::pair<PriceSeries, PriceSeries> parse_csv(std::string_view text, const CsvColumns& columns) {
  const auto rows = read_table(text, columns.timestamp, {{columns.first, "first price"}, {columns.second, "second price"}});
  const auto header = read_csv_rows(text).front();
  PriceSeries a{column_label(header, columns.first, 1), {}, {}};
  PriceSeries b{column_label(header, columns.second, 2), {}, {}};
  for (const auto& row : rows) {
    a.timestamps.push_back(row.timestamp);
    b.timestamps.push_back(row.timestamp);
    a.prices.push_back(*row.values[0]);
    b.prices.push_back(*row.values[1]);
  }
  return {std::move(a), std::move(b)};
}

PriceSeries parse_series_csv(std::string_view text, const std::string& timestamp_column,
                             const std::string& price_column) {
  const auto rows = read_table(text, timestamp_column, {{price_column, "price"}});
  const auto header = read_csv_rows(text).front();
  PriceSeries s{column_label(header, price_column, 1), {}, {}};
  for (const auto& row : rows) {
    s.timestamps.push_back(row.timestamp);
    s.prices.push_back(*row.values[0]);
  }
  return s;
}

std::pair<PriceSeries, PriceSeries> inner_join(const PriceSeries& a, const PriceSeries& b) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < b.size(); ++i) index.emplace(b.timestamps[i], i);
  PriceSeries x{a.name, {}, {}};
  PriceSeries y{b.name, {}, {}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = index.find(a.timestamps[i]);
    if (it == index.end()) continue;
    x.timestamps.push_back(a.timestamps[i]);
    x.prices.push_back(a.prices[i]);
    y.timestamps.push_back(b.timestamps[it->second]);
    y.prices.push_back(b.prices[it->second]);
  }
  if (x.size() < 2) {
    throw InputError("only " + std::to_string(x.size()) + " timestamps are common to both series; need at least 2");
  }
  return {std::move(x), std::move(y)};
}

std::vector<int> to_signs(const PriceSeries& series) {
  if (series.size() < 2) throw InputError("a price series needs at least 2 points");
  std::vector<int> signs;
  signs.reserve(series.size() - 1);
  for (std::size_t n = 1; n < series.size(); ++n) signs.push_back(movement_sign(series.prices[n] - series.prices[n - 1]));
  return signs;
}

JointPath price_path(const PriceSeries& s1, const PriceSeries& s2) {
  if (s1.size() != s2.size()) {
    throw InputError("series lengths differ: " + std::to_string(s1.size()) + " vs " + std::to_string(s2.size()));
  }
  const auto a = to_signs(s1);
  const auto b = to_signs(s2);
  std::vector<SignPair> pairs;
  pairs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
  return JointPath(std::move(pairs));
}

TrendReport analyze(const PriceSeries& s1, const PriceSeries& s2, std::size_t window) {
  if (s1.size() != s2.size()) {
    throw InputError("series lengths differ: " + std::to_string(s1.size()) + " vs " + std::to_string(s2.size()));
  }
  const auto a = to_signs(s1);
  const auto b = to_signs(s2);
  const std::size_t steps = a.size();
  if (window == 0 || window > steps) window = steps;

  TrendReport r;
  r.first_name = s1.name;
  r.second_name = s2.name;
  r.steps = steps;
  r.first_timestamp = s1.timestamps.front();
  r.last_timestamp = s1.timestamps.back();
  r.full = summarize(a, b, 1, steps);
  r.window = summarize(a, b, steps - window + 1, steps);
  return r;
}

nlohmann::json trend_report_to_json(const TrendReport& r) {
  return nlohmann::json{
      {"first", r.first_name},
      {"second", r.second_name},
      {"steps", r.steps},
      {"first_timestamp", r.first_timestamp},
      {"last_timestamp", r.last_timestamp},
      {"full", summary_to_json(r.full)},
      {"window", summary_to_json(r.window)},
  };
}

std::pair<PriceSeries, PriceSeries> synthetic_gaussian_series(double rho, std::size_t steps, std::uint64_t seed) {
  if (!(std::abs(rho) <= 1.0)) throw std::domain_error("|rho| must not exceed 1");
  if (steps == 0) throw std::invalid_argument("synthetic series needs at least one step");
  SplitMix64 rng = derive_stream(seed, StreamDomain::synthetic, 0);
  const double c = std::sqrt(1.0 - rho * rho);
  PriceSeries a{"Z1", {}, {}};
  PriceSeries b{"Z2", {}, {}};
  double za = 0.0;
  double zb = 0.0;
  for (std::size_t n = 0; n <= steps; ++n) {
    if (n > 0) {
      const double z1 = standard_normal(rng);
      const double z2 = standard_normal(rng);
      za += z1;
      zb += rho * z1 + c * z2;
    }
    a.timestamps.push_back(std::to_string(n));
    b.timestamps.push_back(std::to_string(n));
    // Prices are exp of the driver scaled down, so they stay positive and
    // move in the direction of the driver.
    a.prices.push_back(100.0 * std::exp(0.01 * za));
    b.prices.push_back(100.0 * std::exp(0.01 * zb));
  }
  return {std::move(a), std::move(b)};
}

std::string series_pair_csv(const PriceSeries& s1, const PriceSeries& s2) {
  std::ostringstream os;
  os << "timestamp," << s1.name << ',' << s2.name << '\n';
  for (std::size_t i = 0; i < s1.size(); ++i) {
    os << s1.timestamps[i] << ',' << nlohmann::json(s1.prices[i]).dump() << ','
       << nlohmann::json(s2.prices[i]).dump() << '\n';
  }
  return os.str();
}

}  // namespace cowalk
