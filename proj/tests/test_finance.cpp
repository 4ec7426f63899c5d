#include <gtest/gtest.h>

#include <cmath>

#include "cowalk/finance.hpp"

using namespace cowalk;

namespace {

PriceSeries series(std::vector<double> prices) {
  PriceSeries s{"s", {}, std::move(prices)};
  for (std::size_t i = 0; i < s.prices.size(); ++i) s.timestamps.push_back(std::to_string(i));
  return s;
}

}  // namespace

TEST(ParseCsv, WellFormedFile) {
  const auto [a, b] = parse_csv("date,A,B\n2024-01-01,100,50\n2024-01-02,101,49.5\n2024-01-03,102,49\n");
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(b.size(), 3u);
  EXPECT_EQ(a.name, "A");
  EXPECT_EQ(b.prices[1], 49.5);
  EXPECT_EQ(a.timestamps[2], "2024-01-03");
}

TEST(ParseCsv, MissingPriceDropsRowFromBoth) {
  const auto [a, b] = parse_csv("t,A,B\n1,100,50\n2,,51\n3,102,52\n4,103,NA\n5,104,53\n");
  EXPECT_EQ(a.timestamps, (std::vector<std::string>{"1", "3", "5"}));
  EXPECT_EQ(b.prices, (std::vector<double>{50, 52, 53}));
}

TEST(ParseCsv, NamedColumnsAndQuoting) {
  const std::string text = "\"close, x\",time,\"close \"\"y\"\"\"\r\n1.5,10,2\r\n1.6,11,\"2.5\"\r\n";
  const auto [a, b] = parse_csv(text, {"time", "close, x", "close \"y\""});
  EXPECT_EQ(a.prices, (std::vector<double>{1.5, 1.6}));
  EXPECT_EQ(b.prices, (std::vector<double>{2, 2.5}));
  EXPECT_EQ(a.timestamps, (std::vector<std::string>{"10", "11"}));
}

TEST(ParseCsv, ShuffledTimestampsNameTheRow) {
  try {
    parse_csv("t,A,B\n1,1,1\n3,2,2\n2,3,3\n4,4,4\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 4"), std::string::npos) << e.what();
  }
}

TEST(ParseCsv, NumericTimestampsCompareAsNumbers) {
  EXPECT_NO_THROW(parse_csv("t,A,B\n9,1,1\n10,2,2\n"));
}

TEST(ParseCsv, Errors) {
  EXPECT_THROW(parse_csv("t,A,B\n1,1,1\n"), InputError);
  EXPECT_THROW(parse_csv("t,A,B\n1,1,1\n2,abc,1\n"), InputError);
  EXPECT_THROW(parse_csv("t,A,B\n1,1,1\n2,-3,1\n"), InputError);
  EXPECT_THROW(parse_csv("t,A,B\n1,1,1\n2,0,1\n"), InputError);
  EXPECT_THROW(parse_csv("t,A\n1,1\n2,2\n"), InputError);
  EXPECT_THROW(parse_csv("t,A,B\n1,1,1\n2,2,2\n", {"t", "A", "C"}), InputError);
  EXPECT_THROW(parse_csv("t,A,B\n\"1,1,1\n"), InputError);
  EXPECT_THROW(parse_csv(""), InputError);
}

TEST(ParseSeries, InnerJoinOnTimestamps) {
  const PriceSeries a = parse_series_csv("t,p\n1,10\n2,11\n3,12\n5,13\n");
  const PriceSeries b = parse_series_csv("t,p\n2,20\n3,19\n4,18\n5,21\n");
  const auto [x, y] = inner_join(a, b);
  EXPECT_EQ(x.timestamps, (std::vector<std::string>{"2", "3", "5"}));
  EXPECT_EQ(y.prices, (std::vector<double>{20, 19, 21}));
}

TEST(ToSigns, TieRule) {
  EXPECT_EQ(to_signs(series({100, 101, 101})), (std::vector<int>{1, -1}));
  EXPECT_EQ(to_signs(series({1, 2, 3, 4})), (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(to_signs(series({4, 3, 2, 1})), (std::vector<int>{-1, -1, -1}));
  EXPECT_THROW(to_signs(series({1})), InputError);
}

TEST(ToSigns, InvariantUnderIncreasingTransforms) {
  SplitMix64 rng(4);
  std::vector<double> prices{100};
  for (int i = 0; i < 500; ++i) prices.push_back(prices.back() * std::exp(0.01 * standard_normal(rng)));
  prices[200] = prices[199];
  const auto base = to_signs(series(prices));
  std::vector<double> logp, cubed;
  for (double p : prices) {
    logp.push_back(std::log(p) + 10);
    cubed.push_back(p * p * p);
  }
  EXPECT_EQ(to_signs(series(logp)), base);
  EXPECT_EQ(to_signs(series(cubed)), base);
}

TEST(Analyze, IdenticalSeries) {
  const auto s = series({10, 11, 10, 10, 12, 13});
  const auto r = analyze(s, s);
  const auto signs = to_signs(s);
  EXPECT_EQ(r.full.T_final, 5u);
  EXPECT_EQ(r.full.S_final, 0u);
  EXPECT_EQ(r.full.co_movement_ratio, 1.0);
  EXPECT_EQ(r.full.Y_final, 0);
  int sum = 0;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    sum += signs[i];
    EXPECT_EQ(r.full.X_series[i], sum);
  }
  EXPECT_EQ(r.full.regime, "rising co-trend");
}

TEST(Analyze, MirroredSeries) {
  const auto a = series({10, 11, 12, 11, 12});
  const auto b = series({10, 9, 8, 9, 8});
  const auto r = analyze(a, b);
  EXPECT_EQ(r.full.S_final, 4u);
  EXPECT_EQ(r.full.T_final, 0u);
  EXPECT_EQ(r.full.X_final, 0);
  EXPECT_EQ(r.full.Y_final, 2);
  EXPECT_EQ(r.full.regime, "divergence");
}

TEST(Analyze, TrailingWindow) {
  const auto a = series({1, 2, 3, 4, 3, 2, 1});
  const auto b = series({1, 2, 3, 4, 5, 6, 7});
  const auto r = analyze(a, b, 3);
  EXPECT_EQ(r.window.first_step, 4u);
  EXPECT_EQ(r.window.last_step, 6u);
  EXPECT_EQ(r.window.S_final, 3u);
  EXPECT_EQ(r.window.length(), 3u);
  EXPECT_EQ(r.full.T_final, 3u);
  EXPECT_EQ(r.full.X_final, 3);
  EXPECT_EQ(r.full.regime, "mixed");
}

TEST(Analyze, FieldInvariantsOnRandomInput) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto [a, b] = synthetic_gaussian_series(0.3, 50 + seed, seed);
    const auto r = analyze(a, b, 10);
    EXPECT_EQ(r.full.T_final + r.full.S_final, r.steps);
    EXPECT_DOUBLE_EQ(r.full.co_movement_ratio, double(r.full.T_final) / r.steps);
    EXPECT_EQ(r.window.T_final + r.window.S_final, 10u);
    EXPECT_GE(r.window.co_movement_ratio, 0.0);
    EXPECT_LE(r.window.co_movement_ratio, 1.0);
  }
}

TEST(Analyze, LengthMismatch) {
  EXPECT_THROW(analyze(series({1, 2, 3}), series({1, 2})), InputError);
}

TEST(Analyze, SyntheticGaussianCoMovement) {
  const std::size_t n = 10000;
  const auto [a, b] = synthetic_gaussian_series(0.5, n, 2024);
  const auto r = analyze(a, b);
  const double target = 2.0 / 3.0;
  EXPECT_LT(std::abs(r.full.co_movement_ratio - target), 3 * std::sqrt(target * (1 - target) / n));
}

TEST(TrendJson, Fields) {
  const auto s = series({1, 2, 3});
  const auto j = trend_report_to_json(analyze(s, s));
  EXPECT_EQ(j["full"]["T_final"], 2);
  EXPECT_EQ(j["full"]["regime"], "rising co-trend");
  EXPECT_EQ(j["steps"], 2);
}
