#include "cowalk/mc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "cowalk/decomposition.hpp"
#include "parallel.hpp"

namespace cowalk {

namespace {

void add_counts(std::vector<std::uint64_t>& into, const std::vector<std::uint64_t>& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

std::size_t block_cell(const Decomposition& d, std::size_t k, std::size_t l) {
  std::size_t cell = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (d.x_increment(i + 1) > 0) cell |= std::size_t{1} << i;
  }
  for (std::size_t j = 0; j < l; ++j) {
    if (d.y_increment(j + 1) > 0) cell |= std::size_t{1} << (k + j);
  }
  return cell;
}

void require_fair_model(const ModelSpec& model, const char* what) {
  if (model.p() != 0.5) throw std::invalid_argument(std::string(what) + " requires a p = 1/2 model");
}

}  // namespace

double chi_square_upper_tail(double statistic, double degrees_of_freedom) {
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double ks_distance_uniform(std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = std::clamp(samples[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - x, x - static_cast<double>(i) / n});
  }
  return d;
}

nlohmann::json test_report_to_json(const TestReport& r) {
  nlohmann::json node{
      {"name", r.name},
      {"model", r.model},
      {"sample_size", r.sample_size},
      {"statistic", r.statistic},
      {"degrees_of_freedom", r.degrees_of_freedom},
      {"p_value", r.p_value},
      {"alternative", r.alternative},
      {"significance", r.significance},
      {"pass", r.pass},
      {"expectation", r.expectation == Expectation::holds ? "holds" : "fails"},
      {"as_expected", r.as_expected()},
  };
  node["estimate"] = r.estimate ? nlohmann::json(*r.estimate) : nlohmann::json(nullptr);
  node["standard_error"] = r.standard_error ? nlohmann::json(*r.standard_error) : nlohmann::json(nullptr);
  node["target"] = r.target ? nlohmann::json(*r.target) : nlohmann::json(nullptr);
  return node;
}

BlockCounts mc_block_pmf(const ModelSpec& model, std::size_t k, std::size_t l, std::size_t horizon,
                         std::uint64_t reps, std::uint64_t seed, const McOptions& options) {
  require_fair_model(model, "mc_block_pmf");
  if (k + l == 0 || k + l > 16) throw std::invalid_argument("block size k + l must lie in 1..16");
  const std::size_t cells = std::size_t{1} << (k + l);
  const std::uint64_t completion_root = options.completion_seed.value_or(seed);

  BlockCounts zero;
  zero.k = k;
  zero.l = l;
  zero.counts.assign(cells, 0);
  zero.reached_counts.assign(cells, 0);

  auto work = [&](std::uint64_t begin, std::uint64_t end, BlockCounts& acc) {
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      SplitMix64 rng = derive_stream(seed, StreamDomain::path, rep);
      const JointPath path = simulate(model, horizon, rng);
      const Decomposition d = decompose(path, Completion::from_seed(completion_root, rep, std::max(k, l)));
      const std::size_t cell = block_cell(d, k, l);
      ++acc.counts[cell];
      ++acc.reps;
      if (d.counters.T.back() >= k && d.counters.S.back() >= l) {
        ++acc.reached_counts[cell];
      } else {
        ++acc.completed_reps;
      }
    }
  };
  auto merge = [](BlockCounts& into, const BlockCounts& from) {
    add_counts(into.counts, from.counts);
    add_counts(into.reached_counts, from.reached_counts);
    into.reps += from.reps;
    into.completed_reps += from.completed_reps;
  };
  return detail::parallel_chunks(reps, options.threads, zero, work, merge);
}

TestReport chi_square_uniform(std::span<const std::uint64_t> counts, double significance) {
  if (counts.size() < 2) throw std::invalid_argument("chi-square needs at least two cells");
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  const double cells = static_cast<double>(counts.size());
  const double expected = static_cast<double>(total) / cells;
  if (expected < 5.0) {
    const auto required = static_cast<std::uint64_t>(5 * counts.size());
    throw InsufficientSamples("expected count per cell is " + nlohmann::json(expected).dump() +
                                  " (< 5); at least " + std::to_string(required) + " replications needed",
                              required);
  }
  double stat = 0.0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  TestReport r;
  r.name = "chi-square-uniform";
  r.sample_size = total;
  r.statistic = stat;
  r.degrees_of_freedom = counts.size() - 1;
  r.p_value = chi_square_upper_tail(stat, cells - 1.0);
  r.alternative = "uniform";
  r.significance = significance;
  r.pass = r.p_value > significance;
  return r;
}

TestReport chi_square_uniform(const BlockCounts& counts, double significance) {
  TestReport r = chi_square_uniform(counts.counts, significance);
  r.name = "block-pmf-uniform(k=" + std::to_string(counts.k) + ",l=" + std::to_string(counts.l) + ")";
  return r;
}

TestReport binomial_z_test(std::string name, std::uint64_t successes, std::uint64_t trials, double target,
                           const std::string& alternative, double significance) {
  if (trials == 0) throw InsufficientSamples("z test with zero trials", 1);
  TestReport r;
  r.name = std::move(name);
  r.sample_size = trials;
  r.alternative = alternative;
  r.significance = significance;
  const double n = static_cast<double>(trials);
  const double estimate = static_cast<double>(successes) / n;
  const double se = std::sqrt(target * (1.0 - target) / n);
  r.estimate = estimate;
  r.standard_error = se;
  r.target = target;
  if (se == 0.0) {
    // Degenerate null: the outcome is certain under the target.
    const bool equal = estimate == target;
    r.statistic = equal ? 0.0 : (estimate > target ? HUGE_VAL : -HUGE_VAL);
  } else {
    r.statistic = (estimate - target) / se;
  }
  if (alternative == "greater") {
    r.p_value = std::isinf(r.statistic) ? (r.statistic > 0 ? 0.0 : 1.0) : normal_upper_tail(r.statistic);
    r.pass = r.p_value <= significance;
  } else if (alternative == "less") {
    r.p_value = std::isinf(r.statistic) ? (r.statistic < 0 ? 0.0 : 1.0) : normal_upper_tail(-r.statistic);
    r.pass = r.p_value <= significance;
  } else if (alternative == "two-sided") {
    r.p_value = std::isinf(r.statistic) ? 0.0 : std::min(1.0, 2.0 * normal_upper_tail(std::abs(r.statistic)));
    r.pass = r.p_value > significance;
  } else {
    throw std::invalid_argument("unknown alternative '" + alternative + "'");
  }
  return r;
}

TestReport estimate_delta_T(double rho, std::uint64_t reps, std::uint64_t seed, double significance) {
  const double target = 2.0 * gaussian_theta(rho);
  const ModelSpec model = validate_model(ModelSpec::gaussian(rho));
  const JointPath path = simulate(model, reps, seed);
  const Counters counters = run_counters(classify_path(path));
  TestReport r = binomial_z_test("delta-T", counters.T.back(), reps, target, "two-sided", significance);
  r.model = model.describe();
  return r;
}

TestReport independence_test_xyt(const ModelSpec& model, std::size_t k, std::size_t l, std::size_t pattern_length,
                                 std::size_t horizon, std::uint64_t reps, std::uint64_t seed, double significance,
                                 const McOptions& options) {
  require_fair_model(model, "independence_test_xyt");
  if (k + l == 0 || k + l > 12) throw std::invalid_argument("block size k + l must lie in 1..12");
  if (pattern_length == 0 || pattern_length > horizon || pattern_length > 16) {
    throw std::invalid_argument("pattern length must lie in 1..min(horizon, 16)");
  }
  const std::size_t rows = std::size_t{1} << (k + l);
  const std::size_t cols = std::size_t{1} << pattern_length;
  const std::uint64_t completion_root = options.completion_seed.value_or(seed);

  using Table = std::vector<std::uint64_t>;
  auto work = [&](std::uint64_t begin, std::uint64_t end, Table& acc) {
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      SplitMix64 rng = derive_stream(seed, StreamDomain::path, rep);
      const JointPath path = simulate(model, horizon, rng);
      const Decomposition d = decompose(path, Completion::from_seed(completion_root, rep, std::max(k, l)));
      std::size_t col = 0;
      for (std::size_t h = 0; h < pattern_length; ++h) col |= static_cast<std::size_t>(d.Q[h]) << h;
      ++acc[block_cell(d, k, l) * cols + col];
    }
  };
  const Table table = detail::parallel_chunks(reps, options.threads, Table(rows * cols, 0), work, add_counts);

  std::vector<double> row_total(rows, 0.0), col_total(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      row_total[i] += static_cast<double>(table[i * cols + j]);
      col_total[j] += static_cast<double>(table[i * cols + j]);
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_total[j] == 0.0) {
      std::string pattern;
      for (std::size_t h = 0; h < pattern_length; ++h) pattern += ((j >> h) & 1u) ? '1' : '0';
      throw InsufficientSamples("Q-pattern " + pattern + " was never observed; the table has empty columns "
                                "(the model may not produce every pattern)", 0);
    }
  }
  const double n = static_cast<double>(reps);
  double g = 0.0;
  double min_expected = HUGE_VAL;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_total[i] * col_total[j] / n;
      min_expected = std::min(min_expected, expected);
      const double observed = static_cast<double>(table[i * cols + j]);
      if (observed > 0) g += 2.0 * observed * std::log(observed / expected);
    }
  }
  if (min_expected < 5.0) {
    const auto required = static_cast<std::uint64_t>(std::ceil(n * 5.0 / std::max(min_expected, 1e-300)));
    throw InsufficientSamples("smallest expected cell count is " + nlohmann::json(min_expected).dump() +
                                  " (< 5); about " + std::to_string(required) + " replications needed",
                              required);
  }
  TestReport r;
  r.name = "xyt-independence(k=" + std::to_string(k) + ",l=" + std::to_string(l) +
           ",pattern=" + std::to_string(pattern_length) + ")";
  r.model = model.describe();
  r.sample_size = reps;
  r.statistic = g;
  r.degrees_of_freedom = (rows - 1) * (cols - 1);
  r.p_value = chi_square_upper_tail(g, static_cast<double>(r.degrees_of_freedom));
  r.alternative = "independence";
  r.significance = significance;
  r.pass = r.p_value > significance;
  r.expectation = c1_expectation(model);
  return r;
}

BiasedWalkReports biased_walk_tests(const Rational& p, const Rational& theta, std::size_t horizon,
                                    std::uint64_t reps, std::uint64_t seed, double significance,
                                    const McOptions& options) {
  const ModelSpec model = validate_model(ModelSpec::biased(p, theta));
  const std::uint64_t completion_root = options.completion_seed.value_or(seed);

  struct Ups {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
  };
  auto work = [&](std::uint64_t begin, std::uint64_t end, Ups& acc) {
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      SplitMix64 rng = derive_stream(seed, StreamDomain::path, rep);
      const JointPath path = simulate(model, horizon, rng);
      const Decomposition d = decompose(path, Completion::from_seed(completion_root, rep, 1));
      if (d.x_increment(1) > 0) ++acc.x;
      if (d.y_increment(1) > 0) ++acc.y;
    }
  };
  const Ups ups = detail::parallel_chunks(reps, options.threads, Ups{}, work, [](Ups& into, const Ups& from) {
    into.x += from.x;
    into.y += from.y;
  });

  const double p_value = p.get_d();
  const std::string direction = p > Rational(1, 2) ? "greater" : (p < Rational(1, 2) ? "less" : "two-sided");
  BiasedWalkReports out{
      binomial_z_test("biased-y-fairness", ups.y, reps, 0.5, "two-sided", significance),
      binomial_z_test("biased-x-trend", ups.x, reps, p_value, direction, significance),
  };
  out.y_fairness.model = model.describe();
  out.x_bias.model = model.describe();
  return out;
}

std::vector<std::uint64_t> mc_event_counts(const ModelSpec& model, std::size_t horizon, std::uint64_t reps,
                                           std::uint64_t seed, std::span<const PathPredicate> predicates,
                                           const McOptions& options) {
  using Counts = std::vector<std::uint64_t>;
  auto work = [&](std::uint64_t begin, std::uint64_t end, Counts& acc) {
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      SplitMix64 rng = derive_stream(seed, StreamDomain::path, rep);
      const JointPath path = simulate(model, horizon, rng);
      for (std::size_t e = 0; e < predicates.size(); ++e) {
        if (predicates[e](path)) ++acc[e];
      }
    }
  };
  return detail::parallel_chunks(reps, options.threads, Counts(predicates.size(), 0), work, add_counts);
}

std::string block_plotdata_csv(const BlockCounts& counts) {
  std::ostringstream os;
  os << "cell,x_signs,y_signs,count,frequency,target\n";
  std::uint64_t total = 0;
  for (auto c : counts.counts) total += c;
  const double target = 1.0 / static_cast<double>(counts.counts.size());
  auto signs = [](std::size_t cell, std::size_t offset, std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s += ((cell >> (offset + i)) & 1u) ? '+' : '-';
    return s;
  };
  for (std::size_t cell = 0; cell < counts.counts.size(); ++cell) {
    const double freq = total ? static_cast<double>(counts.counts[cell]) / static_cast<double>(total) : 0.0;
    os << cell << ',' << signs(cell, 0, counts.k) << ',' << signs(cell, counts.k, counts.l) << ','
       << counts.counts[cell] << ',' << nlohmann::json(freq).dump() << ',' << nlohmann::json(target).dump() << '\n';
  }
  return os.str();
}

}  // namespace cowalk
