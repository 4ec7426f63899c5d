#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cowalk/exact_oracle.hpp"
#include "cowalk/rational.hpp"
#include "cowalk/walk_models.hpp"
#include "json.hpp"

namespace cowalk {

/// Thrown instead of running a test whose large-sample approximation would
/// not be trustworthy (expected cell counts below 5, empty table columns).
class InsufficientSamples : public std::runtime_error {
 public:
  InsufficientSamples(const std::string& what, std::uint64_t required_reps)
      : std::runtime_error(what), required_reps_(required_reps) {}
  /// Replications that would satisfy the rule, or 0 if more data cannot help.
  std::uint64_t required_reps() const noexcept { return required_reps_; }

 private:
  std::uint64_t required_reps_;
};

inline constexpr double kDefaultSignificance = 0.001;

struct TestReport {
  std::string name;
  std::string model;
  std::uint64_t sample_size = 0;
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;  // 0 for z tests
  double p_value = 1.0;
  std::optional<double> estimate;
  std::optional<double> standard_error;
  std::optional<double> target;
  /// "uniform", "independence", "two-sided", "greater" or "less".
  std::string alternative;
  double significance = kDefaultSignificance;
  /// Goodness-of-fit and two-sided tests pass when p > significance; the
  /// one-sided directional tests pass when the predicted effect is detected
  /// (p <= significance).
  bool pass = false;
  /// fails for a negative control: the test is expected to reject.
  Expectation expectation = Expectation::holds;

  bool as_expected() const noexcept { return pass == (expectation == Expectation::holds); }
};

nlohmann::json test_report_to_json(const TestReport& report);

/// Counts over the 2^(k+l) sign cells of (first k X-increments, first l
/// Y-increments). Cell bit i <=> dX_{i+1} = +1; bit k + j <=> dY_{j+1} = +1.
struct BlockCounts {
  std::size_t k = 0;
  std::size_t l = 0;
  std::vector<std::uint64_t> counts;
  /// Same, restricted to replications in which all k + l entries were reached.
  std::vector<std::uint64_t> reached_counts;
  std::uint64_t reps = 0;
  std::uint64_t completed_reps = 0;
};

struct McOptions {
  unsigned threads = 1;
  /// Root of the zeta/psi streams; defaults to the path seed.
  std::optional<std::uint64_t> completion_seed;
};

/// Per replication r: simulate `horizon` steps on path stream r, decompose
/// with the zeta/psi completion of replication r, and count the sign cell.
BlockCounts mc_block_pmf(const ModelSpec& model, std::size_t k, std::size_t l, std::size_t horizon,
                         std::uint64_t reps, std::uint64_t seed, const McOptions& options = {});

/// Pearson chi-square against the uniform distribution, df = cells - 1.
TestReport chi_square_uniform(std::span<const std::uint64_t> counts, double significance = kDefaultSignificance);
TestReport chi_square_uniform(const BlockCounts& counts, double significance = kDefaultSignificance);

/// Frequency of common moves along one Gaussian-driver path of `reps` steps,
/// against 2 * gaussian_theta(rho) = 1/2 + asin(rho) / pi.
TestReport estimate_delta_T(double rho, std::uint64_t reps, std::uint64_t seed,
                            double significance = kDefaultSignificance);

/// G-test of independence between the sign block and the initial Q-pattern
/// of the given length. The expectation is c1_expectation(model): models
/// violating C1 are expected to reject.
TestReport independence_test_xyt(const ModelSpec& model, std::size_t k, std::size_t l, std::size_t pattern_length,
                                 std::size_t horizon, std::uint64_t reps, std::uint64_t seed,
                                 double significance = kDefaultSignificance, const McOptions& options = {});

struct BiasedWalkReports {
  TestReport y_fairness;  // dY_1 fair, two-sided
  TestReport x_bias;      // dX_1 beyond p in the direction of p - 1/2
};

BiasedWalkReports biased_walk_tests(const Rational& p, const Rational& theta, std::size_t horizon,
                                    std::uint64_t reps, std::uint64_t seed,
                                    double significance = kDefaultSignificance, const McOptions& options = {});

/// How many of `reps` simulated paths satisfy each predicate.
std::vector<std::uint64_t> mc_event_counts(const ModelSpec& model, std::size_t horizon, std::uint64_t reps,
                                           std::uint64_t seed, std::span<const PathPredicate> predicates,
                                           const McOptions& options = {});

/// z test of successes / trials against `target`, with the null standard
/// error sqrt(target (1 - target) / trials). alternative is "two-sided",
/// "greater" or "less".
TestReport binomial_z_test(std::string name, std::uint64_t successes, std::uint64_t trials, double target,
                           const std::string& alternative, double significance = kDefaultSignificance);

double chi_square_upper_tail(double statistic, double degrees_of_freedom);
double normal_upper_tail(double z);

/// Kolmogorov-Smirnov distance between the empirical CDF of the samples and U(0, 1).
double ks_distance_uniform(std::vector<double> samples);

/// CSV "cell,x_signs,y_signs,count,frequency,target" for external plotting.
std::string block_plotdata_csv(const BlockCounts& counts);

}  // namespace cowalk
