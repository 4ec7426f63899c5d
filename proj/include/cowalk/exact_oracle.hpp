#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cowalk/rational.hpp"
#include "cowalk/walk_models.hpp"
#include "json.hpp"

namespace cowalk {

/// Largest horizon any enumeration accepts, whatever the configured cap.
inline constexpr int kMaxEnumerationHorizon = 15;

class EnumerationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnumerationOptions {
  /// Horizons above this are rejected with a cost estimate.
  int cap = 10;
  /// Prune zero-probability subtrees instead of visiting every 4^N leaf.
  bool skip_null = false;
  /// Workers for ExactLaw construction (split over the first step).
  unsigned threads = 1;
};

/// One leaf of the 4-ary increment tree with its exact probability.
struct WeightedPath {
  std::span<const SignPair> pairs;
  const Rational& prob;
};

/// Walks the increment tree depth first, carrying the running product of
/// step probabilities, and calls `visit` once per length-N path (4^N calls
/// unless skip_null is set).
void enumerate_paths(const ModelSpec& model, int horizon,
                     const std::function<void(const WeightedPath&)>& visit,
                     EnumerationOptions options = {});

using PathPredicate = std::function<bool(const JointPath&)>;

/// Sum of path probabilities over paths satisfying the predicate.
Rational exact_event_prob(const ModelSpec& model, int horizon, const PathPredicate& predicate,
                          EnumerationOptions options = {});

/// Compact view of one positive-mass path: Q and xi as bit masks (bit h - 1
/// holds step h) and the hitting-time tables (0 = unreached; entry 0 is the
/// alpha_0 = beta_0 = 0 convention).
struct PathRecord {
  std::uint32_t q_bits = 0;
  std::uint32_t xi_bits = 0;  // bit set <=> xi = +1
  std::array<std::uint8_t, kMaxEnumerationHorizon + 1> alpha{};
  std::array<std::uint8_t, kMaxEnumerationHorizon + 1> beta{};

  bool common(std::size_t step) const noexcept { return (q_bits >> (step - 1)) & 1u; }
  int xi(std::size_t step) const noexcept { return ((xi_bits >> (step - 1)) & 1u) ? 1 : -1; }
  /// T_h, the number of common moves among steps 1..h.
  std::size_t common_count(std::size_t h) const noexcept {
    return static_cast<std::size_t>(std::popcount(h == 0 ? 0u : q_bits & ((h >= 32 ? ~0u : (1u << h) - 1u))));
  }
};

/// The law of the first N increments under an exact model, materialized once
/// and shared by the checks below.
class ExactLaw {
 public:
  ExactLaw(const ModelSpec& model, int horizon, EnumerationOptions options = {});

  const ModelSpec& model() const noexcept { return model_; }
  int horizon() const noexcept { return horizon_; }
  /// Paths with nonzero probability, in tree order.
  std::span<const PathRecord> paths() const noexcept { return records_; }
  std::span<const Rational> probabilities() const noexcept { return probs_; }
  /// Number of leaves visited (4^N).
  std::uint64_t enumerated() const noexcept { return enumerated_; }
  const Rational& total_mass() const noexcept { return total_; }

 private:
  ModelSpec model_;
  int horizon_;
  std::vector<PathRecord> records_;
  std::vector<Rational> probs_;
  std::uint64_t enumerated_ = 0;
  Rational total_{0};
};

/// Whether a check is expected to hold for the model under test. A negative
/// control (the sign-adversarial model under the C1 factorization) expects a
/// failure.
enum class Expectation { holds, fails };

struct Witness {
  std::string description;
  std::vector<std::uint8_t> pattern;  // Q-pattern, when the claim is pattern-wise
  std::vector<std::size_t> n_indices;
  std::vector<std::size_t> m_indices;
  std::vector<int> x_signs;
  std::vector<int> y_signs;
  std::size_t step = 0;  // h, when the claim is per step
  Rational lhs;
  Rational rhs;
};

/// Outcome of an exact identity check. `pass` holds iff every identity held;
/// lhs/rhs are the aggregate identity when passing and the first failing
/// identity otherwise, so pass <=> lhs == rhs.
struct ExactReport {
  std::string claim;
  std::string model;
  int horizon = 0;
  std::vector<std::size_t> n_indices;
  std::vector<std::size_t> m_indices;
  Rational lhs;
  Rational rhs;
  bool pass = false;
  std::size_t identities = 0;
  std::vector<Witness> witnesses;
  Expectation expectation = Expectation::holds;

  bool as_expected() const noexcept { return pass == (expectation == Expectation::holds); }
};

nlohmann::json exact_report_to_json(const ExactReport& report);

/// Sum of all path probabilities equals 1 and exactly 4^N leaves exist.
ExactReport check_total_mass(const ExactLaw& law);

/// For every h <= N: P(xi_{alpha_n} = 1, alpha_n = h) = P(xi_{alpha_n} = -1,
/// alpha_n = h), and the same for beta_n. Requires p = 1/2.
ExactReport check_sign_symmetry(const ExactLaw& law, std::size_t n);
/// check_sign_symmetry for every n <= N, folded into one report.
ExactReport check_sign_symmetry_all(const ExactLaw& law);

/// For strictly increasing n_1 < ... < n_k and m_1 < ... < m_l (k + l >= 1)
/// and every sign assignment:
///   P(signs; alpha_{n_k} <= N; alpha_{n_k} > beta_{m_l})
///     = 1/2 P(signs without x_k; same event)
///   P(signs; beta_{m_l} <= N; beta_{m_l} > alpha_{n_k})
///     = 1/2 P(signs without y_l; same event)
/// with alpha_{n_0} = beta_{m_0} = 0. Requires p = 1/2.
ExactReport check_halving_recursion(const ExactLaw& law, std::span<const std::size_t> n_indices,
                                    std::span<const std::size_t> m_indices);
/// Every index tuple of shape (k, l) with entries <= max_index, one report.
ExactReport check_halving_suite(const ExactLaw& law, std::size_t k, std::size_t l, std::size_t max_index);

/// For every Q-pattern q of length L = 1..N under which all requested hitting
/// times are reached, and every sign assignment:
///   P(signs, Q_{1..L} = q) = 2^-(k+l) P(Q_{1..L} = q).
/// Failures are reported as witnesses of minimal pattern length. Requires p = 1/2.
ExactReport check_c1_factorization(const ExactLaw& law, std::span<const std::size_t> n_indices,
                                   std::span<const std::size_t> m_indices);
ExactReport check_c1_suite(const ExactLaw& law, std::size_t k, std::size_t l, std::size_t max_index);

/// For every h in n..N:
///   P(xi_{alpha_n} = 1, alpha_n = h) - P(xi_{alpha_n} = -1, alpha_n = h) = (2p - 1) P(T_{h-1} = n - 1)
/// and, summed, P(xi_{alpha_n} = 1, alpha_n <= N) = 1/2 [P(alpha_n <= N) + (2p - 1) sum_h P(T_{h-1} = n - 1)].
/// Also checks P(xi_{beta_n} = 1, beta_n = h) = P(xi_{beta_n} = -1, beta_n = h).
ExactReport check_biased_formula(const ExactLaw& law, std::size_t n);
ExactReport check_biased_formula_all(const ExactLaw& law);

/// The C1 expectation for a model: fails for the sign-adversarial kind.
Expectation c1_expectation(const ModelSpec& model);

struct OracleSuiteOptions {
  std::vector<std::pair<std::size_t, std::size_t>> halving_shapes{{1, 0}, {0, 1}, {1, 1}, {2, 1}};
  std::vector<std::pair<std::size_t, std::size_t>> c1_shapes{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}};
  /// Largest hitting-time index used in tuple checks (0 = the horizon).
  std::size_t max_index = 0;
};

/// Every check applicable to the model: total mass always; sign symmetry,
/// halving and C1 when p = 1/2; the biased formula when p != 1/2.
std::vector<ExactReport> run_oracle_suite(const ExactLaw& law, const OracleSuiteOptions& options = {});

/// All strictly increasing tuples of length `size` with entries in 1..max_value.
std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t size, std::size_t max_value);

std::string pattern_string(std::span<const std::uint8_t> pattern);

}  // namespace cowalk
