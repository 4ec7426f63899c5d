#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cowalk/rational.hpp"
#include "cowalk/rng.hpp"
#include "json.hpp"

namespace cowalk {

// Conventions used throughout the library:
//  * increment sequences (SignPair lists, Q bits) are stored 0-based, so
//    element i is the increment of step i + 1;
//  * level sequences (B, W, T, S, X, Y) and hitting-time tables carry a
//    leading n = 0 entry, so element n is the value at step n.
// Serialized output is always 1-based.

/// Movement sign with the tie rule 1{d > 0} - 1{d <= 0}: zero counts as down.
constexpr int movement_sign(double delta) noexcept { return delta > 0.0 ? 1 : -1; }

/// One joint increment (xi_n, eta_n), each +1 or -1.
struct SignPair {
  int xi = 1;
  int eta = 1;

  constexpr SignPair() = default;
  constexpr SignPair(int xi_value, int eta_value) : xi(xi_value), eta(eta_value) {
    if ((xi != 1 && xi != -1) || (eta != 1 && eta != -1)) {
      throw std::invalid_argument("SignPair components must be +1 or -1");
    }
  }

  constexpr bool common() const noexcept { return xi == eta; }

  /// (+,+) -> 0, (+,-) -> 1, (-,+) -> 2, (-,-) -> 3.
  constexpr std::size_t index() const noexcept {
    return (xi < 0 ? 2u : 0u) + (eta < 0 ? 1u : 0u);
  }
  static constexpr SignPair from_index(std::size_t i) {
    return SignPair((i & 2u) ? -1 : 1, (i & 1u) ? -1 : 1);
  }

  friend constexpr bool operator==(SignPair, SignPair) = default;
};

inline constexpr std::array<SignPair, 4> kAllSignPairs{
    SignPair(1, 1), SignPair(1, -1), SignPair(-1, 1), SignPair(-1, -1)};

/// Realized increments of steps 1..n-1 when the law of step n is queried.
using History = std::span<const SignPair>;

/// A finite realization of (B, W).
class JointPath {
 public:
  JointPath() = default;
  explicit JointPath(std::vector<SignPair> pairs);

  /// Builds the path from levels B_1..B_N and W_1..W_N (B_0 = W_0 = 0
  /// implied). Throws std::invalid_argument if any increment is not +-1.
  static JointPath from_levels(std::span<const int> B, std::span<const int> W);

  std::size_t size() const noexcept { return pairs_.size(); }
  const std::vector<SignPair>& pairs() const noexcept { return pairs_; }
  /// Partial sums with B()[0] = 0.
  const std::vector<int>& B() const noexcept { return b_; }
  const std::vector<int>& W() const noexcept { return w_; }

  friend bool operator==(const JointPath& a, const JointPath& b) { return a.pairs_ == b.pairs_; }

 private:
  std::vector<SignPair> pairs_;
  std::vector<int> b_{0};
  std::vector<int> w_{0};
};

enum class ModelKind {
  constant_theta,
  q_history_theta,
  sign_adversarial_theta,
  biased,
  gaussian,
};

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

struct ValidationOptions;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dependence model: the conditional probability theta_n = P(xi_n = eta_n = 1
/// | past) as a function of the history, plus the marginal up-probability p.
///
/// The step law is {(+,+): theta, (+,-): p - theta, (-,+): p - theta,
/// (-,-): 1 - 2p + theta}. All kinds except `biased` have p = 1/2; `gaussian`
/// derives theta from a correlation and is float-only.
class ModelSpec {
 public:
  /// theta_n = theta for every n.
  static ModelSpec constant(Rational theta);
  /// theta_1 = base, theta_n = base + weight * Q_{n-1}; depends on the past only
  /// through Q, so the sign history is conditionally independent of Q.
  static ModelSpec q_history(Rational base, Rational weight);
  /// theta_1 = first, theta_n = after_up if xi_{n-1} = +1 else after_down.
  static ModelSpec sign_adversarial(Rational first, Rational after_up, Rational after_down);
  /// Marginal up-probability p with constant theta.
  static ModelSpec biased(Rational p, Rational theta);
  /// theta = P(Z1 > 0, Z2 > 0) for standard normals with correlation rho.
  static ModelSpec gaussian(double rho);

  ModelKind kind() const noexcept { return kind_; }
  bool exact() const noexcept { return kind_ != ModelKind::gaussian; }
  bool validated() const noexcept { return validated_; }

  /// Exact marginal up-probability. Throws ModelError for the gaussian kind.
  const Rational& exact_p() const;
  double p() const noexcept { return p_double_; }
  double rho() const noexcept { return rho_; }

  /// theta_n for n = history.size() + 1. Throws ModelError for the gaussian kind.
  const Rational& exact_theta(History history) const;
  double theta(History history) const noexcept;

  /// Named exact parameters in declaration order, e.g. {"base", 1/4}.
  std::vector<std::pair<std::string, Rational>> parameters() const;

  /// Compact textual form, accepted back by parse_model().
  std::string describe() const;

  friend ModelSpec validate_model(const ModelSpec& spec, ValidationOptions options);

 private:
  ModelSpec() = default;
  void refresh_doubles();

  ModelKind kind_ = ModelKind::constant_theta;
  Rational p_{1, 2};
  Rational theta0_{1, 4};  // theta (constant, biased), base (q-history), first (adversarial)
  Rational theta1_{0};     // base + weight (q-history), after_up (adversarial)
  Rational theta2_{0};     // weight (q-history), after_down (adversarial)
  double p_double_ = 0.5;
  double theta0_double_ = 0.25;
  double theta1_double_ = 0.0;
  double theta2_double_ = 0.0;
  double rho_ = 0.0;
  bool validated_ = false;
};

struct ValidationOptions {
  /// Histories of every length below this are enumerated exhaustively.
  int probe_depth = 10;
  /// Additional seeded random histories with lengths in (probe_depth, random_max_length].
  int random_probes = 10000;
  int random_max_length = 64;
  std::uint64_t probe_seed = 0x5EEDULL;
};

/// Range checks theta over probed histories (theta in [max(0, 2p - 1), p],
/// p in (0, 1), |rho| <= 1) and kind consistency. Returns the spec marked
/// validated; throws ModelError naming the offending history otherwise.
ModelSpec validate_model(const ModelSpec& spec, ValidationOptions options = {});

template <class P>
struct StepPmf {
  std::array<P, 4> prob;  // indexed by SignPair::index()

  const P& operator[](SignPair pair) const noexcept { return prob[pair.index()]; }
};

/// Exact step law given the history. Throws ModelError if theta is out of
/// range for this history or the model is not exact.
StepPmf<Rational> exact_step_distribution(const ModelSpec& model, History history);
StepPmf<double> step_distribution(const ModelSpec& model, History history);

/// One step drawn from step_distribution. The gaussian kind samples through
/// its normal driver instead of the pmf.
SignPair sample_step(const ModelSpec& model, History history, SplitMix64& rng);

/// n steps from the given stream. Throws std::invalid_argument if n == 0.
JointPath simulate(const ModelSpec& model, std::size_t n, SplitMix64& rng);
/// n steps from the path stream 0 of `seed`.
JointPath simulate(const ModelSpec& model, std::size_t n, std::uint64_t seed);

/// P(Z1 > 0, Z2 > 0) = 1/4 + asin(rho) / (2 pi). Throws std::domain_error for |rho| > 1.
double gaussian_theta(double rho);

/// Draws (Z1, rho Z1 + sqrt(1 - rho^2) Z2) and returns the movement signs.
SignPair sample_gaussian_pair(double rho, SplitMix64& rng);

/// Parses either a JSON document or a shorthand:
///   constant:1/4   q-history:1/4,1/8   adversarial:1/4,2/5,1/10
///   biased:7/10,1/2   gaussian:0.5
ModelSpec parse_model(std::string_view text);

nlohmann::json model_to_json(const ModelSpec& model);
ModelSpec model_from_json(const nlohmann::json& node);

struct NamedModel {
  std::string name;
  ModelSpec model;
};

/// The models used by the built-in checks and examples.
std::vector<NamedModel> shipped_models();

}  // namespace cowalk
