#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cowalk/rng.hpp"
#include "cowalk/walk_models.hpp"
#include "json.hpp"

namespace cowalk {

/// Raised when an operation's documented precondition does not hold.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Step index at which a hitting time occurs; std::nullopt means Unreached
/// within the horizon (the finite-horizon stand-in for an infinite time).
using HitTime = std::optional<std::size_t>;

/// T_n (common moves up to n) and S_n = n - T_n, both with a leading 0 entry.
struct Counters {
  std::vector<std::size_t> T{0};
  std::vector<std::size_t> S{0};

  std::size_t horizon() const noexcept { return T.size() - 1; }
};

/// alpha_n / beta_n for n = 0..N. Entry 0 is the alpha_0 = beta_0 = 0 convention.
struct HittingTimes {
  std::vector<HitTime> alpha{std::size_t{0}};
  std::vector<HitTime> beta{std::size_t{0}};
};

/// Auxiliary fair signs substituted for unreached increments: zeta_n for the
/// n-th common move, psi_m for the m-th counter move. zeta_n is the n-th draw
/// of its stream whether or not it ends up used.
struct Completion {
  SplitMix64 zeta;
  SplitMix64 psi;
  /// X and Y are extended to this many increments. 0 means "the horizon N".
  std::size_t length = 0;

  /// The zeta/psi sub-streams of replication `index` under `root`.
  static Completion from_seed(std::uint64_t root, std::uint64_t index = 0, std::size_t length = 0);
};

struct Walks {
  /// Partial sums X_0..X_K with X_0 = 0.
  std::vector<int> X{0};
  std::vector<int> Y{0};
  bool completion_used = false;
};

struct Decomposition {
  std::vector<std::uint8_t> Q;  // Q_1..Q_N, 0-based
  Counters counters;
  HittingTimes hits;
  std::vector<int> X{0};
  std::vector<int> Y{0};
  bool completion_used = false;

  std::size_t horizon() const noexcept { return Q.size(); }
  /// Increment sign of the n-th common move (n >= 1), i.e. X_n - X_{n-1}.
  int x_increment(std::size_t n) const { return X.at(n) - X.at(n - 1); }
  int y_increment(std::size_t m) const { return Y.at(m) - Y.at(m - 1); }
};

/// 1 iff xi = eta (common move).
constexpr std::uint8_t classify_step(SignPair pair) noexcept { return pair.common() ? 1 : 0; }
std::vector<std::uint8_t> classify_path(const JointPath& path);

Counters run_counters(std::span<const std::uint8_t> Q);

/// alpha_n = min{k : T_k = n}, beta_m = min{k : S_k = m}, Unreached if not
/// attained within the horizon.
HittingTimes hitting_times(const Counters& counters);

/// X_n = sum of xi over the first n common moves, Y_m likewise over counter
/// moves. Without a completion the walks stop at T_N and S_N increments.
/// Throws ContractViolation if `hits` does not belong to a path of this length.
Walks extract_walks(const JointPath& path, const HittingTimes& hits,
                    std::optional<Completion> completion = std::nullopt);

Decomposition decompose(const JointPath& path, std::optional<Completion> completion = std::nullopt);

/// B_n = X_{T_n} + Y_{n - T_n}, W_n = X_{T_n} - Y_{n - T_n} for n = 0..N (with
/// the leading zero). T must carry its leading 0. Throws ContractViolation
/// naming the missing entry when X or Y is too short, or when T is not a
/// counting process.
std::pair<std::vector<int>, std::vector<int>> reconstruct(std::span<const int> X, std::span<const int> Y,
                                                           std::span<const std::size_t> T);

/// The sample path used in the worked example of the common decomposition.
JointPath table1_path();

/// Table layout: header "n,B,W,T,S,alpha,beta,X,Y" and rows n = 1..N;
/// unreached or undefined entries are empty fields.
std::string decomposition_csv(const JointPath& path, const Decomposition& d);

/// All sequences 1-based (leading zeros dropped); Unreached is null.
nlohmann::json decomposition_to_json(const JointPath& path, const Decomposition& d);

}  // namespace cowalk
