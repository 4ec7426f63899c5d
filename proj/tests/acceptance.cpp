// Acceptance suite: one PASS/FAIL line per criterion, with the runtime
// budget and tolerances pinned below. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "cowalk/decomposition.hpp"
#include "cowalk/exact_oracle.hpp"
#include "cowalk/mc_stats.hpp"
#include "cowalk/walk_models.hpp"

using namespace cowalk;

namespace {

constexpr double kExampleBudgetMs = 1.0;
constexpr double kRoundTripBudgetS = 10.0;
constexpr double kInvariantsBudgetS = 1.0;
constexpr double kSymmetryBudgetS = 30.0;
constexpr double kHalvingBudgetS = 60.0;
constexpr double kC1BudgetS = 30.0;
constexpr double kBiasedBudgetS = 60.0;
constexpr double kUniformityBudgetS = 120.0;
constexpr double kGaussianBudgetS = 30.0;
constexpr double kCalibrationBudgetS = 120.0;

constexpr double kChiSquareSignificance = 0.001;
constexpr double kGaussianSigmas = 3.0;
constexpr double kCalibrationSigmas = 4.0;
constexpr double kBiasedZ = 3.0;
constexpr double kFairnessSigmas = 3.0;
constexpr double kQuadratureTolerance = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, Outcome outcome, double elapsed, double budget, const char* unit) {
  std::ostringstream timing;
  timing << elapsed << ' ' << unit << " (budget " << budget << ' ' << unit << ")";
  outcome.require(elapsed < budget, "over time budget");
  if (!outcome.ok) ++failures;
  std::printf("%s [%d] %s: %s%s%s\n", outcome.ok ? "PASS" : "FAIL", id, name.c_str(), timing.str().c_str(),
              outcome.detail.empty() ? "" : " -- ", outcome.detail.c_str());
  std::fflush(stdout);
}

ModelSpec model(const char* text) { return validate_model(parse_model(text)); }

const std::vector<const char*> kFairModels{"constant:1/4", "constant:1/3", "constant:1/2", "q-history:1/4,1/8",
                                           "adversarial:1/4,2/5,1/10"};

// 1 ---------------------------------------------------------------------------
void worked_example() {
  const std::vector<std::size_t> T{0, 0, 0, 0, 1, 1, 1, 1, 1, 2, 3};
  const std::vector<std::size_t> S{0, 1, 2, 3, 3, 4, 5, 6, 7, 7, 7};
  const std::vector<std::size_t> alpha{4, 9, 10};        // then unreached
  const std::vector<std::size_t> beta{1, 2, 3, 5, 6, 7, 8};  // then unreached
  const std::vector<int> X{0, -1, 0, 1};
  const std::vector<int> Y{0, 1, 0, -1, 0, 1, 0, 1};

  const JointPath path = table1_path();
  double best = 1e9;
  Decomposition d;
  for (int trial = 0; trial < 5; ++trial) {
    const auto start = Clock::now();
    d = decompose(path);
    best = std::min(best, seconds_since(start) * 1e3);
  }
  Outcome o;
  o.require(d.counters.T == T, "T");
  o.require(d.counters.S == S, "S");
  for (std::size_t n = 1; n <= 10; ++n) {
    const HitTime a = n <= alpha.size() ? HitTime{alpha[n - 1]} : HitTime{};
    const HitTime b = n <= beta.size() ? HitTime{beta[n - 1]} : HitTime{};
    o.require(d.hits.alpha[n] == a, "alpha_" + std::to_string(n));
    o.require(d.hits.beta[n] == b, "beta_" + std::to_string(n));
  }
  o.require(d.X == X, "X");
  o.require(d.Y == Y, "Y");
  const std::string csv = decomposition_csv(path, d);
  o.require(csv.find("4,-2,0,1,3,,5,,0\n") != std::string::npos && csv.find("8,0,-2,1,7,,,,\n") != std::string::npos,
            "CSV blanks");
  report(1, "Worked example golden decomposition", o, best, kExampleBudgetMs, "ms");
}

// 2 ---------------------------------------------------------------------------
void round_trip() {
  const auto start = Clock::now();
  const auto models = shipped_models();
  const std::uint64_t total = 100000;
  Outcome o;
  std::uint64_t checked = 0;
  for (std::uint64_t r = 0; r < total; ++r) {
    const ModelSpec& m = models[r % models.size()].model;
    SplitMix64 rng = derive_stream(2024, StreamDomain::path, r);
    const JointPath path = simulate(m, 128, rng);
    const Decomposition d = decompose(path);
    const auto [B, W] = reconstruct(d.X, d.Y, d.counters.T);
    if (B != path.B() || W != path.W()) {
      o.require(false, "mismatch at replication " + std::to_string(r) + " (" + models[r % models.size()].name + ")");
      break;
    }
    ++checked;
  }
  o.require(checked == total, "not all paths checked");
  report(2, "Round trip reconstruct(decompose) on 1e5 paths, N = 128, " + std::to_string(models.size()) + " models", o,
         seconds_since(start), kRoundTripBudgetS, "s");
}

// 3 ---------------------------------------------------------------------------
void path_invariants() {
  const auto start = Clock::now();
  const std::size_t N = 8;
  Outcome o;
  std::uint64_t paths = 0;
  for (std::uint64_t index = 0; index < (std::uint64_t{1} << (2 * N)) && o.ok; ++index) {
    std::vector<SignPair> pairs;
    for (std::size_t i = 0; i < N; ++i) pairs.push_back(SignPair::from_index((index >> (2 * i)) & 3u));
    const Decomposition d = decompose(JointPath(std::move(pairs)));
    const auto& a = d.hits.alpha;
    const auto& b = d.hits.beta;
    for (std::size_t n = 1; n <= N; ++n) {
      if (a[n]) o.require(*a[n] >= n, "alpha_n < n");
      if (b[n]) o.require(*b[n] >= n, "beta_n < n");
      if (n > 1 && a[n]) o.require(a[n - 1] && *a[n - 1] < *a[n], "alpha not strictly increasing");
      if (n > 1 && b[n]) o.require(b[n - 1] && *b[n - 1] < *b[n], "beta not strictly increasing");
      for (std::size_t m = 1; m <= N; ++m) {
        if (a[n] && b[m]) o.require(*a[n] != *b[m], "alpha_n = beta_m");
        if (n + m - 1 <= N) o.require(a[n] || b[m], "alpha_n and beta_m both unreached with n + m - 1 <= N");
      }
    }
    ++paths;
  }
  o.require(paths == 65536, "visited " + std::to_string(paths) + " paths");
  report(3, "Hitting-time path invariants over all 4^8 paths", o, seconds_since(start), kInvariantsBudgetS, "s");
}

// 4 ---------------------------------------------------------------------------
void sign_symmetry() {
  const auto start = Clock::now();
  Outcome o;
  for (const char* text : kFairModels) {
    const ExactLaw law(model(text), 8);
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto r = check_sign_symmetry(law, n);
      o.require(r.pass, std::string(text) + " n = " + std::to_string(n));
    }
  }
  report(4, "Exact sign symmetry, 5 models, N = 8, n <= 8", o, seconds_since(start), kSymmetryBudgetS, "s");
}

// 5 ---------------------------------------------------------------------------
void halving() {
  const auto start = Clock::now();
  Outcome o;
  std::size_t identities = 0;
  for (const char* text : kFairModels) {
    const ExactLaw law(model(text), 8);
    for (auto [k, l] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {0, 1}, {1, 1}, {2, 1}}) {
      const auto r = check_halving_suite(law, k, l, 8);
      identities += r.identities;
      o.require(r.pass, std::string(text) + " (k,l) = (" + std::to_string(k) + "," + std::to_string(l) + ")");
    }
  }
  o.require(identities > 0, "no identities checked");
  report(5, "Exact halving recursions, (k,l) in {(1,0),(0,1),(1,1),(2,1)}, N = 8 (" +
                std::to_string(identities) + " identities)",
         o, seconds_since(start), kHalvingBudgetS, "s");
}

// 6 ---------------------------------------------------------------------------
void c1_factorization() {
  const auto start = Clock::now();
  Outcome o;
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}};
  for (const char* text : {"constant:1/4", "constant:1/3", "constant:1/2", "q-history:1/4,1/8"}) {
    const ExactLaw law(model(text), 6);
    for (auto [k, l] : shapes) o.require(check_c1_suite(law, k, l, 6).pass, std::string(text) + " C1 failed");
  }
  const ExactLaw adv(model("adversarial:1/4,2/5,1/10"), 6);
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> beta1{1};
  const auto r = check_c1_factorization(adv, none, beta1);
  o.require(!r.pass && r.as_expected(), "adversarial model did not fail");
  bool witness = false;
  for (const auto& w : r.witnesses) {
    if (w.pattern == std::vector<std::uint8_t>{0, 1} && w.y_signs == std::vector<int>{1}) {
      witness = w.lhs == Rational(1, 5) && w.rhs == Rational(1, 8);
    }
  }
  o.require(witness, "witness P(xi_beta1 = 1, Q = (0,1)) = 1/5 vs 1/8 not reported");
  report(6, "C1 factorization both directions: holds for Q-adapted models, adversarial witness 1/5 vs 1/8, N = 6", o,
         seconds_since(start), kC1BudgetS, "s");
}

// 7 ---------------------------------------------------------------------------
void biased_walk() {
  const auto start = Clock::now();
  Outcome o;
  for (const char* p : {"3/5", "7/10"}) {
    const std::string text = std::string("biased:") + p + ",1/2";
    const ExactLaw law(model(text.c_str()), 8);
    o.require(check_biased_formula_all(law).pass, text + " exact formula / beta symmetry");
  }
  const auto mc = biased_walk_tests(Rational(7, 10), Rational(1, 2), 200, 100000, 7007, kChiSquareSignificance);
  o.require(*mc.x_bias.estimate > 0.7, "P(dX_1 = +1) not above p");
  o.require(mc.x_bias.statistic > kBiasedZ, "one-sided z = " + std::to_string(mc.x_bias.statistic));
  o.require(std::abs(*mc.y_fairness.estimate - 0.5) <= kFairnessSigmas * *mc.y_fairness.standard_error,
            "dY not fair within 3 sigma");
  std::ostringstream os;
  os << "Biased walk: exact formula for p in {3/5, 7/10}, N = 8; MC z = " << mc.x_bias.statistic
     << ", dY estimate " << *mc.y_fairness.estimate;
  report(7, os.str(), o, seconds_since(start), kBiasedBudgetS, "s");
}

// 8 ---------------------------------------------------------------------------
void block_uniformity() {
  const auto start = Clock::now();
  Outcome o;
  std::ostringstream os;
  os << "Sign-block uniformity: 64-cell chi-square at 1e6 reps, N = 64;";
  std::uint64_t seed = 8001;
  for (const char* text : {"constant:1/4", "adversarial:1/4,2/5,1/10"}) {
    const auto counts = mc_block_pmf(model(text), 3, 3, 64, 1000000, seed++);
    const auto r = chi_square_uniform(counts, kChiSquareSignificance);
    o.require(r.pass, std::string(text) + " p = " + std::to_string(r.p_value));
    os << ' ' << text << " p = " << r.p_value << " (completed " << counts.completed_reps << ")";
  }
  report(8, os.str(), o, seconds_since(start), kUniformityBudgetS, "s");
}

// 9 ---------------------------------------------------------------------------
double orthant_by_quadrature(double rho) {
  const double c = rho / std::sqrt(1.0 - rho * rho);
  auto f = [c](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * 0.5 *
           boost::math::erfc(-c * x / std::numbers::sqrt2);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

void gaussian() {
  const auto start = Clock::now();
  Outcome o;
  std::ostringstream os;
  os << "Gaussian driver: P(dT = 1) vs 1/2 + asin(rho)/pi at 1e6 steps;";
  std::uint64_t seed = 9001;
  for (double rho : {-0.8, 0.0, 0.5, 0.9}) {
    const double closed = 0.5 + std::asin(rho) / std::numbers::pi;
    o.require(std::abs(2 * orthant_by_quadrature(rho) - closed) < kQuadratureTolerance, "quadrature disagrees");
    const auto r = estimate_delta_T(rho, 1000000, seed++);
    o.require(std::abs(*r.target - closed) < 1e-15, "target");
    const double z = (*r.estimate - closed) / *r.standard_error;
    o.require(std::abs(z) <= kGaussianSigmas, "rho = " + std::to_string(rho) + " z = " + std::to_string(z));
    os << " rho " << rho << " z " << z << ';';
  }
  std::string text = os.str();
  text.pop_back();
  report(9, text, o, seconds_since(start), kGaussianBudgetS, "s");
}

// 10 --------------------------------------------------------------------------
struct Event {
  std::string description;
  PathPredicate predicate;
};

Event random_event(SplitMix64& rng, std::size_t N) {
  const auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
  switch (rng() % 7) {
    case 0: {
      const std::size_t k = pick(1, N);
      const int v = static_cast<int>(pick(0, k)) * 2 - static_cast<int>(k);
      return {"B_" + std::to_string(k) + " = " + std::to_string(v),
              [k, v](const JointPath& p) { return p.B()[k] == v; }};
    }
    case 1: {
      const std::size_t k = pick(1, N);
      const int v = static_cast<int>(pick(0, 4)) - 2;
      return {"W_" + std::to_string(k) + " >= " + std::to_string(v),
              [k, v](const JointPath& p) { return p.W()[k] >= v; }};
    }
    case 2: {
      const std::size_t k = pick(1, N);
      const std::size_t t = pick(0, k);
      return {"T_" + std::to_string(k) + " = " + std::to_string(t), [k, t](const JointPath& p) {
                std::size_t c = 0;
                for (std::size_t i = 0; i < k; ++i) c += p.pairs()[i].common();
                return c == t;
              }};
    }
    case 3: {
      const std::size_t n = pick(1, 4);
      return {"alpha_" + std::to_string(n) + " <= N and xi there = +1", [n](const JointPath& p) {
                const Decomposition d = decompose(p);
                return d.hits.alpha[n] && p.pairs()[*d.hits.alpha[n] - 1].xi == 1;
              }};
    }
    case 4: {
      const std::size_t m = pick(1, 3);
      const std::size_t h = pick(m, N);
      return {"beta_" + std::to_string(m) + " <= " + std::to_string(h), [m, h](const JointPath& p) {
                const Decomposition d = decompose(p);
                return d.hits.beta[m] && *d.hits.beta[m] <= h;
              }};
    }
    case 5: {
      const int v = static_cast<int>(pick(0, 3)) - 1;
      return {"X_{T_N} >= " + std::to_string(v), [v](const JointPath& p) {
                const Decomposition d = decompose(p);
                return d.X.back() >= v;
              }};
    }
    default: {
      const int v = static_cast<int>(pick(1, 4));
      return {"max_n B_n >= " + std::to_string(v), [v](const JointPath& p) {
                for (int b : p.B()) {
                  if (b >= v) return true;
                }
                return false;
              }};
    }
  }
}

void calibration() {
  const auto start = Clock::now();
  const std::size_t N = 8;
  const std::uint64_t reps = 1000000;
  std::vector<NamedModel> models;
  for (auto& nm : shipped_models()) {
    if (nm.model.exact()) models.push_back(nm);
  }
  SplitMix64 rng(1010);
  std::vector<std::vector<Event>> events(models.size());
  std::vector<std::vector<Rational>> exact(models.size());
  std::size_t chosen = 0;
  while (chosen < 20) {
    const std::size_t mi = chosen % models.size();
    Event e = random_event(rng, N);
    const Rational q = exact_event_prob(models[mi].model, static_cast<int>(N), e.predicate);
    if (q == 0 || q == 1) continue;  // degenerate events carry no information
    events[mi].push_back(std::move(e));
    exact[mi].push_back(q);
    ++chosen;
  }
  Outcome o;
  double worst = 0.0;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    std::vector<PathPredicate> preds;
    for (const auto& e : events[mi]) preds.push_back(e.predicate);
    const auto counts = mc_event_counts(models[mi].model, N, reps, 10000 + mi, preds);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const double q = exact[mi][i].get_d();
      const double z = (static_cast<double>(counts[i]) / reps - q) / std::sqrt(q * (1 - q) / reps);
      worst = std::max(worst, std::abs(z));
      o.require(std::abs(z) <= kCalibrationSigmas, models[mi].name + ": " + events[mi][i].description +
                                                       " exact " + to_string(exact[mi][i]) + " z " +
                                                       std::to_string(z));
    }
  }
  std::ostringstream os;
  os << "Oracle/MC calibration: 20 random events at N = 8, 1e6 paths, worst |z| = " << worst;
  report(10, os.str(), o, seconds_since(start), kCalibrationBudgetS, "s");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{worked_example, round_trip,      path_invariants, sign_symmetry, halving,
                                                    c1_factorization, biased_walk, block_uniformity, gaussian, calibration};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      ++failures;
      std::printf("FAIL (exception: %s)\n", e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
