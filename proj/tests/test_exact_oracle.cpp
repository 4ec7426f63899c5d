#include <gtest/gtest.h>

#include <functional>

#include "cowalk/decomposition.hpp"
#include "cowalk/exact_oracle.hpp"

using namespace cowalk;

namespace {

// Brute force over all 4^N index-coded paths with the step law written out
// by hand from (p, theta(history)), independent of the library's tree walk.
struct BruteForce {
  Rational p;
  std::function<Rational(const std::vector<SignPair>&)> theta;

  Rational prob(const std::vector<SignPair>& path) const {
    Rational w(1);
    std::vector<SignPair> h;
    for (SignPair s : path) {
      const Rational t = theta(h);
      if (s.xi == 1 && s.eta == 1) w *= t;
      else if (s.xi == -1 && s.eta == -1) w *= 1 - 2 * p + t;
      else w *= p - t;
      h.push_back(s);
    }
    return w;
  }

  Rational event(std::size_t n, const std::function<bool(const std::vector<SignPair>&)>& pred) const {
    Rational total(0);
    for (std::uint64_t index = 0; index < (std::uint64_t{1} << (2 * n)); ++index) {
      std::vector<SignPair> path;
      for (std::size_t i = 0; i < n; ++i) path.push_back(SignPair::from_index((index >> (2 * i)) & 3u));
      if (pred(path)) total += prob(path);
    }
    return total;
  }
};

// Step index of the n-th common (or counter) move, 0 if none.
std::size_t nth_move(const std::vector<SignPair>& path, std::size_t n, bool common) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i].common() == common && ++seen == n) return i + 1;
  }
  return 0;
}

ModelSpec adversarial() {
  return validate_model(ModelSpec::sign_adversarial(Rational(1, 4), Rational(2, 5), Rational(1, 10)));
}

}  // namespace

TEST(Enumeration, VisitsEveryLeafAndSumsToOne) {
  const auto m = validate_model(ModelSpec::constant(Rational(1, 3)));
  std::uint64_t leaves = 0;
  Rational total(0);
  enumerate_paths(m, 5, [&](const WeightedPath& w) {
    ++leaves;
    total += w.prob;
    EXPECT_EQ(w.pairs.size(), 5u);
  });
  EXPECT_EQ(leaves, 1024u);
  EXPECT_EQ(total, 1);
}

TEST(Enumeration, ZeroMassSubtreesAreVisitedOrPruned) {
  const auto m = validate_model(ModelSpec::constant(Rational(1, 2)));
  std::uint64_t visited = 0;
  enumerate_paths(m, 4, [&](const WeightedPath&) { ++visited; });
  EXPECT_EQ(visited, 256u);
  EnumerationOptions o;
  o.skip_null = true;
  visited = 0;
  enumerate_paths(m, 4, [&](const WeightedPath& w) {
    ++visited;
    EXPECT_GT(w.prob, 0);
  }, o);
  EXPECT_EQ(visited, 16u);
  const ExactLaw law(m, 4);
  EXPECT_EQ(law.enumerated(), 256u);
  EXPECT_EQ(law.paths().size(), 16u);
}

TEST(Enumeration, RejectsLargeHorizonsAndFloatModels) {
  const auto m = validate_model(ModelSpec::constant(Rational(1, 4)));
  try {
    ExactLaw law(m, 11);
    FAIL();
  } catch (const EnumerationError& e) {
    EXPECT_NE(std::string(e.what()).find("4194304"), std::string::npos) << e.what();
  }
  EnumerationOptions o;
  o.cap = 20;
  EXPECT_THROW(ExactLaw(m, 16, o), EnumerationError);
  EXPECT_THROW(ExactLaw(validate_model(ModelSpec::gaussian(0.5)), 3), EnumerationError);
}

TEST(Enumeration, ThreadCountDoesNotChangeTheLaw) {
  const auto m = adversarial();
  EnumerationOptions serial, parallel;
  parallel.threads = 3;
  const ExactLaw a(m, 6, serial);
  const ExactLaw b(m, 6, parallel);
  ASSERT_EQ(a.paths().size(), b.paths().size());
  for (std::size_t i = 0; i < a.paths().size(); ++i) {
    EXPECT_EQ(a.paths()[i].q_bits, b.paths()[i].q_bits);
    EXPECT_EQ(a.paths()[i].xi_bits, b.paths()[i].xi_bits);
    EXPECT_EQ(a.probabilities()[i], b.probabilities()[i]);
  }
}

TEST(ExactEventProb, MatchesBruteForce) {
  const auto m = adversarial();
  const BruteForce bf{Rational(1, 2), [](const std::vector<SignPair>& h) -> Rational {
                        if (h.empty()) return Rational(1, 4);
                        return h.back().xi == 1 ? Rational(2, 5) : Rational(1, 10);
                      }};
  const Rational lib = exact_event_prob(m, 5, [](const JointPath& p) { return p.B().back() > p.W().back(); });
  const Rational brute = bf.event(5, [](const std::vector<SignPair>& path) {
    int b = 0, w = 0;
    for (auto s : path) b += s.xi, w += s.eta;
    return b > w;
  });
  EXPECT_EQ(lib, brute);
  EXPECT_GT(lib, 0);
}

TEST(PathRecord, MatchesDecomposition) {
  const auto m = validate_model(ModelSpec::constant(Rational(1, 4)));
  const ExactLaw law(m, 5);
  std::size_t i = 0;
  enumerate_paths(m, 5, [&](const WeightedPath& w) {
    const PathRecord& r = law.paths()[i++];
    const Decomposition d = decompose(JointPath(std::vector<SignPair>(w.pairs.begin(), w.pairs.end())));
    for (std::size_t n = 1; n <= 5; ++n) {
      EXPECT_EQ(r.alpha[n], d.hits.alpha[n].value_or(0));
      EXPECT_EQ(r.beta[n], d.hits.beta[n].value_or(0));
      EXPECT_EQ(r.common_count(n), d.counters.T[n]);
      EXPECT_EQ(r.xi(n), w.pairs[n - 1].xi);
    }
  });
  EXPECT_EQ(i, law.paths().size());
}

TEST(TotalMass, HoldsForShippedExactModels) {
  for (const auto& [name, model] : shipped_models()) {
    if (!model.exact()) continue;
    const auto r = check_total_mass(ExactLaw(model, 6));
    EXPECT_TRUE(r.pass) << name;
    EXPECT_EQ(r.lhs, 1);
  }
}

TEST(SignSymmetry, FirstCommoveUnderQuarterTheta) {
  const ExactLaw law(validate_model(ModelSpec::constant(Rational(1, 4))), 3);
  const auto r = check_sign_symmetry(law, 1);
  EXPECT_TRUE(r.pass);
  // P(xi_{alpha_1} = 1, alpha_1 <= 3) = 1/2 (1 - (1/2)^3)
  EXPECT_EQ(r.lhs, Rational(7, 16));
}

TEST(SignSymmetry, HoldsForEveryFairModelAgainstBruteForce) {
  const auto m = adversarial();
  const BruteForce bf{Rational(1, 2), [](const std::vector<SignPair>& h) -> Rational {
                        if (h.empty()) return Rational(1, 4);
                        return h.back().xi == 1 ? Rational(2, 5) : Rational(1, 10);
                      }};
  const ExactLaw law(m, 6);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto r = check_sign_symmetry(law, n);
    EXPECT_TRUE(r.pass) << n;
    const Rational brute = bf.event(6, [n](const std::vector<SignPair>& path) {
      const std::size_t h = nth_move(path, n, true);
      return h && path[h - 1].xi == 1;
    });
    EXPECT_EQ(r.lhs, brute) << n;
  }
}

TEST(SignSymmetry, RejectsBiasedModel) {
  const ExactLaw law(validate_model(ModelSpec::biased(Rational(3, 5), Rational(1, 2))), 3);
  EXPECT_THROW(check_sign_symmetry(law, 1), std::exception);
}

TEST(Halving, SingleTupleValuesAgainstBruteForce) {
  const auto m = validate_model(ModelSpec::q_history(Rational(1, 4), Rational(1, 8)));
  const BruteForce bf{Rational(1, 2), [](const std::vector<SignPair>& h) -> Rational {
                        return Rational(1, 4) + ((!h.empty() && h.back().common()) ? Rational(1, 8) : Rational(0));
                      }};
  const ExactLaw law(m, 6);
  const std::vector<std::size_t> ns{1, 2};
  const std::vector<std::size_t> ms{1};
  const auto r = check_halving_recursion(law, ns, ms);
  EXPECT_TRUE(r.pass);
  // Aggregate: P(xi_{alpha_2} = +1; alpha_2 <= 6; alpha_2 > beta_1) = 1/2 P(alpha_2 <= 6; alpha_2 > beta_1).
  const Rational event = bf.event(6, [](const std::vector<SignPair>& path) {
    const std::size_t a2 = nth_move(path, 2, true);
    const std::size_t b1 = nth_move(path, 1, false);
    return a2 && b1 && a2 > b1;
  });
  const Rational plus = bf.event(6, [](const std::vector<SignPair>& path) {
    const std::size_t a2 = nth_move(path, 2, true);
    const std::size_t b1 = nth_move(path, 1, false);
    return a2 && b1 && a2 > b1 && path[a2 - 1].xi == 1;
  });
  EXPECT_EQ(plus, event / 2);
  EXPECT_GT(r.identities, 0u);
}

TEST(Halving, SuitesPassForEveryFairModel) {
  for (const auto& [name, model] : shipped_models()) {
    if (!model.exact() || model.exact_p() != Rational(1, 2)) continue;
    const ExactLaw law(model, 5);
    for (auto [k, l] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}}) {
      EXPECT_TRUE(check_halving_suite(law, k, l, 5).pass) << name << " " << k << "," << l;
    }
  }
}

TEST(C1, HoldsForQAdaptedModels) {
  for (const char* text : {"constant:1/4", "constant:1/3", "constant:1/2", "q-history:1/4,1/8"}) {
    const ExactLaw law(validate_model(parse_model(text)), 6);
    for (auto [k, l] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {0, 1}, {1, 1}, {2, 1}}) {
      const auto r = check_c1_suite(law, k, l, 6);
      EXPECT_TRUE(r.pass) << text;
      EXPECT_TRUE(r.as_expected()) << text;
      EXPECT_TRUE(r.witnesses.empty());
    }
  }
}

TEST(C1, AdversarialWitnessIsOneFifthVersusOneEighth) {
  const ExactLaw law(adversarial(), 2);
  const std::vector<std::size_t> none;
  const std::vector<std::size_t> beta1{1};
  const auto r = check_c1_factorization(law, none, beta1);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.expectation, Expectation::fails);
  EXPECT_TRUE(r.as_expected());
  bool found = false;
  for (const auto& w : r.witnesses) {
    if (w.pattern == std::vector<std::uint8_t>{0, 1} && w.y_signs == std::vector<int>{1}) {
      found = true;
      EXPECT_EQ(w.lhs, Rational(1, 5));
      EXPECT_EQ(w.rhs, Rational(1, 8));
    }
  }
  EXPECT_TRUE(found);
  // Hand computation: (+,-) then a common move after an up step.
  EXPECT_EQ(Rational(1, 4) * (2 * Rational(2, 5)), Rational(1, 5));
}

TEST(C1, AdversarialWitnessesHaveMinimalLength) {
  const ExactLaw law(adversarial(), 6);
  const auto r = check_c1_suite(law, 1, 1, 6);
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.witnesses.empty());
  for (const auto& w : r.witnesses) EXPECT_LE(w.pattern.size(), 6u);
}

TEST(BiasedFormula, ClosedFormAtHorizonTwo) {
  const ExactLaw law(validate_model(ModelSpec::biased(Rational(7, 10), Rational(1, 2))), 2);
  const auto r = check_biased_formula(law, 1);
  EXPECT_TRUE(r.pass);
  // alpha_1 = 1 with (+,+): 1/2; alpha_1 = 2 after a counter move: 2/5 * 1/2.
  EXPECT_EQ(r.lhs, Rational(7, 10));
}

TEST(BiasedFormula, HoldsOnShippedBiasedModels) {
  for (const char* text : {"biased:3/5,1/2", "biased:7/10,1/2", "biased:7/10,2/5", "biased:2/5,1/5"}) {
    const ExactLaw law(validate_model(parse_model(text)), 6);
    EXPECT_TRUE(check_biased_formula_all(law).pass) << text;
  }
}

TEST(OracleSuite, AdversarialIsAnExpectedNegativeControl) {
  const ExactLaw law(adversarial(), 5);
  for (const auto& r : run_oracle_suite(law)) {
    EXPECT_TRUE(r.as_expected()) << r.claim;
    if (r.claim.rfind("c1", 0) == 0) {
      EXPECT_FALSE(r.pass);
    } else {
      EXPECT_TRUE(r.pass) << r.claim;
    }
  }
}

TEST(ExactReportJson, RationalsAsNumDen) {
  const ExactLaw law(validate_model(ModelSpec::constant(Rational(1, 4))), 3);
  const auto j = exact_report_to_json(check_sign_symmetry(law, 1));
  EXPECT_EQ(j["lhs"]["num"], 7);
  EXPECT_EQ(j["lhs"]["den"], 16);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["claim"], "sign-symmetry");
}

TEST(IncreasingTuples, Counts) {
  EXPECT_EQ(increasing_tuples(0, 5).size(), 1u);
  EXPECT_EQ(increasing_tuples(2, 5).size(), 10u);
  EXPECT_EQ(increasing_tuples(3, 8).size(), 56u);
  EXPECT_EQ(increasing_tuples(2, 3), (std::vector<std::vector<std::size_t>>{{1, 2}, {1, 3}, {2, 3}}));
}
