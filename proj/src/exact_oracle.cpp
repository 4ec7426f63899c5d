#include "cowalk/exact_oracle.hpp"

#include <algorithm>
#include <sstream>
#include <thread>
#include <tuple>

#include "cowalk/decomposition.hpp"

namespace cowalk {

namespace {

constexpr std::size_t kMaxWitnesses = 64;

std::uint64_t pow4(int exponent) { return std::uint64_t{1} << (2 * exponent); }

void check_horizon(const ModelSpec& model, int horizon, const EnumerationOptions& options) {
  if (!model.exact()) {
    throw EnumerationError("exact enumeration needs an exact model; " + std::string(to_string(model.kind())) +
                           " is float-only");
  }
  if (horizon < 1) throw EnumerationError("horizon must be at least 1");
  const int cap = std::min(options.cap, kMaxEnumerationHorizon);
  if (horizon > cap) {
    std::ostringstream os;
    os << "horizon " << horizon << " exceeds the enumeration cap " << cap << " (4^" << horizon << " = ";
    if (horizon <= 31) {
      os << pow4(horizon) << " paths";
    } else {
      os << "more than 2^62 paths";
    }
    os << ")";
    throw EnumerationError(os.str());
  }
}

// Depth-first walk of the increment tree. `leaf` receives the prefix and
// its weight at depth `horizon`. Zero-weight subtrees are either pruned (and
// counted) or walked without evaluating the model, whose theta need not be
// meaningful off the support.
template <class Leaf>
void descend(const ModelSpec& model, int horizon, std::vector<SignPair>& prefix, const Rational& weight,
             bool skip_null, Leaf& leaf, std::uint64_t& leaves) {
  const int depth = static_cast<int>(prefix.size());
  if (depth == horizon) {
    ++leaves;
    if (!skip_null || weight != 0) leaf(prefix, weight);
    return;
  }
  if (weight == 0) {
    if (skip_null) {
      leaves += pow4(horizon - depth);
      return;
    }
    for (SignPair s : kAllSignPairs) {
      prefix.push_back(s);
      descend(model, horizon, prefix, weight, skip_null, leaf, leaves);
      prefix.pop_back();
    }
    return;
  }
  const auto pmf = exact_step_distribution(model, prefix);
  Rational child;
  for (SignPair s : kAllSignPairs) {
    child = weight * pmf[s];
    prefix.push_back(s);
    descend(model, horizon, prefix, child, skip_null, leaf, leaves);
    prefix.pop_back();
  }
}

PathRecord make_record(std::span<const SignPair> pairs) {
  PathRecord r;
  std::size_t t = 0;
  std::size_t s = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto step = static_cast<std::uint8_t>(i + 1);
    if (pairs[i].xi > 0) r.xi_bits |= 1u << i;
    if (pairs[i].common()) {
      r.q_bits |= 1u << i;
      r.alpha[++t] = step;
    } else {
      r.beta[++s] = step;
    }
  }
  return r;
}

void require_fair(const ExactLaw& law, const char* claim) {
  if (law.model().exact_p() != Rational(1, 2)) {
    throw ContractViolation(std::string(claim) + " requires p = 1/2, model has p = " +
                            to_string(law.model().exact_p()));
  }
}

void require_indices(const ExactLaw& law, std::span<const std::size_t> indices, const char* name) {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > static_cast<std::size_t>(law.horizon())) {
      throw ContractViolation(std::string(name) + " index " + std::to_string(indices[i]) +
                              " outside 1.." + std::to_string(law.horizon()));
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw ContractViolation(std::string(name) + " indices must be strictly increasing");
    }
  }
}

std::string indices_string(std::span<const std::size_t> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

std::string signs_string(std::span<const int> v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << (v[i] > 0 ? "+1" : "-1");
  os << ')';
  return os.str();
}

ExactReport base_report(const ExactLaw& law, std::string claim) {
  ExactReport r;
  r.claim = std::move(claim);
  r.model = law.model().describe();
  r.horizon = law.horizon();
  r.pass = true;
  return r;
}

void add_witness(ExactReport& report, Witness w) {
  if (report.witnesses.size() < kMaxWitnesses) report.witnesses.push_back(std::move(w));
}

// Records one identity; on the first failure lhs/rhs switch to it.
void record_identity(ExactReport& report, const Rational& lhs, const Rational& rhs, const auto& make_witness) {
  ++report.identities;
  if (lhs == rhs) return;
  if (report.pass) {
    report.pass = false;
    report.lhs = lhs;
    report.rhs = rhs;
  }
  add_witness(report, make_witness());
}

void finish(ExactReport& report, Rational aggregate_lhs, Rational aggregate_rhs) {
  if (report.pass) {
    report.lhs = std::move(aggregate_lhs);
    report.rhs = std::move(aggregate_rhs);
    report.pass = report.lhs == report.rhs;
  }
}

// Folds `part` into `into`: identities add up; the first failure wins lhs/rhs.
// For pattern witnesses only the shortest patterns are kept.
void absorb(ExactReport& into, const ExactReport& part, bool first) {
  into.identities += part.identities;
  if (first) {
    into.lhs = part.lhs;
    into.rhs = part.rhs;
  }
  if (!part.pass && into.pass) {
    into.pass = false;
    into.lhs = part.lhs;
    into.rhs = part.rhs;
  }
  for (const Witness& w : part.witnesses) {
    if (!w.pattern.empty() && !into.witnesses.empty() && !into.witnesses.front().pattern.empty()) {
      const std::size_t best = into.witnesses.front().pattern.size();
      if (w.pattern.size() > best) continue;
      if (w.pattern.size() < best) into.witnesses.clear();
    }
    add_witness(into, w);
  }
}

std::vector<int> cell_signs(std::size_t cell, std::size_t offset, std::size_t count) {
  std::vector<int> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(((cell >> (offset + i)) & 1u) ? 1 : -1);
  return out;
}

// Sign-vector cell for path r: bit i <=> xi_{alpha_{n_i}} = +1, bit k + j <=> xi_{beta_{m_j}} = +1.
std::size_t sign_cell(const PathRecord& r, std::span<const std::size_t> n_idx, std::span<const std::size_t> m_idx) {
  std::size_t cell = 0;
  for (std::size_t i = 0; i < n_idx.size(); ++i) {
    if (r.xi(r.alpha[n_idx[i]]) > 0) cell |= std::size_t{1} << i;
  }
  for (std::size_t j = 0; j < m_idx.size(); ++j) {
    if (r.xi(r.beta[m_idx[j]]) > 0) cell |= std::size_t{1} << (n_idx.size() + j);
  }
  return cell;
}

}  // namespace

void enumerate_paths(const ModelSpec& model, int horizon, const std::function<void(const WeightedPath&)>& visit,
                     EnumerationOptions options) {
  check_horizon(model, horizon, options);
  std::vector<SignPair> prefix;
  prefix.reserve(static_cast<std::size_t>(horizon));
  std::uint64_t leaves = 0;
  auto leaf = [&](std::span<const SignPair> pairs, const Rational& weight) { visit(WeightedPath{pairs, weight}); };
  descend(model, horizon, prefix, Rational(1), options.skip_null, leaf, leaves);
}

Rational exact_event_prob(const ModelSpec& model, int horizon, const PathPredicate& predicate,
                          EnumerationOptions options) {
  options.skip_null = true;
  Rational total(0);
  enumerate_paths(
      model, horizon,
      [&](const WeightedPath& wp) {
        if (predicate(JointPath(std::vector<SignPair>(wp.pairs.begin(), wp.pairs.end())))) total += wp.prob;
      },
      options);
  return total;
}

ExactLaw::ExactLaw(const ModelSpec& model, int horizon, EnumerationOptions options)
    : model_(model), horizon_(horizon) {
  check_horizon(model, horizon, options);

  struct Branch {
    std::vector<PathRecord> records;
    std::vector<Rational> probs;
    std::uint64_t leaves = 0;
  };
  std::array<Branch, 4> branches;
  const auto first = exact_step_distribution(model, {});

  auto run_branch = [&](std::size_t b) {
    Branch& out = branches[b];
    std::vector<SignPair> prefix{kAllSignPairs[b]};
    prefix.reserve(static_cast<std::size_t>(horizon));
    auto leaf = [&](std::span<const SignPair> pairs, const Rational& weight) {
      if (weight == 0) return;
      out.records.push_back(make_record(pairs));
      out.probs.push_back(weight);
    };
    descend(model, horizon, prefix, first.prob[b], options.skip_null, leaf, out.leaves);
  };

  if (options.threads > 1) {
    std::vector<std::jthread> workers;
    for (std::size_t b = 0; b < 4; ++b) workers.emplace_back(run_branch, b);
  } else {
    for (std::size_t b = 0; b < 4; ++b) run_branch(b);
  }

  for (Branch& b : branches) {
    enumerated_ += b.leaves;
    records_.insert(records_.end(), b.records.begin(), b.records.end());
    for (Rational& p : b.probs) {
      total_ += p;
      probs_.push_back(std::move(p));
    }
  }
}

std::vector<std::vector<std::size_t>> increasing_tuples(std::size_t size, std::size_t max_value) {
  std::vector<std::vector<std::size_t>> out;
  if (size == 0) {
    out.emplace_back();
    return out;
  }
  if (size > max_value) return out;
  std::vector<std::size_t> current(size);
  for (std::size_t i = 0; i < size; ++i) current[i] = i + 1;
  while (true) {
    out.push_back(current);
    std::size_t i = size;
    while (i > 0 && current[i - 1] == max_value - (size - i)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < size; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

std::string pattern_string(std::span<const std::uint8_t> pattern) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < pattern.size(); ++i) os << (i ? "," : "") << int(pattern[i]);
  os << ')';
  return os.str();
}

ExactReport check_total_mass(const ExactLaw& law) {
  ExactReport r = base_report(law, "total-mass");
  const std::uint64_t expected_leaves = pow4(law.horizon());
  record_identity(r, Rational(law.enumerated()), Rational(expected_leaves), [&] {
    Witness w;
    w.description = "leaf count " + std::to_string(law.enumerated()) + " != 4^N";
    w.lhs = Rational(law.enumerated());
    w.rhs = Rational(expected_leaves);
    return w;
  });
  record_identity(r, law.total_mass(), Rational(1), [&] {
    Witness w;
    w.description = "total probability differs from 1";
    w.lhs = law.total_mass();
    w.rhs = 1;
    return w;
  });
  finish(r, law.total_mass(), Rational(1));
  return r;
}

ExactReport check_sign_symmetry(const ExactLaw& law, std::size_t n) {
  require_fair(law, "sign symmetry");
  const std::size_t horizon = static_cast<std::size_t>(law.horizon());
  if (n < 1 || n > horizon) throw ContractViolation("index n must lie in 1..N");

  std::vector<Rational> a_plus(horizon + 1), a_minus(horizon + 1), b_plus(horizon + 1), b_minus(horizon + 1);
  const auto paths = law.paths();
  const auto probs = law.probabilities();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& r = paths[i];
    if (const std::size_t h = r.alpha[n]) (r.xi(h) > 0 ? a_plus : a_minus)[h] += probs[i];
    if (const std::size_t h = r.beta[n]) (r.xi(h) > 0 ? b_plus : b_minus)[h] += probs[i];
  }

  ExactReport rep = base_report(law, "sign-symmetry");
  rep.n_indices = {n};
  rep.m_indices = {n};
  Rational plus_total(0), all_total(0);
  for (std::size_t h = n; h <= horizon; ++h) {
    record_identity(rep, a_plus[h], a_minus[h], [&] {
      Witness w;
      w.description = "alpha_" + std::to_string(n) + " = " + std::to_string(h) + ": P(xi=+1) vs P(xi=-1)";
      w.n_indices = {n};
      w.step = h;
      w.lhs = a_plus[h];
      w.rhs = a_minus[h];
      return w;
    });
    record_identity(rep, b_plus[h], b_minus[h], [&] {
      Witness w;
      w.description = "beta_" + std::to_string(n) + " = " + std::to_string(h) + ": P(xi=+1) vs P(xi=-1)";
      w.m_indices = {n};
      w.step = h;
      w.lhs = b_plus[h];
      w.rhs = b_minus[h];
      return w;
    });
    plus_total += a_plus[h];
    all_total += a_plus[h] + a_minus[h];
  }
  finish(rep, plus_total, all_total / 2);
  return rep;
}

ExactReport check_sign_symmetry_all(const ExactLaw& law) {
  ExactReport out = base_report(law, "sign-symmetry");
  for (std::size_t n = 1; n <= static_cast<std::size_t>(law.horizon()); ++n) {
    absorb(out, check_sign_symmetry(law, n), n == 1);
  }
  return out;
}

ExactReport check_halving_recursion(const ExactLaw& law, std::span<const std::size_t> n_idx,
                                    std::span<const std::size_t> m_idx) {
  require_fair(law, "halving recursion");
  require_indices(law, n_idx, "alpha");
  require_indices(law, m_idx, "beta");
  const std::size_t k = n_idx.size();
  const std::size_t l = m_idx.size();
  if (k + l == 0) throw ContractViolation("halving recursion needs at least one index");
  const std::size_t cells = std::size_t{1} << (k + l);

  // Mass of each sign cell on {alpha_{n_k} <= N, alpha_{n_k} > beta_{m_l}} and
  // on {beta_{m_l} <= N, beta_{m_l} > alpha_{n_k}}.
  std::vector<Rational> alpha_last(cells), beta_last(cells);
  const auto paths = law.paths();
  const auto probs = law.probabilities();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& r = paths[i];
    const std::size_t a = k ? r.alpha[n_idx[k - 1]] : 0;
    const std::size_t b = l ? r.beta[m_idx[l - 1]] : 0;
    const bool a_reached = k == 0 || a != 0;
    const bool b_reached = l == 0 || b != 0;
    if (k > 0 && a != 0 && b_reached && a > b) {
      alpha_last[sign_cell(r, n_idx, m_idx)] += probs[i];
    } else if (l > 0 && b != 0 && a_reached && b > a) {
      beta_last[sign_cell(r, n_idx, m_idx)] += probs[i];
    }
  }

  ExactReport rep = base_report(law, "halving-recursion");
  rep.n_indices.assign(n_idx.begin(), n_idx.end());
  rep.m_indices.assign(m_idx.begin(), m_idx.end());
  Rational plus_mass(0), all_mass(0);
  auto side = [&](const std::vector<Rational>& mass, std::size_t bit, const char* label) {
    for (std::size_t cell = 0; cell < cells; ++cell) {
      const Rational marginal = (mass[cell] + mass[cell ^ bit]) / 2;
      record_identity(rep, mass[cell], marginal, [&] {
        Witness w;
        w.description = std::string(label) + " latest; alpha indices " + indices_string(n_idx) +
                        ", beta indices " + indices_string(m_idx);
        w.n_indices = rep.n_indices;
        w.m_indices = rep.m_indices;
        w.x_signs = cell_signs(cell, 0, k);
        w.y_signs = cell_signs(cell, k, l);
        w.description += ", signs " + signs_string(w.x_signs) + signs_string(w.y_signs);
        w.lhs = mass[cell];
        w.rhs = marginal;
        return w;
      });
      all_mass += mass[cell];
      if (cell & bit) plus_mass += mass[cell];
    }
  };
  if (k > 0) side(alpha_last, std::size_t{1} << (k - 1), "alpha");
  if (l > 0) side(beta_last, std::size_t{1} << (k + l - 1), "beta");
  finish(rep, plus_mass, all_mass / 2);
  return rep;
}

ExactReport check_halving_suite(const ExactLaw& law, std::size_t k, std::size_t l, std::size_t max_index) {
  ExactReport out = base_report(law, "halving-recursion(" + std::to_string(k) + "," + std::to_string(l) + ")");
  bool first = true;
  for (const auto& ns : increasing_tuples(k, max_index)) {
    for (const auto& ms : increasing_tuples(l, max_index)) {
      absorb(out, check_halving_recursion(law, ns, ms), first);
      first = false;
    }
  }
  return out;
}

ExactReport check_c1_factorization(const ExactLaw& law, std::span<const std::size_t> n_idx,
                                   std::span<const std::size_t> m_idx) {
  require_fair(law, "C1 factorization");
  require_indices(law, n_idx, "alpha");
  require_indices(law, m_idx, "beta");
  const std::size_t k = n_idx.size();
  const std::size_t l = m_idx.size();
  if (k + l == 0) throw ContractViolation("C1 factorization needs at least one index");
  const std::size_t horizon = static_cast<std::size_t>(law.horizon());
  const std::size_t cells = std::size_t{1} << (k + l);
  const std::size_t patterns = std::size_t{1} << horizon;
  const std::size_t need_common = k ? n_idx[k - 1] : 0;
  const std::size_t need_counter = l ? m_idx[l - 1] : 0;

  // Full-length tables; prefix tables are folded down from them, which is
  // exact because a prefix under which the indices are reached extends only
  // to full patterns under which they are reached.
  std::vector<Rational> joint(patterns * cells), marg(patterns);
  const auto paths = law.paths();
  const auto probs = law.probabilities();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& r = paths[i];
    marg[r.q_bits] += probs[i];
    if ((k == 0 || r.alpha[need_common]) && (l == 0 || r.beta[need_counter])) {
      joint[r.q_bits * cells + sign_cell(r, n_idx, m_idx)] += probs[i];
    }
  }

  ExactReport rep = base_report(law, "c1-factorization");
  rep.n_indices.assign(n_idx.begin(), n_idx.end());
  rep.m_indices.assign(m_idx.begin(), m_idx.end());
  rep.expectation = c1_expectation(law.model());

  auto reached = [&](std::size_t bits, std::size_t length) {
    const auto ones = static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(bits)));
    return ones >= need_common && length - ones >= need_counter;
  };

  // Aggregate identity at full length.
  Rational agg_lhs(0), agg_rhs(0);
  for (std::size_t q = 0; q < patterns; ++q) {
    if (!reached(q, horizon)) continue;
    agg_lhs += joint[q * cells + cells - 1];
    agg_rhs += marg[q];
  }
  agg_rhs /= Rational(cells);

  // Levels from N down to 1; failures are kept for the shortest failing length.
  std::vector<std::vector<Witness>> failures(horizon + 1);
  std::vector<Rational> level_joint = joint, level_marg = marg;
  for (std::size_t length = horizon; length >= 1; --length) {
    const std::size_t count = std::size_t{1} << length;
    for (std::size_t q = 0; q < count; ++q) {
      if (!reached(q, length)) continue;
      for (std::size_t cell = 0; cell < cells; ++cell) {
        const Rational& lhs = level_joint[q * cells + cell];
        const Rational rhs = level_marg[q] / Rational(cells);
        ++rep.identities;
        if (lhs == rhs) continue;
        Witness w;
        for (std::size_t h = 0; h < length; ++h) w.pattern.push_back(static_cast<std::uint8_t>((q >> h) & 1u));
        w.n_indices = rep.n_indices;
        w.m_indices = rep.m_indices;
        w.x_signs = cell_signs(cell, 0, k);
        w.y_signs = cell_signs(cell, k, l);
        w.lhs = lhs;
        w.rhs = rhs;
        w.description = "Q=" + pattern_string(w.pattern) + ", alpha indices " + indices_string(n_idx) +
                        " signs " + signs_string(w.x_signs) + ", beta indices " + indices_string(m_idx) +
                        " signs " + signs_string(w.y_signs);
        failures[length].push_back(std::move(w));
      }
    }
    if (length == 1) break;
    // Fold to length - 1: drop step `length`.
    const std::size_t half = count / 2;
    std::vector<Rational> next_joint(half * cells), next_marg(half);
    for (std::size_t q = 0; q < count; ++q) {
      const std::size_t p = q & (half - 1);
      next_marg[p] += level_marg[q];
      for (std::size_t cell = 0; cell < cells; ++cell) next_joint[p * cells + cell] += level_joint[q * cells + cell];
    }
    level_joint = std::move(next_joint);
    level_marg = std::move(next_marg);
  }

  for (std::size_t length = 1; length <= horizon; ++length) {
    auto& ws = failures[length];
    if (ws.empty()) continue;
    std::stable_sort(ws.begin(), ws.end(), [](const Witness& a, const Witness& b) {
      if (a.pattern != b.pattern) return a.pattern < b.pattern;
      // +1 signs first
      return std::tie(b.x_signs, b.y_signs) < std::tie(a.x_signs, a.y_signs);
    });
    rep.pass = false;
    rep.lhs = ws.front().lhs;
    rep.rhs = ws.front().rhs;
    for (auto& w : ws) add_witness(rep, std::move(w));
    break;
  }
  finish(rep, agg_lhs, agg_rhs);
  return rep;
}

ExactReport check_c1_suite(const ExactLaw& law, std::size_t k, std::size_t l, std::size_t max_index) {
  ExactReport out = base_report(law, "c1-factorization(" + std::to_string(k) + "," + std::to_string(l) + ")");
  out.expectation = c1_expectation(law.model());
  bool first = true;
  for (const auto& ns : increasing_tuples(k, max_index)) {
    for (const auto& ms : increasing_tuples(l, max_index)) {
      absorb(out, check_c1_factorization(law, ns, ms), first);
      first = false;
    }
  }
  return out;
}

ExactReport check_biased_formula(const ExactLaw& law, std::size_t n) {
  const std::size_t horizon = static_cast<std::size_t>(law.horizon());
  if (n < 1 || n > horizon) throw ContractViolation("index n must lie in 1..N");
  const Rational drift = 2 * law.model().exact_p() - 1;

  std::vector<Rational> a_plus(horizon + 1), a_minus(horizon + 1), b_plus(horizon + 1), b_minus(horizon + 1);
  std::vector<Rational> before(horizon + 1);  // before[h] = P(T_{h-1} = n - 1)
  const auto paths = law.paths();
  const auto probs = law.probabilities();
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const PathRecord& r = paths[i];
    if (const std::size_t h = r.alpha[n]) (r.xi(h) > 0 ? a_plus : a_minus)[h] += probs[i];
    if (const std::size_t h = r.beta[n]) (r.xi(h) > 0 ? b_plus : b_minus)[h] += probs[i];
    for (std::size_t h = n; h <= horizon; ++h) {
      if (r.common_count(h - 1) == n - 1) before[h] += probs[i];
    }
  }

  ExactReport rep = base_report(law, "biased-formula");
  rep.n_indices = {n};
  rep.m_indices = {n};
  Rational plus_total(0), hit_total(0), before_total(0);
  for (std::size_t h = n; h <= horizon; ++h) {
    const Rational diff = a_plus[h] - a_minus[h];
    const Rational predicted = drift * before[h];
    record_identity(rep, diff, predicted, [&] {
      Witness w;
      w.description = "alpha_" + std::to_string(n) + " = " + std::to_string(h) +
                      ": P(xi=+1) - P(xi=-1) vs (2p-1) P(T_{h-1} = n-1)";
      w.n_indices = {n};
      w.step = h;
      w.lhs = diff;
      w.rhs = predicted;
      return w;
    });
    record_identity(rep, b_plus[h], b_minus[h], [&] {
      Witness w;
      w.description = "beta_" + std::to_string(n) + " = " + std::to_string(h) + ": P(xi=+1) vs P(xi=-1)";
      w.m_indices = {n};
      w.step = h;
      w.lhs = b_plus[h];
      w.rhs = b_minus[h];
      return w;
    });
    plus_total += a_plus[h];
    hit_total += a_plus[h] + a_minus[h];
    before_total += before[h];
  }
  const Rational predicted_total = (hit_total + drift * before_total) / 2;
  record_identity(rep, plus_total, predicted_total, [&] {
    Witness w;
    w.description = "summed formula for alpha_" + std::to_string(n);
    w.n_indices = {n};
    w.lhs = plus_total;
    w.rhs = predicted_total;
    return w;
  });
  finish(rep, plus_total, predicted_total);
  return rep;
}

ExactReport check_biased_formula_all(const ExactLaw& law) {
  ExactReport out = base_report(law, "biased-formula");
  for (std::size_t n = 1; n <= static_cast<std::size_t>(law.horizon()); ++n) {
    absorb(out, check_biased_formula(law, n), n == 1);
  }
  return out;
}

Expectation c1_expectation(const ModelSpec& model) {
  return model.kind() == ModelKind::sign_adversarial_theta ? Expectation::fails : Expectation::holds;
}

std::vector<ExactReport> run_oracle_suite(const ExactLaw& law, const OracleSuiteOptions& options) {
  const std::size_t max_index = options.max_index ? std::min<std::size_t>(options.max_index, law.horizon())
                                                  : static_cast<std::size_t>(law.horizon());
  std::vector<ExactReport> out;
  out.push_back(check_total_mass(law));
  if (law.model().exact_p() == Rational(1, 2)) {
    out.push_back(check_sign_symmetry_all(law));
    for (auto [k, l] : options.halving_shapes) out.push_back(check_halving_suite(law, k, l, max_index));
    for (auto [k, l] : options.c1_shapes) out.push_back(check_c1_suite(law, k, l, max_index));
  } else {
    out.push_back(check_biased_formula_all(law));
  }
  return out;
}

nlohmann::json exact_report_to_json(const ExactReport& report) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const Witness& w : report.witnesses) {
    nlohmann::json node{{"description", w.description}, {"lhs", rational_to_json(w.lhs)},
                        {"rhs", rational_to_json(w.rhs)}};
    if (!w.pattern.empty()) node["pattern"] = w.pattern;
    if (!w.n_indices.empty()) node["alpha_indices"] = w.n_indices;
    if (!w.m_indices.empty()) node["beta_indices"] = w.m_indices;
    if (!w.x_signs.empty()) node["x_signs"] = w.x_signs;
    if (!w.y_signs.empty()) node["y_signs"] = w.y_signs;
    if (w.step) node["step"] = w.step;
    witnesses.push_back(std::move(node));
  }
  return nlohmann::json{
      {"claim", report.claim},
      {"model", report.model},
      {"horizon", report.horizon},
      {"alpha_indices", report.n_indices},
      {"beta_indices", report.m_indices},
      {"lhs", rational_to_json(report.lhs)},
      {"rhs", rational_to_json(report.rhs)},
      {"pass", report.pass},
      {"identities", report.identities},
      {"expectation", report.expectation == Expectation::holds ? "holds" : "fails"},
      {"as_expected", report.as_expected()},
      {"witnesses", std::move(witnesses)},
  };
}

}  // namespace cowalk
