#include "cowalk/walk_models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cowalk {

namespace {

std::string describe_history(History history) {
  std::ostringstream os;
  os << "history of length " << history.size() << " [";
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i) os << ' ';
    os << '(' << (history[i].xi > 0 ? '+' : '-') << ',' << (history[i].eta > 0 ? '+' : '-') << ')';
  }
  os << ']';
  return os.str();
}

Rational theta_lower_bound(const Rational& p) {
  Rational lo = 2 * p - 1;
  return lo < 0 ? Rational(0) : lo;
}

void check_theta(const ModelSpec& model, const Rational& theta, History history) {
  const Rational& p = model.exact_p();
  const Rational lo = theta_lower_bound(p);
  if (theta < lo || theta > p) {
    throw ModelError("theta = " + to_string(theta) + " outside [" + to_string(lo) + ", " +
                     to_string(p) + "] for " + std::string(to_string(model.kind())) + " at " +
                     describe_history(history));
  }
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

JointPath::JointPath(std::vector<SignPair> pairs) : pairs_(std::move(pairs)) {
  b_.reserve(pairs_.size() + 1);
  w_.reserve(pairs_.size() + 1);
  for (const SignPair& s : pairs_) {
    b_.push_back(b_.back() + s.xi);
    w_.push_back(w_.back() + s.eta);
  }
}

JointPath JointPath::from_levels(std::span<const int> B, std::span<const int> W) {
  if (B.size() != W.size()) {
    throw std::invalid_argument("B and W have different lengths (" + std::to_string(B.size()) +
                                " vs " + std::to_string(W.size()) + ")");
  }
  std::vector<SignPair> pairs;
  pairs.reserve(B.size());
  int prev_b = 0;
  int prev_w = 0;
  for (std::size_t n = 0; n < B.size(); ++n) {
    const int db = B[n] - prev_b;
    const int dw = W[n] - prev_w;
    if ((db != 1 && db != -1) || (dw != 1 && dw != -1)) {
      throw std::invalid_argument("step " + std::to_string(n + 1) + " is not a +-1 move (dB = " +
                                  std::to_string(db) + ", dW = " + std::to_string(dw) + ")");
    }
    pairs.emplace_back(db, dw);
    prev_b = B[n];
    prev_w = W[n];
  }
  return JointPath(std::move(pairs));
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::constant_theta: return "constant-theta";
    case ModelKind::q_history_theta: return "q-history-theta";
    case ModelKind::sign_adversarial_theta: return "sign-adversarial-theta";
    case ModelKind::biased: return "biased";
    case ModelKind::gaussian: return "gaussian";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k : {ModelKind::constant_theta, ModelKind::q_history_theta,
                      ModelKind::sign_adversarial_theta, ModelKind::biased, ModelKind::gaussian}) {
    if (to_string(k) == name) return k;
  }
  throw ModelError("unknown model kind '" + std::string(name) + "'");
}

ModelSpec ModelSpec::constant(Rational theta) {
  ModelSpec m;
  m.kind_ = ModelKind::constant_theta;
  m.theta0_ = std::move(theta);
  m.refresh_doubles();
  return m;
}

ModelSpec ModelSpec::q_history(Rational base, Rational weight) {
  ModelSpec m;
  m.kind_ = ModelKind::q_history_theta;
  m.theta0_ = std::move(base);
  m.theta2_ = std::move(weight);
  m.theta1_ = m.theta0_ + m.theta2_;
  m.refresh_doubles();
  return m;
}

ModelSpec ModelSpec::sign_adversarial(Rational first, Rational after_up, Rational after_down) {
  ModelSpec m;
  m.kind_ = ModelKind::sign_adversarial_theta;
  m.theta0_ = std::move(first);
  m.theta1_ = std::move(after_up);
  m.theta2_ = std::move(after_down);
  m.refresh_doubles();
  return m;
}

ModelSpec ModelSpec::biased(Rational p, Rational theta) {
  ModelSpec m;
  m.kind_ = ModelKind::biased;
  m.p_ = std::move(p);
  m.theta0_ = std::move(theta);
  m.refresh_doubles();
  return m;
}

ModelSpec ModelSpec::gaussian(double rho) {
  ModelSpec m;
  m.kind_ = ModelKind::gaussian;
  m.rho_ = rho;
  m.refresh_doubles();
  if (std::isfinite(rho) && std::abs(rho) <= 1.0) m.theta0_double_ = gaussian_theta(rho);
  return m;
}

void ModelSpec::refresh_doubles() {
  p_double_ = p_.get_d();
  theta0_double_ = theta0_.get_d();
  theta1_double_ = theta1_.get_d();
  theta2_double_ = theta2_.get_d();
}

const Rational& ModelSpec::exact_p() const {
  if (!exact()) throw ModelError("gaussian model has no exact parameters");
  return p_;
}

const Rational& ModelSpec::exact_theta(History history) const {
  switch (kind_) {
    case ModelKind::constant_theta:
    case ModelKind::biased:
      return theta0_;
    case ModelKind::q_history_theta:
      return history.empty() || !history.back().common() ? theta0_ : theta1_;
    case ModelKind::sign_adversarial_theta:
      if (history.empty()) return theta0_;
      return history.back().xi > 0 ? theta1_ : theta2_;
    case ModelKind::gaussian:
      break;
  }
  throw ModelError("gaussian model has no exact theta");
}

double ModelSpec::theta(History history) const noexcept {
  switch (kind_) {
    case ModelKind::constant_theta:
    case ModelKind::biased:
    case ModelKind::gaussian:
      return theta0_double_;
    case ModelKind::q_history_theta:
      return history.empty() || !history.back().common() ? theta0_double_ : theta1_double_;
    case ModelKind::sign_adversarial_theta:
      if (history.empty()) return theta0_double_;
      return history.back().xi > 0 ? theta1_double_ : theta2_double_;
  }
  return theta0_double_;
}

std::vector<std::pair<std::string, Rational>> ModelSpec::parameters() const {
  switch (kind_) {
    case ModelKind::constant_theta: return {{"theta", theta0_}};
    case ModelKind::q_history_theta: return {{"base", theta0_}, {"weight", theta2_}};
    case ModelKind::sign_adversarial_theta:
      return {{"first", theta0_}, {"after_up", theta1_}, {"after_down", theta2_}};
    case ModelKind::biased: return {{"p", p_}, {"theta", theta0_}};
    case ModelKind::gaussian: return {};
  }
  return {};
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ModelKind::constant_theta: os << "constant:" << theta0_; break;
    case ModelKind::q_history_theta: os << "q-history:" << theta0_ << ',' << theta2_; break;
    case ModelKind::sign_adversarial_theta:
      os << "adversarial:" << theta0_ << ',' << theta1_ << ',' << theta2_;
      break;
    case ModelKind::biased: os << "biased:" << p_ << ',' << theta0_; break;
    case ModelKind::gaussian: os << "gaussian:" << nlohmann::json(rho_).dump(); break;
  }
  return os.str();
}

namespace {

void probe_exhaustive(const ModelSpec& model, std::vector<SignPair>& history, int depth) {
  const auto pmf = exact_step_distribution(model, history);
  if (static_cast<int>(history.size()) + 1 >= depth) return;
  for (SignPair s : kAllSignPairs) {
    if (pmf[s] == 0) continue;  // unreachable continuation
    history.push_back(s);
    probe_exhaustive(model, history, depth);
    history.pop_back();
  }
}

}  // namespace

ModelSpec validate_model(const ModelSpec& spec, ValidationOptions options) {
  ModelSpec out = spec;
  if (spec.kind() == ModelKind::gaussian) {
    if (!std::isfinite(spec.rho()) || std::abs(spec.rho()) > 1.0) {
      throw ModelError("gaussian model needs |rho| <= 1, got " + nlohmann::json(spec.rho()).dump());
    }
    out.validated_ = true;
    return out;
  }

  const Rational& p = spec.exact_p();
  if (p <= 0 || p >= 1) throw ModelError("p = " + to_string(p) + " must lie in (0, 1)");
  if (spec.kind() != ModelKind::biased && p != Rational(1, 2)) {
    throw ModelError(std::string(to_string(spec.kind())) + " requires p = 1/2");
  }
  if (spec.kind() == ModelKind::sign_adversarial_theta && spec.theta1_ == spec.theta2_) {
    throw ModelError("sign-adversarial model must depend on the previous sign (after_up != after_down)");
  }

  if (options.probe_depth > 0) {
    std::vector<SignPair> history;
    history.reserve(static_cast<std::size_t>(options.probe_depth));
    probe_exhaustive(spec, history, options.probe_depth);
  }

  if (options.random_probes > 0 && options.random_max_length > options.probe_depth) {
    SplitMix64 rng = derive_stream(options.probe_seed, StreamDomain::probe, 0);
    const auto span = static_cast<std::uint64_t>(options.random_max_length - options.probe_depth);
    std::vector<SignPair> history;
    for (int probe = 0; probe < options.random_probes; ++probe) {
      const std::size_t length = static_cast<std::size_t>(options.probe_depth) + 1 + rng() % span;
      history.clear();
      while (history.size() < length) {
        check_theta(spec, spec.exact_theta(history), history);
        history.push_back(sample_step(spec, history, rng));
      }
      check_theta(spec, spec.exact_theta(history), history);
    }
  }

  out.validated_ = true;
  return out;
}

StepPmf<Rational> exact_step_distribution(const ModelSpec& model, History history) {
  const Rational& theta = model.exact_theta(history);
  check_theta(model, theta, history);
  const Rational& p = model.exact_p();
  Rational off = p - theta;
  return StepPmf<Rational>{{theta, off, off, 1 - 2 * p + theta}};
}

StepPmf<double> step_distribution(const ModelSpec& model, History history) {
  if (model.exact()) {
    const auto exact = exact_step_distribution(model, history);
    return StepPmf<double>{{exact.prob[0].get_d(), exact.prob[1].get_d(), exact.prob[2].get_d(),
                            exact.prob[3].get_d()}};
  }
  const double theta = model.theta(history);
  return StepPmf<double>{{theta, 0.5 - theta, 0.5 - theta, theta}};
}

SignPair sample_step(const ModelSpec& model, History history, SplitMix64& rng) {
  if (model.kind() == ModelKind::gaussian) return sample_gaussian_pair(model.rho(), rng);
  const double theta = model.theta(history);
  const double p = model.p();
  const double u = uniform01(rng);
  // Strict comparisons keep zero-mass cells unreachable.
  double acc = theta;
  if (u < acc) return kAllSignPairs[0];
  acc += p - theta;
  if (u < acc) return kAllSignPairs[1];
  acc += p - theta;
  if (u < acc) return kAllSignPairs[2];
  return kAllSignPairs[3];
}

JointPath simulate(const ModelSpec& model, std::size_t n, SplitMix64& rng) {
  if (n == 0) throw std::invalid_argument("simulate needs at least one step");
  std::vector<SignPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs.push_back(sample_step(model, pairs, rng));
  }
  return JointPath(std::move(pairs));
}

JointPath simulate(const ModelSpec& model, std::size_t n, std::uint64_t seed) {
  SplitMix64 rng = derive_stream(seed, StreamDomain::path, 0);
  return simulate(model, n, rng);
}

double gaussian_theta(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::domain_error("correlation must lie in [-1, 1]");
  }
  return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
}

SignPair sample_gaussian_pair(double rho, SplitMix64& rng) {
  const double z1 = standard_normal(rng);
  const double z2 = standard_normal(rng);
  const double w = rho * z1 + std::sqrt(1.0 - rho * rho) * z2;
  return SignPair(movement_sign(z1), movement_sign(w));
}

ModelSpec parse_model(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  if (!text.empty() && text.front() == '{') {
    nlohmann::json node;
    try {
      node = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ModelError(std::string("model JSON: ") + e.what());
    }
    return model_from_json(node);
  }

  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ModelError("model must be JSON or kind:params, got '" + std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const auto args = split(text.substr(colon + 1), ',');
  auto want = [&](std::size_t count) {
    if (args.size() != count) {
      throw ModelError("model '" + std::string(kind) + "' takes " + std::to_string(count) +
                       " parameter(s), got " + std::to_string(args.size()));
    }
  };
  try {
    if (kind == "constant" || kind == "constant-theta") {
      want(1);
      return ModelSpec::constant(parse_rational(args[0]));
    }
    if (kind == "q-history" || kind == "q-history-theta") {
      want(2);
      return ModelSpec::q_history(parse_rational(args[0]), parse_rational(args[1]));
    }
    if (kind == "adversarial" || kind == "sign-adversarial-theta") {
      want(3);
      return ModelSpec::sign_adversarial(parse_rational(args[0]), parse_rational(args[1]),
                                         parse_rational(args[2]));
    }
    if (kind == "biased") {
      want(2);
      return ModelSpec::biased(parse_rational(args[0]), parse_rational(args[1]));
    }
    if (kind == "gaussian") {
      want(1);
      std::size_t used = 0;
      const double rho = std::stod(args[0], &used);
      if (used != args[0].size()) throw std::invalid_argument("trailing characters");
      return ModelSpec::gaussian(rho);
    }
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError("bad parameter in model '" + std::string(text) + "': " + e.what());
  }
  throw ModelError("unknown model kind '" + std::string(kind) + "'");
}

nlohmann::json model_to_json(const ModelSpec& model) {
  nlohmann::json node;
  node["kind"] = std::string(to_string(model.kind()));
  switch (model.kind()) {
    case ModelKind::constant_theta:
      node["theta"] = rational_to_json(model.exact_theta({}));
      break;
    case ModelKind::biased:
      node["p"] = rational_to_json(model.exact_p());
      node["theta"] = rational_to_json(model.exact_theta({}));
      break;
    case ModelKind::q_history_theta:
    case ModelKind::sign_adversarial_theta: {
      nlohmann::json params = nlohmann::json::object();
      for (const auto& [name, value] : model.parameters()) params[name] = rational_to_json(value);
      node["params"] = std::move(params);
      break;
    }
    case ModelKind::gaussian:
      node["rho"] = model.rho();
      break;
  }
  return node;
}

ModelSpec model_from_json(const nlohmann::json& node) {
  try {
    const ModelKind kind = model_kind_from_string(node.at("kind").get<std::string>());
    auto param = [&](const char* name) { return rational_from_json(node.at("params").at(name)); };
    switch (kind) {
      case ModelKind::constant_theta:
        return ModelSpec::constant(rational_from_json(node.at("theta")));
      case ModelKind::biased:
        return ModelSpec::biased(rational_from_json(node.at("p")), rational_from_json(node.at("theta")));
      case ModelKind::q_history_theta:
        return ModelSpec::q_history(param("base"), param("weight"));
      case ModelKind::sign_adversarial_theta:
        return ModelSpec::sign_adversarial(param("first"), param("after_up"), param("after_down"));
      case ModelKind::gaussian:
        return ModelSpec::gaussian(node.at("rho").get<double>());
    }
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError(std::string("model JSON: ") + e.what());
  }
  throw ModelError("unreachable model kind");
}

std::vector<NamedModel> shipped_models() {
  return {
      {"constant-1/4", ModelSpec::constant(Rational(1, 4))},
      {"constant-1/3", ModelSpec::constant(Rational(1, 3))},
      {"constant-1/2", ModelSpec::constant(Rational(1, 2))},
      {"q-history", ModelSpec::q_history(Rational(1, 4), Rational(1, 8))},
      {"adversarial", ModelSpec::sign_adversarial(Rational(1, 4), Rational(2, 5), Rational(1, 10))},
      {"biased-3/5", ModelSpec::biased(Rational(3, 5), Rational(1, 2))},
      {"biased-7/10", ModelSpec::biased(Rational(7, 10), Rational(1, 2))},
      {"gaussian-0.5", ModelSpec::gaussian(0.5)},
  };
}

}  // namespace cowalk
