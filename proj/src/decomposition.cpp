#include "cowalk/decomposition.hpp"

#include <array>
#include <sstream>

namespace cowalk {

Completion Completion::from_seed(std::uint64_t root, std::uint64_t index, std::size_t length) {
  return Completion{derive_stream(root, StreamDomain::completion_zeta, index),
                    derive_stream(root, StreamDomain::completion_psi, index), length};
}

std::vector<std::uint8_t> classify_path(const JointPath& path) {
  std::vector<std::uint8_t> q;
  q.reserve(path.size());
  for (SignPair s : path.pairs()) q.push_back(classify_step(s));
  return q;
}

Counters run_counters(std::span<const std::uint8_t> Q) {
  Counters c;
  c.T.reserve(Q.size() + 1);
  c.S.reserve(Q.size() + 1);
  for (std::uint8_t q : Q) {
    c.T.push_back(c.T.back() + (q ? 1 : 0));
    c.S.push_back(c.S.back() + (q ? 0 : 1));
  }
  return c;
}

HittingTimes hitting_times(const Counters& counters) {
  const std::size_t horizon = counters.horizon();
  HittingTimes h;
  h.alpha.assign(horizon + 1, std::nullopt);
  h.beta.assign(horizon + 1, std::nullopt);
  h.alpha[0] = 0;
  h.beta[0] = 0;
  for (std::size_t k = 1; k <= horizon; ++k) {
    if (counters.T[k] != counters.T[k - 1]) h.alpha[counters.T[k]] = k;
    if (counters.S[k] != counters.S[k - 1]) h.beta[counters.S[k]] = k;
  }
  return h;
}

Walks extract_walks(const JointPath& path, const HittingTimes& hits, std::optional<Completion> completion) {
  const std::size_t horizon = path.size();
  if (hits.alpha.size() != horizon + 1 || hits.beta.size() != horizon + 1) {
    throw ContractViolation("hitting times cover " + std::to_string(hits.alpha.size() - 1) +
                            " steps but the path has " + std::to_string(horizon));
  }
  Walks w;
  auto extend = [&](std::vector<int>& levels, const std::vector<HitTime>& times, bool want_common) {
    for (std::size_t n = 1; n <= horizon && times[n]; ++n) {
      const std::size_t step = *times[n];
      if (step == 0 || step > horizon || path.pairs()[step - 1].common() != want_common) {
        throw ContractViolation("hitting time " + std::to_string(step) + " does not match the path");
      }
      levels.push_back(levels.back() + path.pairs()[step - 1].xi);
    }
  };
  extend(w.X, hits.alpha, true);
  extend(w.Y, hits.beta, false);

  if (completion) {
    const std::size_t length = completion->length ? completion->length : horizon;
    auto complete = [&](std::vector<int>& levels, SplitMix64& stream) {
      for (std::size_t n = 1; n <= length; ++n) {
        const int draw = fair_sign(stream);
        if (n >= levels.size()) levels.push_back(levels.back() + draw);
      }
    };
    complete(w.X, completion->zeta);
    complete(w.Y, completion->psi);
    w.completion_used = true;
  }
  return w;
}

Decomposition decompose(const JointPath& path, std::optional<Completion> completion) {
  Decomposition d;
  d.Q = classify_path(path);
  d.counters = run_counters(d.Q);
  d.hits = hitting_times(d.counters);
  Walks w = extract_walks(path, d.hits, std::move(completion));
  d.X = std::move(w.X);
  d.Y = std::move(w.Y);
  d.completion_used = w.completion_used;
  return d;
}

std::pair<std::vector<int>, std::vector<int>> reconstruct(std::span<const int> X, std::span<const int> Y,
                                                           std::span<const std::size_t> T) {
  if (T.empty() || T[0] != 0) throw ContractViolation("T must start with T_0 = 0");
  if (X.empty() || X[0] != 0 || Y.empty() || Y[0] != 0) {
    throw ContractViolation("X and Y must start with X_0 = Y_0 = 0");
  }
  std::vector<int> B{0};
  std::vector<int> W{0};
  B.reserve(T.size());
  W.reserve(T.size());
  for (std::size_t n = 1; n < T.size(); ++n) {
    if (T[n] < T[n - 1] || T[n] - T[n - 1] > 1) {
      throw ContractViolation("T is not a counting process at n = " + std::to_string(n));
    }
    const std::size_t t = T[n];
    const std::size_t s = n - t;
    if (t >= X.size()) throw ContractViolation("reconstruct needs X_" + std::to_string(t) + " (not defined)");
    if (s >= Y.size()) throw ContractViolation("reconstruct needs Y_" + std::to_string(s) + " (not defined)");
    B.push_back(X[t] + Y[s]);
    W.push_back(X[t] - Y[s]);
  }
  return {std::move(B), std::move(W)};
}

JointPath table1_path() {
  static constexpr std::array<int, 10> B{1, 0, -1, -2, -1, 0, -1, 0, 1, 2};
  static constexpr std::array<int, 10> W{-1, 0, 1, 0, -1, -2, -1, -2, -1, 0};
  return JointPath::from_levels(B, W);
}

std::string decomposition_csv(const JointPath& path, const Decomposition& d) {
  std::ostringstream os;
  os << "n,B,W,T,S,alpha,beta,X,Y\n";
  auto hit = [](const HitTime& h) { return h ? std::to_string(*h) : std::string(); };
  auto level = [](const std::vector<int>& v, std::size_t n) {
    return n < v.size() ? std::to_string(v[n]) : std::string();
  };
  for (std::size_t n = 1; n <= path.size(); ++n) {
    os << n << ',' << path.B()[n] << ',' << path.W()[n] << ',' << d.counters.T[n] << ','
       << d.counters.S[n] << ',' << hit(d.hits.alpha[n]) << ',' << hit(d.hits.beta[n]) << ','
       << level(d.X, n) << ',' << level(d.Y, n) << '\n';
  }
  return os.str();
}

nlohmann::json decomposition_to_json(const JointPath& path, const Decomposition& d) {
  auto tail = [](const auto& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 1; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
  };
  auto hits = [](const std::vector<HitTime>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 1; i < v.size(); ++i) {
      arr.push_back(v[i] ? nlohmann::json(*v[i]) : nlohmann::json(nullptr));
    }
    return arr;
  };
  nlohmann::json q = nlohmann::json::array();
  for (std::uint8_t bit : d.Q) q.push_back(bit);
  return nlohmann::json{
      {"N", path.size()},
      {"B", tail(path.B())},
      {"W", tail(path.W())},
      {"Q", std::move(q)},
      {"T", tail(d.counters.T)},
      {"S", tail(d.counters.S)},
      {"alpha", hits(d.hits.alpha)},
      {"beta", hits(d.hits.beta)},
      {"X", tail(d.X)},
      {"Y", tail(d.Y)},
      {"completion_used", d.completion_used},
  };
}

}  // namespace cowalk
