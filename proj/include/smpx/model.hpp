#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/json.hpp"
#include "smpx/laurent.hpp"
#include "smpx/rational.hpp"

namespace smpx {

/// Expansions of the transition probability p_ij(eps) and of the expected
/// sojourn time e_ij(eps) for one allowed transition i -> j.
struct TransitionData {
  Expansion p;
  Expansion e;

  friend bool operator==(const TransitionData&, const TransitionData&) = default;
};

/// A perturbed semi-Markov process on a finite phase space. States are
/// addressed by dense indices; the original identifiers are kept for output.
/// The transition set Y_i is the set of j with an entry (i, j).
class PerturbedSMP {
 public:
  using Index = std::size_t;
  using TransitionMap = std::map<std::pair<Index, Index>, TransitionData>;

  explicit PerturbedSMP(std::vector<std::string> states,
                        std::optional<Rational> epsilon0 = std::nullopt, bool exact = true)
      : states_(std::move(states)), epsilon0_(std::move(epsilon0)), exact_(exact) {
    if (states_.empty()) throw Error(ErrorKind::InvalidArgument, "model has no states");
    for (Index i = 0; i < states_.size(); ++i) {
      if (!index_.emplace(states_[i], i).second) {
        throw Error(ErrorKind::ParseError, "duplicate state '" + states_[i] + "'");
      }
    }
  }

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  const std::string& state(Index i) const { return states_.at(i); }
  const std::optional<Rational>& epsilon0() const noexcept { return epsilon0_; }
  /// Whether the input expansions are declared to have identically zero remainders.
  bool exact() const noexcept { return exact_; }

  std::optional<Index> find_state(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Index index_of(std::string_view name) const {
    auto idx = find_state(name);
    if (!idx) throw Error(ErrorKind::UnknownState, "unknown state '" + std::string(name) + "'");
    return *idx;
  }

  void set_transition(Index i, Index j, TransitionData data) {
    if (i >= size() || j >= size()) {
      throw Error(ErrorKind::UnknownState, "transition index out of range");
    }
    if (!transitions_.emplace(std::pair{i, j}, std::move(data)).second) {
      throw Error(ErrorKind::DuplicateTransition,
                  "duplicate transition " + states_[i] + " -> " + states_[j]);
    }
  }

  bool has(Index i, Index j) const { return transitions_.contains({i, j}); }

  const TransitionData& at(Index i, Index j) const {
    auto it = transitions_.find({i, j});
    if (it == transitions_.end()) {
      throw Error(ErrorKind::NotInReducedSet,
                  "no transition " + state(i) + " -> " + state(j));
    }
    return it->second;
  }

  /// Y_i in ascending index order.
  std::vector<Index> successors(Index i) const {
    std::vector<Index> out;
    for (auto it = transitions_.lower_bound({i, 0}); it != transitions_.end() && it->first.first == i;
         ++it) {
      out.push_back(it->first.second);
    }
    return out;
  }

  const TransitionMap& transitions() const noexcept { return transitions_; }

  friend bool operator==(const PerturbedSMP& a, const PerturbedSMP& b) {
    return a.states_ == b.states_ && a.epsilon0_ == b.epsilon0_ && a.exact_ == b.exact_ &&
           a.transitions_ == b.transitions_;
  }

 private:
  std::vector<std::string> states_;
  std::map<std::string, Index> index_;
  TransitionMap transitions_;
  std::optional<Rational> epsilon0_;
  bool exact_;
};

// ---------------------------------------------------------------------------
// Serialization

inline Json to_json(const PerturbedSMP& m) {
  Json doc;
  doc["states"] = m.states();
  if (m.epsilon0()) doc["epsilon0"] = to_string(*m.epsilon0());
  if (!m.exact()) doc["exact"] = false;
  Json transitions = Json::array();
  for (const auto& [key, data] : m.transitions()) {
    transitions.push_back(Json{{"from", m.state(key.first)},
                               {"to", m.state(key.second)},
                               {"p", to_json(data.p)},
                               {"e", to_json(data.e)}});
  }
  doc["transitions"] = std::move(transitions);
  return doc;
}

inline std::string serialize_model(const PerturbedSMP& m) { return to_json(m).dump(2) + "\n"; }

/// Builds the model from a parsed document. Structure only; the perturbation
/// conditions are checked separately by validate().
inline PerturbedSMP model_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "model: expected a JSON object");
  if (!doc.contains("states") || !doc["states"].is_array() || doc["states"].empty()) {
    throw Error(ErrorKind::ParseError, "model.states: expected a nonempty array");
  }
  std::vector<std::string> states;
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) throw Error(ErrorKind::ParseError, "model.states: expected strings");
    states.push_back(s.get<std::string>());
  }
  std::optional<Rational> eps0;
  if (doc.contains("epsilon0")) {
    eps0 = rational_from_json(doc["epsilon0"], "model.epsilon0");
    if (*eps0 <= 0 || *eps0 > 1) {
      throw Error(ErrorKind::ParseError, "model.epsilon0: must lie in (0, 1]");
    }
  }
  bool exact = true;
  if (doc.contains("exact")) {
    if (!doc["exact"].is_boolean()) throw Error(ErrorKind::ParseError, "model.exact: expected a boolean");
    exact = doc["exact"].get<bool>();
  }
  PerturbedSMP m(std::move(states), std::move(eps0), exact);

  if (!doc.contains("transitions") || !doc["transitions"].is_array()) {
    throw Error(ErrorKind::ParseError, "model.transitions: expected an array");
  }
  const auto& arr = doc["transitions"];
  for (std::size_t t = 0; t < arr.size(); ++t) {
    const std::string where = "model.transitions[" + std::to_string(t) + "]";
    const auto& node = arr[t];
    if (!node.is_object()) throw Error(ErrorKind::ParseError, where + ": expected an object");
    for (const char* field : {"from", "to"}) {
      if (!node.contains(field) || !node[field].is_string()) {
        throw Error(ErrorKind::ParseError, where + "." + field + ": expected a state name");
      }
    }
    const auto from = node["from"].get<std::string>();
    const auto to = node["to"].get<std::string>();
    auto i = m.find_state(from);
    auto j = m.find_state(to);
    if (!i || !j) {
      throw Error(ErrorKind::UnknownState,
                  where + ": undeclared state '" + (i ? to : from) + "'");
    }
    for (const char* field : {"p", "e"}) {
      if (!node.contains(field)) throw Error(ErrorKind::ParseError, where + "." + field + ": missing");
    }
    m.set_transition(*i, *j,
                     TransitionData{expansion_from_json(node["p"], where + ".p"),
                                    expansion_from_json(node["e"], where + ".e")});
  }
  return m;
}

inline PerturbedSMP parse_model(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("model: ") + e.what());
  }
  return model_from_json(doc);
}

// ---------------------------------------------------------------------------
// Validation

struct ConditionCheck {
  std::string condition;
  bool passed = true;
  std::vector<std::string> failures;

  void fail(std::string why) {
    passed = false;
    failures.push_back(std::move(why));
  }
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }

  const ConditionCheck& get(std::string_view condition) const {
    for (const auto& c : checks) {
      if (c.condition == condition) return c;
    }
    throw Error(ErrorKind::InvalidArgument, "no check for condition " + std::string(condition));
  }
};

/// Nonempty transition sets and strong connectivity over Y-edges.
inline ConditionCheck check_connectivity(const PerturbedSMP& m) {
  ConditionCheck check{"A", true, {}};
  const std::size_t n = m.size();
  std::vector<std::vector<PerturbedSMP::Index>> adj(n);
  for (PerturbedSMP::Index i = 0; i < n; ++i) {
    adj[i] = m.successors(i);
    if (adj[i].empty()) check.fail("state " + m.state(i) + " has an empty transition set");
  }
  for (PerturbedSMP::Index s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::queue<PerturbedSMP::Index> todo;
    // Paths of length >= 1, so s must also be re-entered.
    for (auto j : adj[s]) {
      if (!seen[j]) {
        seen[j] = true;
        todo.push(j);
      }
    }
    while (!todo.empty()) {
      auto u = todo.front();
      todo.pop();
      for (auto v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          todo.push(v);
        }
      }
    }
    for (PerturbedSMP::Index t = 0; t < n; ++t) {
      if (!seen[t]) check.fail("state " + m.state(t) + " is not reachable from " + m.state(s));
    }
  }
  return check;
}

inline ConditionCheck check_probability_expansions(const PerturbedSMP& m) {
  ConditionCheck check{"D", true, {}};
  for (const auto& [key, data] : m.transitions()) {
    const std::string pair = m.state(key.first) + " -> " + m.state(key.second);
    if (data.p.low() < 0) check.fail(pair + ": p has negative order " + std::to_string(data.p.low()));
    if (data.p.leading() <= 0) {
      check.fail(pair + ": p leading coefficient " + to_string(data.p.leading()) + " is not positive");
    }
  }
  return check;
}

inline ConditionCheck check_expectation_expansions(const PerturbedSMP& m) {
  ConditionCheck check{"E", true, {}};
  for (const auto& [key, data] : m.transitions()) {
    if (data.e.leading() <= 0) {
      check.fail(m.state(key.first) + " -> " + m.state(key.second) + ": e leading coefficient " +
                 to_string(data.e.leading()) + " is not positive");
    }
  }
  return check;
}

/// Row sums of probability coefficients equal I(l = 0) for
/// 0 <= l <= min_{j in Y_i} k(p_ij).
inline ConditionCheck check_stochasticity(const PerturbedSMP& m) {
  ConditionCheck check{"F", true, {}};
  for (PerturbedSMP::Index i = 0; i < m.size(); ++i) {
    const auto ys = m.successors(i);
    if (ys.empty()) continue;
    int order = m.at(i, ys.front()).p.high();
    for (auto j : ys) order = std::min(order, m.at(i, j).p.high());
    for (int l = 0; l <= order; ++l) {
      Rational sum(0);
      for (auto j : ys) sum += m.at(i, j).p.coeff(l);
      const Rational expected(l == 0 ? 1 : 0);
      if (sum != expected) {
        check.fail("row " + m.state(i) + ": coefficient sum at eps^" + std::to_string(l) + " is " +
                   to_string(sum) + ", expected " + to_string(expected));
      }
    }
  }
  return check;
}

inline ValidationReport validate(const PerturbedSMP& m) {
  return ValidationReport{{check_connectivity(m), check_probability_expansions(m),
                           check_expectation_expansions(m), check_stochasticity(m)}};
}

inline Json to_json(const ValidationReport& report) {
  Json conditions = Json::array();
  for (const auto& c : report.checks) {
    conditions.push_back(Json{{"condition", c.condition}, {"passed", c.passed}, {"failures", c.failures}});
  }
  return Json{{"passed", report.passed()}, {"conditions", std::move(conditions)}};
}

/// True when e_ij = p_ij for every pair, i.e. the process is a discrete-time
/// Markov chain with unit sojourn times. Expansions are compared as the exact
/// polynomials they declare, so zero padding on either side is irrelevant.
inline bool embedded_chain_special_case(const PerturbedSMP& m) {
  auto exact_coeff = [](const Expansion& x, int l) {
    return l > x.high() ? Rational(0) : x.coeff(l);
  };
  for (const auto& [key, data] : m.transitions()) {
    const int low = std::min(data.p.low(), data.e.low());
    const int high = std::max(data.p.high(), data.e.high());
    for (int l = low; l <= high; ++l) {
      if (exact_coeff(data.p, l) != exact_coeff(data.e, l)) return false;
    }
  }
  return true;
}

}  // namespace smpx
