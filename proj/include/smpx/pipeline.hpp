#pragma once

// Expected return times by sequential exclusion of all other states, and
// stationary probabilities as pi_i = e_i / E_ii.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/json.hpp"
#include "smpx/laurent.hpp"
#include "smpx/model.hpp"
#include "smpx/parallel.hpp"
#include "smpx/reduce.hpp"

namespace smpx {

/// All states except i, in ascending index order.
inline std::vector<std::string> default_order(const PerturbedSMP& m, PerturbedSMP::Index i) {
  std::vector<std::string> order;
  for (PerturbedSMP::Index r = 0; r < m.size(); ++r) {
    if (r != i) order.push_back(m.state(r));
  }
  return order;
}

/// Excludes the named states one after another. Every intermediate model must
/// keep coefficient-level stochasticity; a violation is a DiagnosticFailure.
inline std::vector<ReductionStep> sequential_reduction(const PerturbedSMP& m,
                                                       const std::vector<std::string>& order) {
  std::vector<ReductionStep> steps;
  steps.reserve(order.size());
  const PerturbedSMP* current = &m;
  for (const auto& name : order) {
    steps.push_back(reduce_state(*current, current->index_of(name)));
    const auto& step = steps.back();
    if (!step.stochasticity.passed) {
      throw Error(ErrorKind::DiagnosticFailure,
                  "stochasticity lost after excluding " + name + ": " + step.stochasticity.failures.front());
    }
    current = &step.after;
  }
  return steps;
}

inline void check_exclusion_order(const PerturbedSMP& m, PerturbedSMP::Index i,
                                  const std::vector<std::string>& order) {
  std::set<std::string> seen;
  for (const auto& name : order) {
    const auto idx = m.index_of(name);
    if (idx == i) throw Error(ErrorKind::InvalidArgument, "exclusion order contains the target state " + name);
    if (!seen.insert(name).second) throw Error(ErrorKind::InvalidArgument, "state " + name + " excluded twice");
  }
  if (seen.size() + 1 != m.size()) {
    throw Error(ErrorKind::InvalidArgument, "exclusion order must list every state except " + m.state(i));
  }
}

/// E_ii(eps): the sojourn expectation of the one-state model left after
/// excluding every other state in the given order.
inline Expansion return_time_expansion(const PerturbedSMP& m, PerturbedSMP::Index i,
                                       const std::vector<std::string>& order) {
  check_exclusion_order(m, i, order);
  if (order.empty()) return m.at(i, i).e;
  auto steps = sequential_reduction(m, order);
  return steps.back().after.at(0, 0).e;
}

inline Expansion return_time_expansion(const PerturbedSMP& m, PerturbedSMP::Index i) {
  return return_time_expansion(m, i, default_order(m, i));
}

/// Runs the default order and its reverse and requires identical expansions.
inline Expansion verified_return_time_expansion(const PerturbedSMP& m, PerturbedSMP::Index i) {
  auto order = default_order(m, i);
  Expansion forward = return_time_expansion(m, i, order);
  std::reverse(order.begin(), order.end());
  Expansion backward = return_time_expansion(m, i, order);
  if (!(forward == backward)) {
    throw Error(ErrorKind::PermutationMismatch,
                "return time of " + m.state(i) + " depends on the exclusion order");
  }
  return forward;
}

/// e_i(eps) = sum over j in Y_i of e_ij(eps).
inline Expansion row_sum_expansion(const PerturbedSMP& m, PerturbedSMP::Index i) {
  std::vector<Expansion> terms;
  for (auto j : m.successors(i)) terms.push_back(m.at(i, j).e);
  return multi_add<Rational>(terms);
}

inline Expansion stationary_expansion(const PerturbedSMP& m, PerturbedSMP::Index i) {
  return divide(row_sum_expansion(m, i), return_time_expansion(m, i));
}

struct StateExpansions {
  std::string state;
  Expansion return_time;
  Expansion row_sum;
  Expansion stationary;
  /// pi_i(0): the order-zero coefficient when the expansion starts at eps^0, else 0.
  Rational limit;
};

struct Diagnostics {
  bool leading_positive = true;   // c_i[n_i^-] > 0
  bool nonnegative_orders = true; // n_i^- >= 0
  bool min_order_zero = true;     // min_i n_i^- = 0
  bool coefficient_sums = true;   // sum_i c_i[l] = I(l = 0), 0 <= l <= n^+
  int common_order = 0;           // n^+ = min_i n_i^+
  std::vector<std::string> limit_support;
  std::optional<bool> permutation_verified;
  std::vector<std::string> failures;

  bool passed() const {
    return leading_positive && nonnegative_orders && min_order_zero && coefficient_sums;
  }
};

struct ExpansionTable {
  std::vector<StateExpansions> rows;
  Diagnostics diagnostics;

  const StateExpansions& row(std::string_view state) const {
    for (const auto& r : rows) {
      if (r.state == state) return r;
    }
    throw Error(ErrorKind::UnknownState, "no row for state '" + std::string(state) + "'");
  }
};

/// Checks the consistency relations that any valid stationary expansion table satisfies.
inline Diagnostics diagnose(const std::vector<StateExpansions>& rows) {
  Diagnostics d;
  if (rows.empty()) return d;
  int min_low = rows.front().stationary.low();
  d.common_order = rows.front().stationary.high();
  for (const auto& r : rows) {
    const auto& pi = r.stationary;
    if (pi.leading() <= 0) {
      d.leading_positive = false;
      d.failures.push_back("leading coefficient of pi_" + r.state + " is " + to_string(pi.leading()));
    }
    if (pi.low() < 0) {
      d.nonnegative_orders = false;
      d.failures.push_back("pi_" + r.state + " starts at negative order " + std::to_string(pi.low()));
    }
    min_low = std::min(min_low, pi.low());
    d.common_order = std::min(d.common_order, pi.high());
    if (pi.low() == 0) d.limit_support.push_back(r.state);
  }
  if (min_low != 0) {
    d.min_order_zero = false;
    d.failures.push_back("smallest stationary order is " + std::to_string(min_low) + ", expected 0");
  }
  for (int l = 0; l <= d.common_order; ++l) {
    Rational sum(0);
    for (const auto& r : rows) sum += r.stationary.coeff(l);
    if (sum != (l == 0 ? 1 : 0)) {
      d.coefficient_sums = false;
      d.failures.push_back("stationary coefficients at eps^" + std::to_string(l) + " sum to " +
                           to_string(sum));
    }
  }
  return d;
}

inline Rational limit_value(const Expansion& stationary) {
  return stationary.low() == 0 ? stationary.leading() : Rational(0);
}

/// Every per-state expansion plus diagnostics. Per-state chains run in
/// parallel; the result is ordered by state index regardless.
inline ExpansionTable full_table(const PerturbedSMP& m, bool verify_permutation = false) {
  std::vector<std::optional<StateExpansions>> slots(m.size());
  parallel_for(m.size(), [&](std::size_t i) {
    Expansion return_time =
        verify_permutation ? verified_return_time_expansion(m, i) : return_time_expansion(m, i);
    Expansion row_sum = row_sum_expansion(m, i);
    Expansion stationary = divide(row_sum, return_time);
    Rational limit = limit_value(stationary);
    slots[i] = StateExpansions{m.state(i), std::move(return_time), std::move(row_sum),
                               std::move(stationary), std::move(limit)};
  });
  ExpansionTable table;
  for (auto& s : slots) table.rows.push_back(std::move(*s));
  table.diagnostics = diagnose(table.rows);
  if (verify_permutation) table.diagnostics.permutation_verified = true;
  if (!table.diagnostics.passed()) {
    throw Error(ErrorKind::DiagnosticFailure, table.diagnostics.failures.front());
  }
  return table;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json to_json(const Diagnostics& d) {
  Json doc;
  doc["leading_positive"] = d.leading_positive;
  doc["nonnegative_orders"] = d.nonnegative_orders;
  doc["min_order_zero"] = d.min_order_zero;
  doc["coefficient_sums"] = d.coefficient_sums;
  doc["common_order"] = d.common_order;
  doc["remainder_identity"] = "assumed";
  doc["limit_support"] = d.limit_support;
  if (d.permutation_verified) {
    doc["permutation_verification"] = *d.permutation_verified ? "passed" : "failed";
  } else {
    doc["permutation_verification"] = "not run";
  }
  doc["failures"] = d.failures;
  return doc;
}

inline Json to_json(const ExpansionTable& table) {
  Json states = Json::object();
  for (const auto& r : table.rows) {
    states[r.state] = Json{{"return_time", to_json(r.return_time)},
                           {"row_sum", to_json(r.row_sum)},
                           {"stationary", to_json(r.stationary)},
                           {"limit", to_string(r.limit)}};
  }
  return Json{{"states", std::move(states)}, {"diagnostics", to_json(table.diagnostics)}};
}

/// Reads back the per-state expansions of a table document; diagnostics are recomputed.
inline ExpansionTable table_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("states") || !doc["states"].is_object()) {
    throw Error(ErrorKind::ParseError, "table.states: expected an object");
  }
  ExpansionTable table;
  for (const auto& [name, node] : doc["states"].items()) {
    const std::string where = "table.states." + name;
    for (const char* field : {"return_time", "row_sum", "stationary"}) {
      if (!node.contains(field)) throw Error(ErrorKind::ParseError, where + "." + field + ": missing");
    }
    auto stationary = expansion_from_json(node["stationary"], where + ".stationary");
    Rational limit = limit_value(stationary);
    table.rows.push_back(StateExpansions{name, expansion_from_json(node["return_time"], where + ".return_time"),
                                         expansion_from_json(node["row_sum"], where + ".row_sum"),
                                         std::move(stationary), std::move(limit)});
  }
  table.diagnostics = diagnose(table.rows);
  return table;
}

}  // namespace smpx
