#pragma once

// Time-space screening: removing one state r from a perturbed semi-Markov
// process and recomputing the transition expansions of the process observed
// only at visits to the remaining states.
//
//   rp_ij = p_ij + p_ir * p_rj / (1 - p_rr)
//   re_ij = e_ij + e_ir * p_rj / (1 - p_rr)
//         + e_rr * p_ir / (1 - p_rr) * p_rj / (1 - p_rr)
//         + e_rj * p_ir / (1 - p_rr)
//
// Terms that vanish identically (absent transitions, r not in Y_r) are
// omitted rather than multiplied by zero expansions.

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/laurent.hpp"
#include "smpx/model.hpp"

namespace smpx {

/// Expansion of 1 - p_rr(eps). Both available forms, 1 - p_rr and the sum of
/// p_rj over j != r, are merged so that the result is pivotal.
inline Expansion non_absorption_expansion(const PerturbedSMP& m, PerturbedSMP::Index r) {
  const auto ys = m.successors(r);
  std::vector<Expansion> leaving;
  int row_order = m.at(r, ys.front()).p.high();
  for (auto j : ys) {
    row_order = std::min(row_order, m.at(r, j).p.high());
    if (j != r) leaving.push_back(m.at(r, j).p);
  }
  if (leaving.empty()) {
    throw Error(ErrorKind::InvalidArgument, "state " + m.state(r) + " is absorbing");
  }
  if (!m.has(r, r)) return Expansion::one(std::max(row_order, 0));

  const auto& p_rr = m.at(r, r).p;
  const Expansion complement = add(Expansion::one(std::max(p_rr.high(), 0)), scale(Rational(-1), p_rr));
  const Expansion row_rest = multi_add<Rational>(leaving);
  Expansion merged = refine(complement, row_rest);
  if (!merged.pivotal()) {
    throw Error(ErrorKind::LeadingCancellation,
                "non-absorption expansion of " + m.state(r) + " is not pivotal");
  }
  return merged;
}

/// Shared intermediate quotients for excluding one state.
class Screening {
 public:
  Screening(const PerturbedSMP& m, PerturbedSMP::Index r)
      : model_(m), r_(r), divisor_(non_absorption_expansion(m, r)), self_loop_(m.has(r, r)) {}

  const Expansion& divisor() const noexcept { return divisor_; }

  /// Transition set of i in the reduced model: (Y_r \ {r} if r in Y_i) union (Y_i \ {r}).
  std::vector<PerturbedSMP::Index> reduced_successors(PerturbedSMP::Index i) const {
    std::set<PerturbedSMP::Index> out;
    for (auto j : model_.successors(i)) {
      if (j != r_) out.insert(j);
    }
    if (model_.has(i, r_)) {
      for (auto j : model_.successors(r_)) {
        if (j != r_) out.insert(j);
      }
    }
    return {out.begin(), out.end()};
  }

  Expansion transition(PerturbedSMP::Index i, PerturbedSMP::Index j) const {
    check_pair(i, j);
    std::vector<Expansion> terms;
    if (model_.has(i, j)) terms.push_back(model_.at(i, j).p);
    if (through_r(i, j)) terms.push_back(mul(model_.at(i, r_).p, from_r(j)));
    return finish(std::move(terms), i, j, "transition probability");
  }

  Expansion expectation(PerturbedSMP::Index i, PerturbedSMP::Index j) const {
    check_pair(i, j);
    std::vector<Expansion> terms;
    if (model_.has(i, j)) terms.push_back(model_.at(i, j).e);
    if (through_r(i, j)) {
      const Expansion& q_rj = from_r(j);
      const Expansion& q_ir = into_r(i);
      terms.push_back(mul(model_.at(i, r_).e, q_rj));
      if (self_loop_) terms.push_back(multi_mul({model_.at(r_, r_).e, q_ir, q_rj}));
      terms.push_back(mul(model_.at(r_, j).e, q_ir));
    }
    return finish(std::move(terms), i, j, "sojourn expectation");
  }

 private:
  bool through_r(PerturbedSMP::Index i, PerturbedSMP::Index j) const {
    return model_.has(i, r_) && model_.has(r_, j);
  }

  void check_pair(PerturbedSMP::Index i, PerturbedSMP::Index j) const {
    if (i == r_ || j == r_) {
      throw Error(ErrorKind::InvalidArgument, "pair involves the excluded state " + model_.state(r_));
    }
    if (!model_.has(i, j) && !through_r(i, j)) {
      throw Error(ErrorKind::NotInReducedSet, model_.state(j) + " is not in the reduced transition set of " +
                                                  model_.state(i));
    }
  }

  // p_rj / (1 - p_rr), or p_rj itself when r has no self-loop.
  const Expansion& from_r(PerturbedSMP::Index j) const {
    return cached(from_r_, j, model_.at(r_, j).p);
  }

  // p_ir / (1 - p_rr), or p_ir itself when r has no self-loop.
  const Expansion& into_r(PerturbedSMP::Index i) const {
    return cached(into_r_, i, model_.at(i, r_).p);
  }

  const Expansion& cached(std::map<PerturbedSMP::Index, Expansion>& cache, PerturbedSMP::Index key,
                          const Expansion& numerator) const {
    auto it = cache.find(key);
    if (it == cache.end()) {
      it = cache.emplace(key, self_loop_ ? divide(numerator, divisor_) : numerator).first;
    }
    return it->second;
  }

  Expansion finish(std::vector<Expansion> terms, PerturbedSMP::Index i, PerturbedSMP::Index j,
                   const char* what) const {
    Expansion out = terms.size() == 1 ? std::move(terms.front()) : multi_add<Rational>(terms);
    if (!out.pivotal()) {
      throw Error(ErrorKind::LeadingCancellation,
                  std::string("reduced ") + what + " " + model_.state(i) + " -> " + model_.state(j) +
                      " lost its leading coefficient");
    }
    return out;
  }

  const PerturbedSMP& model_;
  PerturbedSMP::Index r_;
  Expansion divisor_;
  bool self_loop_;
  mutable std::map<PerturbedSMP::Index, Expansion> from_r_;
  mutable std::map<PerturbedSMP::Index, Expansion> into_r_;
};

inline Expansion reduced_transition(const PerturbedSMP& m, PerturbedSMP::Index r, PerturbedSMP::Index i,
                                    PerturbedSMP::Index j) {
  return Screening(m, r).transition(i, j);
}

inline Expansion reduced_expectation(const PerturbedSMP& m, PerturbedSMP::Index r, PerturbedSMP::Index i,
                                     PerturbedSMP::Index j) {
  return Screening(m, r).expectation(i, j);
}

struct ReductionStep {
  std::string excluded;
  std::shared_ptr<const PerturbedSMP> before;
  PerturbedSMP after;
  Expansion non_absorption;
  /// Condition F on the reduced model; must pass for every valid input.
  ConditionCheck stochasticity;
};

inline ReductionStep reduce_state(const PerturbedSMP& m, PerturbedSMP::Index r) {
  if (r >= m.size()) throw Error(ErrorKind::UnknownState, "state index out of range");
  if (m.size() == 1) throw Error(ErrorKind::LastState, "cannot exclude the only state " + m.state(r));

  Screening screening(m, r);
  std::vector<std::string> names;
  std::vector<PerturbedSMP::Index> kept;
  for (PerturbedSMP::Index i = 0; i < m.size(); ++i) {
    if (i == r) continue;
    names.push_back(m.state(i));
    kept.push_back(i);
  }
  std::vector<PerturbedSMP::Index> new_index(m.size(), 0);
  for (PerturbedSMP::Index k = 0; k < kept.size(); ++k) new_index[kept[k]] = k;

  PerturbedSMP after(std::move(names), m.epsilon0(), m.exact());
  for (auto i : kept) {
    for (auto j : screening.reduced_successors(i)) {
      after.set_transition(new_index[i], new_index[j],
                           TransitionData{screening.transition(i, j), screening.expectation(i, j)});
    }
  }
  auto stochasticity = check_stochasticity(after);
  return ReductionStep{m.state(r), std::make_shared<const PerturbedSMP>(m), std::move(after),
                       screening.divisor(), std::move(stochasticity)};
}

inline ReductionStep reduce_state(const PerturbedSMP& m, std::string_view r) {
  return reduce_state(m, m.index_of(r));
}

}  // namespace smpx
