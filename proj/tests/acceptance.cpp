// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Sizes and time limits are fixed here, not tuned.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support/generators.hpp"

namespace {

using namespace smpx;
using testing::Rng;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kCorpusSeed = 20241016;
constexpr std::size_t kCorpusSize = 60;

struct Outcome {
  bool passed = true;
  std::string detail;
  std::string first_failure;

  void fail(const std::string& why) {
    if (passed) first_failure = why;
    passed = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

std::string describe(const Expansion& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

/// Checks actual == expected; on mismatch records the identity and operands.
void expect_same(Outcome& out, std::size_t& violations, const char* identity, const Expansion& actual,
                 const Expansion& expected) {
  if (actual == expected) return;
  ++violations;
  out.fail(std::string(identity) + ": " + describe(actual) + " != " + describe(expected));
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2: the expansion calculus on random windows

struct Triple {
  Expansion a, b, c;
};

std::vector<Triple> expansion_corpus(std::size_t count) {
  Rng rng(7001);
  std::vector<Triple> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    out.push_back(Triple{testing::random_expansion(rng), testing::random_expansion(rng),
                         testing::random_expansion(rng)});
  }
  return out;
}

Outcome laurent_laws(const std::vector<Triple>& corpus) {
  Outcome out;
  const auto start = Clock::now();
  std::size_t checks = 0;
  std::size_t violations = 0;
  auto check = [&](const char* identity, const Expansion& actual, const Expansion& expected) {
    ++checks;
    expect_same(out, violations, identity, actual, expected);
  };
  for (const auto& [a, b, c] : corpus) {
    check("a+b = b+a", add(a, b), add(b, a));
    check("ab = ba", mul(a, b), mul(b, a));
    check("(a+b)+c = a+(b+c)", add(add(a, b), c), add(a, add(b, c)));
    check("(ab)c = a(bc)", mul(mul(a, b), c), mul(a, mul(b, c)));
    check("a(b+c) = ab+ac", mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
    check("a+0 = a", add(a, Expansion::zero(a.low(), a.high())), a);
    check("a*1 = a", mul(a, Expansion::one(a.high() - a.low())), a);
    check("a-a = 0", add(a, scale(Rational(-1), a)), Expansion::zero(a.low(), a.high()));
    check("multi_add order", multi_add({a, b, c}), multi_add({c, a, b}));
    check("multi_mul order", multi_mul({a, b, c}), multi_mul({b, c, a}));
    if (a.pivotal()) {
      check("a/a = 1", mul(a, invert(a)), Expansion::one(a.high() - a.low()));
      check("1/(1/a) = a", invert(invert(a)), a);
    }
    if (b.pivotal()) check("a/b = a*(1/b)", divide(a, b), mul(a, invert(b)));
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) out.fail("runtime " + seconds(elapsed) + " exceeds 10 s");
  out.detail = std::to_string(corpus.size() * 3) + " expansions, " + std::to_string(checks) + " identities, " +
               std::to_string(violations) + " violations, " + seconds(elapsed);
  return out;
}

struct Window {
  int h;
  int k;
};

Outcome window_formulas(const std::vector<Triple>& corpus) {
  Outcome out;
  std::size_t checks = 0;
  auto check = [&](const char* op, const Expansion& result, Window expected) {
    ++checks;
    if (result.low() != expected.h || result.high() != expected.k) {
      out.fail(std::string(op) + ": got (" + std::to_string(result.low()) + "," + std::to_string(result.high()) +
               "), expected (" + std::to_string(expected.h) + "," + std::to_string(expected.k) + ")");
    }
  };
  for (const auto& [a, b, c] : corpus) {
    const int ha = a.low(), ka = a.high(), hb = b.low(), kb = b.high(), hc = c.low(), kc = c.high();
    check("scale", scale(Rational(3, 7), a), {ha, ka});
    check("add", add(a, b), {std::min(ha, hb), std::min(ka, kb)});
    check("mul", mul(a, b), {ha + hb, std::min(ka + hb, kb + ha)});
    check("multi_add", multi_add({a, b, c}), {std::min({ha, hb, hc}), std::min({ka, kb, kc})});
    check("multi_mul", multi_mul({a, b, c}),
          {ha + hb + hc, std::min({ka + hb + hc, kb + ha + hc, kc + ha + hb})});
    if (b.pivotal()) {
      check("invert", invert(b), {-hb, kb - 2 * hb});
      check("div", divide(a, b), {ha - hb, std::min(ka - hb, kb - 2 * hb + ha)});
    }
    // refine with a truncated copy of itself: leading zeros stripped, the longer tail kept.
    if (!a.is_zero() && a.size() > 1) {
      const std::vector<Rational> head(a.coeffs().begin(), a.coeffs().end() - 1);
      int first = 0;
      while (a.coeffs()[static_cast<std::size_t>(first)] == 0) ++first;
      check("refine", refine(Expansion(ha, head), a), {ha + first, ka});
    }
  }
  out.detail = std::to_string(checks) + " window checks on the same corpus";
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 3: hand-derived fixtures

PerturbedSMP two_state(bool self_loop_on_2) {
  PerturbedSMP m({"1", "2"});
  auto both = [](Expansion x) { return TransitionData{x, x}; };
  m.set_transition(0, 0, both(Expansion(0, {Rational(1), Rational(-1)})));
  m.set_transition(0, 1, both(Expansion(1, {Rational(1)})));
  if (self_loop_on_2) {
    m.set_transition(1, 0, both(Expansion(1, {Rational(1)})));
    m.set_transition(1, 1, both(Expansion(0, {Rational(1), Rational(-1)})));
  } else {
    m.set_transition(1, 0, both(Expansion(0, {Rational(1), Rational(0)})));
  }
  return m;
}

Outcome worked_fixtures() {
  Outcome out;
  const auto start = Clock::now();
  std::size_t checks = 0;
  std::size_t violations = 0;
  auto check = [&](const char* what, const Expansion& actual, const Expansion& expected) {
    ++checks;
    expect_same(out, violations, what, actual, expected);
  };
  const Rational half(1, 2);

  const auto chain = two_state(false);
  const auto t1 = full_table(chain);
  check("chain E_11", t1.row("1").return_time, Expansion(0, {Rational(1), Rational(1)}));
  check("chain pi_1", t1.row("1").stationary, Expansion(0, {Rational(1), Rational(-1)}));
  check("chain pi_2", t1.row("2").stationary, Expansion(1, {Rational(1)}));

  const auto pair = two_state(true);
  check("pair divisor", non_absorption_expansion(pair, 1), Expansion(1, {Rational(1)}));
  const auto t2 = full_table(pair);
  check("pair E_11", t2.row("1").return_time, Expansion(0, {Rational(2)}));
  check("pair pi_1", t2.row("1").stationary, Expansion(0, {half}));

  const double elapsed = seconds_since(start);
  if (elapsed >= 1.0) out.fail("runtime " + seconds(elapsed) + " exceeds 1 s");
  out.detail = std::to_string(checks) + " exact expansions, " + std::to_string(violations) + " mismatches, " +
               seconds(elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// Criteria 4 and 5: exclusion orders and stochasticity at every stage

std::vector<std::vector<std::string>> orders_for(const PerturbedSMP& m, PerturbedSMP::Index i, Rng& rng) {
  auto order = default_order(m, i);
  std::vector<std::vector<std::string>> out;
  if (m.size() <= 4) {
    std::sort(order.begin(), order.end());
    do {
      out.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
  }
  out.push_back(order);
  while (out.size() < 10) {
    std::shuffle(order.begin(), order.end(), rng);
    if (std::find(out.begin(), out.end(), order) == out.end()) out.push_back(order);
  }
  return out;
}

void permutation_and_stochasticity(const std::vector<PerturbedSMP>& corpus, Outcome& perm, Outcome& stoch) {
  const auto start = Clock::now();
  Rng rng(7004);
  std::size_t chains = 0;
  std::size_t stages = 0;
  std::size_t sizes[6] = {};
  for (const auto& m : corpus) {
    ++sizes[m.size()];
    for (PerturbedSMP::Index i = 0; i < m.size(); ++i) {
      std::optional<Expansion> reference;
      for (const auto& order : orders_for(m, i, rng)) {
        ++chains;
        std::vector<ReductionStep> steps;
        try {
          steps = sequential_reduction(m, order);
        } catch (const Error& e) {
          stoch.fail(e.what());
          continue;
        }
        for (const auto& step : steps) {
          ++stages;
          if (!step.stochasticity.passed) stoch.fail(step.stochasticity.failures.front());
        }
        const Expansion e_ii = steps.back().after.at(0, 0).e;
        if (!reference) {
          reference = e_ii;
        } else if (!(*reference == e_ii)) {
          perm.fail("E_" + m.state(i) + ": " + describe(e_ii) + " != " + describe(*reference));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (corpus.size() < 50) perm.fail("corpus has fewer than 50 models");
  if (elapsed >= 60.0) perm.fail("runtime " + seconds(elapsed) + " exceeds 60 s");
  perm.detail = std::to_string(corpus.size()) + " models (N=3: " + std::to_string(sizes[3]) +
                ", N=4: " + std::to_string(sizes[4]) + ", N=5: " + std::to_string(sizes[5]) + "), " +
                std::to_string(chains) + " exclusion orders, " + seconds(elapsed);
  stoch.detail = std::to_string(stages) + " reduction stages checked";
}

// ---------------------------------------------------------------------------
// Criterion 6: diagnostics and limit classification

/// Size of the term after the limit at eps: for a state with a positive
/// limit, the first nonzero coefficient above order 0 (or eps^k if the
/// window holds none); otherwise the leading term itself.
Rational next_order_term(const Expansion& pi, const Rational& eps) {
  if (pi.low() > 0) return abs(pi.leading()) * pow(eps, pi.low());
  for (int l = 1; l <= pi.high(); ++l) {
    if (pi.coeff(l) != 0) return abs(pi.coeff(l)) * pow(eps, l);
  }
  return pow(eps, pi.high());
}

Outcome diagnostics(const std::vector<PerturbedSMP>& corpus, const std::vector<ExpansionTable>& tables) {
  Outcome out;
  const Rational eps(1, 10000);
  std::size_t support = 0;
  std::size_t states = 0;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    const auto& d = tables[t].diagnostics;
    if (!d.passed()) out.fail(d.failures.front());
    const auto oracle = oracle_stationary_and_return(corpus[t], eps);
    for (std::size_t i = 0; i < corpus[t].size(); ++i) {
      ++states;
      const auto& row = tables[t].rows[i];
      const bool in_support = std::find(d.limit_support.begin(), d.limit_support.end(), row.state) !=
                              d.limit_support.end();
      if (in_support != (row.stationary.low() == 0)) out.fail("limit support disagrees with n^- of " + row.state);
      support += in_support;
      const Rational gap = abs(Rational(oracle[i].stationary - row.limit));
      if (gap > 10 * next_order_term(row.stationary, eps)) {
        out.fail("state " + row.state + ": oracle " + to_string(oracle[i].stationary) + " is not within 10x of " +
                 "the next-order term of limit " + to_string(row.limit));
      }
    }
  }
  out.detail = "relations hold on " + std::to_string(corpus.size()) + " tables; " + std::to_string(support) +
               " of " + std::to_string(states) + " states in the limit support, all within 10x at eps=1/10000";
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 7: oracle convergence plus a negative control

Outcome convergence(const std::vector<PerturbedSMP>& corpus, const std::vector<ExpansionTable>& tables) {
  Outcome out;
  const Rational delta(1, 1000);
  std::size_t states = 0;
  std::size_t perturbations = 0;
  std::size_t flipped = 0;
  std::size_t unresolvable = 0;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    const auto& m = corpus[t];
    const auto grid = default_grid(m);
    const auto base = convergence_report(m, tables[t], grid);
    for (const auto& s : base.states) {
      ++states;
      if (!s.verdict) out.fail("state " + s.state + " of model " + std::to_string(t) + " does not converge");
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto& pi = tables[t].rows[i].stationary;
      const Rational& floor = base.states[i].points.back().ratio;
      const Rational& eps_min = grid.back();
      for (std::size_t c = 0; c < pi.size(); ++c) {
        // The shift adds delta * eps^(l-k) to the ratio at the finest point;
        // below ten times the genuine ratio there, no grid verdict can see it.
        const int l = pi.low() + static_cast<int>(c);
        if (delta * pow(eps_min, l - pi.high()) < 10 * floor) {
          ++unresolvable;
          continue;
        }
        ++perturbations;
        auto shifted = tables[t];
        auto coeffs = pi.coeffs();
        coeffs[c] += delta;
        shifted.rows[i].stationary = Expansion(pi.low(), std::move(coeffs));
        if (!convergence_report(m, shifted, grid).passed()) {
          ++flipped;
        } else {
          out.fail("shifting eps^" + std::to_string(l) + " of pi_" + m.state(i) + " in model " + std::to_string(t) +
                   " went unnoticed");
        }
      }
    }
  }
  out.detail = std::to_string(states) + " states converge on the default grid; negative control flipped " +
               std::to_string(flipped) + "/" + std::to_string(perturbations) +
               " resolvable shifts by 1/1000 (" + std::to_string(unresolvable) +
               " shifts below grid resolution not counted)";
  return out;
}

// ---------------------------------------------------------------------------
// Criterion 8: return times survive one numeric reduction exactly

Outcome preservation(const std::vector<PerturbedSMP>& corpus) {
  Outcome out;
  std::size_t checks = 0;
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    for (PerturbedSMP::Index r = 0; r < corpus[t].size(); ++r) {
      ++checks;
      if (!reduction_preservation_check(corpus[t], r, Rational(1, 10))) {
        out.fail("model " + std::to_string(t) + ", excluded " + corpus[t].state(r));
      }
    }
  }
  out.detail = std::to_string(checks) + " (model, excluded state) pairs at eps=1/10";
  return out;
}

bool report(int criterion, const char* title, const Outcome& o) {
  std::cout << "criterion " << criterion << ": " << (o.passed ? "PASS" : "FAIL") << "  " << title << ": "
            << o.detail;
  if (!o.passed) std::cout << "; first failure: " << o.first_failure;
  std::cout << std::endl;
  return o.passed;
}

template <class F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    Outcome o;
    o.fail(std::string("exception: ") + e.what());
    return o;
  }
}

}  // namespace

int main() {
  bool ok = true;
  const auto expansions = expansion_corpus(1200);
  ok &= report(1, "expansion calculus laws", guarded([&] { return laurent_laws(expansions); }));
  ok &= report(2, "window formulas", guarded([&] { return window_formulas(expansions); }));
  ok &= report(3, "worked two-state fixtures", guarded(worked_fixtures));

  const auto corpus = testing::model_corpus(kCorpusSize, kCorpusSeed);
  Outcome perm;
  Outcome stoch;
  try {
    permutation_and_stochasticity(corpus, perm, stoch);
  } catch (const std::exception& e) {
    perm.fail(std::string("exception: ") + e.what());
    stoch.fail(std::string("exception: ") + e.what());
  }
  ok &= report(4, "exclusion-order invariance", perm);
  ok &= report(5, "stochasticity at every stage", stoch);

  std::vector<ExpansionTable> tables;
  const Outcome built = guarded([&] {
    for (const auto& m : corpus) tables.push_back(full_table(m));
    return Outcome{};
  });
  if (!built.passed) {
    report(6, "stationary diagnostics", built);
    report(7, "oracle convergence", built);
    ok = false;
  } else {
    ok &= report(6, "stationary diagnostics", guarded([&] { return diagnostics(corpus, tables); }));
    ok &= report(7, "oracle convergence", guarded([&] { return convergence(corpus, tables); }));
  }
  ok &= report(8, "return times preserved by reduction", guarded([&] { return preservation(corpus); }));
  return ok ? 0 : 1;
}
