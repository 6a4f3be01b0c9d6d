#pragma once

// Brute-force ground truth for exact models: evaluate every transition
// expansion at a fixed rational eps, solve the embedded chain exactly, and
// compare the resulting stationary probabilities with the expansions.

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/json.hpp"
#include "smpx/laurent.hpp"
#include "smpx/model.hpp"
#include "smpx/parallel.hpp"
#include "smpx/pipeline.hpp"
#include "smpx/rational.hpp"

namespace smpx {

using Matrix = std::vector<std::vector<Rational>>;

/// A semi-Markov process at one fixed eps: dense transition probabilities and
/// sojourn expectations, zero where no transition exists.
struct NumericSMP {
  std::vector<std::string> states;
  Matrix p;
  Matrix e;

  std::size_t size() const noexcept { return states.size(); }
};

inline NumericSMP evaluate_model(const PerturbedSMP& m, const Rational& eps) {
  if (eps <= 0) throw Error(ErrorKind::NonPositiveEpsilon, "eps must be positive");
  const std::size_t n = m.size();
  NumericSMP out{m.states(), Matrix(n, std::vector<Rational>(n)), Matrix(n, std::vector<Rational>(n))};
  for (const auto& [key, data] : m.transitions()) {
    const auto [i, j] = key;
    out.p[i][j] = evaluate(data.p, eps);
    out.e[i][j] = evaluate(data.e, eps);
    if (out.p[i][j] <= 0 || out.p[i][j] > 1) {
      throw Error(ErrorKind::NotStochasticAtEpsilon,
                  "p(" + m.state(i) + " -> " + m.state(j) + ") = " + to_string(out.p[i][j]) + " at eps = " +
                      to_string(eps));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Rational sum = std::accumulate(out.p[i].begin(), out.p[i].end(), Rational(0));
    if (sum != 1) {
      throw Error(ErrorKind::NotStochasticAtEpsilon,
                  "row " + m.state(i) + " sums to " + to_string(sum) + " at eps = " + to_string(eps));
    }
  }
  return out;
}

/// Solves a x = b exactly. Rows are scaled to integers and reduced with
/// Bareiss' fraction-free elimination; only back substitution divides.
inline std::vector<Rational> solve_exact(const Matrix& a, const std::vector<Rational>& b) {
  const std::size_t n = a.size();
  std::vector<std::vector<mpz_class>> rows(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    mpz_class scale = b[i].get_den();
    for (const auto& v : a[i]) scale = lcm(scale, mpz_class(v.get_den()));
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = a[i][j].get_num() * (scale / a[i][j].get_den());
    rows[i][n] = b[i].get_num() * (scale / b[i].get_den());
  }
  mpz_class prev_pivot = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    while (pivot < n && rows[pivot][k] == 0) ++pivot;
    if (pivot == n) throw Error(ErrorKind::SingularSystem, "linear system is singular");
    std::swap(rows[k], rows[pivot]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) / prev_pivot;
      }
      rows[i][k] = 0;
    }
    prev_pivot = rows[k][k];
  }
  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc(rows[i][n]);
    for (std::size_t j = i + 1; j < n; ++j) acc -= Rational(rows[i][j]) * x[j];
    x[i] = acc / Rational(rows[i][i]);
    x[i].canonicalize();
  }
  return x;
}

/// Stationary vector rho of the embedded chain: rho P = rho, sum rho = 1.
inline std::vector<Rational> embedded_stationary(const NumericSMP& smp) {
  const std::size_t n = smp.size();
  Matrix a(n, std::vector<Rational>(n));
  std::vector<Rational> b(n, Rational(0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = smp.p[j][i] - (i == j ? 1 : 0);
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1;
  b[n - 1] = 1;
  auto rho = solve_exact(a, b);
  for (std::size_t i = 0; i < n; ++i) {
    if (rho[i] <= 0) {
      throw Error(ErrorKind::SingularSystem, "embedded chain is reducible: state " + smp.states[i] +
                                                 " has stationary mass " + to_string(rho[i]));
    }
  }
  return rho;
}

inline std::vector<Rational> embedded_stationary(const PerturbedSMP& m, const Rational& eps) {
  return embedded_stationary(evaluate_model(m, eps));
}

struct OraclePoint {
  Rational stationary;
  Rational return_time;
};

/// pi_i = rho_i e_i / sum_j rho_j e_j and E_ii = sum_j rho_j e_j / rho_i,
/// with e_i the row sum of sojourn expectations.
inline std::vector<OraclePoint> oracle_stationary_and_return(const NumericSMP& smp) {
  const auto rho = embedded_stationary(smp);
  const std::size_t n = smp.size();
  std::vector<Rational> weighted(n);
  Rational total(0);
  for (std::size_t i = 0; i < n; ++i) {
    const Rational row = std::accumulate(smp.e[i].begin(), smp.e[i].end(), Rational(0));
    weighted[i] = rho[i] * row;
    total += weighted[i];
  }
  std::vector<OraclePoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(OraclePoint{Rational(weighted[i] / total), Rational(total / rho[i])});
  }
  return out;
}

inline std::vector<OraclePoint> oracle_stationary_and_return(const PerturbedSMP& m, const Rational& eps) {
  return oracle_stationary_and_return(evaluate_model(m, eps));
}

/// Excludes state r from an evaluated process using the screening formulas
/// directly on numbers.
inline NumericSMP numeric_reduce(const NumericSMP& smp, std::size_t r) {
  const std::size_t n = smp.size();
  if (r >= n) throw Error(ErrorKind::InvalidArgument, "state index out of range");
  if (smp.p[r][r] == 1) throw Error(ErrorKind::SingularSystem, "state " + smp.states[r] + " is absorbing");
  const Rational stay_inv = 1 / (1 - smp.p[r][r]);
  NumericSMP out;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != r) {
      kept.push_back(i);
      out.states.push_back(smp.states[i]);
    }
  }
  const std::size_t k = kept.size();
  out.p.assign(k, std::vector<Rational>(k));
  out.e.assign(k, std::vector<Rational>(k));
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t i = kept[a];
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t j = kept[b];
      const Rational q_rj = smp.p[r][j] * stay_inv;
      const Rational q_ir = smp.p[i][r] * stay_inv;
      out.p[a][b] = smp.p[i][j] + smp.p[i][r] * q_rj;
      out.e[a][b] = smp.e[i][j] + smp.e[i][r] * q_rj + smp.e[r][r] * q_ir * q_rj + smp.e[r][j] * q_ir;
    }
  }
  return out;
}

/// Mean return times of all states other than r agree exactly before and
/// after excluding r at the given eps.
inline bool reduction_preservation_check(const PerturbedSMP& m, PerturbedSMP::Index r, const Rational& eps) {
  const NumericSMP full = evaluate_model(m, eps);
  const auto before = oracle_stationary_and_return(full);
  if (full.size() == 1) return true;
  const auto after = oracle_stationary_and_return(numeric_reduce(full, r));
  std::size_t k = 0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (i == r) continue;
    if (before[i].return_time != after[k].return_time) return false;
    ++k;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Convergence of stationary expansions against the oracle

struct GridPoint {
  Rational eps;
  Rational oracle_stationary;
  Rational oracle_return_time;
  Rational expansion_value;
  Rational error;
  /// error / eps^k, k the upper order of the stationary expansion.
  Rational ratio;
};

struct StateConvergence {
  std::string state;
  int order = 0;
  std::vector<GridPoint> points;
  bool verdict = false;
};

struct OracleReport {
  std::vector<Rational> grid;
  std::vector<StateConvergence> states;
  bool skipped = false;
  std::string warning;

  bool passed() const {
    return std::all_of(states.begin(), states.end(), [](const auto& s) { return s.verdict; });
  }
};

/// {1/10, 1/100, 1/1000, 1/10000}, restricted to (0, eps0] when eps0 is known.
/// A small eps0 that would leave fewer than three points gets the three
/// largest powers of ten below it instead.
inline std::vector<Rational> default_grid(const PerturbedSMP& m) {
  std::vector<Rational> grid;
  Rational eps(1, 10);
  for (int i = 0; i < 4; ++i) {
    if (!m.epsilon0() || eps <= *m.epsilon0()) grid.push_back(eps);
    eps /= 10;
  }
  if (grid.size() >= 3) return grid;
  grid.clear();
  for (eps = Rational(1, 10); grid.size() < 3; eps /= 10) {
    if (eps <= *m.epsilon0()) grid.push_back(eps);
  }
  return grid;
}

/// The ratio must shrink at least tenfold from the first grid point to the
/// last, and the final step must still decay at order >= 3/4:
/// (r_prev / r_last)^4 >= (eps_prev / eps_last)^3, decided exactly.
/// The final-step test rejects a ratio that stalls at a nonzero constant,
/// which is what a wrong coefficient at order <= k looks like. Earlier grid
/// points are not required to be monotone: eps = 1/10 is often pre-asymptotic.
inline bool convergence_verdict(const std::vector<GridPoint>& points) {
  if (points.size() < 2) return false;
  const auto& first = points.front();
  const auto& prev = points[points.size() - 2];
  const auto& last = points.back();
  if (last.ratio * 10 > first.ratio) return false;
  if (last.ratio == 0) return true;
  if (prev.ratio == 0) return false;
  return pow(Rational(prev.ratio / last.ratio), 4) >= pow(Rational(prev.eps / last.eps), 3);
}

inline OracleReport convergence_report(const PerturbedSMP& m, const ExpansionTable& table,
                                       const std::vector<Rational>& grid) {
  OracleReport report;
  report.grid = grid;
  if (!m.exact()) {
    report.skipped = true;
    report.warning = "model remainders are not declared exact; oracle comparison skipped";
    return report;
  }
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty eps grid");
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (grid[t] <= 0) throw Error(ErrorKind::NonPositiveEpsilon, "grid values must be positive");
    if (t > 0 && !(grid[t] < grid[t - 1])) {
      throw Error(ErrorKind::InvalidArgument, "grid must be strictly decreasing");
    }
  }
  if (grid.front() < grid.back() * 100) {
    report.warning = "grid spans less than a factor of 100 in eps; the tenfold shrink criterion may reject correct expansions";
  }
  if (table.rows.size() != m.size()) {
    throw Error(ErrorKind::InvalidArgument, "table and model have different state counts");
  }

  std::vector<std::vector<OraclePoint>> oracle(grid.size());
  parallel_for(grid.size(), [&](std::size_t t) {
    oracle[t] = oracle_stationary_and_return(m, grid[t]);
    Rational total(0);
    for (const auto& point : oracle[t]) total += point.stationary;
    if (total != 1) {
      throw Error(ErrorKind::DiagnosticFailure, "oracle stationary probabilities sum to " + to_string(total));
    }
  });

  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& row = table.row(m.state(i));
    StateConvergence sc{row.state, row.stationary.high(), {}, false};
    for (std::size_t t = 0; t < grid.size(); ++t) {
      const Rational& eps = grid[t];
      Rational value = evaluate(row.stationary, eps);
      Rational error = abs(Rational(oracle[t][i].stationary - value));
      Rational ratio = error / pow(eps, sc.order);
      sc.points.push_back(GridPoint{eps, oracle[t][i].stationary, oracle[t][i].return_time, std::move(value),
                                    std::move(error), std::move(ratio)});
    }
    sc.verdict = convergence_verdict(sc.points);
    report.states.push_back(std::move(sc));
  }
  return report;
}

inline Json to_json(const OracleReport& report) {
  Json doc;
  Json grid = Json::array();
  for (const auto& eps : report.grid) grid.push_back(to_string(eps));
  doc["grid"] = std::move(grid);
  doc["skipped"] = report.skipped;
  if (!report.warning.empty()) doc["warning"] = report.warning;
  Json states = Json::object();
  for (const auto& s : report.states) {
    Json points = Json::array();
    for (const auto& p : s.points) {
      points.push_back(Json{{"eps", to_string(p.eps)},
                            {"oracle_stationary", to_string(p.oracle_stationary)},
                            {"oracle_return_time", to_string(p.oracle_return_time)},
                            {"expansion", to_string(p.expansion_value)},
                            {"error", to_string(p.error)},
                            {"ratio", to_string(p.ratio)}});
      // Exact convergence-order evidence: the ratio shrinks by this factor
      // while eps shrinks by eps_prev / eps.
      if (points.size() > 1) {
        const auto& prev = s.points[points.size() - 2];
        points.back()["shrink"] = p.ratio == 0 ? Json(nullptr) : Json(to_string(Rational(prev.ratio / p.ratio)));
      }
    }
    states[s.state] = Json{{"order", s.order}, {"verdict", s.verdict}, {"points", std::move(points)}};
  }
  doc["states"] = std::move(states);
  doc["passed"] = report.passed();
  return doc;
}

inline std::string to_text(const OracleReport& report) {
  std::ostringstream os;
  if (report.skipped) {
    os << "skipped: " << report.warning << "\n";
    return os.str();
  }
  if (!report.warning.empty()) os << "warning: " << report.warning << "\n";
  for (const auto& s : report.states) {
    os << "state " << s.state << "  (order " << s.order << ")  " << (s.verdict ? "converges" : "FAILS") << "\n";
    os << "  eps          error/eps^k\n";
    for (const auto& p : s.points) {
      const std::string eps = p.eps.get_str();
      os << "  " << eps << std::string(eps.size() < 12 ? 12 - eps.size() : 1, ' ') << " "
         << p.ratio.get_str() << "\n";
    }
  }
  return os.str();
}

}  // namespace smpx
