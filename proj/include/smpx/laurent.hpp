#pragma once

// Truncated Laurent expansions in a small parameter eps:
//
//   A(eps) = a_h eps^h + ... + a_k eps^k + o(eps^k)
//
// Only the coefficients a_h..a_k and the orders (h, k) are stored. The
// remainder is abstract; its order k is the only thing the calculus tracks.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smpx/error.hpp"
#include "smpx/rational.hpp"

namespace smpx {

template <class Field>
class Laurent {
 public:
  /// Window (low, low + coeffs.size() - 1). Throws EmptyInput on no coefficients.
  Laurent(int low, std::vector<Field> coeffs) : low_(low), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) {
      throw Error(ErrorKind::EmptyInput, "expansion needs at least one coefficient");
    }
  }

  static Laurent zero(int low, int high) {
    check_window(low, high);
    return Laurent(low, std::vector<Field>(static_cast<std::size_t>(high - low + 1), Field(0)));
  }

  /// The constant 1 as a (0, high)-expansion.
  static Laurent one(int high) {
    check_window(0, high);
    auto c = std::vector<Field>(static_cast<std::size_t>(high + 1), Field(0));
    c[0] = Field(1);
    return Laurent(0, std::move(c));
  }

  static Laurent monomial(const Field& c, int power) { return Laurent(power, {c}); }

  int low() const noexcept { return low_; }
  int high() const noexcept { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  const std::vector<Field>& coeffs() const noexcept { return coeffs_; }
  const Field& leading() const noexcept { return coeffs_.front(); }
  bool pivotal() const { return coeffs_.front() != 0; }
  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Field& c) { return c == 0; });
  }

  /// Coefficient of eps^power. Powers below the window are exactly zero;
  /// powers above it are unknown and rejected.
  Field coeff(int power) const {
    if (power > high()) {
      throw std::out_of_range("coefficient of eps^" + std::to_string(power) +
                              " lies beyond the tracked order " + std::to_string(high()));
    }
    if (power < low_) return Field(0);
    return coeffs_[static_cast<std::size_t>(power - low_)];
  }

  friend bool operator==(const Laurent& a, const Laurent& b) {
    return a.low_ == b.low_ && a.coeffs_ == b.coeffs_;
  }

 private:
  static void check_window(int low, int high) {
    if (low > high) {
      throw Error(ErrorKind::InvalidArgument,
                  "empty window (" + std::to_string(low) + ", " + std::to_string(high) + ")");
    }
  }

  int low_;
  std::vector<Field> coeffs_;
};

using Expansion = Laurent<Rational>;

template <class Field>
std::ostream& operator<<(std::ostream& os, const Laurent<Field>& x) {
  os << "(" << x.low() << "," << x.high() << ")[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != 0) os << ", ";
    os << x.coeffs()[i];
  }
  return os << "]";
}

/// Merges two representations of the same function into the most
/// informative one: leading zeros are stripped, the longer tail is kept, and
/// every coefficient known to both sides must agree.
template <class Field>
Laurent<Field> refine(const Laurent<Field>& x, const Laurent<Field>& y) {
  const int high = std::max(x.high(), y.high());
  const int start = std::min(x.low(), y.low());
  std::vector<Field> merged;
  merged.reserve(static_cast<std::size_t>(high - start + 1));
  for (int l = start; l <= high; ++l) {
    const bool known_x = l <= x.high();
    const bool known_y = l <= y.high();
    if (known_x && known_y && x.coeff(l) != y.coeff(l)) {
      throw Error(ErrorKind::InconsistentMerge,
                  "representations disagree at eps^" + std::to_string(l));
    }
    merged.push_back(known_x ? x.coeff(l) : y.coeff(l));
  }
  auto first_nonzero = std::find_if(merged.begin(), merged.end(),
                                    [](const Field& c) { return c != 0; });
  if (first_nonzero == merged.end()) {
    // Nothing but zeros is known; keep the tightest lower bound on the order.
    const int low = std::min(std::max(x.low(), y.low()), high);
    return Laurent<Field>::zero(low, high);
  }
  const int low = start + static_cast<int>(first_nonzero - merged.begin());
  return Laurent<Field>(low, std::vector<Field>(first_nonzero, merged.end()));
}

template <class Field>
Laurent<Field> scale(const Field& c, const Laurent<Field>& x) {
  std::vector<Field> out;
  out.reserve(x.size());
  for (const auto& a : x.coeffs()) out.push_back(Field(c * a));
  return Laurent<Field>(x.low(), std::move(out));
}

template <class Field>
Laurent<Field> add(const Laurent<Field>& x, const Laurent<Field>& y) {
  const int low = std::min(x.low(), y.low());
  const int high = std::min(x.high(), y.high());
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(high - low + 1));
  for (int l = low; l <= high; ++l) out.push_back(Field(x.coeff(l) + y.coeff(l)));
  return Laurent<Field>(low, std::move(out));
}

template <class Field>
Laurent<Field> subtract(const Laurent<Field>& x, const Laurent<Field>& y) {
  return add(x, scale(Field(-1), y));
}

template <class Field>
Laurent<Field> mul(const Laurent<Field>& x, const Laurent<Field>& y) {
  // k = min(k_x + h_y, k_y + h_x), i.e. the shorter window length survives.
  const std::size_t n = std::min(x.size(), y.size());
  const auto& a = x.coeffs();
  const auto& b = y.coeffs();
  std::vector<Field> out(n, Field(0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i <= r; ++i) out[r] += a[i] * b[r - i];
  }
  return Laurent<Field>(x.low() + y.low(), std::move(out));
}

template <class Field>
Laurent<Field> invert(const Laurent<Field>& b) {
  if (!b.pivotal()) {
    throw Error(ErrorKind::NonPivotalDivision, "cannot invert a non-pivotal expansion");
  }
  const auto& bc = b.coeffs();
  const Field lead_inv = Field(1) / bc[0];
  std::vector<Field> c(bc.size(), Field(0));
  c[0] = lead_inv;
  for (std::size_t r = 1; r < c.size(); ++r) {
    Field acc(0);
    for (std::size_t i = 1; i <= r; ++i) acc += bc[i] * c[r - i];
    c[r] = -lead_inv * acc;
  }
  return Laurent<Field>(-b.low(), std::move(c));
}

/// Direct long division; agrees with mul(a, invert(b)) coefficient by coefficient.
template <class Field>
Laurent<Field> divide(const Laurent<Field>& a, const Laurent<Field>& b) {
  if (!b.pivotal()) {
    throw Error(ErrorKind::NonPivotalDivision, "divisor is not pivotal");
  }
  const auto& ac = a.coeffs();
  const auto& bc = b.coeffs();
  const std::size_t n = std::min(ac.size(), bc.size());
  std::vector<Field> d(n, Field(0));
  for (std::size_t r = 0; r < n; ++r) {
    Field acc = ac[r];
    for (std::size_t i = 1; i <= r; ++i) acc -= bc[i] * d[r - i];
    d[r] = acc / bc[0];
  }
  return Laurent<Field>(a.low() - b.low(), std::move(d));
}

template <class Field>
Laurent<Field> multi_add(std::span<const Laurent<Field>> xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "multi_add of an empty sequence");
  int low = xs.front().low();
  int high = xs.front().high();
  for (const auto& x : xs) {
    low = std::min(low, x.low());
    high = std::min(high, x.high());
  }
  std::vector<Field> out(static_cast<std::size_t>(high - low + 1), Field(0));
  for (const auto& x : xs) {
    for (int l = std::max(low, x.low()); l <= high; ++l) {
      out[static_cast<std::size_t>(l - low)] += x.coeff(l);
    }
  }
  return Laurent<Field>(low, std::move(out));
}

template <class Field>
Laurent<Field> multi_mul(std::span<const Laurent<Field>> xs) {
  if (xs.empty()) throw Error(ErrorKind::EmptyInput, "multi_mul of an empty sequence");
  std::size_t n = xs.front().size();
  int low = 0;
  for (const auto& x : xs) {
    n = std::min(n, x.size());
    low += x.low();
  }
  // Running truncated convolution over the common relative length n.
  std::vector<Field> acc(n, Field(0));
  acc[0] = Field(1);
  for (const auto& x : xs) {
    std::vector<Field> next(n, Field(0));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i <= r; ++i) next[r] += acc[i] * x.coeffs()[r - i];
    }
    acc = std::move(next);
  }
  return Laurent<Field>(low, std::move(acc));
}

template <class Field>
Laurent<Field> multi_add(std::initializer_list<Laurent<Field>> xs) {
  return multi_add(std::span<const Laurent<Field>>(xs.begin(), xs.size()));
}

template <class Field>
Laurent<Field> multi_mul(std::initializer_list<Laurent<Field>> xs) {
  return multi_mul(std::span<const Laurent<Field>>(xs.begin(), xs.size()));
}

/// Value of the truncation sum at eps; the remainder is dropped.
inline Rational evaluate(const Expansion& x, const Rational& eps) {
  if (eps <= 0) throw Error(ErrorKind::NonPositiveEpsilon, "eps must be positive");
  // Horner in eps, then shift by eps^low.
  Rational acc(0);
  for (auto it = x.coeffs().rbegin(); it != x.coeffs().rend(); ++it) acc = acc * eps + *it;
  return acc * pow(eps, x.low());
}

}  // namespace smpx
