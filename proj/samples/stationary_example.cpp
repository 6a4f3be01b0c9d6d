// Builds a two-state perturbed chain in code and prints its expansion table.
#include <iostream>

#include "smpx/smpx.hpp"

int main() {
  using smpx::Expansion;
  using smpx::Rational;

  smpx::PerturbedSMP m({"1", "2"});
  const Expansion stay(0, {Rational(1), Rational(-1)});
  const Expansion leave(1, {Rational(1)});
  const Expansion back(0, {Rational(1), Rational(0)});
  m.set_transition(0, 0, {stay, stay});
  m.set_transition(0, 1, {leave, leave});
  m.set_transition(1, 0, {back, back});

  const auto table = smpx::full_table(m, /*verify_permutation=*/true);
  std::cout << smpx::to_json(table).dump(2) << "\n";
  for (const auto& row : table.rows) {
    std::cout << "pi_" << row.state << " = " << row.stationary << "\n";
  }
}
