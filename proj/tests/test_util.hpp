// Copyright 2026 The werner-witness Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <random>

#include "werner/group_algebra.hpp"

namespace werner::testing {

inline ExactElement random_exact_element(int n, std::mt19937_64& rng, int support = -1,
                                         bool complex_coeffs = true) {
  const auto perms = all_permutations(n);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 7);
  ExactElement a(n);
  for (const auto& p : perms) {
    if (support >= 0 && std::uniform_int_distribution<int>(0, static_cast<int>(perms.size()) - 1)(rng) >= support) {
      continue;
    }
    Rational re = make_rational(num(rng), den(rng));
    Rational im = complex_coeffs ? make_rational(num(rng), den(rng)) : Rational(0);
    a.add(p, QComplex(re, im));
  }
  return a;
}

inline NumericElement random_numeric_element(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  NumericElement a(n);
  for (const auto& p : all_permutations(n)) a.add(p, Complex(g(rng), g(rng)));
  return a;
}

/// r = a a^dagger / tau(a a^dagger), a random state in CS_n.
inline ExactElement random_exact_state(int n, std::mt19937_64& rng, bool real = false) {
  ExactElement a = random_exact_element(n, rng, -1, !real);
  ExactElement r = a * a.dagger();
  return r * (QComplex(1) / r.tau());
}

}  // namespace werner::testing
