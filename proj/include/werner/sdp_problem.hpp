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

// Solver-facing conic model shared by both hierarchies.
//
//   minimize   c^T x
//   subject to sum_b <A_{i,b}, G_b> + sum_j B_ij x_j = b_i,   G_b >= 0,
//
// where each G_b is Hermitian (or real symmetric when `hermitian` is false),
// x are real free variables, and the data are exact complex rationals.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "werner/group_algebra.hpp"
#include "werner/rational.hpp"

namespace werner {

/// coeff * G_block(row, col). For Hermitian blocks G(col, row) = conj(G(row, col)).
struct GramTerm {
  int block = 0;
  int row = 0;
  int col = 0;
  QComplex coeff;
};

/// coeff * x_var for a real free variable.
struct FreeTerm {
  int var = 0;
  QComplex coeff;
};

/// A complex affine equation; for Hermitian problems both its real and
/// imaginary parts are imposed.
struct LinearConstraint {
  std::vector<GramTerm> gram;
  std::vector<FreeTerm> free;
  QComplex rhs;
  std::string label;
};

struct PsdBlock {
  int size = 0;
  std::vector<std::string> labels;
};

enum class Hierarchy { kPop, kTpop, kNone };

inline std::string to_string(Hierarchy h) {
  switch (h) {
    case Hierarchy::kPop:
      return "POP";
    case Hierarchy::kTpop:
      return "TPOP";
    default:
      return "none";
  }
}

inline Hierarchy parse_hierarchy(const std::string& s) {
  if (s == "POP" || s == "pop") return Hierarchy::kPop;
  if (s == "TPOP" || s == "tpop") return Hierarchy::kTpop;
  throw std::invalid_argument("unknown hierarchy '" + s + "'");
}

/// A real witness coordinate x contributes x to w_sigma (and the conjugate
/// value to w_{sigma^-1}); `imaginary` selects i*x instead of x.
struct WitnessCoordinate {
  Permutation sigma;
  bool imaginary = false;
};

/// Smallest sensible hierarchy level, ceil(n/2).
inline int min_level(int n) { return (n + 1) / 2; }

struct SdpProblem {
  bool hermitian = false;
  std::vector<PsdBlock> blocks;
  std::vector<std::string> free_labels;
  std::vector<LinearConstraint> constraints;
  /// Minimized linear objective over free variables.
  std::vector<std::pair<int, Rational>> objective;
  /// Index of the shift variable epsilon, or -1.
  int epsilon_var = -1;
  /// Lower bound imposed on epsilon, if any.
  std::optional<Rational> epsilon_floor;
  /// witness_map[j] describes free variable j when it is a witness coordinate.
  std::vector<std::optional<WitnessCoordinate>> witness_map;

  Hierarchy hierarchy = Hierarchy::kNone;
  int n = 0;
  int level = 0;
  bool real_mode = true;

  int num_free() const { return static_cast<int>(free_labels.size()); }
  long total_block_size() const {
    long s = 0;
    for (const auto& b : blocks) s += b.size;
    return s;
  }
  int max_block_size() const {
    int s = 0;
    for (const auto& b : blocks) s = std::max(s, b.size);
    return s;
  }

  int add_free(std::string label, std::optional<WitnessCoordinate> coord = std::nullopt) {
    free_labels.push_back(std::move(label));
    witness_map.push_back(std::move(coord));
    return num_free() - 1;
  }
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kInaccurate, kFailed };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kInaccurate:
      return "inaccurate";
    default:
      return "failed";
  }
}

struct SdpSolution {
  SolveStatus status = SolveStatus::kFailed;
  /// Objective value; -infinity when the status is kUnbounded.
  double objective = 0;
  std::vector<Eigen::MatrixXcd> gram;
  std::vector<double> free;
  double epsilon = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  double gap = 0;
  int iterations = 0;
  /// Interior margin: smallest eigenvalue over all blocks at the returned point.
  double min_eigenvalue = 0;
  std::string message;

  /// Optimal, optimal to reduced accuracy, or unbounded with a usable floor point.
  bool usable() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kInaccurate || status == SolveStatus::kUnbounded;
  }
};

/// Adds the witness coordinates of w = w^dagger: one per {sigma, sigma^-1}
/// orbit when real, two (real and imaginary part) for non-involutions in the
/// complex case. Returns the per-permutation expansion w_sigma = sum coeff x_j.
inline std::map<Permutation, std::vector<FreeTerm>> add_witness_coordinates(SdpProblem& p, int n,
                                                                            bool real) {
  std::map<Permutation, std::vector<FreeTerm>> expansion;
  for (const auto& sigma : all_permutations(n)) {
    const Permutation inv = sigma.inverse();
    if (inv < sigma) continue;
    int x = p.add_free("w" + sigma.to_string(), WitnessCoordinate{sigma, false});
    expansion[sigma].push_back({x, QComplex(1)});
    if (inv != sigma) expansion[inv].push_back({x, QComplex(1)});
    if (!real && inv != sigma) {
      int y = p.add_free("w" + sigma.to_string() + ".im", WitnessCoordinate{sigma, true});
      expansion[sigma].push_back({y, QComplex(0, 1)});
      expansion[inv].push_back({y, QComplex(0, -1)});
    }
  }
  return expansion;
}

/// w from the free-variable values of a problem built with add_witness_coordinates.
template <typename Vec>
NumericElement witness_from_free(const SdpProblem& p, const Vec& x) {
  NumericElement w(p.n);
  for (int j = 0; j < p.num_free(); ++j) {
    const auto& c = p.witness_map[j];
    if (!c) continue;
    Complex v = c->imaginary ? Complex(0, x[j]) : Complex(x[j], 0);
    w.add(c->sigma, v);
    if (c->sigma.inverse() != c->sigma) w.add(c->sigma.inverse(), std::conj(v));
  }
  return w;
}

inline ExactElement witness_from_free_exact(const SdpProblem& p, const std::vector<Rational>& x) {
  ExactElement w(p.n);
  for (int j = 0; j < p.num_free(); ++j) {
    const auto& c = p.witness_map[j];
    if (!c) continue;
    QComplex v = c->imaginary ? QComplex(0, x[j]) : QComplex(x[j]);
    w.add(c->sigma, v);
    if (c->sigma.inverse() != c->sigma) w.add(c->sigma.inverse(), conj(v));
  }
  return w;
}

/// The pairing equation tau(r w) = -1 over witness coordinates.
inline LinearConstraint pairing_constraint(const ExactElement& r,
                                           const std::map<Permutation, std::vector<FreeTerm>>& expansion) {
  // tau(r w) = n! sum_sigma r_{sigma^-1} w_sigma.
  LinearConstraint c;
  c.label = "tau(rw)=-1";
  const QComplex nf(static_cast<long>(factorial(r.n())));
  std::map<int, QComplex> acc;
  for (const auto& [sigma, terms] : expansion) {
    QComplex rc = r.coeff(sigma.inverse());
    if (rc.is_zero()) continue;
    for (const auto& t : terms) acc[t.var] += nf * rc * t.coeff;
  }
  for (const auto& [var, coeff] : acc)
    if (!coeff.is_zero()) c.free.push_back({var, coeff});
  c.rhs = QComplex(-1);
  return c;
}

}  // namespace werner
