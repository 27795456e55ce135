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


#include <gtest/gtest.h>

#include <random>

#include "werner/sdp_solver.hpp"

namespace werner {
namespace {

SdpProblem one_block(int size, bool hermitian) {
  SdpProblem p;
  p.hermitian = hermitian;
  p.blocks.push_back(PsdBlock{size, {}});
  return p;
}

TEST(RealifyTest, RealProblemUnchanged) {
  SdpProblem p = one_block(2, false);
  LinearConstraint c;
  c.gram = {{0, 0, 1, QComplex(3)}};
  c.rhs = QComplex(1);
  p.constraints.push_back(c);
  SdpProblem q = realify(p);
  EXPECT_FALSE(q.hermitian);
  ASSERT_EQ(q.blocks.size(), 1u);
  EXPECT_EQ(q.blocks[0].size, 2);
  ASSERT_EQ(q.constraints.size(), 1u);
  EXPECT_EQ(q.constraints[0].gram.size(), 1u);
}

TEST(RealifyTest, ScalarComplexBlockBecomesTwoByTwoWithEqualDiagonal) {
  SdpProblem p = one_block(1, true);
  LinearConstraint c;
  c.gram = {{0, 0, 0, QComplex(1)}};
  c.rhs = QComplex(2);
  p.constraints.push_back(c);
  SdpProblem q = realify(p);
  EXPECT_EQ(q.blocks[0].size, 2);
  ASSERT_EQ(q.constraints.size(), 1u);  // the imaginary part of a real diagonal vanishes
  const auto& terms = q.constraints[0].gram;
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].row, 0);
  EXPECT_EQ(terms[1].row, 1);
  EXPECT_EQ(terms[0].coeff, terms[1].coeff);
  EXPECT_EQ(terms[0].coeff, QComplex(make_rational(1, 2)));
}

TEST(RealifyTest, EmbeddingPreservesPositivity) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 1 + trial % 6;
    Eigen::MatrixXcd a(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) a(i, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd h = a * a.adjoint();
    Eigen::MatrixXd y = hermitian_embedding(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(y, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(h, Eigen::EigenvaluesOnly);
    EXPECT_GE(ey.eigenvalues().minCoeff(), -1e-12);
    // Each eigenvalue of h appears twice.
    for (int i = 0; i < s; ++i) {
      EXPECT_NEAR(ey.eigenvalues()[2 * i], eh.eigenvalues()[i], 1e-9);
      EXPECT_NEAR(ey.eigenvalues()[2 * i + 1], eh.eigenvalues()[i], 1e-9);
    }
    EXPECT_LT((hermitian_from_embedding(y) - h).norm(), 1e-12);
  }
}

TEST(SolveTest, ScalarLowerBound) {
  // minimize eps subject to eps - 3 = g, g >= 0.
  SdpProblem p = one_block(1, false);
  p.epsilon_var = p.add_free("epsilon");
  p.objective = {{p.epsilon_var, Rational(1)}};
  LinearConstraint c;
  c.gram = {{0, 0, 0, QComplex(1)}};
  c.free = {{p.epsilon_var, QComplex(-1)}};
  c.rhs = QComplex(-3);
  p.constraints.push_back(c);
  SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.epsilon, 3.0, 1e-7);
  EXPECT_NEAR(s.objective, 3.0, 1e-7);
}

TEST(SolveTest, ContradictoryEqualitiesAreInfeasible) {
  SdpProblem p = one_block(1, false);
  int x = p.add_free("x");
  p.objective = {{x, Rational(1)}};
  for (int v : {1, 2}) {
    LinearConstraint c;
    c.free = {{x, QComplex(1)}};
    c.gram = {{0, 0, 0, QComplex(1)}};
    c.rhs = QComplex(v);
    p.constraints.push_back(c);
  }
  EXPECT_EQ(solve(p).status, SolveStatus::kInfeasible);
}

// min t s.t. <C, X> = t, tr X = 1, X >= 0 has value lambda_min(C).
SdpProblem min_eigenvalue_problem(const Eigen::MatrixXcd& c, bool hermitian) {
  const int s = static_cast<int>(c.rows());
  SdpProblem p = one_block(s, hermitian);
  int t = p.add_free("t");
  p.epsilon_var = t;
  p.objective = {{t, Rational(1)}};
  LinearConstraint dot, tr;
  for (int i = 0; i < s; ++i) {
    tr.gram.push_back({0, i, i, QComplex(1)});
    for (int j = 0; j < s; ++j) {
      // <C, X> = sum conj(C_ij) X_ij; C is given with small-integer entries.
      QComplex q(exact_rational(c(i, j).real()), -exact_rational(c(i, j).imag()));
      if (!q.is_zero()) dot.gram.push_back({0, i, j, q});
    }
  }
  dot.free = {{t, QComplex(-1)}};
  tr.rhs = QComplex(1);
  p.constraints = {dot, tr};
  return p;
}

TEST(SolveTest, MinimumEigenvalueReal) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(-5, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const int s = 3 + trial;
    Eigen::MatrixXd a(s, s);
    for (int i = 0; i < s; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
    SdpSolution sol = solve(min_eigenvalue_problem(a.cast<Complex>(), false));
    ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    EXPECT_NEAR(sol.objective, es.eigenvalues()[0], 1e-6);
    EXPECT_LT(sol.primal_residual, 1e-6);
    EXPECT_GE(sol.min_eigenvalue, -1e-7);
  }
}

TEST(SolveTest, MinimumEigenvalueHermitian) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> u(-5, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const int s = 2 + trial;
    Eigen::MatrixXcd a(s, s);
    for (int i = 0; i < s; ++i) {
      a(i, i) = u(rng);
      for (int j = 0; j < i; ++j) {
        a(i, j) = Complex(u(rng), u(rng));
        a(j, i) = std::conj(a(i, j));
      }
    }
    SdpSolution sol = solve(min_eigenvalue_problem(a, true));
    ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    EXPECT_NEAR(sol.objective, es.eigenvalues()[0], 1e-6);
    EXPECT_LT(sol.primal_residual, 1e-6);
    EXPECT_GE(sol.min_eigenvalue, -1e-7);
    EXPECT_LT((sol.gram[0] - sol.gram[0].adjoint()).norm(), 1e-12);
  }
}

TEST(SolveTest, Deterministic) {
  Eigen::MatrixXd a(3, 3);
  a << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  SdpProblem p = min_eigenvalue_problem(a.cast<Complex>(), false);
  SdpSolution s1 = solve(p), s2 = solve(p);
  EXPECT_EQ(s1.status, s2.status);
  EXPECT_EQ(s1.iterations, s2.iterations);
  EXPECT_NEAR(s1.objective, s2.objective, 1e-12);
}

TEST(SolveTest, FloorReportsUnbounded) {
  // minimize eps with eps free apart from the floor 0.
  SdpProblem p = one_block(1, false);
  p.epsilon_var = p.add_free("epsilon");
  p.objective = {{p.epsilon_var, Rational(1)}};
  p.epsilon_floor = Rational(0);
  LinearConstraint c;
  c.gram = {{0, 0, 0, QComplex(1)}};
  c.rhs = QComplex(1);
  p.constraints.push_back(c);
  SdpSolution s = solve(p);
  EXPECT_EQ(s.status, SolveStatus::kUnbounded) << s.message;
  EXPECT_TRUE(std::isinf(s.objective));
  EXPECT_NEAR(s.epsilon, 0.0, 1e-6);
}

TEST(FeasibilityTest, InteriorPointAndInfeasibleShift) {
  // g11 = eps, g22 = 1 - eps, g12 = 0: PSD iff 0 <= eps <= 1.
  SdpProblem p = one_block(2, false);
  p.epsilon_var = p.add_free("epsilon");
  p.objective = {{p.epsilon_var, Rational(1)}};
  LinearConstraint a, b, c;
  a.gram = {{0, 0, 0, QComplex(1)}};
  a.free = {{p.epsilon_var, QComplex(-1)}};
  b.gram = {{0, 1, 1, QComplex(1)}};
  b.free = {{p.epsilon_var, QComplex(1)}};
  b.rhs = QComplex(1);
  c.gram = {{0, 0, 1, QComplex(1)}};
  p.constraints = {a, b, c};
  SdpSolution s = solve_feasibility(p, make_rational(1, 4));
  ASSERT_EQ(s.status, SolveStatus::kOptimal) << s.message;
  EXPECT_NEAR(s.min_eigenvalue, 0.25, 1e-6);
  EXPECT_NEAR(s.gram[0](0, 0).real(), 0.25, 1e-6);
  EXPECT_LT(s.primal_residual, 1e-6);
  EXPECT_EQ(solve_feasibility(p, make_rational(3, 2)).status, SolveStatus::kInfeasible);
}

}  // namespace
}  // namespace werner
