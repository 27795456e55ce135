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
#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"
#include "werner/io.hpp"
#include "werner/sdp_solver.hpp"
#include "werner/trace_tpop.hpp"
#include "werner/werner_rep.hpp"

namespace werner {
namespace {

ReducedWord word(const char* s) { return ReducedWord::parse(s); }
Permutation cyc(int n, const char* text) { return Permutation::parse_cycles(n, text); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

TEST(WordTest, ConcatenationReduces) {
  EXPECT_EQ(word_concat(word("x1x2"), word("x2x3")).to_string(), "x1x2x3");
  EXPECT_EQ(word_concat(word("x1x2"), ReducedWord()).to_string(), "x1x2");
  EXPECT_EQ(word_concat(word("x1x2"), word("x2x1")).to_string(), "x1x2x1");
  EXPECT_EQ(ReducedWord().to_string(), "1");
  EXPECT_EQ(ReducedWord(std::vector<int>{0, 0, 1, 1, 0}).to_string(), "x1x2x1");
}

TEST(WordTest, ConcatenationIsAssociative) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> letter(0, 2), len(0, 5);
  auto random_word = [&]() {
    std::vector<int> raw(len(rng));
    for (auto& l : raw) l = letter(rng);
    return ReducedWord(raw);
  };
  for (int t = 0; t < 200; ++t) {
    auto a = random_word(), b = random_word(), c = random_word();
    EXPECT_EQ(word_concat(word_concat(a, b), c), word_concat(a, word_concat(b, c)));
  }
}

TEST(WordTest, CyclicClassExamples) {
  EXPECT_EQ(cyclic_class(word("x2x1")), word("x1x2"));
  EXPECT_EQ(cyclic_class(word("x1x2x1")), word("x1x2"));
  EXPECT_EQ(cyclic_class(word("x1")), word("x1"));
  EXPECT_EQ(cyclic_class(word("x3x1x2")), word("x1x2x3"));
  // x1x3x2 and x1x2x3 differ up to rotation but agree up to reversal.
  EXPECT_NE(cyclic_class(word("x1x3x2")), word("x1x2x3"));
  EXPECT_EQ(cyclic_class(word("x1x3x2"), true), word("x1x2x3"));
  EXPECT_THROW(cyclic_class(ReducedWord()), std::invalid_argument);
}

TEST(WordTest, CyclicClassIsRotationInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> letter(0, 3), len(1, 8);
  for (int t = 0; t < 1000; ++t) {
    std::vector<int> raw(len(rng));
    for (auto& l : raw) l = letter(rng);
    ReducedWord u(raw);
    if (u.empty()) continue;
    const int k = std::uniform_int_distribution<int>(0, static_cast<int>(raw.size()) - 1)(rng);
    std::vector<int> rot(raw.begin() + k, raw.end());
    rot.insert(rot.end(), raw.begin(), raw.begin() + k);
    EXPECT_EQ(cyclic_class(ReducedWord(rot)), cyclic_class(u));
  }
}

TEST(TracialWordTest, ParseRoundTrip) {
  for (const auto& w : tracial_word_vector(3, 3, false)) EXPECT_EQ(TracialWord::parse(w.to_string()), w);
}

TEST(TracialWordVectorTest, Counts) {
  EXPECT_EQ(tracial_word_vector(3, 2, false).size(), 31u);
  auto w0 = tracial_word_vector(3, 0, false);
  ASSERT_EQ(w0.size(), 1u);
  EXPECT_EQ(w0[0].to_string(), "1");
  std::set<std::string> got;
  for (const auto& w : tracial_word_vector(2, 1, false)) got.insert(w.to_string());
  EXPECT_EQ(got, (std::set<std::string>{"1", "x1", "x2", "tr(x1)", "tr(x2)"}));
}

TEST(TracialWordVectorTest, OrderRespectsLength) {
  auto w = tracial_word_vector(3, 3, true);
  for (size_t i = 1; i < w.size(); ++i) {
    EXPECT_LE(w[i - 1].length(), w[i].length());
    EXPECT_TRUE(w[i - 1] < w[i]);
  }
}

TEST(TSigmaTest, Examples) {
  auto t = t_sigma(cyc(4, "(132)(4)"));
  ASSERT_EQ(t.terms.size(), 1u);
  EXPECT_EQ(t.terms.begin()->first.to_string(), "tr(x4)*tr(x1x3x2)");
  EXPECT_EQ(t.terms.begin()->second, Rational(16));

  auto id = t_sigma(Permutation::identity(3));
  EXPECT_EQ(id.terms.begin()->first.to_string(), "tr(x1)*tr(x2)*tr(x3)");
  EXPECT_EQ(id.terms.begin()->second, Rational(27));

  auto t12 = t_sigma(cyc(3, "(12)"));
  EXPECT_EQ(t12.terms.begin()->first.to_string(), "tr(x3)*tr(x1x2)");
  EXPECT_EQ(t12.terms.begin()->second, Rational(9));
}

TEST(GramEntryTest, Examples) {
  auto key = [](const char* a, const char* b) {
    return gram_entry_expand(TracialWord::parse(a), TracialWord::parse(b)).terms.begin()->first.to_string();
  };
  EXPECT_EQ(key("x1x2", "x1x2"), "tr(x1x2)");
  EXPECT_EQ(key("1", "tr(x1)"), "tr(x1)");
  EXPECT_EQ(key("x1", "x2"), "tr(x1x2)");
  EXPECT_EQ(key("1", "1"), "1");
}

TEST(GramEntryTest, SwappedArgumentsGiveConjugateValues) {
  std::mt19937_64 rng(5);
  const auto words = tracial_word_vector(3, 2, false);
  auto x = random_projections(3, 3, rng);
  for (size_t i = 0; i < words.size(); ++i)
    for (size_t j = 0; j < words.size(); ++j) {
      Complex a = eval_tracial(gram_entry_expand(words[i], words[j]), x);
      Complex b = eval_tracial(gram_entry_expand(words[j], words[i]), x);
      EXPECT_LT(std::abs(a - std::conj(b)), 1e-10);
      // The key evaluates to the normalized trace of wi(X)^dagger wj(X).
      Eigen::MatrixXcd m = tracial_word_matrix(words[i], x).adjoint() * tracial_word_matrix(words[j], x);
      EXPECT_LT(std::abs(a - m.trace() / 3.0), 1e-10);
    }
}

TEST(EvalTracialTest, TensorContraction) {
  std::mt19937_64 rng(6);
  for (int n = 2; n <= 4; ++n)
    for (int d = 1; d <= 3; ++d) {
      auto x = random_projections(n, d, rng);
      Eigen::MatrixXcd prod = x[0];
      for (int i = 1; i < n; ++i) prod = kron(prod, x[i]);
      for (const auto& sigma : all_permutations(n)) {
        Complex lhs = (eta(d, sigma).matrix * prod).trace();
        EXPECT_LT(std::abs(lhs - trace_polynomial(sigma.inverse(), x)), 1e-9) << n << " " << d;
      }
    }
}

TEST(EvalTracialTest, IdentityTuple) {
  const int n = 3;
  std::vector<Eigen::MatrixXcd> x(n, Eigen::MatrixXcd::Identity(n, n));
  for (const auto& sigma : all_permutations(n)) {
    Complex v = eval_tracial(t_sigma(sigma), x);
    EXPECT_NEAR(v.real(), std::pow(n, sigma.num_cycles()), 1e-12);
    EXPECT_NEAR(trace_polynomial(sigma, x).real(), std::pow(n, sigma.num_cycles()), 1e-12);
  }
}

TEST(EvalTracialTest, MatchesTracePolynomialOnDimensionN) {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n) {
    ExactElement w = testing::random_exact_element(n, rng);
    const auto tw = t_element(w);
    for (int t = 0; t < 10; ++t) {
      auto x = random_projections(n, n, rng);
      EXPECT_LT(std::abs(trace_polynomial(w, x) - eval_tracial(tw, x)), 1e-9);
    }
  }
}

TEST(EvalTracialTest, RejectsNonProjections) {
  std::vector<Eigen::MatrixXcd> x(2, 2.0 * Eigen::MatrixXcd::Identity(2, 2));
  EXPECT_THROW(eval_tracial(t_sigma(Permutation::identity(2)), x), std::invalid_argument);
}

TEST(TpopSizesTest, PublishedPairs) {
  struct Row {
    int n, level;
    long block, eqs;
  };
  for (const auto& r : std::vector<Row>{{3, 2, 31, 86},
                                        {3, 3, 109, 443},
                                        {4, 2, 53, 246},
                                        {4, 3, 253, 2432},
                                        {5, 3, 491, 9722},
                                        {5, 4, 2681, 157492}}) {
    auto s = tpop_sizes(r.n, r.level);
    EXPECT_EQ(s.block_size, r.block) << r.n << " " << r.level;
    EXPECT_EQ(s.equations, r.eqs) << r.n << " " << r.level;
  }
}

TEST(TpopSizesTest, WordLowerBound) {
  EXPECT_EQ(tpop_word_lower_bound(4, 2), 16);
  for (int n = 3; n <= 5; ++n)
    for (int level = 1; level <= 3; ++level)
      EXPECT_LE(tpop_word_lower_bound(n, level), tpop_sizes(n, level).block_size);
}

TEST(TpopSizesTest, ComplexAssemblyMatchesAssembledCount) {
  std::mt19937_64 rng(8);
  auto r = WernerStateParam::from_element(testing::random_exact_state(3, rng, false));
  auto inst = assemble_tpop(r, 2);
  EXPECT_EQ(static_cast<long>(inst.problem.constraints.size()), tpop_sizes(3, 2).assembled_equations);
  EXPECT_EQ(inst.problem.blocks[0].size, 31);
}

TEST(AssembleTpopTest, RejectsLowLevel) {
  EXPECT_THROW(assemble_tpop(WernerStateParam::from_element(central_idempotent(Partition({4}))), 1),
               std::invalid_argument);
}

WernerStateParam four_qubit_state() {
  return WernerStateParam::from_element(
      read_element_file(std::string(WERNER_FIXTURE_DIR) + "/eq4qb.state.json").element);
}

// Checks the SOS identity at random projection tuples of several dimensions
// and the witness inequality at rank-one tuples on C^n.
void check_identity_pointwise(const TpopInstance& inst, const SdpSolution& s, std::mt19937_64& rng) {
  const auto w = witness_from_free(inst.problem, s.free);
  const auto tw = t_element(w);
  const int n = inst.problem.n;
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_projections(n, 1 + trial % 4, rng);
    Complex lhs = eval_tracial(tw, x) + s.epsilon;
    Complex rhs = tpop_gram_form(inst, s.gram[0], x);
    EXPECT_LT(std::abs(lhs - rhs), 1e-6);
    EXPECT_GE(lhs.real(), -1e-6);
  }
  NumericElement shifted = w;
  shifted.add(Permutation::identity(n), Complex(s.epsilon));
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::MatrixXcd> x;
    for (int i = 0; i < n; ++i) x.push_back(random_projection(n, 1, rng));
    EXPECT_GE(trace_polynomial(shifted, x).real(), -1e-6);
  }
}

TEST(SolveTpopTest, FourQubitExampleLevelTwo) {
  std::mt19937_64 rng(9);
  auto r = four_qubit_state();
  auto inst = assemble_tpop(r, 2);
  EXPECT_FALSE(inst.problem.hermitian);
  SdpSolution s = solve(inst.problem);
  ASSERT_TRUE(s.usable()) << s.message;
  EXPECT_NEAR(s.epsilon, 0.8537, 5e-3);
  EXPECT_LT(s.primal_residual, 1e-6);
  EXPECT_GE(s.min_eigenvalue, -1e-7);
  check_identity_pointwise(inst, s, rng);
  auto w = witness_from_free(inst.problem, s.free);
  EXPECT_NEAR((r.r.to_numeric() * w).tau().real(), -1.0, 1e-6);
}

TEST(SolveTpopTest, RealAndComplexModesAgree) {
  auto r = four_qubit_state();
  TpopOptions complex_mode;
  complex_mode.real_mode = false;
  auto inst = assemble_tpop(r, 2, complex_mode);
  EXPECT_TRUE(inst.problem.hermitian);
  EXPECT_EQ(static_cast<long>(inst.problem.constraints.size()), 246);
  SdpSolution a = solve(inst.problem);
  SdpSolution b = solve(assemble_tpop(r, 2).problem);
  ASSERT_TRUE(a.usable()) << a.message;
  ASSERT_TRUE(b.usable()) << b.message;
  EXPECT_NEAR(a.epsilon, b.epsilon, 1e-6);
}

TEST(SolveTpopTest, SymmetrizerIsNotDetected) {
  std::mt19937_64 rng(10);
  auto inst = assemble_tpop(WernerStateParam::from_element(central_idempotent(Partition({3}))), 2);
  SdpSolution s = solve(inst.problem);
  ASSERT_TRUE(s.usable()) << s.message;
  EXPECT_GE(s.epsilon, 1 - 1e-6);
  check_identity_pointwise(inst, s, rng);
}

TEST(SolveTpopTest, ComplexStateIdentity) {
  std::mt19937_64 rng(11);
  auto r = WernerStateParam::from_element(testing::random_exact_state(3, rng, false));
  auto inst = assemble_tpop(r, 2);
  SdpSolution s = solve(inst.problem);
  ASSERT_TRUE(s.usable()) << s.message;
  check_identity_pointwise(inst, s, rng);
}

}  // namespace
}  // namespace werner
