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

#include "test_util.hpp"
#include "werner/certify.hpp"
#include "werner/gmf_pop.hpp"
#include "werner/sdp_solver.hpp"
#include "werner/trace_tpop.hpp"

namespace werner {
namespace {

RationalMatrix rmat(std::initializer_list<std::initializer_list<long>> rows) {
  RationalMatrix m(rows.size(), rows.begin()->size());
  size_t i = 0;
  for (const auto& r : rows) {
    size_t j = 0;
    for (long v : r) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

TEST(ExactPsdTest, SmallCases) {
  EXPECT_TRUE(exact_psd(RationalMatrix::identity(4)));
  EXPECT_FALSE(exact_psd(rmat({{1, 2}, {2, 1}})));
  EXPECT_TRUE(exact_psd(rmat({{1, 1}, {1, 1}})));
  EXPECT_FALSE(exact_psd(rmat({{0, 1}, {1, 1}})));
  EXPECT_TRUE(exact_psd(rmat({{0, 0, 0}, {0, 2, 1}, {0, 1, 1}})));
  EXPECT_FALSE(exact_psd(rmat({{1, 0, 0}, {0, 0, 0}, {0, 0, -1}})));
  EXPECT_THROW(exact_psd(rmat({{1, 2}, {3, 1}})), std::invalid_argument);
}

TEST(ExactPsdTest, ComplexHermitian) {
  QComplexMatrix m(2, 2);
  m(0, 0) = QComplex(1);
  m(1, 1) = QComplex(1);
  m(0, 1) = QComplex(0, 1);
  m(1, 0) = QComplex(0, -1);
  EXPECT_TRUE(exact_psd(m));  // eigenvalues 0 and 2
  m(1, 1) = QComplex(make_rational(99, 100));
  EXPECT_FALSE(exact_psd(m));
}

// Oracle: a a^dagger - c I with rational a has eigenvalues known in floating
// point; shifts well away from any eigenvalue give a decisive answer.
TEST(ExactPsdTest, AgreesWithEigenvaluesOnRandomMatrices) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 2 + trial % 6;
    QComplexMatrix a(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) a(i, j) = QComplex(make_rational(num(rng), den(rng)), make_rational(num(rng), den(rng)));
    QComplexMatrix g(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k) g(i, j) += a(i, k) * conj(a(j, k));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(g));
    const double lo = es.eigenvalues()[0];
    for (double shift : {lo - 0.5, lo * 0.5, lo + 0.5}) {
      QComplexMatrix h = g;
      Rational s = exact_rational(shift);
      for (size_t i = 0; i < n; ++i) h(i, i) -= QComplex(s);
      EXPECT_EQ(exact_psd(h), shift <= lo) << trial << " " << shift;
    }
  }
}

TEST(ProjectAffineTest, FeasiblePointUnchanged) {
  RationalMatrix g = RationalMatrix::identity(3);
  auto out = project_affine(g, {{RationalMatrix::identity(3), Rational(3)}});
  EXPECT_EQ(out, g);
}

TEST(ProjectAffineTest, TraceConstraintShiftsDiagonalUniformly) {
  const size_t n = 4;
  RationalMatrix g(n, n);
  for (size_t i = 0; i < n; ++i) g(i, i) = make_rational(1, 4);
  g(0, 0) += make_rational(1, 1000);
  g(1, 2) = g(2, 1) = make_rational(1, 7);
  auto out = project_affine(g, {{RationalMatrix::identity(n), Rational(1)}});
  for (size_t i = 0; i < n; ++i) EXPECT_EQ(out(i, i), g(i, i) - make_rational(1, 4000));
  EXPECT_EQ(out(1, 2), g(1, 2));
}

TEST(ProjectAffineTest, RestoresFeasibilityNearby) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> coef(-5, 5);
  std::normal_distribution<double> noise(0, 1e-6);
  const int nv = 30, nr = 12;
  std::vector<Rational> x0(nv);
  for (auto& v : x0) v = make_rational(coef(rng), 3);
  std::vector<AffineRow> rows(nr);
  for (auto& r : rows) {
    for (int v = 0; v < nv; ++v)
      if (int c = coef(rng); c != 0 && v % 3 == static_cast<int>(&r - rows.data()) % 3) r.coeffs.push_back({v, Rational(c)});
    for (const auto& [v, c] : r.coeffs) r.rhs += c * x0[v];
  }
  std::vector<Rational> x = x0;
  for (auto& v : x) v += exact_rational(noise(rng));
  auto y = project_affine(x, rows);
  double dist = 0;
  for (const auto& r : rows) {
    Rational s = 0;
    for (const auto& [v, c] : r.coeffs) s += c * y[v];
    EXPECT_EQ(s, r.rhs);
  }
  for (int v = 0; v < nv; ++v) dist += std::pow(Rational(y[v] - x0[v]).get_d(), 2);
  EXPECT_LE(std::sqrt(dist), 1e-5);
}

TEST(ProjectAffineTest, InconsistentSystemThrows) {
  std::vector<AffineRow> rows(2);
  rows[0].coeffs = {{0, Rational(1)}};
  rows[0].rhs = 1;
  rows[1].coeffs = {{0, Rational(2)}};
  rows[1].rhs = 3;
  EXPECT_THROW(project_affine(std::vector<Rational>(1), rows), std::runtime_error);
}

TEST(RationalizeTest, IdentityToyProblem) {
  SdpProblem p;
  p.n = 1;
  p.blocks.push_back({2, {"a", "b"}});
  auto entry = [&](int i, int j, long rhs) {
    LinearConstraint c;
    c.gram.push_back({0, i, j, QComplex(1)});
    c.rhs = QComplex(rhs);
    p.constraints.push_back(c);
  };
  entry(0, 0, 1);
  entry(1, 1, 1);
  entry(0, 1, 0);
  SdpSolution s;
  s.status = SolveStatus::kOptimal;
  s.gram = {Eigen::MatrixXcd::Identity(2, 2)};
  s.gram[0](0, 1) = s.gram[0](1, 0) = 3e-13;
  s.gram[0](1, 1) += 2e-11;
  for (Rounding mode : {Rounding::kCommonDenominator, Rounding::kContinuedFraction}) {
    auto c = rationalize(s, p, Rational(0), kDefaultDenomBound, mode);
    EXPECT_EQ(c.block_real(0), RationalMatrix::identity(2));
  }
}

TEST(RationalizeTest, RoundingModes) {
  mpz_class bound(1000);
  EXPECT_EQ(round_rational(0.3333, bound, Rounding::kCommonDenominator), make_rational(333, 1000));
  EXPECT_EQ(round_rational(0.3333, bound, Rounding::kContinuedFraction), make_rational(1, 3));
  EXPECT_EQ(round_rational(-0.0004, bound, Rounding::kCommonDenominator), Rational(0));
}

WernerStateParam four_qubit_state() {
  return WernerStateParam::from_element(
      read_element_file(std::string(WERNER_FIXTURE_DIR) + "/eq4qb.state.json").element);
}

WitnessCertificate certify_tpop(const WernerStateParam& r, int level, const Rational& theta) {
  TpopOptions opt;
  opt.real_mode = false;
  auto inst = assemble_tpop(r, level, opt);
  SdpSolution s = solve_feasibility(inst.problem, theta);
  if (!s.usable()) throw std::runtime_error("feasibility failed: " + s.message);
  return rationalize(s, inst.problem, theta);
}

class FourQubitCertificate : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    state_ = new WernerStateParam(four_qubit_state());
    cert_ = new WitnessCertificate(certify_tpop(*state_, 2, make_rational(9, 10)));
  }
  static void TearDownTestSuite() {
    delete cert_;
    delete state_;
  }
  static WernerStateParam* state_;
  static WitnessCertificate* cert_;
};
WernerStateParam* FourQubitCertificate::state_ = nullptr;
WitnessCertificate* FourQubitCertificate::cert_ = nullptr;

TEST_F(FourQubitCertificate, AllChecksPass) {
  auto rep = verify_certificate(*cert_, *state_);
  EXPECT_TRUE(rep.ok()) << rep.to_string();
  EXPECT_EQ((state_->r * cert_->witness()).tau(), QComplex(make_rational(-1, 10)));
}

TEST_F(FourQubitCertificate, TamperedGramFailsIdentity) {
  WitnessCertificate bad = *cert_;
  ASSERT_FALSE(bad.gram.empty());
  bad.gram.front().value += QComplex(1);
  auto rep = verify_certificate(bad, *state_);
  EXPECT_FALSE(rep.ok());
  bool identity_failed = false;
  for (const auto& c : rep.checks)
    if (c.name.find("identity") != std::string::npos) identity_failed = !c.passed;
  EXPECT_TRUE(identity_failed);
}

TEST_F(FourQubitCertificate, JsonRoundTrip) {
  const Json doc = certificate_to_json(*cert_);
  const WitnessCertificate back = certificate_from_json(Json::parse(doc.dump()));
  EXPECT_EQ(certificate_to_json(back).dump(), doc.dump());
  EXPECT_EQ(verify_certificate(back, *state_).to_string(), verify_certificate(*cert_, *state_).to_string());
}

// t_w(X) + theta = tr(W(X)^dagger G W(X)) >= 0 at projections.
TEST_F(FourQubitCertificate, NonnegativeAtRandomProjections) {
  std::mt19937_64 rng(23);
  const auto tw = t_element(cert_->w);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = random_projections(4, 1 + trial % 4, rng);
    EXPECT_GE((eval_tracial(tw, x) + cert_->theta.get_d()).real(), -1e-9);
  }
}

// Exact version at rational rank-one projections v v^T / (v^T v) on Q^2.
TEST_F(FourQubitCertificate, NonnegativeExactlyAtRationalProjections) {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> coord(-6, 6);
  const int n = 4, dim = 2;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RationalMatrix> x;
    for (int i = 0; i < n; ++i) {
      long a = coord(rng), b = coord(rng);
      if (a == 0 && b == 0) a = 1;
      RationalMatrix pm(dim, dim);
      Rational norm(a * a + b * b);
      pm(0, 0) = Rational(a * a) / norm;
      pm(0, 1) = pm(1, 0) = Rational(a * b) / norm;
      pm(1, 1) = Rational(b * b) / norm;
      x.push_back(pm);
    }
    auto mul = [&](const RationalMatrix& p, const RationalMatrix& q) {
      RationalMatrix out(dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
          for (int k = 0; k < dim; ++k) out(i, j) += p(i, k) * q(k, j);
      return out;
    };
    // Normalized traces: t_sigma(X) = n^{Ncyc} prod over cycles of tr(.)/dim.
    Rational value = cert_->theta;
    for (const auto& [sigma, c] : cert_->w.terms()) {
      Rational term = c.re;
      for (const auto& cyc : sigma.cycles()) {
        RationalMatrix prod = RationalMatrix::identity(dim);
        for (int l : cyc) prod = mul(prod, x[l]);
        term *= Rational(n) * (prod(0, 0) + prod(1, 1)) / Rational(dim);
      }
      value += term;
    }
    EXPECT_GE(sgn(value), 0) << trial;
  }
}

TEST(CertifyTest, PopCertificateVerifies) {
  auto r = four_qubit_state();
  auto inst = assemble_pop(r, 2);
  const Rational theta = make_rational(9, 10);
  SdpSolution s = solve_feasibility(inst.problem, theta);
  ASSERT_TRUE(s.usable()) << s.message;
  auto c = rationalize(s, inst.problem, theta);
  auto rep = verify_certificate(c, r);
  EXPECT_TRUE(rep.ok()) << rep.to_string();
}

TEST(CertifyTest, ShiftBelowOptimumIsInfeasible) {
  TpopOptions opt;
  opt.real_mode = false;
  auto inst = assemble_tpop(four_qubit_state(), 2, opt);
  SdpSolution s = solve_feasibility(inst.problem, Rational(0));
  EXPECT_EQ(s.status, SolveStatus::kInfeasible);
}

TEST(CertifyTest, SeparableStateHasNoCertificateAtOneHalf) {
  auto inst = assemble_tpop(WernerStateParam::from_element(central_idempotent(Partition({3}))), 2);
  SdpSolution s = solve_feasibility(inst.problem, make_rational(1, 2));
  EXPECT_EQ(s.status, SolveStatus::kInfeasible);
}

}  // namespace
}  // namespace werner
