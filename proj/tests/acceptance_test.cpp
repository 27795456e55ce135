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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "test_util.hpp"
#include "werner/werner.hpp"

namespace werner {
namespace {

constexpr double kFourQubitTheta = 0.8537;
constexpr double kFourQubitThetaTol = 5e-3;
constexpr double kFourQubitSeconds = 300;
constexpr double kPptTol = 1e-9;
constexpr double kCertifySeconds = 1800;
constexpr double kIdentityTol = 1e-9;
constexpr double kSoundnessTol = 1e-6;
constexpr double kSingletTol = 1e-6;
constexpr double kMonotoneTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fixture(const std::string& name) { return std::string(WERNER_FIXTURE_DIR) + "/" + name; }

WernerStateParam four_qubit() { return WernerStateParam::from_element(read_element_file(fixture("eq4qb.state.json")).element); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Optimum of either hierarchy; -infinity when the floor is unbounded.
double optimum(Hierarchy h, const WernerStateParam& r, int level, std::optional<bool> real = std::nullopt,
               double tol = SolverOptions{}.tolerance) {
  SdpProblem p;
  if (h == Hierarchy::kPop) {
    PopOptions opt;
    opt.real_mode = real;
    p = assemble_pop(r, level, opt).problem;
  } else {
    TpopOptions opt;
    opt.real_mode = real;
    p = assemble_tpop(r, level, opt).problem;
  }
  SolverOptions so;
  so.tolerance = tol;
  const SdpSolution s = solve(p, so);
  if (!s.usable()) throw std::runtime_error("solver failed: " + to_string(s.status) + " " + s.message);
  if (s.status == SolveStatus::kUnbounded) return -std::numeric_limits<double>::infinity();
  return s.epsilon;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double theta = optimum(Hierarchy::kTpop, four_qubit(), 2, true);
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "theta_2 = " << theta << " (expected " << kFourQubitTheta << " +- " << kFourQubitThetaTol << "), " << secs
     << " s";
  return {std::abs(theta - kFourQubitTheta) <= kFourQubitThetaTol && secs < kFourQubitSeconds, os.str()};
}

Outcome criterion2() {
  const TensorOperator rho = mu(2, four_qubit().r);
  const auto parts = bipartitions(4);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& s : parts) worst = std::min(worst, ppt_min_eigenvalue(rho, s));
  std::ostringstream os;
  os << parts.size() << " bipartitions, smallest eigenvalue " << worst;
  return {parts.size() == 7 && worst >= -kPptTol, os.str()};
}

Outcome criterion3() {
  const ExactElement w = read_element_file(fixture("eq4qb.witness.json")).element;
  const QComplex value = (four_qubit().r * w).tau();
  const QComplex expected(make_rational(-1, 10));
  std::ostringstream os;
  os << "tau(r w~) = " << to_string(value.re) << " ~ " << value.re.get_d() << ", expected -1/10";
  return {value == expected, os.str()};
}

Outcome criterion4() {
  const auto t0 = std::chrono::steady_clock::now();
  const WernerStateParam r = four_qubit();
  TpopOptions opt;
  opt.real_mode = false;
  const SdpProblem p = assemble_tpop(r, 2, opt).problem;
  const Rational theta = make_rational(9, 10);
  const SdpSolution s = solve_feasibility(p, theta);
  if (!s.usable()) return {false, "feasibility solve at 9/10: " + to_string(s.status) + " " + s.message};
  const WitnessCertificate c = rationalize(s, p, theta);
  const VerificationReport rep = verify_certificate(c, r);
  const WitnessCertificate back = certificate_from_json(certificate_to_json(c));
  const bool round_trip = verify_certificate(back, r).to_string() == rep.to_string();
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << rep.checks.size() << " checks " << (rep.ok() ? "passed" : "with failures") << ", tau(r w~) = "
     << to_string((r.r * c.witness()).tau().re) << ", round trip "
     << (round_trip ? "identical" : "differs") << ", " << secs << " s";
  if (!rep.ok()) os << "\n" << rep.to_string();
  return {rep.ok() && round_trip && secs < kCertifySeconds, os.str()};
}

Outcome criterion5() {
  const Json table = read_json_file(fixture("table1.json"));
  int matched = 0, total = 0;
  std::ostringstream bad;
  for (const auto& row : table.at("rows")) {
    const int n = row.at("n"), step = row.at("step");
    const int level = min_level(n) + step - 1;
    const PopSizes ps = pop_sizes(n, level);
    const TpopSizes ts = tpop_sizes(n, level);
    const long pop_block = row.at("pop")[0], pop_eqs = row.at("pop")[1];
    const long tpop_block = row.at("tpop")[0], tpop_eqs = row.at("tpop")[1];
    total += 2;
    if (ps.block_size == pop_block && ps.equations == pop_eqs) {
      ++matched;
    } else {
      bad << " POP n=" << n << " step " << step << ": (" << ps.block_size << ", " << ps.equations << ")";
    }
    if (ts.block_size == tpop_block && ts.equations == tpop_eqs) {
      ++matched;
    } else {
      bad << " TPOP n=" << n << " step " << step << ": (" << ts.block_size << ", " << ts.equations << ")";
    }
  }
  std::ostringstream os;
  os << matched << "/" << total << " pairs match" << bad.str();
  return {matched == total && total == 12, os.str()};
}

Outcome criterion6() {
  ExactElement s(4);
  s.add(Permutation::identity(4), QComplex(41));
  s.add(Permutation::parse_cycles(4, "(12)"), QComplex(5));
  s.add(Permutation::parse_cycles(4, "(34)"), QComplex(5));
  // (1234) read with left-to-right products is (1432) in our convention.
  s.add(Permutation::parse_cycles(4, "(1432)"), QComplex(20));
  const WernerStateParam p = eta_state_to_mu_param(s, 2);
  const ExactElement expected = four_qubit().r;
  int equal = 0;
  for (const auto& sigma : all_permutations(4)) equal += p.r.coeff(sigma) == expected.coeff(sigma);
  std::ostringstream os;
  os << equal << "/24 coefficients equal";
  return {equal == 24, os.str()};
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

RationalMatrix exact_eta(int d, const ExactElement& a) {
  const long D = tensor_dim(d, a.n());
  RationalMatrix m(D, D);
  for (const auto& [sigma, c] : a.terms()) {
    auto map = detail::eta_index_map(d, sigma);
    for (long i = 0; i < D; ++i) m(map[i], i) += c.re;
  }
  return m;
}

Outcome criterion7() {
  std::mt19937_64 rng(7);
  std::vector<std::string> failed;
  double worst = 0;
  auto note = [&](bool ok, const std::string& name) {
    if (!ok && std::find(failed.begin(), failed.end(), name) == failed.end()) failed.push_back(name);
  };

  // tr(mu_d(a) eta_d(b)) = tau(ab) for a in J_d.
  for (int n = 2; n <= 5; ++n)
    for (int d = 2; d <= 3; ++d) {
      const int trials = n == 5 ? 20 : 100;
      const NumericElement jd = jd_idempotent_sum(d, n).to_numeric();
      for (int t = 0; t < trials; ++t) {
        NumericElement a = jd * testing::random_numeric_element(n, rng);
        NumericElement b = testing::random_numeric_element(n, rng);
        const Complex lhs = (mu(d, a).matrix * eta(d, b).matrix).trace();
        const Complex rhs = (a * b).tau();
        const double err = std::abs(lhs - rhs) / (1 + std::abs(rhs));
        worst = std::max(worst, err);
        note(err < kIdentityTol, "pairing");
      }
    }

  // tr eta_d(sigma) = d^cycles, exactly.
  for (int n = 1; n <= 5; ++n)
    for (int d = 1; d <= 3; ++d)
      for (const auto& sigma : all_permutations(n)) {
        RationalMatrix m = exact_eta(d, ExactElement::basis(sigma));
        Rational tr = 0;
        for (size_t i = 0; i < m.rows(); ++i) tr += m(i, i);
        note(tr == Rational(static_cast<long>(std::pow(d, sigma.num_cycles()))), "permutation trace");
      }

  // tr(eta_d(sigma) X_1 (x) ... (x) X_n) = T_{sigma^-1}(X).
  for (int n = 2; n <= 4; ++n)
    for (int d = 1; d <= 3; ++d) {
      auto x = random_projections(n, d, rng);
      Eigen::MatrixXcd prod = x[0];
      for (int i = 1; i < n; ++i) prod = kron(prod, x[i]);
      for (const auto& sigma : all_permutations(n)) {
        const double err = std::abs((eta(d, sigma).matrix * prod).trace() - trace_polynomial(sigma.inverse(), x));
        worst = std::max(worst, err);
        note(err < kIdentityTol, "trace polynomial as tensor contraction");
      }
    }

  // f_w at the Gram matrix of v equals <v|eta_d(w)|v> for v = v_1 (x) ... (x) v_n.
  for (int n = 2; n <= 5; ++n)
    for (int d = 1; d <= 3; ++d) {
      const NumericElement w = testing::random_numeric_element(n, rng);
      const auto f = gmf(w);
      const Eigen::MatrixXcd v = EllipticGram::random_unit_vectors(n, d, rng);
      Eigen::VectorXcd psi = v.col(0);
      for (int i = 1; i < n; ++i) psi = kron(psi, v.col(i));
      const double err = std::abs(gmf_eval(f, EllipticGram::from_vectors(v)) - psi.dot(eta(d, w).matrix * psi));
      worst = std::max(worst, err);
      note(err < kIdentityTol, "matrix function as tensor expectation");
    }

  // Trace polynomial equals the tracial evaluation on dimension n.
  for (int n = 2; n <= 5; ++n) {
    const ExactElement w = testing::random_exact_element(n, rng);
    const auto tw = t_element(w);
    for (int t = 0; t < 5; ++t) {
      auto x = random_projections(n, n, rng);
      const double err = std::abs(trace_polynomial(w, x) - eval_tracial(tw, x));
      worst = std::max(worst, err);
      note(err < kIdentityTol, "tracial evaluation");
    }
  }

  // omega_lambda omega_mu = delta omega_lambda, self-adjoint; sum is id;
  // eta_d(omega_lambda) = 0 exactly when the height exceeds d.
  for (int n = 1; n <= 5; ++n) {
    ExactElement sum(n);
    const auto parts = partitions(n);
    for (const auto& lam : parts) {
      const ExactElement w = central_idempotent(lam);
      sum += w;
      note(w.dagger() == w, "idempotent algebra");
      for (const auto& other : parts) {
        const ExactElement prod = w * central_idempotent(other);
        note(lam == other ? prod == w : prod.is_zero(), "idempotent algebra");
      }
    }
    note(sum == ExactElement::identity(n), "resolution of identity");
    if (n > 4) continue;
    for (int d = 1; d <= 3; ++d)
      for (const auto& lam : parts) {
        RationalMatrix p = exact_eta(d, central_idempotent(lam));
        bool zero = true;
        for (size_t i = 0; i < p.rows() && zero; ++i)
          for (size_t j = 0; j < p.cols() && zero; ++j) zero = sgn(p(i, j)) == 0;
        note(zero == (lam.height() > d), "kernel vanishing");
      }
  }

  std::ostringstream os;
  os << "largest floating error " << worst;
  for (const auto& f : failed) os << "; failed: " << f;
  return {failed.empty(), os.str()};
}

Outcome criterion8() {
  std::ostringstream os;
  bool ok = true;
  double worst = std::numeric_limits<double>::infinity();
  for (int n = 3; n <= 4; ++n) {
    const WernerStateParam r = WernerStateParam::from_element(central_idempotent(Partition({n})));
    for (int step = 1; step <= 2; ++step) {
      const int level = min_level(n) + step - 1;
      for (Hierarchy h : {Hierarchy::kPop, Hierarchy::kTpop}) {
        const double v = optimum(h, r, level);
        worst = std::min(worst, v);
        if (v < 1 - kSoundnessTol) {
          ok = false;
          os << to_string(h) << " n=" << n << " level " << level << " gives " << v << "; ";
        }
      }
    }
  }
  ExactElement singlet(2);
  singlet.add(Permutation::identity(2), QComplex(make_rational(1, 2)));
  singlet.add(Permutation::parse_cycles(2, "(12)"), QComplex(make_rational(-1, 2)));
  const double s = optimum(Hierarchy::kPop, WernerStateParam::from_element(singlet), 1);
  os << "symmetrizers: smallest optimum " << worst << "; singlet POP level 1: " << s;
  return {ok && s <= kSingletTol, os.str()};
}

Outcome criterion9() {
  std::mt19937_64 rng(99);
  std::vector<std::pair<std::string, WernerStateParam>> states = {{"4qb", four_qubit()}};
  for (int k = 0; k < 2; ++k)
    states.emplace_back("random n=3 #" + std::to_string(k + 1),
                        WernerStateParam::from_element(testing::random_exact_state(3, rng, true)));
  std::ostringstream os;
  bool ok = true;
  for (const auto& [name, r] : states) {
    const int first = min_level(r.n());
    for (Hierarchy h : {Hierarchy::kPop, Hierarchy::kTpop}) {
      const double a = optimum(h, r, first, std::nullopt, kMonotoneTol);
      const double b = optimum(h, r, first + 1, std::nullopt, kMonotoneTol);
      const bool mono = b <= a + kMonotoneTol || (std::isinf(a) && std::isinf(b));
      ok = ok && mono;
      os << name << " " << to_string(h) << " " << a << " -> " << b << (mono ? "" : " (increases)") << "; ";
    }
  }
  return {ok, os.str()};
}

}  // namespace
}  // namespace werner

int main() {
  using werner::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"four-qubit TPOP optimum", werner::criterion1},
      {"four-qubit state is PPT", werner::criterion2},
      {"printed witness pairing", werner::criterion3},
      {"four-qubit exact certificate", werner::criterion4},
      {"published problem sizes", werner::criterion5},
      {"four-qubit parametrization", werner::criterion6},
      {"representation identities", werner::criterion7},
      {"soundness on separable states", werner::criterion8},
      {"monotonicity in the level", werner::criterion9},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
