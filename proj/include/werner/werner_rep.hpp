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

// The tensor representation eta_d of CS_n on (C^d)^{ox n}, Weingarten
// calculus and the mu_d parametrization of Werner states.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "werner/characters.hpp"
#include "werner/group_algebra.hpp"
#include "werner/permutation.hpp"
#include "werner/rational.hpp"

namespace werner {

/// Largest d^n for which dense tensor operators are built.
inline constexpr long kMaxTensorDim = 4096;

inline long tensor_dim(int d, int n) {
  if (d < 1) throw std::invalid_argument("local dimension must be positive");
  check_arity(n);
  long D = 1;
  for (int k = 0; k < n; ++k) {
    D *= d;
    if (D > kMaxTensorDim) {
      throw std::out_of_range("d^n = " + std::to_string(d) + "^" + std::to_string(n) +
                              " exceeds the dense bound " + std::to_string(kMaxTensorDim));
    }
  }
  return D;
}

/// A dense operator on (C^d)^{ox n}. Basis index sum_k i_k d^{n-1-k}, so the
/// first tensor factor is the most significant digit.
struct TensorOperator {
  int d = 0;
  int n = 0;
  Eigen::MatrixXcd matrix;

  TensorOperator() = default;
  TensorOperator(int d_, int n_, Eigen::MatrixXcd m) : d(d_), n(n_), matrix(std::move(m)) {
    long D = tensor_dim(d, n);
    if (matrix.rows() != D || matrix.cols() != D) {
      throw std::invalid_argument("matrix shape does not match d^n = " + std::to_string(D));
    }
  }

  static TensorOperator identity(int d, int n) {
    long D = tensor_dim(d, n);
    return TensorOperator(d, n, Eigen::MatrixXcd::Identity(D, D));
  }

  long dim() const { return matrix.rows(); }
  Complex trace() const { return matrix.trace(); }
  bool is_hermitian(double tol = 1e-10) const {
    return (matrix - matrix.adjoint()).norm() <= tol * std::max(1.0, matrix.norm());
  }
};

namespace detail {

inline std::vector<int> digits(long index, int d, int n) {
  std::vector<int> out(n);
  for (int k = n - 1; k >= 0; --k) {
    out[k] = static_cast<int>(index % d);
    index /= d;
  }
  return out;
}

inline long from_digits(const std::vector<int>& dig, int d) {
  long idx = 0;
  for (int x : dig) idx = idx * d + x;
  return idx;
}

// eta_d(sigma) maps basis index i to the returned index: factor k moves to
// position sigma(k).
inline std::vector<long> eta_index_map(int d, const Permutation& sigma) {
  const int n = sigma.size();
  const long D = tensor_dim(d, n);
  std::vector<long> map(D);
  std::vector<int> out(n);
  for (long i = 0; i < D; ++i) {
    auto in = digits(i, d, n);
    for (int k = 0; k < n; ++k) out[sigma(k)] = in[k];
    map[i] = from_digits(out, d);
  }
  return map;
}

template <typename S>
GroupAlgebraElement<S> convert_element(const ExactElement& a) {
  if constexpr (std::is_same_v<S, QComplex>) {
    return a;
  } else {
    return a.to_numeric();
  }
}

// Applies U to every tensor factor of the columns of m, i.e. (U^{ox n}) m.
inline Eigen::MatrixXcd apply_local_left(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& m, int d,
                                         int n) {
  Eigen::MatrixXcd out = m;
  const long D = m.rows();
  Eigen::VectorXcd v(d);
  for (int k = 0; k < n; ++k) {
    long stride = 1;
    for (int j = k + 1; j < n; ++j) stride *= d;
    for (long base = 0; base < D; ++base) {
      if ((base / stride) % d != 0) continue;
      for (long c = 0; c < m.cols(); ++c) {
        for (int t = 0; t < d; ++t) v(t) = out(base + t * stride, c);
        Eigen::VectorXcd w = u * v;
        for (int t = 0; t < d; ++t) out(base + t * stride, c) = w(t);
      }
    }
  }
  return out;
}

// sum_k X acting on tensor factor k, applied to the columns of m.
inline Eigen::MatrixXcd apply_local_sum_left(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& m, int d,
                                             int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
  const long D = m.rows();
  Eigen::VectorXcd v(d);
  for (int k = 0; k < n; ++k) {
    long stride = 1;
    for (int j = k + 1; j < n; ++j) stride *= d;
    for (long base = 0; base < D; ++base) {
      if ((base / stride) % d != 0) continue;
      for (long c = 0; c < m.cols(); ++c) {
        for (int t = 0; t < d; ++t) v(t) = m(base + t * stride, c);
        Eigen::VectorXcd w = x * v;
        for (int t = 0; t < d; ++t) out(base + t * stride, c) += w(t);
      }
    }
  }
  return out;
}

}  // namespace detail

/// eta_d(a) = sum_sigma a_sigma eta_d(sigma).
template <typename S>
TensorOperator eta(int d, const GroupAlgebraElement<S>& a) {
  const int n = a.n();
  const long D = tensor_dim(d, n);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(D, D);
  for (const auto& [sigma, c] : a.terms()) {
    const Complex v = ScalarTraits<S>::to_complex(c);
    const auto map = detail::eta_index_map(d, sigma);
    for (long i = 0; i < D; ++i) m(map[i], i) += v;
  }
  return TensorOperator(d, n, std::move(m));
}

inline TensorOperator eta(int d, const Permutation& sigma) { return eta(d, ExactElement::basis(sigma)); }

/// Sum of omega_lambda over lambda with height(lambda) <= d: the unit of J_d.
inline ExactElement jd_idempotent_sum(int d, int n) {
  ExactElement out(n);
  for (const auto& lam : partitions(n))
    if (lam.height() <= d) out += central_idempotent(lam);
  return out;
}

/// u_d = sum of omega_lambda with height(lambda) > d; spans ker eta_d.
inline ExactElement kernel_idempotent_sum(int d, int n) {
  ExactElement out(n);
  for (const auto& lam : partitions(n))
    if (lam.height() > d) out += central_idempotent(lam);
  return out;
}

/// tr(eta_d(omega_lambda)) = sum_sigma omega_lambda[sigma] d^{Ncyc(sigma)}, exactly.
inline Rational isotypic_trace(const Partition& lambda, int d) {
  const ExactElement w = central_idempotent(lambda);
  Rational t = 0;
  for (const auto& [sigma, c] : w.terms()) {
    mpz_class pw;
    mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(sigma.num_cycles()));
    t += c.re * Rational(pw);
  }
  return t;
}

/// The Weingarten element (1/n!) sum_{h(lambda)<=d} (tau(omega)/tr(p)) omega,
/// so that weingarten(d, n) = eta_d of it.
inline ExactElement weingarten_element(int d, int n) {
  ExactElement out(n);
  const Rational nf(factorial(n));
  for (const auto& lam : partitions(n)) {
    if (lam.height() > d) continue;
    const Rational tr = isotypic_trace(lam, d);
    const long chi = character(lam, Permutation::identity(n));
    out += central_idempotent(lam) * QComplex(Rational(chi * chi) / (tr * nf));
  }
  return out;
}

inline TensorOperator weingarten(int d, int n) {
  tensor_dim(d, n);
  return eta(d, weingarten_element(d, n));
}

/// The group-algebra element whose eta_d image is mu_d(r) = n! Wg eta_d(r).
template <typename S>
GroupAlgebraElement<S> mu_to_eta(int d, const GroupAlgebraElement<S>& r) {
  const auto wg = detail::convert_element<S>(weingarten_element(d, r.n()));
  return wg * r * S(static_cast<int>(factorial(r.n())));
}

template <typename S>
TensorOperator mu(int d, const GroupAlgebraElement<S>& r) {
  tensor_dim(d, r.n());
  return eta(d, mu_to_eta(d, r));
}

/// Projection of a onto J_d.
template <typename S>
GroupAlgebraElement<S> project_Jd(const GroupAlgebraElement<S>& a, int d) {
  if (d >= a.n()) return a;
  return detail::convert_element<S>(jd_idempotent_sum(d, a.n())) * a;
}

/// Projection of a onto ker eta_d; project_Jd(a, d) + project_kernel(a, d) = a.
template <typename S>
GroupAlgebraElement<S> project_kernel(const GroupAlgebraElement<S>& a, int d) {
  if (d >= a.n()) return GroupAlgebraElement<S>(a.n());
  return detail::convert_element<S>(kernel_idempotent_sum(d, a.n())) * a;
}

/// Smallest d with a in J_d, i.e. the largest height of an isotypic
/// component of a. Returns 0 for a = 0.
inline int min_local_dimension(const ExactElement& a) {
  int best = 0;
  for (const auto& lam : partitions(a.n()))
    if (!(central_idempotent(lam) * a).is_zero()) best = std::max(best, lam.height());
  return best;
}

/// Haar-random unitary via QR of a complex Ginibre matrix.
inline Eigen::MatrixXcd haar_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd z(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    Complex ph = r(j, j) / std::abs(r(j, j));
    q.col(j) *= ph;
  }
  return q;
}

/// Relative tolerance of the invariance test in from_invariant_operator.
inline constexpr double kInvarianceTol = 1e-8;
inline constexpr int kInvarianceUnitaries = 5;

/// True iff A commutes with U^{ox n}: checked on the Lie algebra generators
/// sum_k E_ij^{(k)} of the action, then on a fixed set of Haar-random
/// unitaries, at relative tolerance.
inline bool is_unitarily_invariant(const TensorOperator& a, double tol = kInvarianceTol) {
  const double scale = std::max(1.0, a.matrix.norm());
  for (int i = 0; i < a.d; ++i)
    for (int j = 0; j < a.d; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(a.d, a.d);
      e(i, j) = 1;
      Eigen::MatrixXcd ea = detail::apply_local_sum_left(e, a.matrix, a.d, a.n);
      Eigen::MatrixXcd ae =
          detail::apply_local_sum_left(e.transpose(), a.matrix.transpose(), a.d, a.n).transpose();
      if ((ea - ae).norm() > tol * scale) return false;
    }
  std::mt19937_64 rng(0x5eed);
  for (int t = 0; t < kInvarianceUnitaries; ++t) {
    Eigen::MatrixXcd u = haar_unitary(a.d, rng);
    Eigen::MatrixXcd ua = detail::apply_local_left(u, a.matrix, a.d, a.n);
    Eigen::MatrixXcd au =
        detail::apply_local_left(u.transpose(), a.matrix.transpose(), a.d, a.n).transpose();
    if ((ua - au).norm() > tol * scale) return false;
  }
  return true;
}

/// The unique a in J_d with mu_d(a) = A: a_sigma = tr(A eta_d(sigma)^dagger) / n!.
inline NumericElement from_invariant_operator(const TensorOperator& a, double tol = kInvarianceTol) {
  if (!is_unitarily_invariant(a, tol)) {
    throw std::invalid_argument("operator does not commute with U^{ox n} within tolerance");
  }
  const double nf = static_cast<double>(factorial(a.n));
  NumericElement out(a.n);
  for (const auto& sigma : all_permutations(a.n)) {
    auto map = detail::eta_index_map(a.d, sigma);
    // tr(A P^dagger) with P e_i = e_{map[i]}: sum_i A(map[i], i).
    Complex t = 0;
    for (long i = 0; i < a.dim(); ++i) t += a.matrix(map[i], i);
    out.add(sigma, t / nf);
  }
  return out;
}

/// A state parameter r in J_{d_min}: tau(r) = 1 and r >= 0.
struct WernerStateParam {
  ExactElement r;
  int d_min = 0;

  static WernerStateParam from_element(const ExactElement& r) {
    if (!(r.tau() == QComplex(1))) throw std::invalid_argument("state parameter must satisfy tau(r) = 1");
    if (!r.is_self_adjoint() || !is_positive(r)) {
      throw std::invalid_argument("state parameter is not a positive element of CS_n");
    }
    return WernerStateParam{r, min_local_dimension(r)};
  }

  int n() const { return r.n(); }
  bool is_real() const {
    for (const auto& [p, c] : r.terms())
      if (!c.is_real()) return false;
    return true;
  }
};

/// True iff tau(r) = 1 and r is positive.
template <typename S>
bool is_state(const GroupAlgebraElement<S>& r, double tol = 1e-10) {
  if (!r.is_self_adjoint()) return false;
  if constexpr (ScalarTraits<S>::exact) {
    if (!(r.tau() == QComplex(1))) return false;
  } else {
    if (std::abs(r.tau() - Complex(1)) > tol) return false;
  }
  return is_positive(r, tol);
}

/// Converts rho = eta_d(s s^dagger) / tr(.) into its mu_d parameter.
inline WernerStateParam eta_state_to_mu_param(const ExactElement& s, int d) {
  const int n = s.n();
  const ExactElement ss = project_Jd(s * s.dagger(), d);
  if (ss.is_zero()) throw std::invalid_argument("eta_d(s s^dagger) is zero");
  ExactElement corr(n);
  const Rational nf(factorial(n));
  for (const auto& lam : partitions(n)) {
    if (lam.height() > d) continue;
    const long chi = character(lam, Permutation::identity(n));
    corr += central_idempotent(lam) * QComplex(nf * isotypic_trace(lam, d) / Rational(chi * chi));
  }
  ExactElement r = corr * ss;
  const QComplex id = r.coeff(Permutation::identity(n));
  if (id.is_zero()) throw std::invalid_argument("eta_d(s s^dagger) has zero trace");
  r *= QComplex(Rational(1) / nf) / id;
  return WernerStateParam::from_element(r);
}

/// Minimum eigenvalue of the partial transpose of rho on the tensor
/// positions in `subset` (1-based).
inline double ppt_min_eigenvalue(const TensorOperator& rho, const std::vector<int>& subset) {
  if (!rho.is_hermitian(1e-9)) throw std::invalid_argument("ppt_min_eigenvalue: operator is not Hermitian");
  std::vector<bool> flip(rho.n, false);
  for (int k : subset) {
    if (k < 1 || k > rho.n) throw std::out_of_range("subset position " + std::to_string(k) + " out of range");
    flip[k - 1] = true;
  }
  const long D = rho.dim();
  Eigen::MatrixXcd pt(D, D);
  for (long i = 0; i < D; ++i) {
    auto di = detail::digits(i, rho.d, rho.n);
    for (long j = 0; j < D; ++j) {
      auto dj = detail::digits(j, rho.d, rho.n);
      auto a = di, b = dj;
      for (int k = 0; k < rho.n; ++k)
        if (flip[k]) std::swap(a[k], b[k]);
      pt(detail::from_digits(a, rho.d), detail::from_digits(b, rho.d)) = rho.matrix(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Nonempty subsets of {2..n}: one side of every bipartition, 2^{n-1}-1 in all.
inline std::vector<std::vector<int>> bipartitions(int n) {
  check_arity(n);
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> s;
    for (int k = 0; k < n - 1; ++k)
      if (mask & (1u << k)) s.push_back(k + 2);
    out.push_back(std::move(s));
  }
  return out;
}

/// mu_d parameter of the twirl E(rho) = Phi(rho) Wg, with
/// Phi(rho) = sum_sigma tr(eta_d(sigma)^-1 rho) eta_d(sigma). Requires d >= n.
inline NumericElement twirl(const TensorOperator& rho) {
  if (rho.d < rho.n) {
    throw std::invalid_argument("twirl requires d >= n (got d=" + std::to_string(rho.d) +
                                ", n=" + std::to_string(rho.n) + ")");
  }
  NumericElement phi(rho.n);
  for (const auto& sigma : all_permutations(rho.n)) {
    auto map = detail::eta_index_map(rho.d, sigma);
    Complex t = 0;
    for (long i = 0; i < rho.dim(); ++i) t += rho.matrix(map[i], i);
    phi.add(sigma, t);
  }
  TensorOperator e(rho.d, rho.n, eta(rho.d, phi).matrix * weingarten(rho.d, rho.n).matrix);
  return from_invariant_operator(e);
}

}  // namespace werner
