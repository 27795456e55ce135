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

// The group algebra CS_n with exact or floating coefficients.

#include <Eigen/Dense>

#include <map>
#include <ostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "werner/characters.hpp"
#include "werner/exact_linalg.hpp"
#include "werner/permutation.hpp"
#include "werner/rational.hpp"

namespace werner {

/// a = sum_sigma a_sigma sigma. Only nonzero coefficients are stored.
template <typename S>
class GroupAlgebraElement {
 public:
  using Scalar = S;
  using Traits = ScalarTraits<S>;

  GroupAlgebraElement() = default;
  explicit GroupAlgebraElement(int n) : n_(n) { check_arity(n); }

  static GroupAlgebraElement identity(int n) { return basis(Permutation::identity(n)); }

  static GroupAlgebraElement basis(const Permutation& sigma, const S& c = Traits::one()) {
    GroupAlgebraElement a(sigma.size());
    a.add(sigma, c);
    return a;
  }

  int n() const { return n_; }
  const std::map<Permutation, S>& terms() const { return terms_; }
  size_t support_size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  S coeff(const Permutation& sigma) const {
    auto it = terms_.find(sigma);
    return it == terms_.end() ? Traits::zero() : it->second;
  }

  void add(const Permutation& sigma, const S& c) {
    if (sigma.size() != n_) throw std::invalid_argument("permutation arity does not match element");
    if (Traits::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(sigma, c);
    if (!inserted) {
      it->second += c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  void set(const Permutation& sigma, const S& c) {
    if (sigma.size() != n_) throw std::invalid_argument("permutation arity does not match element");
    if (Traits::is_zero(c)) {
      terms_.erase(sigma);
    } else {
      terms_[sigma] = c;
    }
  }

  GroupAlgebraElement dagger() const {
    GroupAlgebraElement out(n_);
    for (const auto& [sigma, c] : terms_) out.terms_.emplace(sigma.inverse(), Traits::conj(c));
    return out;
  }

  /// tau(a) = n! a_id.
  S tau() const {
    S c = coeff(Permutation::identity(n_));
    return c * S(static_cast<int>(factorial(n_)));
  }

  bool is_self_adjoint() const { return *this == dagger(); }

  GroupAlgebraElement& operator+=(const GroupAlgebraElement& o) {
    check_same(o);
    for (const auto& [sigma, c] : o.terms_) add(sigma, c);
    return *this;
  }
  GroupAlgebraElement& operator-=(const GroupAlgebraElement& o) {
    check_same(o);
    for (const auto& [sigma, c] : o.terms_) add(sigma, -c);
    return *this;
  }
  GroupAlgebraElement& operator*=(const S& s) {
    if (Traits::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [sigma, c] : terms_) c *= s;
    return *this;
  }

  friend GroupAlgebraElement operator+(GroupAlgebraElement a, const GroupAlgebraElement& b) {
    return a += b;
  }
  friend GroupAlgebraElement operator-(GroupAlgebraElement a, const GroupAlgebraElement& b) {
    return a -= b;
  }
  friend GroupAlgebraElement operator*(GroupAlgebraElement a, const S& s) { return a *= s; }
  friend GroupAlgebraElement operator*(const S& s, GroupAlgebraElement a) { return a *= s; }

  /// Convolution: (ab)_pi = sum_{sigma tau = pi} a_sigma b_tau.
  friend GroupAlgebraElement operator*(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    a.check_same(b);
    GroupAlgebraElement out(a.n_);
    for (const auto& [s, x] : a.terms_)
      for (const auto& [t, y] : b.terms_) out.add(s * t, x * y);
    return out;
  }

  friend bool operator==(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

  /// Floating copy; identity for Complex elements.
  GroupAlgebraElement<Complex> to_numeric() const {
    GroupAlgebraElement<Complex> out(n_);
    for (const auto& [sigma, c] : terms_) out.add(sigma, Traits::to_complex(c));
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [sigma, c] : terms_) {
      if (!s.empty()) s += " + ";
      if constexpr (std::is_same_v<S, QComplex>) {
        if (c.is_real()) {
          s += werner::to_string(c.re);
        } else {
          s += "(" + werner::to_string(c.re) + (sgn(c.im) < 0 ? "-" : "+") +
               werner::to_string(abs(c.im)) + "i)";
        }
      } else {
        s += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "-" : "+") +
             std::to_string(std::abs(c.imag())) + "i)";
      }
      s += "*" + sigma.to_string();
    }
    return s;
  }

 private:
  void check_same(const GroupAlgebraElement& o) const {
    if (n_ != o.n_) {
      throw std::invalid_argument("group algebra elements of different arity: " + std::to_string(n_) +
                                  " vs " + std::to_string(o.n_));
    }
  }

  int n_ = 0;
  std::map<Permutation, S> terms_;
};

template <typename S>
std::ostream& operator<<(std::ostream& os, const GroupAlgebraElement<S>& a) {
  return os << a.to_string();
}

using ExactElement = GroupAlgebraElement<QComplex>;
using NumericElement = GroupAlgebraElement<Complex>;

/// sum_sigma a_sigma sigma^-1 (inversion without conjugation).
///
/// This is the algebra isomorphism from CS_n with left-to-right products,
/// (sigma tau)(i) = tau(sigma(i)), onto this library's convention
/// (sigma tau)(i) = sigma(tau(i)). Use it to import elements whose products
/// were written for the other convention.
template <typename S>
GroupAlgebraElement<S> antipode(const GroupAlgebraElement<S>& a) {
  GroupAlgebraElement<S> out(a.n());
  for (const auto& [sigma, c] : a.terms()) out.add(sigma.inverse(), c);
  return out;
}

/// omega_lambda = (chi_lambda(id)/n!) sum_sigma chi_lambda(sigma) sigma^-1.
inline ExactElement central_idempotent(const Partition& lambda) {
  const int n = lambda.size();
  check_arity(n);
  const long dim = character(lambda, Permutation::identity(n));
  const long nf = factorial(n);
  ExactElement out(n);
  for (const auto& sigma : all_permutations(n)) {
    long chi = character(lambda, sigma.cycle_type());
    if (chi == 0) continue;
    out.add(sigma.inverse(), QComplex(make_rational(dim * chi, nf)));
  }
  return out;
}

/// Left multiplication by a in the orthonormal basis sigma/sqrt(n!), with
/// rows and columns in all_permutations(n) order.
template <typename S>
Eigen::MatrixXcd regular_rep_matrix(const GroupAlgebraElement<S>& a) {
  const int n = a.n();
  if (n > 7) throw std::out_of_range("regular_rep_matrix: n! too large for a dense matrix");
  const auto perms = all_permutations(n);
  const long N = static_cast<long>(perms.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& [sigma, c] : a.terms()) {
    Complex v = ScalarTraits<S>::to_complex(c);
    for (long j = 0; j < N; ++j) m(permutation_rank(sigma * perms[j]), j) += v;
  }
  return m;
}

/// Regular representation with exact entries (basis sigma, unnormalized).
inline QComplexMatrix regular_rep_exact(const ExactElement& a) {
  const int n = a.n();
  const auto perms = all_permutations(n);
  const size_t N = perms.size();
  QComplexMatrix m(N, N);
  for (const auto& [sigma, c] : a.terms())
    for (size_t j = 0; j < N; ++j) m(permutation_rank(sigma * perms[j]), j) += c;
  return m;
}

namespace detail {

// Young symmetrizer of the row-reading tableau of shape lambda:
// (sum over row stabilizer) * (signed sum over column stabilizer).
inline ExactElement young_symmetrizer(const Partition& lambda) {
  const int n = lambda.size();
  std::vector<int> row_of(n), col_of(n);
  int k = 0;
  for (int r = 0; r < lambda.height(); ++r)
    for (int c = 0; c < lambda[r]; ++c, ++k) {
      row_of[k] = r;
      col_of[k] = c;
    }
  ExactElement rows(n), cols(n);
  for (const auto& p : all_permutations(n)) {
    bool in_row = true, in_col = true;
    for (int i = 0; i < n; ++i) {
      in_row = in_row && row_of[p(i)] == row_of[i];
      in_col = in_col && col_of[p(i)] == col_of[i];
    }
    if (in_row) rows.add(p, QComplex(1));
    if (in_col) cols.add(p, QComplex(p.sign()));
  }
  return rows * cols;
}

// Basis {sigma e_T} of the minimal left ideal CS_n e_T, which carries the
// irrep lambda. Selected greedily over all_permutations order.
inline std::vector<ExactElement> compute_ideal_basis(const Partition& lambda) {
  const int n = lambda.size();
  const long dim = character(lambda, Permutation::identity(n));
  const ExactElement e = young_symmetrizer(lambda);
  std::vector<ExactElement> basis;
  // Echelon rows keyed by pivot rank.
  std::map<long, std::map<long, Rational>> echelon;
  for (const auto& sigma : all_permutations(n)) {
    if (static_cast<long>(basis.size()) == dim) break;
    ExactElement v = ExactElement::basis(sigma) * e;
    std::map<long, Rational> row;
    for (const auto& [p, c] : v.terms()) row[permutation_rank(p)] = c.re;
    for (auto& [pivot, prow] : echelon) {
      auto it = row.find(pivot);
      if (it == row.end()) continue;
      Rational f = it->second / prow.at(pivot);
      for (const auto& [col, val] : prow) {
        Rational& x = row[col];
        x -= f * val;
        if (sgn(x) == 0) row.erase(col);
      }
    }
    if (row.empty()) continue;
    long pivot = row.begin()->first;
    echelon.emplace(pivot, std::move(row));
    basis.push_back(std::move(v));
  }
  if (static_cast<long>(basis.size()) != dim) {
    throw std::logic_error("left ideal basis has the wrong dimension for " + lambda.to_string());
  }
  return basis;
}

inline const std::vector<ExactElement>& irrep_ideal_basis(const Partition& lambda) {
  static std::mutex mutex;
  static std::map<std::vector<int>, std::vector<ExactElement>> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(lambda.parts());
    if (it != cache.end()) return it->second;
  }
  auto basis = compute_ideal_basis(lambda);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(lambda.parts(), std::move(basis)).first->second;
}

// sum_sigma conj(x_sigma) y_sigma, i.e. tau(x^dagger y) / n!.
inline QComplex coefficient_pairing(const ExactElement& x, const ExactElement& y) {
  QComplex s;
  for (const auto& [p, c] : x.terms()) {
    auto it = y.terms().find(p);
    if (it != y.terms().end()) s += conj(c) * it->second;
  }
  return s;
}

}  // namespace detail

/// The Hermitian form x -> tau(x^dagger a x) on the irrep lambda, in the
/// basis of detail::irrep_ideal_basis. a >= 0 iff all these forms are PSD.
inline QComplexMatrix irrep_form(const ExactElement& a, const Partition& lambda) {
  const auto& basis = detail::irrep_ideal_basis(lambda);
  const size_t f = basis.size();
  std::vector<ExactElement> av;
  av.reserve(f);
  for (const auto& v : basis) av.push_back(a * v);
  QComplexMatrix m(f, f);
  for (size_t i = 0; i < f; ++i)
    for (size_t j = 0; j < f; ++j) m(i, j) = detail::coefficient_pairing(basis[i], av[j]);
  return m;
}

/// True iff the regular representation of a is positive semidefinite.
/// Exact elements are decided exactly, one irrep at a time; floating elements
/// compare the minimum eigenvalue of the regular representation with -tol.
template <typename S>
bool is_positive(const GroupAlgebraElement<S>& a, double tol = 1e-10) {
  if (!a.is_self_adjoint()) {
    throw std::invalid_argument("is_positive: element is not self-adjoint");
  }
  if constexpr (ScalarTraits<S>::exact) {
    for (const auto& lambda : partitions(a.n())) {
      if (!exact_psd(irrep_form(a, lambda))) return false;
    }
    return true;
  } else {
    Eigen::MatrixXcd m = regular_rep_matrix(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
  }
}

}  // namespace werner
