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

// Exact linear algebra over the rationals and complex rationals.

#include <Eigen/Dense>

#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "werner/rational.hpp"

namespace werner {

/// Dense row-major matrix of exact scalars.
template <typename S>
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactMatrix identity(size_t n) {
    ExactMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  S& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<S> data_;
};

using RationalMatrix = ExactMatrix<Rational>;
using QComplexMatrix = ExactMatrix<QComplex>;

namespace detail {
inline Rational exact_conj(const Rational& q) { return q; }
inline QComplex exact_conj(const QComplex& z) { return conj(z); }
}  // namespace detail

namespace detail {

/// Gaussian integer used by the fraction-free elimination.
struct GaussInt {
  mpz_class re, im;
};

inline void accumulate_lcm(mpz_class& l, const Rational& q) {
  mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
}
inline void accumulate_lcm(mpz_class& l, const QComplex& z) {
  accumulate_lcm(l, z.re);
  accumulate_lcm(l, z.im);
}
inline GaussInt scaled(const Rational& q, const mpz_class& l) { return {q.get_num() * (l / q.get_den()), 0}; }
inline GaussInt scaled(const QComplex& z, const mpz_class& l) {
  return {z.re.get_num() * (l / z.re.get_den()), z.im.get_num() * (l / z.im.get_den())};
}

}  // namespace detail

/// Decides A >= 0 exactly. A is scaled to a Gaussian-integer matrix and
/// reduced by fraction-free (Bareiss) symmetric elimination, so entry sizes
/// grow linearly with the dimension. A zero pivot requires the remaining row
/// to vanish, after which that index is dropped.
template <typename S>
bool exact_psd(const ExactMatrix<S>& m) {
  const size_t n = m.rows();
  if (m.cols() != n) throw std::invalid_argument("exact_psd: matrix is not square");
  mpz_class l = 1;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      if (!(m(i, j) == detail::exact_conj(m(j, i)))) throw std::invalid_argument("exact_psd: matrix is not Hermitian");
      detail::accumulate_lcm(l, m(i, j));
    }
  // Upper triangle only; a(j, i) = conj(a(i, j)).
  std::vector<detail::GaussInt> a(n * n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) a[i * n + j] = detail::scaled(m(i, j), l);
  mpz_class prev = 1;
  std::vector<size_t> rest;
  mpz_class t1, t2;
  for (size_t k = 0; k < n; ++k) {
    const mpz_class p = a[k * n + k].re;
    if (sgn(p) < 0) return false;
    rest.clear();
    for (size_t j = k + 1; j < n; ++j) {
      const auto& e = a[k * n + j];
      if (sgn(e.re) != 0 || sgn(e.im) != 0) rest.push_back(j);
    }
    if (sgn(p) == 0) {
      if (!rest.empty()) return false;
      continue;
    }
    // Bareiss step on the remaining indices: a_ij <- (p a_ij - conj(a_ki) a_kj) / prev.
    for (size_t i = k + 1; i < n; ++i) {
      const auto& aki = a[k * n + i];
      const bool aki_zero = sgn(aki.re) == 0 && sgn(aki.im) == 0;
      for (size_t j = i; j < n; ++j) {
        auto& e = a[i * n + j];
        const auto& akj = a[k * n + j];
        e.re *= p;
        e.im *= p;
        if (!aki_zero && (sgn(akj.re) != 0 || sgn(akj.im) != 0)) {
          // conj(aki) * akj = (x - iy)(u + iv) = (xu + yv) + i(xv - yu).
          t1 = aki.re * akj.re + aki.im * akj.im;
          t2 = aki.re * akj.im - aki.im * akj.re;
          e.re -= t1;
          e.im -= t2;
        }
        mpz_divexact(e.re.get_mpz_t(), e.re.get_mpz_t(), prev.get_mpz_t());
        mpz_divexact(e.im.get_mpz_t(), e.im.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = p;
  }
  return true;
}

/// Solves the square system A x = b exactly; throws if A is singular.
inline std::vector<Rational> exact_solve(RationalMatrix a, std::vector<Rational> b) {
  const size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw std::invalid_argument("exact_solve: shape mismatch");
  for (size_t k = 0; k < n; ++k) {
    size_t p = k;
    while (p < n && sgn(a(p, k)) == 0) ++p;
    if (p == n) throw std::runtime_error("exact_solve: singular system");
    if (p != k) {
      for (size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (size_t i = k + 1; i < n; ++i) {
      if (sgn(a(i, k)) == 0) continue;
      Rational f = a(i, k) / a(k, k);
      for (size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<Rational> x(n);
  for (size_t k = n; k-- > 0;) {
    Rational s = b[k];
    for (size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

template <typename S>
Eigen::MatrixXcd to_eigen(const ExactMatrix<S>& a) {
  Eigen::MatrixXcd m(a.rows(), a.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) {
      if constexpr (std::is_same_v<S, Rational>) {
        m(i, j) = Complex(a(i, j).get_d(), 0.0);
      } else {
        m(i, j) = a(i, j).to_complex();
      }
    }
  return m;
}

}  // namespace werner
