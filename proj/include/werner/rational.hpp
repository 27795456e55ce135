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

// Exact rational and complex-rational scalars.

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace werner {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Complex number with exact rational real and imaginary parts.
struct QComplex {
  Rational re{0};
  Rational im{0};

  QComplex() = default;
  QComplex(Rational r) : re(std::move(r)) {}  // NOLINT(runtime/explicit)
  QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  QComplex(long v) : re(v) {}  // NOLINT(runtime/explicit)
  QComplex(int v) : re(v) {}   // NOLINT(runtime/explicit)

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  QComplex& operator*=(const QComplex& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  QComplex& operator/=(const QComplex& o) {
    Rational den = o.re * o.re + o.im * o.im;
    if (sgn(den) == 0) throw std::domain_error("QComplex: division by zero");
    Rational r = (re * o.re + im * o.im) / den;
    Rational i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
  friend QComplex operator-(const QComplex& a) { return QComplex(-a.re, -a.im); }
  friend bool operator==(const QComplex& a, const QComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }

  Complex to_complex() const { return {re.get_d(), im.get_d()}; }
};

inline QComplex conj(const QComplex& z) { return QComplex(z.re, -z.im); }

/// Scalar-type traits shared by the exact and floating code paths.
template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex conj(const Complex& z) { return std::conj(z); }
  static bool is_zero(const Complex& z) { return z.real() == 0.0 && z.imag() == 0.0; }
  static Complex to_complex(const Complex& z) { return z; }
  static Complex from_rational(const Rational& q) { return {q.get_d(), 0.0}; }
};

template <>
struct ScalarTraits<QComplex> {
  static constexpr bool exact = true;
  static QComplex zero() { return {}; }
  static QComplex one() { return QComplex(1); }
  static QComplex conj(const QComplex& z) { return werner::conj(z); }
  static bool is_zero(const QComplex& z) { return z.is_zero(); }
  static Complex to_complex(const QComplex& z) { return z.to_complex(); }
  static QComplex from_rational(const Rational& q) { return QComplex(q); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational conj(const Rational& q) { return q; }
  static bool is_zero(const Rational& q) { return sgn(q) == 0; }
  static Complex to_complex(const Rational& q) { return {q.get_d(), 0.0}; }
  static Rational from_rational(const Rational& q) { return q; }
};

inline Rational make_rational(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Canonical "p/q" text (or "p" for integers).
inline std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

/// Parses "p/q", an integer, or an exact decimal such as "-0.125" or "1e-3".
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.find('/') != std::string::npos) {
    std::string t = s;
    if (t[0] == '+') t = t.substr(1);
    Rational q;
    if (q.set_str(t, 10) != 0) throw std::invalid_argument("bad rational literal '" + s + "'");
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }
  size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long exp10 = 0;
  bool any = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, any = true) digits += s[i];
  if (i < s.size() && s[i] == '.') {
    for (++i; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i, any = true) {
      digits += s[i];
      --exp10;
    }
  }
  if (!any) throw std::invalid_argument("bad rational literal '" + s + "'");
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    size_t used = 0;
    long e = 0;
    try {
      e = std::stol(s.substr(i), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent in '" + s + "'");
    }
    i += used;
    exp10 += e;
  }
  if (i != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  mpz_class num(digits.empty() ? "0" : digits, 10);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 >= 0 ? Rational(num * p10) : Rational(num, p10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

/// Exact value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value cannot be made rational");
  Rational q(x);
  q.canonicalize();
  return q;
}

/// Best rational approximation with denominator at most `denom_bound`
/// (continued-fraction convergents plus the final semiconvergent).
inline Rational best_rational(const Rational& x, const mpz_class& denom_bound) {
  if (denom_bound < 1) throw std::invalid_argument("denominator bound must be positive");
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rem = x;
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), rem.get_num_mpz_t(), rem.get_den_mpz_t());
    mpz_class q2 = q0 + a * q1;
    if (q2 > denom_bound) break;
    mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Rational frac = rem - Rational(a);
    if (sgn(frac) == 0) return Rational(p1, q1);
    rem = 1 / frac;
  }
  // q1 >= 1 here because the first convergent has denominator 1.
  mpz_class k = (denom_bound - q0) / q1;
  Rational semi(p0 + k * p1, q0 + k * q1);
  Rational conv(p1, q1);
  semi.canonicalize();
  conv.canonicalize();
  return abs(semi - x) < abs(conv - x) ? semi : conv;
}

inline Rational best_rational(double x, const mpz_class& denom_bound) {
  return best_rational(exact_rational(x), denom_bound);
}

}  // namespace werner
