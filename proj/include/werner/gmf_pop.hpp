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

// Generalized matrix functions f_w, the elliptope, and the commutative
// hierarchy SDP-POP.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "werner/group_algebra.hpp"
#include "werner/sdp_problem.hpp"
#include "werner/werner_rep.hpp"

namespace werner {

/// Number of unordered pairs i < j.
inline int num_pairs(int n) { return n * (n - 1) / 2; }

/// Index of the pair (i, j), i < j, 0-based, in lexicographic order.
inline int pair_index(int n, int i, int j) {
  if (!(0 <= i && i < j && j < n)) throw std::out_of_range("pair_index: need 0 <= i < j < n");
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// A monomial in the commuting symbols z_ij (index 2p) and conj(z_ij)
/// (index 2p+1), where p = pair_index(i, j).
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int n) : n_(n), e_(2 * num_pairs(n), 0) {}

  /// The entry Z_ij of the elliptope matrix: z_ij for i < j, conj(z_ji) for
  /// i > j and 1 on the diagonal (0-based indices).
  static Monomial entry(int n, int i, int j) {
    Monomial m(n);
    if (i < j) m.e_[2 * pair_index(n, i, j)] = 1;
    if (i > j) m.e_[2 * pair_index(n, j, i) + 1] = 1;
    return m;
  }

  static Monomial from_exponents(int n, std::vector<std::uint8_t> e) {
    if (static_cast<int>(e.size()) != 2 * num_pairs(n)) throw std::invalid_argument("exponent vector size");
    Monomial m;
    m.n_ = n;
    m.e_ = std::move(e);
    return m;
  }

  int n() const { return n_; }
  const std::vector<std::uint8_t>& exponents() const { return e_; }
  int num_symbols() const { return static_cast<int>(e_.size()); }

  int degree() const {
    int d = 0;
    for (auto x : e_) d += x;
    return d;
  }

  bool is_one() const { return degree() == 0; }

  Monomial conj() const {
    Monomial m = *this;
    for (size_t p = 0; p + 1 < e_.size(); p += 2) std::swap(m.e_[p], m.e_[p + 1]);
    return m;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("monomials over different n");
    Monomial m = a;
    for (size_t k = 0; k < m.e_.size(); ++k) {
      int s = m.e_[k] + b.e_[k];
      if (s > 255) throw std::overflow_error("monomial exponent overflow");
      m.e_[k] = static_cast<std::uint8_t>(s);
    }
    return m;
  }

  /// Torus weight: z_ij has weight e_j - e_i, conj(z_ij) the negative.
  std::vector<int> weight() const {
    std::vector<int> w(n_, 0);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        int p = pair_index(n_, i, j);
        int a = e_[2 * p] - e_[2 * p + 1];
        w[j] += a;
        w[i] -= a;
      }
    return w;
  }

  /// "1", "z12", "zb13^2*z23" (1-based pair labels).
  std::string to_string() const {
    std::string s;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        int p = pair_index(n_, i, j);
        for (int c = 0; c < 2; ++c) {
          int x = e_[2 * p + c];
          if (x == 0) continue;
          if (!s.empty()) s += "*";
          s += (c == 0 ? "z" : "zb") + std::to_string(i + 1) + std::to_string(j + 1);
          if (x > 1) s += "^" + std::to_string(x);
        }
      }
    return s.empty() ? "1" : s;
  }

  static Monomial parse(int n, const std::string& text) {
    Monomial m(n);
    if (text == "1") return m;
    std::stringstream ss(text);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
      int power = 1;
      auto caret = factor.find('^');
      if (caret != std::string::npos) {
        power = std::stoi(factor.substr(caret + 1));
        factor = factor.substr(0, caret);
      }
      bool bar = factor.rfind("zb", 0) == 0;
      std::string idx = factor.substr(bar ? 2 : 1);
      if (factor[0] != 'z' || idx.size() != 2) throw std::invalid_argument("bad monomial factor '" + factor + "'");
      int i = idx[0] - '1', j = idx[1] - '1';
      int p = pair_index(n, i, j);
      m.e_[2 * p + (bar ? 1 : 0)] += static_cast<std::uint8_t>(power);
    }
    return m;
  }

  /// Graded lexicographic order with z_12 < conj(z_12) < z_13 < ...
  friend bool operator<(const Monomial& a, const Monomial& b) {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (size_t k = 0; k < a.e_.size(); ++k)
      if (a.e_[k] != b.e_[k]) return a.e_[k] > b.e_[k];
    return false;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.n_ == b.n_ && a.e_ == b.e_; }

 private:
  int n_ = 0;
  std::vector<std::uint8_t> e_;
};

/// f = sum of coefficient * monomial.
template <typename S>
struct GeneralizedMatrixFunction {
  int n = 0;
  std::map<Monomial, S> terms;
};

/// The monomial prod_i Z_{i sigma(i)}.
inline Monomial gmf_monomial(const Permutation& sigma) {
  const int n = sigma.size();
  Monomial m(n);
  for (int i = 0; i < n; ++i) m = m * Monomial::entry(n, i, sigma(i));
  return m;
}

/// f_w = sum_sigma w_sigma prod_i z_{i sigma(i)}.
template <typename S>
GeneralizedMatrixFunction<S> gmf(const GroupAlgebraElement<S>& w) {
  GeneralizedMatrixFunction<S> f;
  f.n = w.n();
  for (const auto& [sigma, c] : w.terms()) {
    auto [it, inserted] = f.terms.emplace(gmf_monomial(sigma), c);
    if (!inserted) it->second += c;
  }
  return f;
}

/// A point of the elliptope: Hermitian Z with unit diagonal and Z >= 0.
struct EllipticGram {
  int n = 0;
  Eigen::MatrixXcd z;
  std::optional<int> rank_bound;

  Complex alpha(int i, int j) const { return z(i, j); }

  /// Z_ij = <v_j|v_i> for the unit columns v_i of `v`; the Gram matrix of the
  /// conjugate vectors. With this choice f_w(alpha) = tr(eta_d(w) |v><v|).
  static EllipticGram from_vectors(const Eigen::MatrixXcd& v) {
    EllipticGram g;
    g.n = static_cast<int>(v.cols());
    g.z = (v.adjoint() * v).transpose();
    g.rank_bound = static_cast<int>(v.rows());
    for (int i = 0; i < g.n; ++i)
      if (std::abs(g.z(i, i) - Complex(1)) > 1e-9) throw std::invalid_argument("vectors must be unit vectors");
    return g;
  }

  /// Gram matrix of n Haar-random unit vectors in C^k.
  static EllipticGram random(int n, int k, std::mt19937_64& rng) { return from_vectors(random_unit_vectors(n, k, rng)); }

  static Eigen::MatrixXcd random_unit_vectors(int n, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd v(k, n);
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < k; ++t) v(t, i) = Complex(g(rng), g(rng));
      v.col(i).normalize();
    }
    return v;
  }

  bool is_member(double tol = 1e-10) const {
    for (int i = 0; i < n; ++i)
      if (std::abs(z(i, i) - Complex(1)) > tol) return false;
    if ((z - z.adjoint()).norm() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
  }

  Complex eval(const Monomial& m) const {
    Complex v = 1;
    const auto& e = m.exponents();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        int p = pair_index(n, i, j);
        for (int k = 0; k < e[2 * p]; ++k) v *= z(i, j);
        for (int k = 0; k < e[2 * p + 1]; ++k) v *= std::conj(z(i, j));
      }
    return v;
  }
};

template <typename S>
Complex gmf_eval(const GeneralizedMatrixFunction<S>& f, const EllipticGram& a) {
  Complex v = 0;
  for (const auto& [m, c] : f.terms) v += ScalarTraits<S>::to_complex(c) * a.eval(m);
  return v;
}

/// All monomials of degree <= level in the n(n-1) symbols, graded-lex order.
inline std::vector<Monomial> monomial_vector(int n, int level) {
  if (level < 0) throw std::invalid_argument("level must be nonnegative");
  const int nv = 2 * num_pairs(n);
  std::vector<Monomial> out;
  std::vector<std::uint8_t> e(nv, 0);
  // Multisets of symbol indices in nondecreasing order, degree by degree.
  std::function<void(int, int)> rec = [&](int start, int remaining) {
    if (remaining == 0) {
      out.push_back(Monomial::from_exponents(n, e));
      return;
    }
    for (int s = start; s < nv; ++s) {
      ++e[s];
      rec(s, remaining - 1);
      --e[s];
    }
  };
  for (int deg = 0; deg <= level; ++deg) rec(0, deg);
  return out;
}

inline mpz_class binomial(long a, long b) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
  return r;
}

struct PopSizes {
  long block_size = 0;
  /// Equation count in the published convention: monomials of degree <= 2l
  /// (the entries of u_l u_l^dagger) plus the pairing constraint.
  long equations = 0;
  /// Monomials of degree <= 2l+1 (the entries of the full identity) plus one.
  long assembled_equations = 0;
};

inline PopSizes pop_sizes(int n, int level) {
  check_arity(n);
  const long nv = 2L * num_pairs(n);
  PopSizes s;
  s.block_size = n * binomial(nv + level, nv).get_si();
  s.equations = binomial(nv + 2 * level, 2 * level).get_si() + 1;
  s.assembled_equations = binomial(nv + 2 * level + 1, 2 * level + 1).get_si() + 1;
  return s;
}

struct PopOptions {
  /// Restrict to real w and real symmetric G. Defaults to on when r is real.
  std::optional<bool> real_mode;
  /// Block-diagonalize by the torus weight of the basis elements.
  bool reduce = true;
  /// Impose epsilon >= 0 (the POP optimum is either >= 1 or -infinity).
  bool epsilon_floor = true;
};

/// Basis element u_l (x) 1_n entry: monomial m in slot k (0-based).
struct PopBasisElement {
  Monomial monomial;
  int slot = 0;

  std::string label() const { return monomial.to_string() + "|" + std::to_string(slot + 1); }
  static PopBasisElement parse(int n, const std::string& label) {
    auto bar = label.rfind('|');
    if (bar == std::string::npos) throw std::invalid_argument("bad POP basis label '" + label + "'");
    return PopBasisElement{Monomial::parse(n, label.substr(0, bar)), std::stoi(label.substr(bar + 1)) - 1};
  }
};

/// conj(m_a) m_b Z_{slot_b, slot_a}: the monomial multiplying G(a, b) in
/// tr((u (x) 1)^dagger G (u (x) 1) Z).
inline Monomial pop_entry_monomial(const PopBasisElement& a, const PopBasisElement& b) {
  const int n = a.monomial.n();
  return a.monomial.conj() * b.monomial * Monomial::entry(n, b.slot, a.slot);
}

inline std::vector<int> pop_block_key(const PopBasisElement& b) {
  auto w = b.monomial.weight();
  w[b.slot] -= 1;
  return w;
}

struct PopInstance {
  SdpProblem problem;
  std::vector<std::vector<PopBasisElement>> basis;  // per block
};

inline PopInstance assemble_pop(const WernerStateParam& state, int level, const PopOptions& opt = {}) {
  const int n = state.n();
  if (level < min_level(n)) {
    throw std::invalid_argument("level " + std::to_string(level) + " below ceil(n/2) = " +
                                std::to_string(min_level(n)));
  }
  const bool real = opt.real_mode.value_or(state.is_real());
  if (real && !state.is_real()) throw std::invalid_argument("real mode requires a real state parameter");

  PopInstance inst;
  SdpProblem& p = inst.problem;
  p.hermitian = !real;
  p.hierarchy = Hierarchy::kPop;
  p.n = n;
  p.level = level;
  p.real_mode = real;

  auto expansion = add_witness_coordinates(p, n, real);
  p.epsilon_var = p.add_free("epsilon");
  p.objective = {{p.epsilon_var, Rational(1)}};
  if (opt.epsilon_floor) p.epsilon_floor = Rational(0);

  const auto monos = monomial_vector(n, level);
  std::map<std::vector<int>, std::vector<PopBasisElement>> grouped;
  for (const auto& m : monos)
    for (int k = 0; k < n; ++k) {
      PopBasisElement b{m, k};
      grouped[opt.reduce ? pop_block_key(b) : std::vector<int>{}].push_back(b);
    }

  std::map<Monomial, LinearConstraint> eqs;
  for (const auto& [key, elems] : grouped) {
    const int blk = static_cast<int>(p.blocks.size());
    PsdBlock block;
    block.size = static_cast<int>(elems.size());
    for (const auto& b : elems) block.labels.push_back(b.label());
    p.blocks.push_back(std::move(block));
    inst.basis.push_back(elems);
    for (int i = 0; i < static_cast<int>(elems.size()); ++i)
      for (int j = 0; j < static_cast<int>(elems.size()); ++j) {
        Monomial m = pop_entry_monomial(elems[i], elems[j]);
        eqs[m].gram.push_back({blk, i, j, QComplex(1)});
      }
  }
  // Left side f_w + epsilon moves to the left with a minus sign.
  for (const auto& [sigma, terms] : expansion) {
    auto& c = eqs[gmf_monomial(sigma)];
    for (const auto& t : terms) c.free.push_back({t.var, -t.coeff});
  }
  eqs[Monomial(n)].free.push_back({p.epsilon_var, QComplex(-1)});
  for (auto& [m, c] : eqs) {
    c.label = m.to_string();
    p.constraints.push_back(std::move(c));
  }
  p.constraints.push_back(pairing_constraint(state.r, expansion));
  return inst;
}

/// tr((u(alpha) (x) 1)^dagger G (u(alpha) (x) 1) Z(alpha)) for per-block G.
inline Complex pop_gram_form(const PopInstance& inst, const std::vector<Eigen::MatrixXcd>& g,
                             const EllipticGram& a) {
  Complex total = 0;
  for (size_t b = 0; b < inst.basis.size(); ++b) {
    const auto& elems = inst.basis[b];
    for (size_t i = 0; i < elems.size(); ++i)
      for (size_t j = 0; j < elems.size(); ++j) {
        if (g[b](i, j) == Complex(0)) continue;
        total += g[b](i, j) * a.eval(pop_entry_monomial(elems[i], elems[j]));
      }
  }
  return total;
}

}  // namespace werner
