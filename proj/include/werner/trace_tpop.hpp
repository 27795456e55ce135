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

// The trace algebra over the projection monoid (reduced words in idempotent
// letters x_1..x_n, cyclic trace symbols), the scaled trace polynomials t_w,
// and the noncommutative hierarchy SDP-TPOP.

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "werner/group_algebra.hpp"
#include "werner/sdp_problem.hpp"
#include "werner/werner_rep.hpp"

namespace werner {

/// A word over {0..n-1} (printed 1-based) without equal consecutive letters.
struct ReducedWord {
  std::vector<std::uint8_t> letters;

  ReducedWord() = default;
  /// Reduces the given letters (consecutive repetitions collapse, x^2 = x).
  explicit ReducedWord(const std::vector<int>& raw) {
    for (int x : raw) push(x);
  }

  void push(int x) {
    if (x < 0 || x >= kMaxArity) throw std::out_of_range("letter out of range");
    if (letters.empty() || letters.back() != x) letters.push_back(static_cast<std::uint8_t>(x));
  }

  bool empty() const { return letters.empty(); }
  int size() const { return static_cast<int>(letters.size()); }

  ReducedWord reversed() const {
    ReducedWord r;
    r.letters.assign(letters.rbegin(), letters.rend());
    return r;
  }

  /// "x1x2x1"; the empty word prints as "1".
  std::string to_string() const {
    if (letters.empty()) return "1";
    std::string s;
    for (auto x : letters) s += "x" + std::to_string(x + 1);
    return s;
  }

  static ReducedWord parse(const std::string& text) {
    ReducedWord w;
    if (text == "1") return w;
    size_t i = 0;
    while (i < text.size()) {
      if (text[i] != 'x') throw std::invalid_argument("bad word '" + text + "'");
      size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j == i + 1) throw std::invalid_argument("bad word '" + text + "'");
      const int x = std::stoi(text.substr(i + 1, j - i - 1)) - 1;
      if (!w.letters.empty() && w.letters.back() == x) throw std::invalid_argument("word '" + text + "' is not reduced");
      w.push(x);
      i = j;
    }
    return w;
  }

  /// Length first, then lexicographic.
  friend bool operator<(const ReducedWord& a, const ReducedWord& b) {
    if (a.letters.size() != b.letters.size()) return a.letters.size() < b.letters.size();
    return a.letters < b.letters;
  }
  friend bool operator==(const ReducedWord& a, const ReducedWord& b) { return a.letters == b.letters; }
};

/// Reduced concatenation u v.
inline ReducedWord word_concat(const ReducedWord& u, const ReducedWord& v) {
  ReducedWord w = u;
  for (auto x : v.letters) w.push(x);
  return w;
}

/// Canonical representative of the cyclic class of a nonempty word: cyclic
/// reduction, then the least rotation; with `real` the reversed word's
/// rotations compete too.
inline ReducedWord cyclic_class(const ReducedWord& u, bool real = false) {
  if (u.empty()) throw std::invalid_argument("cyclic class of the empty word");
  std::vector<std::uint8_t> w = u.letters;
  while (w.size() > 1 && w.front() == w.back()) w.pop_back();
  auto least_rotation = [](const std::vector<std::uint8_t>& v) {
    std::vector<std::uint8_t> best = v, rot(v.size());
    for (size_t s = 1; s < v.size(); ++s) {
      std::rotate_copy(v.begin(), v.begin() + static_cast<long>(s), v.end(), rot.begin());
      if (rot < best) best = rot;
    }
    return best;
  };
  std::vector<std::uint8_t> best = least_rotation(w);
  if (real) {
    std::vector<std::uint8_t> rev(w.rbegin(), w.rend());
    best = std::min(best, least_rotation(rev));
  }
  ReducedWord out;
  out.letters = std::move(best);
  return out;
}

/// tr(s_1) ... tr(s_k) u with canonical, sorted cyclic classes s_i.
struct TracialWord {
  std::vector<ReducedWord> scalars;
  ReducedWord word;

  int length() const {
    int l = word.size();
    for (const auto& s : scalars) l += s.size();
    return l;
  }

  /// "1", "x1x2", "tr(x1x2)*tr(x3)", "tr(x1)*x2x3".
  std::string to_string() const {
    std::string s;
    for (const auto& c : scalars) s += (s.empty() ? "" : "*") + std::string("tr(") + c.to_string() + ")";
    if (!word.empty()) s += (s.empty() ? "" : "*") + word.to_string();
    return s.empty() ? "1" : s;
  }

  static TracialWord parse(const std::string& text) {
    TracialWord t;
    if (text == "1") return t;
    size_t i = 0;
    while (i < text.size()) {
      size_t j = text.find('*', i);
      if (j == std::string::npos) j = text.size();
      std::string part = text.substr(i, j - i);
      if (part.rfind("tr(", 0) == 0 && part.back() == ')') {
        if (!t.word.empty()) throw std::invalid_argument("trace factor after the word part in '" + text + "'");
        t.scalars.push_back(ReducedWord::parse(part.substr(3, part.size() - 4)));
      } else {
        if (!t.word.empty()) throw std::invalid_argument("two word parts in '" + text + "'");
        t.word = ReducedWord::parse(part);
      }
      i = j + 1;
    }
    return t;
  }

  /// Total length, then scalar part, then word part.
  friend bool operator<(const TracialWord& a, const TracialWord& b) {
    const int la = a.length(), lb = b.length();
    if (la != lb) return la < lb;
    if (a.scalars != b.scalars)
      return std::lexicographical_compare(a.scalars.begin(), a.scalars.end(), b.scalars.begin(), b.scalars.end());
    return a.word < b.word;
  }
  friend bool operator==(const TracialWord& a, const TracialWord& b) {
    return a.scalars == b.scalars && a.word == b.word;
  }
};

/// Sorted product of trace symbols; the key of a purely scalar monomial.
using TraceMonomial = std::vector<ReducedWord>;

inline std::string to_string(const TraceMonomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (const auto& c : m) s += (s.empty() ? "" : "*") + std::string("tr(") + c.to_string() + ")";
  return s;
}

/// Association from TracialWord keys (canonical) to coefficients.
template <typename S>
struct TracialPolynomial {
  std::map<TracialWord, S> terms;

  void add(const TracialWord& k, const S& c) {
    auto [it, inserted] = terms.emplace(k, c);
    if (!inserted) it->second += c;
  }
};

/// Reduced words of length exactly `len` over n letters, lexicographic order.
inline std::vector<ReducedWord> reduced_words(int n, int len) {
  std::vector<ReducedWord> out;
  if (len == 0) return {ReducedWord()};
  ReducedWord cur;
  std::function<void()> rec = [&]() {
    if (cur.size() == len) {
      out.push_back(cur);
      return;
    }
    for (int x = 0; x < n; ++x) {
      if (!cur.empty() && cur.letters.back() == x) continue;
      cur.letters.push_back(static_cast<std::uint8_t>(x));
      rec();
      cur.letters.pop_back();
    }
  };
  rec();
  return out;
}

/// Distinct cyclic classes of length <= max_len, in (length, lex) order.
inline std::vector<ReducedWord> cyclic_classes(int n, int max_len, bool real) {
  std::set<ReducedWord> cs;
  for (int l = 1; l <= max_len; ++l)
    for (const auto& w : reduced_words(n, l)) cs.insert(cyclic_class(w, real));
  return {cs.begin(), cs.end()};
}

/// All tracial words of total length <= level; with `real`, trace symbols of
/// u and u^dagger are identified.
inline std::vector<TracialWord> tracial_word_vector(int n, int level, bool real) {
  if (level < 0) throw std::invalid_argument("level must be nonnegative");
  check_arity(n);
  const auto classes = cyclic_classes(n, level, real);
  std::vector<TracialWord> out;
  std::vector<ReducedWord> cur;
  std::function<void(size_t, int)> rec = [&](size_t start, int used) {
    for (int l = 0; l + used <= level; ++l)
      for (const auto& u : reduced_words(n, l)) out.push_back(TracialWord{cur, u});
    for (size_t i = start; i < classes.size(); ++i) {
      if (classes[i].size() + used > level) continue;
      cur.push_back(classes[i]);
      rec(i, used + classes[i].size());
      cur.pop_back();
    }
  };
  rec(0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Canonical trace monomial from arbitrary class words.
inline TraceMonomial canonical_monomial(std::vector<ReducedWord> factors, bool real) {
  for (auto& f : factors) f = cyclic_class(f, real);
  std::sort(factors.begin(), factors.end());
  return factors;
}

/// Cycle words of sigma: (a, sigma(a), sigma^2(a), ...) for each cycle.
inline std::vector<ReducedWord> cycle_words(const Permutation& sigma) {
  std::vector<ReducedWord> out;
  for (const auto& c : sigma.cycles()) out.push_back(ReducedWord(std::vector<int>(c.begin(), c.end())));
  return out;
}

/// t_sigma = n^{N_cyc(sigma)} prod over cycles of tr(x_a x_sigma(a) ...).
inline TracialPolynomial<Rational> t_sigma(const Permutation& sigma, bool real = false) {
  TracialPolynomial<Rational> p;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(sigma.size()),
                static_cast<unsigned long>(sigma.num_cycles()));
  p.add(TracialWord{canonical_monomial(cycle_words(sigma), real), {}}, Rational(scale));
  return p;
}

template <typename S>
TracialPolynomial<S> t_element(const GroupAlgebraElement<S>& w, bool real = false) {
  TracialPolynomial<S> p;
  for (const auto& [sigma, c] : w.terms())
    for (const auto& [k, v] : t_sigma(sigma, real).terms) p.add(k, c * ScalarTraits<S>::from_rational(v));
  return p;
}

/// tr(wi^dagger wj) as a trace monomial. The dagger reverses wi's word and
/// replaces each of its trace symbols tr(s) by tr(s^dagger).
inline TraceMonomial gram_entry_key(const TracialWord& wi, const TracialWord& wj, bool real) {
  std::vector<ReducedWord> f;
  f.reserve(wi.scalars.size() + wj.scalars.size() + 1);
  for (const auto& s : wi.scalars) f.push_back(real ? s : s.reversed());
  for (const auto& s : wj.scalars) f.push_back(s);
  ReducedWord prod = word_concat(wi.word.reversed(), wj.word);
  if (!prod.empty()) f.push_back(prod);
  return canonical_monomial(std::move(f), real);
}

/// gram_entry_expand(wi, wj) = tr(wi^dagger wj) with coefficient 1.
inline TracialPolynomial<Rational> gram_entry_expand(const TracialWord& wi, const TracialWord& wj, bool real = false) {
  TracialPolynomial<Rational> p;
  p.add(TracialWord{gram_entry_key(wi, wj, real), {}}, Rational(1));
  return p;
}

enum class TraceMode { kNormalized, kUnnormalized };

inline bool is_projection(const Eigen::MatrixXcd& x, double tol = 1e-10) {
  return (x * x - x).norm() <= tol * std::max(1.0, x.norm()) && (x - x.adjoint()).norm() <= tol;
}

inline Eigen::MatrixXcd word_matrix(const ReducedWord& u, const std::vector<Eigen::MatrixXcd>& x) {
  const Eigen::Index dim = x.front().rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  for (auto l : u.letters) m = m * x.at(l);
  return m;
}

inline Complex trace_symbol(const ReducedWord& u, const std::vector<Eigen::MatrixXcd>& x, TraceMode mode) {
  Complex t = word_matrix(u, x).trace();
  return mode == TraceMode::kNormalized ? t / static_cast<double>(x.front().rows()) : t;
}

/// Value of a tracial word at a tuple of matrices: scalar factor times the
/// word's matrix product.
inline Eigen::MatrixXcd tracial_word_matrix(const TracialWord& w, const std::vector<Eigen::MatrixXcd>& x,
                                            TraceMode mode = TraceMode::kNormalized) {
  Complex s = 1;
  for (const auto& c : w.scalars) s *= trace_symbol(c, x, mode);
  return s * word_matrix(w.word, x);
}

/// Evaluates a polynomial whose keys are purely scalar (empty word parts are
/// required; a word part is traced by the outer trace map).
template <typename S>
Complex eval_tracial(const TracialPolynomial<S>& p, const std::vector<Eigen::MatrixXcd>& x,
                     TraceMode mode = TraceMode::kNormalized) {
  if (x.empty()) throw std::invalid_argument("empty matrix tuple");
  for (const auto& m : x)
    if (!is_projection(m)) throw std::invalid_argument("eval_tracial: input is not a projection");
  Complex total = 0;
  for (const auto& [k, c] : p.terms) {
    Complex v = 1;
    for (const auto& s : k.scalars) v *= trace_symbol(s, x, mode);
    if (!k.word.empty()) v *= trace_symbol(k.word, x, mode);
    total += ScalarTraits<S>::to_complex(c) * v;
  }
  return total;
}

/// T_sigma(X) = prod over cycles of tr(X_a X_sigma(a) ...), plain trace.
inline Complex trace_polynomial(const Permutation& sigma, const std::vector<Eigen::MatrixXcd>& x) {
  Complex v = 1;
  for (const auto& w : cycle_words(sigma)) v *= word_matrix(w, x).trace();
  return v;
}

template <typename S>
Complex trace_polynomial(const GroupAlgebraElement<S>& w, const std::vector<Eigen::MatrixXcd>& x) {
  Complex v = 0;
  for (const auto& [sigma, c] : w.terms()) v += ScalarTraits<S>::to_complex(c) * trace_polynomial(sigma, x);
  return v;
}

/// Haar-random orthogonal projection of the given rank on C^dim.
inline Eigen::MatrixXcd random_projection(int dim, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(dim, rank);
  return q * q.adjoint();
}

inline std::vector<Eigen::MatrixXcd> random_projections(int n, int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rank(0, dim);
  std::vector<Eigen::MatrixXcd> x;
  for (int i = 0; i < n; ++i) x.push_back(random_projection(dim, rank(rng), rng));
  return x;
}

struct TpopSizes {
  long block_size = 0;
  /// Distinct Gram-entry keys plus the pairing constraint (published convention).
  long equations = 0;
  /// Distinct keys of both sides (Gram entries and t_sigma) plus one.
  long assembled_equations = 0;
  /// Lower bound n((n-1)^l - 1)/(n-2) on the block size from the words alone.
  long word_lower_bound = 0;
};

inline long tpop_word_lower_bound(int n, int level) {
  long total = 0, term = n;
  for (int i = 1; i <= level; ++i) {
    total += term;
    term *= (n - 1);
  }
  return total;
}

namespace detail {

inline std::string encode(const TraceMonomial& m) {
  std::string s;
  for (const auto& w : m) {
    s.append(reinterpret_cast<const char*>(w.letters.data()), w.letters.size());
    s.push_back('\xff');
  }
  return s;
}

}  // namespace detail

inline TpopSizes tpop_sizes(int n, int level, bool real = false) {
  const auto words = tracial_word_vector(n, level, real);
  std::unordered_set<std::string> keys;
  for (const auto& a : words)
    for (const auto& b : words) keys.insert(detail::encode(gram_entry_key(a, b, real)));
  TpopSizes s;
  s.block_size = static_cast<long>(words.size());
  s.equations = static_cast<long>(keys.size()) + 1;
  for (const auto& sigma : all_permutations(n)) keys.insert(detail::encode(canonical_monomial(cycle_words(sigma), real)));
  s.assembled_equations = static_cast<long>(keys.size()) + 1;
  s.word_lower_bound = tpop_word_lower_bound(n, level);
  return s;
}

struct TpopOptions {
  /// Real w and real symmetric G, with u ~ u^dagger identified. Defaults to
  /// on when r is real.
  std::optional<bool> real_mode;
};

struct TpopInstance {
  SdpProblem problem;
  std::vector<TracialWord> basis;
};

inline TpopInstance assemble_tpop(const WernerStateParam& state, int level, const TpopOptions& opt = {}) {
  const int n = state.n();
  if (level < min_level(n)) {
    throw std::invalid_argument("level " + std::to_string(level) + " below ceil(n/2) = " +
                                std::to_string(min_level(n)));
  }
  const bool real = opt.real_mode.value_or(state.is_real());
  if (real && !state.is_real()) throw std::invalid_argument("real mode requires a real state parameter");

  TpopInstance inst;
  SdpProblem& p = inst.problem;
  p.hermitian = !real;
  p.hierarchy = Hierarchy::kTpop;
  p.n = n;
  p.level = level;
  p.real_mode = real;
  auto expansion = add_witness_coordinates(p, n, real);
  p.epsilon_var = p.add_free("epsilon");
  p.objective = {{p.epsilon_var, Rational(1)}};

  inst.basis = tracial_word_vector(n, level, real);
  PsdBlock block;
  block.size = static_cast<int>(inst.basis.size());
  for (const auto& w : inst.basis) block.labels.push_back(w.to_string());
  p.blocks.push_back(std::move(block));

  std::map<TraceMonomial, LinearConstraint> eqs;
  const int s = static_cast<int>(inst.basis.size());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      if (real && j < i) continue;
      auto& c = eqs[gram_entry_key(inst.basis[i], inst.basis[j], real)];
      c.gram.push_back({0, i, j, QComplex(1)});
      // Real symmetric G: G_ji = G_ij lands on the same merged key.
      if (real && j != i) c.gram.back().coeff = QComplex(2);
    }
  mpz_class scale;
  for (const auto& [sigma, terms] : expansion) {
    mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(sigma.num_cycles()));
    auto& c = eqs[canonical_monomial(cycle_words(sigma), real)];
    for (const auto& t : terms) c.free.push_back({t.var, -t.coeff * QComplex(Rational(scale))});
  }
  eqs[TraceMonomial{}].free.push_back({p.epsilon_var, QComplex(-1)});
  for (auto& [k, c] : eqs) {
    // Merge repeated free variables.
    std::map<int, QComplex> acc;
    for (const auto& f : c.free) acc[f.var] += f.coeff;
    c.free.clear();
    for (const auto& [v, q] : acc)
      if (!q.is_zero()) c.free.push_back({v, q});
    c.label = to_string(k);
    p.constraints.push_back(std::move(c));
  }
  p.constraints.push_back(pairing_constraint(state.r, expansion));
  return inst;
}

/// tr(W(X)^dagger G W(X)) with the normalized trace.
inline Complex tpop_gram_form(const TpopInstance& inst, const Eigen::MatrixXcd& g,
                              const std::vector<Eigen::MatrixXcd>& x) {
  std::vector<Eigen::MatrixXcd> vals;
  for (const auto& w : inst.basis) vals.push_back(tracial_word_matrix(w, x));
  const double dim = static_cast<double>(x.front().rows());
  Complex total = 0;
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = 0; j < vals.size(); ++j) {
      if (g(i, j) == Complex(0)) continue;
      total += g(i, j) * (vals[i].adjoint() * vals[j]).trace() / dim;
    }
  return total;
}

}  // namespace werner
