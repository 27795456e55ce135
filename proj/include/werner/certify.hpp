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

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "werner/exact_linalg.hpp"
#include "werner/group_algebra.hpp"
#include "werner/io.hpp"
#include "werner/rational.hpp"
#include "werner/sdp_problem.hpp"
#include "werner/werner_rep.hpp"

namespace werner {

inline const mpz_class kDefaultDenomBound("1000000000000");
inline constexpr int kRationalizeRetries = 3;
inline constexpr long kRetryDenomFactor = 1000;

/// How numeric values become rationals before the affine projection.
/// kCommonDenominator rounds to the nearest multiple of 1/denom_bound, which
/// keeps exact elimination on the projected G cheap; kContinuedFraction uses
/// per-entry best approximants with denominators at most denom_bound.
enum class Rounding { kCommonDenominator, kContinuedFraction };

inline Rational round_rational(double x, const mpz_class& denom_bound, Rounding mode) {
  if (mode == Rounding::kContinuedFraction) return best_rational(x, denom_bound);
  Rational scaled = exact_rational(x) * denom_bound + Rational(1, 2);
  mpz_class k;
  mpz_fdiv_q(k.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  Rational q(k, denom_bound);
  q.canonicalize();
  return q;
}

/// One stored Gram entry G_block(row, col), row <= col. The lower triangle
/// is the conjugate.
struct GramEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  QComplex value;
};

struct WitnessCertificate {
  Hierarchy hierarchy = Hierarchy::kNone;
  int n = 0;
  int level = 0;
  bool real_mode = false;
  /// Ordered basis labels, one list per PSD block.
  std::vector<std::vector<std::string>> basis;
  /// The SOS-side element w; the certified witness is w + theta id.
  ExactElement w{1};
  Rational theta;
  std::vector<GramEntry> gram;
  Json metadata = Json::object();

  ExactElement witness() const { return w + ExactElement::basis(Permutation::identity(n), QComplex(theta)); }

  RationalMatrix block_real(int b) const;
  QComplexMatrix block(int b) const {
    const size_t s = basis.at(b).size();
    QComplexMatrix g(s, s);
    for (const auto& e : gram) {
      if (e.block != b) continue;
      g(e.row, e.col) = e.value;
      g(e.col, e.row) = conj(e.value);
    }
    return g;
  }
};

// ---------------------------------------------------------------------------
// Exact affine projection.

/// sum coeffs[k].second * x[coeffs[k].first] = rhs.
struct AffineRow {
  std::vector<std::pair<int, Rational>> coeffs;
  Rational rhs;
};

namespace detail {

/// Solves the (possibly singular) symmetric system M y = r exactly.
/// Dependent rows must have consistent right-hand sides.
inline std::vector<Rational> solve_consistent(RationalMatrix m, std::vector<Rational> r) {
  const size_t k = m.rows();
  std::vector<int> pivot_col(k, -1);
  size_t row = 0;
  for (size_t col = 0; col < k && row < k; ++col) {
    size_t p = row;
    while (p < k && sgn(m(p, col)) == 0) ++p;
    if (p == k) continue;
    if (p != row) {
      for (size_t j = 0; j < k; ++j) std::swap(m(row, j), m(p, j));
      std::swap(r[row], r[p]);
    }
    const Rational inv = 1 / m(row, col);
    for (size_t j = col; j < k; ++j) m(row, j) *= inv;
    r[row] *= inv;
    for (size_t i = 0; i < k; ++i) {
      if (i == row || sgn(m(i, col)) == 0) continue;
      const Rational f = m(i, col);
      for (size_t j = col; j < k; ++j) m(i, j) -= f * m(row, j);
      r[i] -= f * r[row];
    }
    pivot_col[row] = static_cast<int>(col);
    ++row;
  }
  for (size_t i = row; i < k; ++i)
    if (sgn(r[i]) != 0) throw std::runtime_error("project_affine: inconsistent constraint system");
  std::vector<Rational> y(k);
  for (size_t i = 0; i < row; ++i) y[pivot_col[i]] = r[i];
  return y;
}

}  // namespace detail

/// Exact least-squares projection of x onto {x : A x = b}:
/// x + A^T (A A^T)^+ (b - A x). Rows that share no variable are solved
/// independently, so block-sparse systems stay cheap.
inline std::vector<Rational> project_affine(std::vector<Rational> x, const std::vector<AffineRow>& rows) {
  const int m = static_cast<int>(rows.size());
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  std::map<int, int> owner;
  for (int i = 0; i < m; ++i)
    for (const auto& [v, c] : rows[i].coeffs) {
      if (v < 0 || v >= static_cast<int>(x.size())) throw std::out_of_range("project_affine: variable index");
      auto [it, inserted] = owner.emplace(v, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  std::map<int, std::vector<int>> comps;
  for (int i = 0; i < m; ++i) comps[find(i)].push_back(i);

  for (const auto& [root, idx] : comps) {
    const size_t k = idx.size();
    std::vector<std::map<int, Rational>> a(k);
    std::vector<Rational> resid(k);
    for (size_t i = 0; i < k; ++i) {
      const auto& row = rows[idx[i]];
      for (const auto& [v, c] : row.coeffs) a[i][v] += c;
      resid[i] = row.rhs;
      for (const auto& [v, c] : a[i]) resid[i] -= c * x[v];
    }
    if (std::all_of(resid.begin(), resid.end(), [](const Rational& q) { return sgn(q) == 0; })) continue;
    RationalMatrix gram(k, k);
    for (size_t i = 0; i < k; ++i)
      for (size_t j = i; j < k; ++j) {
        Rational s = 0;
        const auto& small = a[i].size() <= a[j].size() ? a[i] : a[j];
        const auto& large = a[i].size() <= a[j].size() ? a[j] : a[i];
        for (const auto& [v, c] : small) {
          auto it = large.find(v);
          if (it != large.end()) s += c * it->second;
        }
        gram(i, j) = s;
        gram(j, i) = s;
      }
    auto y = detail::solve_consistent(std::move(gram), std::move(resid));
    for (size_t i = 0; i < k; ++i) {
      if (sgn(y[i]) == 0) continue;
      for (const auto& [v, c] : a[i]) x[v] += c * y[i];
    }
  }
  return x;
}

/// Frobenius-nearest G with <A_k, G> = b_k for every constraint.
inline RationalMatrix project_affine(const RationalMatrix& g,
                                     const std::vector<std::pair<RationalMatrix, Rational>>& constraints) {
  const size_t r = g.rows(), c = g.cols();
  std::vector<Rational> x(r * c);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) x[i * c + j] = g(i, j);
  std::vector<AffineRow> rows;
  for (const auto& [a, b] : constraints) {
    if (a.rows() != r || a.cols() != c) throw std::invalid_argument("project_affine: constraint shape mismatch");
    AffineRow row;
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < c; ++j)
        if (sgn(a(i, j)) != 0) row.coeffs.push_back({static_cast<int>(i * c + j), a(i, j)});
    row.rhs = b;
    rows.push_back(std::move(row));
  }
  x = project_affine(std::move(x), rows);
  RationalMatrix out(r, c);
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) out(i, j) = x[i * c + j];
  return out;
}

inline RationalMatrix WitnessCertificate::block_real(int b) const {
  const size_t s = basis.at(b).size();
  RationalMatrix g(s, s);
  for (const auto& e : gram) {
    if (e.block != b) continue;
    if (!e.value.is_real()) throw std::invalid_argument("certificate block is not real");
    g(e.row, e.col) = e.value.re;
    g(e.col, e.row) = e.value.re;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Rationalization.

namespace detail {

/// Real coordinates of the variables of an SdpProblem: per block the
/// diagonal, then for each entry above it the real part and, for Hermitian
/// problems, the imaginary part; then the free variables.
struct VariableLayout {
  struct Entry {
    int block, row, col;
    bool imag;
  };
  std::vector<Entry> gram;
  std::map<std::tuple<int, int, int, bool>, int> index;
  int free_offset = 0;
  int total = 0;

  explicit VariableLayout(const SdpProblem& p) {
    for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b)
      for (int i = 0; i < p.blocks[b].size; ++i)
        for (int j = i; j < p.blocks[b].size; ++j) {
          add(b, i, j, false);
          if (p.hermitian && j != i) add(b, i, j, true);
        }
    free_offset = static_cast<int>(gram.size());
    total = free_offset + p.num_free();
  }
  void add(int b, int i, int j, bool im) {
    index[{b, i, j, im}] = static_cast<int>(gram.size());
    gram.push_back({b, i, j, im});
  }
  int at(int b, int i, int j, bool im) const { return index.at({b, i, j, im}); }
};

/// Real rows (real part, and imaginary part for Hermitian problems) of the
/// constraints with epsilon replaced by theta.
inline std::vector<AffineRow> real_rows(const SdpProblem& p, const VariableLayout& lay, const Rational& theta) {
  std::vector<AffineRow> out;
  for (const auto& c : p.constraints) {
    std::map<int, Rational> re, im;
    QComplex rhs = c.rhs;
    for (const auto& t : c.gram) {
      const int i = std::min(t.row, t.col), j = std::max(t.row, t.col);
      if (i == j) {
        const int v = lay.at(t.block, i, i, false);
        re[v] += t.coeff.re;
        im[v] += t.coeff.im;
        continue;
      }
      const int va = lay.at(t.block, i, j, false);
      // G(row, col) = a + ib above the diagonal, a - ib below it.
      const Rational sign = t.row < t.col ? Rational(1) : Rational(-1);
      re[va] += t.coeff.re;
      im[va] += t.coeff.im;
      if (p.hermitian) {
        const int vb = lay.at(t.block, i, j, true);
        re[vb] -= sign * t.coeff.im;
        im[vb] += sign * t.coeff.re;
      } else if (sgn(t.coeff.im) != 0) {
        throw std::invalid_argument("real problem with a complex Gram coefficient");
      }
    }
    for (const auto& f : c.free) {
      if (f.var == p.epsilon_var) {
        rhs -= f.coeff * QComplex(theta);
        continue;
      }
      re[lay.free_offset + f.var] += f.coeff.re;
      im[lay.free_offset + f.var] += f.coeff.im;
    }
    auto emit = [&](const std::map<int, Rational>& coeffs, const Rational& b) {
      AffineRow row;
      for (const auto& [v, q] : coeffs)
        if (sgn(q) != 0) row.coeffs.push_back({v, q});
      if (row.coeffs.empty()) {
        if (sgn(b) != 0) throw std::runtime_error("constraint '" + c.label + "' cannot hold at this shift");
        return;
      }
      row.rhs = b;
      out.push_back(std::move(row));
    };
    emit(re, rhs.re);
    if (p.hermitian) {
      emit(im, rhs.im);
    } else {
      for (const auto& [v, q] : im)
        if (sgn(q) != 0) throw std::invalid_argument("real problem with a complex free coefficient");
      if (sgn(rhs.im) != 0) throw std::invalid_argument("real problem with a complex right-hand side");
    }
  }
  return out;
}

}  // namespace detail

/// Rounds a numeric feasibility solution at shift theta to rationals with
/// denominators at most denom_bound and projects it exactly onto the affine
/// constraints. The witness coordinates are projected first onto the rows
/// that involve no Gram entry (the pairing row among them); with them fixed,
/// the Gram entries are projected onto the remaining rows. Returns nullopt
/// when the projected G is not exactly positive semidefinite.
inline std::optional<WitnessCertificate> rationalize_once(const SdpSolution& sol, const SdpProblem& p,
                                                          const Rational& theta, const mpz_class& denom_bound,
                                                          Rounding rounding = Rounding::kCommonDenominator) {
  if (sol.gram.size() != p.blocks.size() || static_cast<int>(sol.free.size()) != p.num_free()) {
    throw std::invalid_argument("rationalize: solution does not match the problem");
  }
  const detail::VariableLayout lay(p);
  std::vector<Rational> x(lay.total);
  for (int v = 0; v < lay.free_offset; ++v) {
    const auto& e = lay.gram[v];
    const Complex g = sol.gram[e.block](e.row, e.col);
    x[v] = round_rational(e.imag ? g.imag() : g.real(), denom_bound, rounding);
  }
  for (int j = 0; j < p.num_free(); ++j)
    x[lay.free_offset + j] = j == p.epsilon_var ? theta : round_rational(sol.free[j], denom_bound, rounding);

  const auto rows = detail::real_rows(p, lay, theta);
  std::vector<AffineRow> free_rows, gram_rows;
  for (const auto& r : rows) {
    const bool has_gram = std::any_of(r.coeffs.begin(), r.coeffs.end(),
                                      [&](const auto& t) { return t.first < lay.free_offset; });
    (has_gram ? gram_rows : free_rows).push_back(r);
  }
  x = project_affine(std::move(x), free_rows);
  for (auto& r : gram_rows) {
    AffineRow moved;
    moved.rhs = r.rhs;
    for (const auto& [v, c] : r.coeffs) {
      if (v < lay.free_offset)
        moved.coeffs.push_back({v, c});
      else
        moved.rhs -= c * x[v];
    }
    r = std::move(moved);
  }
  x = project_affine(std::move(x), gram_rows);

  WitnessCertificate cert;
  cert.hierarchy = p.hierarchy;
  cert.n = p.n;
  cert.level = p.level;
  cert.real_mode = !p.hermitian;
  cert.theta = theta;
  for (const auto& b : p.blocks) cert.basis.push_back(b.labels);
  std::vector<Rational> free(x.begin() + lay.free_offset, x.end());
  cert.w = witness_from_free_exact(p, free);
  for (int v = 0; v < lay.free_offset; ++v) {
    const auto& e = lay.gram[v];
    if (e.imag) continue;
    QComplex val(x[v]);
    if (p.hermitian && e.row != e.col) val.im = x[lay.at(e.block, e.row, e.col, true)];
    if (!val.is_zero()) cert.gram.push_back({e.block, e.row, e.col, val});
  }
  for (int b = 0; b < static_cast<int>(cert.basis.size()); ++b) {
    const bool psd = p.hermitian ? exact_psd(cert.block(b)) : exact_psd(cert.block_real(b));
    if (!psd) return std::nullopt;
  }
  cert.metadata["denom_bound"] = denom_bound.get_str();
  return cert;
}

/// rationalize_once with the retry schedule: the denominator bound grows by
/// a factor 1000 after each failure, up to kRationalizeRetries retries.
inline WitnessCertificate rationalize(const SdpSolution& sol, const SdpProblem& p, const Rational& theta,
                                      mpz_class denom_bound = kDefaultDenomBound,
                                      Rounding rounding = Rounding::kCommonDenominator) {
  for (int attempt = 0; attempt <= kRationalizeRetries; ++attempt) {
    if (auto c = rationalize_once(sol, p, theta, denom_bound, rounding)) return *c;
    denom_bound *= kRetryDenomFactor;
  }
  throw std::runtime_error("rationalization failed: projected Gram matrix is not positive semidefinite "
                           "(interior margin too small, raise theta)");
}

// ---------------------------------------------------------------------------
// Independent verification. The symbolic expansion below re-derives both
// sides from the stored labels and the permutation cycles only.

namespace verify_detail {

using Letters = std::vector<int>;
/// A product of trace symbols (sorted), as used for TPOP identities.
using TraceKey = std::vector<Letters>;
/// Exponents of Z_ij (i != j) in row-major order, for POP identities.
using ZKey = std::vector<int>;

inline Letters parse_letters(const std::string& s) {
  Letters out;
  if (s == "1") return out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] != 'x') throw std::invalid_argument("bad word '" + s + "'");
    size_t j = i + 1;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i + 1) throw std::invalid_argument("bad word '" + s + "'");
    out.push_back(std::stoi(s.substr(i + 1, j - i - 1)) - 1);
    i = j;
  }
  return out;
}

inline Letters reduce(const Letters& u) {
  Letters out;
  for (int l : u)
    if (out.empty() || out.back() != l) out.push_back(l);
  return out;
}

/// Minimum over all rotations of the cyclically reduced word.
inline Letters cyclic_canonical(Letters u) {
  u = reduce(u);
  while (u.size() > 1 && u.front() == u.back()) u.pop_back();
  Letters best = u;
  for (size_t k = 1; k < u.size(); ++k) {
    Letters r(u.begin() + static_cast<long>(k), u.end());
    r.insert(r.end(), u.begin(), u.begin() + static_cast<long>(k));
    best = std::min(best, r);
  }
  return best;
}

struct ParsedTracial {
  std::vector<Letters> scalars;
  Letters word;
};

inline ParsedTracial parse_tracial(const std::string& label) {
  ParsedTracial out;
  size_t pos = 0;
  while (pos <= label.size()) {
    size_t star = label.find('*', pos);
    std::string tok = label.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
    if (tok.rfind("tr(", 0) == 0 && tok.back() == ')') {
      out.scalars.push_back(parse_letters(tok.substr(3, tok.size() - 4)));
      if (out.scalars.back().empty()) throw std::invalid_argument("empty trace symbol in '" + label + "'");
    } else {
      out.word = parse_letters(tok);
    }
    if (star == std::string::npos) break;
    pos = star + 1;
  }
  return out;
}

/// tr(a^dagger b) as a sorted product of canonical trace symbols.
inline TraceKey tracial_pair_key(const ParsedTracial& a, const ParsedTracial& b) {
  TraceKey key;
  for (auto s : a.scalars) {
    std::reverse(s.begin(), s.end());
    key.push_back(cyclic_canonical(s));
  }
  for (const auto& s : b.scalars) key.push_back(cyclic_canonical(s));
  Letters prod(a.word.rbegin(), a.word.rend());
  prod.insert(prod.end(), b.word.begin(), b.word.end());
  prod = reduce(prod);
  if (!prod.empty()) key.push_back(cyclic_canonical(prod));
  std::sort(key.begin(), key.end());
  return key;
}

/// The cycle symbols (a, sigma(a), ...) of sigma.
inline TraceKey cycle_key(const Permutation& sigma) {
  const int n = sigma.size();
  std::vector<bool> seen(n, false);
  TraceKey key;
  for (int a = 0; a < n; ++a) {
    if (seen[a]) continue;
    Letters c;
    for (int b = a; !seen[b]; b = sigma(b)) {
      seen[b] = true;
      c.push_back(b);
    }
    key.push_back(cyclic_canonical(c));
  }
  std::sort(key.begin(), key.end());
  return key;
}

inline ZKey parse_zmonomial(int n, const std::string& s) {
  ZKey e(static_cast<size_t>(n * n), 0);
  if (s == "1") return e;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t star = s.find('*', pos);
    std::string tok = s.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
    int power = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      power = std::stoi(tok.substr(caret + 1));
      tok = tok.substr(0, caret);
    }
    bool bar = tok.rfind("zb", 0) == 0;
    std::string digits = tok.substr(bar ? 2 : 1);
    if (tok.empty() || tok[0] != 'z' || digits.size() != 2) throw std::invalid_argument("bad monomial '" + s + "'");
    int i = digits[0] - '1', j = digits[1] - '1';
    if (i < 0 || j < 0 || i >= n || j >= n || i >= j) throw std::invalid_argument("bad monomial '" + s + "'");
    // z_ij = Z(i, j) with i < j; its conjugate is Z(j, i).
    if (bar) std::swap(i, j);
    e[static_cast<size_t>(i * n + j)] += power;
    if (star == std::string::npos) break;
    pos = star + 1;
  }
  return e;
}

inline ZKey zconj(const ZKey& e, int n) {
  ZKey out(e.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[static_cast<size_t>(j * n + i)] = e[static_cast<size_t>(i * n + j)];
  return out;
}

}  // namespace verify_detail

struct VerificationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  bool ok() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  std::string to_string() const {
    std::string s;
    for (const auto& c : checks) s += (c.passed ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : ": " + c.detail) + "\n";
    return s;
  }
};

/// Re-derives the certificate identity from the stored basis labels and
/// checks it, the exact positivity of G, tau(r w) = -1, tau(r (w + theta)) < 0
/// and theta < 1. TPOP identities are checked with no dagger identification.
inline VerificationReport verify_certificate(const WitnessCertificate& c, const WernerStateParam& r) {
  namespace vd = verify_detail;
  VerificationReport rep;
  auto add = [&](std::string name, bool ok, std::string detail = "") {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
  };
  const int n = c.n;
  if (r.n() != n || c.w.n() != n) {
    add("arity", false, "state and certificate have different n");
    return rep;
  }
  add("witness self-adjoint", c.w == c.w.dagger());

  // Gram entries in range.
  bool in_range = true;
  for (const auto& e : c.gram) {
    if (e.block < 0 || e.block >= static_cast<int>(c.basis.size()) || e.row < 0 || e.row > e.col ||
        e.col >= static_cast<int>(c.basis[e.block].size()) || (e.row == e.col && !e.value.is_real())) {
      in_range = false;
    }
  }
  add("gram entries well-formed", in_range);
  if (!in_range) return rep;

  bool psd = true;
  for (int b = 0; b < static_cast<int>(c.basis.size()) && psd; ++b) psd = exact_psd(c.block(b));
  add("exact positive semidefinite", psd);

  try {
    if (c.hierarchy == Hierarchy::kTpop) {
      std::map<vd::TraceKey, QComplex> lhs, rhs;
      mpz_class scale;
      for (const auto& [sigma, coeff] : c.w.terms()) {
        const vd::TraceKey k = vd::cycle_key(sigma);
        mpz_ui_pow_ui(scale.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k.size()));
        lhs[k] += coeff * QComplex(Rational(scale));
      }
      lhs[{}] += QComplex(c.theta);
      std::vector<std::vector<vd::ParsedTracial>> parsed;
      for (const auto& blk : c.basis) {
        parsed.emplace_back();
        for (const auto& label : blk) parsed.back().push_back(vd::parse_tracial(label));
      }
      for (const auto& e : c.gram) {
        const auto& bs = parsed[e.block];
        rhs[vd::tracial_pair_key(bs[e.row], bs[e.col])] += e.value;
        if (e.row != e.col) rhs[vd::tracial_pair_key(bs[e.col], bs[e.row])] += conj(e.value);
      }
      std::erase_if(lhs, [](const auto& kv) { return kv.second.is_zero(); });
      std::erase_if(rhs, [](const auto& kv) { return kv.second.is_zero(); });
      add("tracial identity t_w + theta = tr(W* G W)", lhs == rhs,
          lhs == rhs ? std::to_string(lhs.size()) + " trace monomials" : "coefficients differ");
    } else if (c.hierarchy == Hierarchy::kPop) {
      std::map<vd::ZKey, QComplex> lhs, rhs;
      for (const auto& [sigma, coeff] : c.w.terms()) {
        vd::ZKey k(static_cast<size_t>(n * n), 0);
        for (int i = 0; i < n; ++i)
          if (sigma(i) != i) k[static_cast<size_t>(i * n + sigma(i))] += 1;
        lhs[k] += coeff;
      }
      lhs[vd::ZKey(static_cast<size_t>(n * n), 0)] += QComplex(c.theta);
      std::vector<std::vector<std::pair<vd::ZKey, int>>> parsed;
      for (const auto& blk : c.basis) {
        parsed.emplace_back();
        for (const auto& label : blk) {
          auto bar = label.rfind('|');
          if (bar == std::string::npos) throw std::invalid_argument("bad basis label '" + label + "'");
          const int slot = std::stoi(label.substr(bar + 1)) - 1;
          if (slot < 0 || slot >= n) throw std::invalid_argument("bad slot in '" + label + "'");
          parsed.back().push_back({vd::parse_zmonomial(n, label.substr(0, bar)), slot});
        }
      }
      // G_ab multiplies conj(m_a) m_b Z(slot_b, slot_a).
      auto entry = [&](const std::pair<vd::ZKey, int>& a, const std::pair<vd::ZKey, int>& b) {
        vd::ZKey k = vd::zconj(a.first, n);
        for (size_t t = 0; t < k.size(); ++t) k[t] += b.first[t];
        if (a.second != b.second) k[static_cast<size_t>(b.second * n + a.second)] += 1;
        return k;
      };
      for (const auto& e : c.gram) {
        const auto& bs = parsed[e.block];
        rhs[entry(bs[e.row], bs[e.col])] += e.value;
        if (e.row != e.col) rhs[entry(bs[e.col], bs[e.row])] += conj(e.value);
      }
      std::erase_if(lhs, [](const auto& kv) { return kv.second.is_zero(); });
      std::erase_if(rhs, [](const auto& kv) { return kv.second.is_zero(); });
      add("polynomial identity f_w + theta = quadratic-module form", lhs == rhs,
          lhs == rhs ? std::to_string(lhs.size()) + " monomials" : "coefficients differ");
    } else {
      add("identity", false, "unknown hierarchy");
    }
  } catch (const std::exception& e) {
    add("basis labels", false, e.what());
  }

  const QComplex pair = (r.r * c.w).tau();
  add("tau(r w) = -1", pair == QComplex(-1), to_string(pair.re));
  const QComplex shifted = (r.r * c.witness()).tau();
  add("tau(r (w + theta id)) < 0", shifted.is_real() && sgn(shifted.re) < 0, to_string(shifted.re));
  add("theta < 1", c.theta < 1, to_string(c.theta));
  return rep;
}

// ---------------------------------------------------------------------------
// Certificate files.

inline Json certificate_to_json(const WitnessCertificate& c) {
  Json doc;
  doc["format"] = "werner-certificate";
  doc["version"] = kFileFormatVersion;
  doc["hierarchy"] = to_string(c.hierarchy);
  doc["n"] = c.n;
  doc["level"] = c.level;
  doc["real_mode"] = c.real_mode;
  doc["theta"] = to_string(c.theta);
  Json blocks = Json::array();
  for (const auto& b : c.basis) blocks.push_back(Json{{"size", b.size()}, {"basis", b}});
  doc["blocks"] = blocks;
  doc["w"] = element_to_json(c.w, "witness")["coefficients"];
  Json g = Json::array();
  for (const auto& e : c.gram) {
    g.push_back(Json{{"block", e.block + 1},
                     {"row", e.row + 1},
                     {"col", e.col + 1},
                     {"re", to_string(e.value.re)},
                     {"im", to_string(e.value.im)}});
  }
  doc["gram"] = g;
  doc["metadata"] = c.metadata;
  return doc;
}

inline WitnessCertificate certificate_from_json(const Json& doc) {
  if (doc.value("format", std::string()) != "werner-certificate") {
    throw std::invalid_argument("not a werner-certificate document");
  }
  if (doc.value("version", 0) != kFileFormatVersion) throw std::invalid_argument("unsupported certificate version");
  WitnessCertificate c;
  c.hierarchy = parse_hierarchy(doc.at("hierarchy").get<std::string>());
  c.n = doc.at("n").get<int>();
  c.level = doc.at("level").get<int>();
  c.real_mode = doc.value("real_mode", false);
  c.theta = parse_rational(doc.at("theta").get<std::string>());
  for (const auto& b : doc.at("blocks")) {
    c.basis.push_back(b.at("basis").get<std::vector<std::string>>());
    if (b.contains("size") && b["size"].get<size_t>() != c.basis.back().size()) {
      throw std::invalid_argument("certificate block size does not match its basis");
    }
  }
  c.w = element_from_json(Json{{"n", c.n}, {"coefficients", doc.at("w")}});
  for (const auto& e : doc.at("gram")) {
    c.gram.push_back({e.at("block").get<int>() - 1, e.at("row").get<int>() - 1, e.at("col").get<int>() - 1,
                      QComplex(detail::json_rational(e.at("re"), "re"), detail::json_rational(e.value("im", Json("0")), "im"))});
  }
  c.metadata = doc.value("metadata", Json::object());
  return c;
}

inline void write_certificate(const std::string& path, const WitnessCertificate& c) {
  write_json_file(path, certificate_to_json(c));
}

inline WitnessCertificate read_certificate(const std::string& path) {
  try {
    return certificate_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed certificate: " + e.what());
  }
}

}  // namespace werner
