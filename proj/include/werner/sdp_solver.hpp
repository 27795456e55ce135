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

// Primal-dual interior-point solver for the conic model of sdp_problem.hpp.
//
// Standard form after realification:
//   minimize   <C, X> + c'x
//   subject to <A_i, X> + B_i x = b_i,  X = diag(X_1, ..., X_k) >= 0,  x free.
// The search direction is Nesterov-Todd with a Mehrotra predictor-corrector step; the
// free variables are handled by a bordered Schur complement system.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "werner/sdp_problem.hpp"

namespace werner {

struct SolverOptions {
  double tolerance = 1e-8;
  int max_iter = 50000;
  int verbosity = 0;
  /// When the iteration stalls, the best iterate is returned as kInaccurate if
  /// its residuals are below max(10 tolerance, 1e-7) and its relative gap is
  /// below this value.
  double acceptable_gap = 1e-6;
  /// Initial bound R on the total trace of the Gram blocks (0 picks
  /// 10 times the total block size). The bound is raised by 100x, up to
  /// three times, while it is active at the solution.
  double trace_bound = 0;
};

/// Real symmetric embedding [[A, -B], [B, A]] of G = A + iB.
inline Eigen::MatrixXd hermitian_embedding(const Eigen::MatrixXcd& g) {
  const Eigen::Index s = g.rows();
  Eigen::MatrixXd y(2 * s, 2 * s);
  y.topLeftCorner(s, s) = g.real();
  y.bottomRightCorner(s, s) = g.real();
  y.topRightCorner(s, s) = -g.imag();
  y.bottomLeftCorner(s, s) = g.imag();
  return y;
}

/// Inverse of the embedding, averaging over the complex structure so that any
/// symmetric PSD Y maps to a Hermitian PSD G.
inline Eigen::MatrixXcd hermitian_from_embedding(const Eigen::MatrixXd& y) {
  const Eigen::Index s = y.rows() / 2;
  Eigen::MatrixXd a = 0.5 * (y.topLeftCorner(s, s) + y.bottomRightCorner(s, s));
  Eigen::MatrixXd b = 0.5 * (y.bottomLeftCorner(s, s) - y.topRightCorner(s, s));
  Eigen::MatrixXcd g(s, s);
  g.real() = 0.5 * (a + a.transpose());
  g.imag() = 0.5 * (b - b.transpose());
  return g;
}

/// Hermitian blocks of size m become real symmetric blocks of size 2m and every
/// complex equation becomes its real and imaginary parts. Exact.
inline SdpProblem realify(const SdpProblem& p) {
  if (!p.hermitian) return p;
  SdpProblem q = p;
  q.hermitian = false;
  q.constraints.clear();
  for (auto& b : q.blocks) {
    std::vector<std::string> labels;
    for (const auto& l : b.labels) labels.push_back(l + ".re");
    for (const auto& l : b.labels) labels.push_back(l + ".im");
    b.labels = std::move(labels);
    b.size *= 2;
  }
  const Rational half(1, 2);
  for (const auto& c : p.constraints) {
    LinearConstraint re, im;
    re.label = c.label + ".re";
    im.label = c.label + ".im";
    re.rhs = QComplex(c.rhs.re);
    im.rhs = QComplex(c.rhs.im);
    for (const auto& t : c.gram) {
      const int s = p.blocks[t.block].size;
      const Rational& a = t.coeff.re;
      const Rational& b = t.coeff.im;
      // G_rc = A_rc + i B_rc with A_rc = (Y[r,c] + Y[r+s,c+s]) / 2 and
      // B_rc = (Y[r+s,c] - Y[r,c+s]) / 2; c G_rc = (aA - bB) + i(aB + bA).
      auto push = [&](LinearConstraint& into, int row, int col, const Rational& v) {
        if (v != 0) into.gram.push_back({t.block, row, col, QComplex(v)});
      };
      push(re, t.row, t.col, a * half);
      push(re, t.row + s, t.col + s, a * half);
      push(re, t.row + s, t.col, -b * half);
      push(re, t.row, t.col + s, b * half);
      push(im, t.row + s, t.col, a * half);
      push(im, t.row, t.col + s, -a * half);
      push(im, t.row, t.col, b * half);
      push(im, t.row + s, t.col + s, b * half);
    }
    // Y is symmetric: merge Y(p, q) with Y(q, p) and drop cancellations.
    for (auto* row : {&re, &im}) {
      std::map<std::tuple<int, int, int>, Rational> acc;
      for (const auto& t : row->gram) acc[{t.block, std::min(t.row, t.col), std::max(t.row, t.col)}] += t.coeff.re;
      row->gram.clear();
      for (const auto& [key, v] : acc)
        if (v != 0) row->gram.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), QComplex(v)});
    }
    for (const auto& f : c.free) {
      if (f.coeff.re != 0) re.free.push_back({f.var, QComplex(f.coeff.re)});
      if (f.coeff.im != 0) im.free.push_back({f.var, QComplex(f.coeff.im)});
    }
    if (!re.gram.empty() || !re.free.empty() || re.rhs.re != 0) q.constraints.push_back(std::move(re));
    if (!im.gram.empty() || !im.free.empty() || im.rhs.re != 0) q.constraints.push_back(std::move(im));
  }
  return q;
}

namespace detail {

/// Entry of a symmetric data matrix: A(r, c) = A(c, r) = v, r <= c.
struct SymEntry {
  int block;
  int r;
  int c;
  double v;
};

struct CoreRow {
  std::vector<SymEntry> a;
  std::vector<std::pair<int, double>> f;
  double b = 0;
};

struct CoreProblem {
  std::vector<int> sizes;
  int nfree = 0;
  std::vector<CoreRow> rows;
  std::vector<SymEntry> c_mat;
  std::vector<double> c_free;
};

struct CoreResult {
  SolveStatus status = SolveStatus::kFailed;
  std::vector<Eigen::MatrixXd> x_mat;
  Eigen::VectorXd x_free;
  double pobj = 0, dobj = 0;
  double pinf = 0, dinf = 0, gap = 0;
  int iterations = 0;
  std::string message;
};

/// Merges duplicate positions and drops zeros.
inline std::vector<SymEntry> canonical_entries(std::vector<SymEntry> e) {
  for (auto& x : e)
    if (x.r > x.c) std::swap(x.r, x.c);
  std::sort(e.begin(), e.end(), [](const SymEntry& a, const SymEntry& b) {
    return std::tie(a.block, a.r, a.c) < std::tie(b.block, b.r, b.c);
  });
  std::vector<SymEntry> out;
  for (const auto& x : e) {
    if (!out.empty() && out.back().block == x.block && out.back().r == x.r && out.back().c == x.c)
      out.back().v += x.v;
    else
      out.push_back(x);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const SymEntry& x) { return x.v == 0; }), out.end());
  return out;
}

/// Coordinates of a row in the space of (upper-triangle entries, free vars),
/// scaled so that the Euclidean inner product matches the trace inner product.
inline std::vector<std::pair<long, double>> row_vector(const CoreRow& row, const std::vector<long>& offsets,
                                                       long free_offset) {
  std::vector<std::pair<long, double>> v;
  for (const auto& e : row.a) {
    long idx = offsets[e.block] + static_cast<long>(e.c) * (e.c + 1) / 2 + e.r;
    v.push_back({idx, e.r == e.c ? e.v : std::sqrt(2.0) * e.v});
  }
  for (const auto& [j, c] : row.f) v.push_back({free_offset + j, c});
  std::sort(v.begin(), v.end());
  return v;
}

inline double sparse_dot(const std::vector<std::pair<long, double>>& a, const std::vector<std::pair<long, double>>& b) {
  double s = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first)
      ++i;
    else if (a[i].first > b[j].first)
      ++j;
    else
      s += a[i++].second * b[j++].second;
  }
  return s;
}

struct Presolved {
  std::vector<int> kept;
  bool consistent = true;
  std::string message;
};

/// Selects a maximal linearly independent subset of rows (pivoted Cholesky of
/// the row Gram matrix, per connected component) and checks that every
/// dropped row is consistent with the kept ones.
inline Presolved presolve(const CoreProblem& p, double tol) {
  Presolved out;
  const int m = static_cast<int>(p.rows.size());
  std::vector<long> offsets{0};
  for (int s : p.sizes) offsets.push_back(offsets.back() + static_cast<long>(s) * (s + 1) / 2);
  const long free_offset = offsets.back();
  std::vector<std::vector<std::pair<long, double>>> vecs(m);
  std::vector<double> norms(m);
  for (int i = 0; i < m; ++i) {
    vecs[i] = row_vector(p.rows[i], offsets, free_offset);
    norms[i] = std::sqrt(sparse_dot(vecs[i], vecs[i]));
  }
  // Union-find over rows sharing a coordinate.
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::unordered_map<long, int> owner;
  for (int i = 0; i < m; ++i)
    for (const auto& [idx, v] : vecs[i]) {
      auto [it, inserted] = owner.emplace(idx, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  std::map<int, std::vector<int>> comps;
  for (int i = 0; i < m; ++i) {
    if (norms[i] == 0) {
      if (std::abs(p.rows[i].b) > tol) {
        out.consistent = false;
        out.message = "equation with no variables has nonzero right-hand side";
      }
      continue;
    }
    comps[find(i)].push_back(i);
  }
  for (const auto& [root, rows] : comps) {
    const int k = static_cast<int>(rows.size());
    if (k == 1) {
      out.kept.push_back(rows[0]);
      continue;
    }
    // Normalized Gram matrix of the component.
    Eigen::MatrixXd g(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = a; b < k; ++b) {
        double v = sparse_dot(vecs[rows[a]], vecs[rows[b]]) / (norms[rows[a]] * norms[rows[b]]);
        g(a, b) = g(b, a) = v;
      }
    Eigen::VectorXd rhs(k);
    for (int a = 0; a < k; ++a) rhs[a] = p.rows[rows[a]].b / norms[rows[a]];
    // Greedy pivoted Cholesky: G = L L^T restricted to independent pivots.
    std::vector<int> piv;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd d = g.diagonal();
    std::vector<bool> used(k, false);
    const double drop = 1e-13;
    for (int step = 0; step < k; ++step) {
      int best = -1;
      double bv = drop;
      for (int a = 0; a < k; ++a)
        if (!used[a] && d[a] > bv) {
          bv = d[a];
          best = a;
        }
      if (best < 0) break;
      used[best] = true;
      const int col = static_cast<int>(piv.size());
      piv.push_back(best);
      const double root_d = std::sqrt(d[best]);
      for (int a = 0; a < k; ++a) {
        if (used[a] && a != best) continue;
        double v = g(a, best);
        for (int t = 0; t < col; ++t) v -= l(a, t) * l(best, t);
        l(a, col) = v / root_d;
      }
      for (int a = 0; a < k; ++a)
        if (!used[a]) d[a] -= l(a, col) * l(a, col);
    }
    for (int a : piv) out.kept.push_back(rows[a]);
    if (static_cast<int>(piv.size()) == k) continue;
    // Consistency of dropped rows: their rhs must equal the combination of
    // kept right-hand sides that reproduces the row.
    const int r = static_cast<int>(piv.size());
    Eigen::MatrixXd gk(r, r);
    Eigen::VectorXd bk(r);
    for (int a = 0; a < r; ++a) {
      bk[a] = rhs[piv[a]];
      for (int b = 0; b < r; ++b) gk(a, b) = g(piv[a], piv[b]);
    }
    Eigen::LDLT<Eigen::MatrixXd> f(gk);
    for (int a = 0; a < k; ++a) {
      if (used[a]) continue;
      Eigen::VectorXd ga(r);
      for (int b = 0; b < r; ++b) ga[b] = g(piv[b], a);
      Eigen::VectorXd lam = f.solve(ga);
      double pred = lam.dot(bk);
      if (std::abs(pred - rhs[a]) > 1e-7 * (1 + std::abs(rhs[a]))) {
        out.consistent = false;
        out.message = "inconsistent linear equations";
      }
    }
  }
  std::sort(out.kept.begin(), out.kept.end());
  return out;
}

/// Basis elements whose diagonal entry is forced to zero: a row with only
/// same-sign diagonal entries and zero right-hand side (and no free part)
/// forces each of those entries to vanish, and then the whole row and column
/// of X. Repeats until no new zero appears. Returns, per block, the indices
/// that survive.
inline std::vector<std::vector<int>> forced_zero_reduction(CoreProblem& p) {
  const int nb = static_cast<int>(p.sizes.size());
  std::vector<std::vector<bool>> dead(nb);
  for (int k = 0; k < nb; ++k) dead[k].assign(p.sizes[k], false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& row : p.rows) {
      if (!row.f.empty() || row.b != 0 || row.a.empty()) continue;
      bool all_diag = true, pos = false, neg = false;
      for (const auto& e : row.a) {
        if (e.r != e.c) all_diag = false;
        (e.v > 0 ? pos : neg) = true;
      }
      if (!all_diag || (pos && neg)) continue;
      for (const auto& e : row.a) dead[e.block][e.r] = true;
      changed = true;
    }
    if (!changed) break;
    for (auto& row : p.rows) {
      row.a.erase(std::remove_if(row.a.begin(), row.a.end(),
                                 [&](const SymEntry& e) { return dead[e.block][e.r] || dead[e.block][e.c]; }),
                  row.a.end());
    }
  }
  std::vector<std::vector<int>> keep(nb);
  std::vector<std::vector<int>> index(nb);
  for (int k = 0; k < nb; ++k) {
    index[k].assign(p.sizes[k], -1);
    for (int i = 0; i < p.sizes[k]; ++i)
      if (!dead[k][i]) {
        index[k][i] = static_cast<int>(keep[k].size());
        keep[k].push_back(i);
      }
  }
  // Blocks that lost every element are dropped; renumber the rest.
  std::vector<int> new_block(nb, -1);
  std::vector<int> sizes;
  for (int k = 0; k < nb; ++k)
    if (!keep[k].empty()) {
      new_block[k] = static_cast<int>(sizes.size());
      sizes.push_back(static_cast<int>(keep[k].size()));
    }
  auto remap = [&](std::vector<SymEntry>& v) {
    std::vector<SymEntry> out;
    for (auto e : v) {
      if (dead[e.block][e.r] || dead[e.block][e.c]) continue;
      e.r = index[e.block][e.r];
      e.c = index[e.block][e.c];
      e.block = new_block[e.block];
      out.push_back(e);
    }
    v = std::move(out);
  };
  for (auto& row : p.rows) remap(row.a);
  remap(p.c_mat);
  p.sizes = std::move(sizes);
  return keep;
}

inline double sym_dot(const std::vector<SymEntry>& a, const std::vector<Eigen::MatrixXd>& x) {
  double s = 0;
  for (const auto& e : a) s += (e.r == e.c ? 1.0 : 2.0) * e.v * x[e.block](e.r, e.c);
  return s;
}

inline void sym_add(std::vector<Eigen::MatrixXd>& out, const std::vector<SymEntry>& a, double scale) {
  for (const auto& e : a) {
    out[e.block](e.r, e.c) += scale * e.v;
    if (e.r != e.c) out[e.block](e.c, e.r) += scale * e.v;
  }
}

inline double frob(const std::vector<Eigen::MatrixXd>& x) {
  double s = 0;
  for (const auto& m : x) s += m.squaredNorm();
  return std::sqrt(s);
}

inline double inner(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

/// Largest step alpha <= 1 with X + alpha dX >= 0, given the Cholesky factor of X.
inline double max_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0;
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()[0];
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

inline CoreResult solve_reduced(const CoreProblem& prob, const SolverOptions& opt);

inline CoreResult solve_core(const CoreProblem& input, const SolverOptions& opt) {
  CoreProblem reduced = input;
  auto keep = forced_zero_reduction(reduced);
  CoreResult res = solve_reduced(reduced, opt);
  // Expand back to the original block structure with zero rows and columns.
  std::vector<Eigen::MatrixXd> full;
  int next = 0;
  for (size_t k = 0; k < input.sizes.size(); ++k) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(input.sizes[k], input.sizes[k]);
    if (!keep[k].empty()) {
      if (next < static_cast<int>(res.x_mat.size())) {
        const auto& xr = res.x_mat[next];
        for (size_t i = 0; i < keep[k].size(); ++i)
          for (size_t j = 0; j < keep[k].size(); ++j) x(keep[k][i], keep[k][j]) = xr(i, j);
      }
      ++next;
    }
    full.push_back(std::move(x));
  }
  res.x_mat = std::move(full);
  return res;
}

inline CoreResult solve_reduced(const CoreProblem& prob, const SolverOptions& opt) {
  CoreResult res;
  const int nb = static_cast<int>(prob.sizes.size());
  const int nf = prob.nfree;

  Presolved pre = presolve(prob, opt.tolerance);
  if (!pre.consistent) {
    res.status = SolveStatus::kInfeasible;
    res.message = pre.message;
    return res;
  }
  // Kept rows, normalized.
  std::vector<CoreRow> rows;
  for (int i : pre.kept) {
    CoreRow r = prob.rows[i];
    double nrm2 = 0;
    for (const auto& e : r.a) nrm2 += (e.r == e.c ? 1.0 : 2.0) * e.v * e.v;
    for (const auto& [j, c] : r.f) nrm2 += c * c;
    const double s = 1.0 / std::sqrt(nrm2);
    for (auto& e : r.a) e.v *= s;
    for (auto& f : r.f) f.second *= s;
    r.b *= s;
    rows.push_back(std::move(r));
  }
  const int m = static_cast<int>(rows.size());

  // Per-block row lists for the Schur complement.
  std::vector<std::vector<int>> rows_in_block(nb);
  for (int i = 0; i < m; ++i) {
    std::vector<bool> seen(nb, false);
    for (const auto& e : rows[i].a)
      if (!seen[e.block]) {
        seen[e.block] = true;
        rows_in_block[e.block].push_back(i);
      }
  }
  Eigen::MatrixXd bmat = Eigen::MatrixXd::Zero(m, nf);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    b[i] = rows[i].b;
    for (const auto& [j, c] : rows[i].f) bmat(i, j) += c;
  }
  Eigen::VectorXd cf = Eigen::VectorXd::Zero(nf);
  for (int j = 0; j < nf && j < static_cast<int>(prob.c_free.size()); ++j) cf[j] = prob.c_free[j];
  std::vector<Eigen::MatrixXd> cmat;
  for (int s : prob.sizes) cmat.push_back(Eigen::MatrixXd::Zero(s, s));
  sym_add(cmat, prob.c_mat, 1.0);

  long ntot = 0;
  for (int s : prob.sizes) ntot += s;
  const double bnorm = b.norm(), cnorm = std::sqrt(frob(cmat) * frob(cmat) + cf.squaredNorm());

  // Starting point.
  double xi = std::max(10.0, std::sqrt(static_cast<double>(ntot)));
  for (int i = 0; i < m; ++i) xi = std::max(xi, std::sqrt(static_cast<double>(ntot)) * (1 + std::abs(b[i])));
  double eta = std::max(10.0, std::sqrt(static_cast<double>(ntot)) * (1 + cnorm));
  std::vector<Eigen::MatrixXd> x, z;
  for (int s : prob.sizes) {
    x.push_back(xi * Eigen::MatrixXd::Identity(s, s));
    z.push_back(eta * Eigen::MatrixXd::Identity(s, s));
  }
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  auto apply_a = [&](const std::vector<Eigen::MatrixXd>& mat) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = sym_dot(rows[i].a, mat);
    return v;
  };
  auto apply_at = [&](const Eigen::VectorXd& yy) {
    std::vector<Eigen::MatrixXd> out;
    for (int s : prob.sizes) out.push_back(Eigen::MatrixXd::Zero(s, s));
    for (int i = 0; i < m; ++i)
      if (yy[i] != 0) sym_add(out, rows[i].a, yy[i]);
    return out;
  };

  int stalled = 0;
  struct Snapshot {
    double merit = std::numeric_limits<double>::infinity();
    std::vector<Eigen::MatrixXd> x;
    Eigen::VectorXd xf;
    double pinf = 0, dinf = 0, gap = 0, pobj = 0, dobj = 0;
  } best;
  double last_step = 1;
  double best_merit = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    // Residuals.
    Eigen::VectorXd rp = b - apply_a(x) - bmat * xf;
    std::vector<Eigen::MatrixXd> aty = apply_at(y);
    std::vector<Eigen::MatrixXd> rd(nb);
    for (int k = 0; k < nb; ++k) rd[k] = cmat[k] - aty[k] - z[k];
    Eigen::VectorXd rf = cf - bmat.transpose() * y;
    const double pobj = inner(cmat, x) + cf.dot(xf);
    const double dobj = b.dot(y);
    const double mu = inner(x, z) / static_cast<double>(std::max<long>(ntot, 1));
    res.pinf = (rp.array().abs() / (1 + b.array().abs())).maxCoeff();
    res.dinf = std::sqrt(frob(rd) * frob(rd) + rf.squaredNorm()) / (1 + cnorm);
    res.gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    res.pobj = pobj;
    res.dobj = dobj;
    if (opt.verbosity > 0) {
      std::fprintf(stderr, "%4d pobj % .9e dobj % .9e pinf %.2e dinf %.2e gap %.2e mu %.2e\n", it, pobj, dobj,
                   res.pinf, res.dinf, res.gap, mu);
    }
    if (res.pinf < opt.tolerance && res.dinf < opt.tolerance && res.gap < opt.tolerance) {
      res.status = SolveStatus::kOptimal;
      break;
    }
    // Infeasibility and unboundedness heuristics on diverging iterates.
    if (res.dinf < 1e-6 && dobj > 1e10 * (1 + std::abs(pobj)) && res.pinf > 1e-6) {
      res.status = SolveStatus::kInfeasible;
      res.message = "primal infeasible (dual ray)";
      break;
    }
    if (res.pinf < 1e-6 && pobj < -1e10 * (1 + std::abs(dobj))) {
      res.status = SolveStatus::kUnbounded;
      res.message = "primal unbounded";
      break;
    }
    const double merit = std::max({res.pinf, res.dinf, res.gap});
    if (merit < best.merit) {
      best = {merit, x, xf, res.pinf, res.dinf, res.gap, pobj, dobj};
    }
    if (merit < best_merit * 0.999) {
      best_merit = merit;
      stalled = 0;
    } else if (++stalled > 8) {
      res.message = "no progress";
      if (opt.verbosity > 2) {
        for (int k = 0; k < nb; ++k) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(x[k], Eigen::EigenvaluesOnly), ez(z[k], Eigen::EigenvaluesOnly);
          std::fprintf(stderr, "block %d size %d  x [%.2e %.2e]  z [%.2e %.2e]\n", k, prob.sizes[k], ex.eigenvalues()[0],
                       ex.eigenvalues()[prob.sizes[k] - 1], ez.eigenvalues()[0], ez.eigenvalues()[prob.sizes[k] - 1]);
        }
        std::fprintf(stderr, "|y| %.3e |xf| %.3e\n", y.norm(), xf.norm());
      }
      break;
    }

    // Nesterov-Todd scaling per block: X = L_x L_x^T, Z = L_z L_z^T,
    // L_z^T L_x = U diag(lambda) V^T, G = L_x V diag(lambda)^-1/2, W = G G^T.
    // Then G^T Z G = G^-1 X G^-T = diag(lambda) and W Z W = X.
    std::vector<Eigen::MatrixXd> gs(nb), ginv(nb), w(nb);
    std::vector<Eigen::VectorXd> lam(nb);
    bool ok = true;
    for (int k = 0; k < nb; ++k) {
      Eigen::LLT<Eigen::MatrixXd> lx(x[k]), lz(z[k]);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        ok = false;
        break;
      }
      Eigen::MatrixXd lxm = lx.matrixL(), lzm = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(lzm.transpose() * lxm, Eigen::ComputeFullU | Eigen::ComputeFullV);
      lam[k] = svd.singularValues();
      if (lam[k].minCoeff() <= 0) {
        ok = false;
        break;
      }
      Eigen::VectorXd is = lam[k].cwiseSqrt().cwiseInverse();
      gs[k] = lxm * svd.matrixV() * is.asDiagonal();
      // G^-1 = diag(lambda)^1/2 V^T L_x^-1 = diag(lambda)^-1/2 U^T L_z^T.
      ginv[k] = is.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
      w[k] = gs[k] * gs[k].transpose();
      w[k] = 0.5 * (w[k] + w[k].transpose());
    }
    if (!ok) {
      res.message = "lost positive definiteness";
      break;
    }
    // Schur complement M_ij = <A_i, W A_j W>.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (int k = 0; k < nb; ++k) {
      const auto& idx = rows_in_block[k];
      if (idx.empty()) continue;
      const int s = prob.sizes[k];
      for (int i : idx) {
        // P = W A_i W built from the rows of A_i W that are nonzero.
        std::vector<int> touched;
        std::unordered_map<int, int> pos;
        auto slot = [&](int r) {
          auto [itp, ins] = pos.emplace(r, static_cast<int>(touched.size()));
          if (ins) touched.push_back(r);
          return itp->second;
        };
        for (const auto& e : rows[i].a)
          if (e.block == k) {
            slot(e.r);
            slot(e.c);
          }
        Eigen::MatrixXd aw = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(touched.size()), s);
        for (const auto& e : rows[i].a) {
          if (e.block != k) continue;
          aw.row(pos[e.r]) += e.v * w[k].row(e.c);
          if (e.r != e.c) aw.row(pos[e.c]) += e.v * w[k].row(e.r);
        }
        Eigen::MatrixXd wcols(s, static_cast<Eigen::Index>(touched.size()));
        for (size_t t = 0; t < touched.size(); ++t) wcols.col(static_cast<Eigen::Index>(t)) = w[k].col(touched[t]);
        Eigen::MatrixXd pm = wcols * aw;
        for (int j : idx) {
          if (j < i) continue;
          double v = 0;
          for (const auto& e : rows[j].a) {
            if (e.block != k) continue;
            v += e.r == e.c ? e.v * pm(e.r, e.r) : e.v * (pm(e.r, e.c) + pm(e.c, e.r));
          }
          schur(i, j) += v;
          if (j != i) schur(j, i) += v;
        }
      }
    }
    // Bordered system [M B; B^T 0].
    const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
    schur.diagonal().array() += reg;
    Eigen::LLT<Eigen::MatrixXd> mfac(schur);
    if (mfac.info() != Eigen::Success) {
      res.message = "Schur complement not positive definite";
      break;
    }
    Eigen::MatrixXd minv_b = nf > 0 ? Eigen::MatrixXd(mfac.solve(bmat)) : Eigen::MatrixXd(m, 0);
    Eigen::MatrixXd sfree = bmat.transpose() * minv_b;
    Eigen::LDLT<Eigen::MatrixXd> sfac;
    if (nf > 0) sfac.compute(sfree);

    // Given the scaled right-hand side H, solves lambda o (dx~ + dz~) = H in
    // the scaled space (o the Jordan product) and returns the full step.
    auto direction = [&](const std::vector<Eigen::MatrixXd>& hs, std::vector<Eigen::MatrixXd>& dx,
                         Eigen::VectorXd& dxf, Eigen::VectorXd& dy, std::vector<Eigen::MatrixXd>& dz) {
      std::vector<Eigen::MatrixXd> rmat(nb), base(nb);
      for (int k = 0; k < nb; ++k) {
        const int s = prob.sizes[k];
        Eigen::MatrixXd sc(s, s);
        for (int i = 0; i < s; ++i)
          for (int j = 0; j < s; ++j) sc(i, j) = 2 * hs[k](i, j) / (lam[k][i] + lam[k][j]);
        rmat[k] = gs[k] * sc * gs[k].transpose();
        rmat[k] = 0.5 * (rmat[k] + rmat[k].transpose());
        base[k] = rmat[k] - w[k] * rd[k] * w[k];
        base[k] = 0.5 * (base[k] + base[k].transpose());
      }
      Eigen::VectorXd h = rp - apply_a(base);
      // [M B; B^T 0] [dy; dxf] = [h; rf], with two steps of iterative refinement.
      auto saddle = [&](const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& u,
                        Eigen::VectorXd& v) {
        if (nf > 0) {
          v = sfac.solve(bmat.transpose() * mfac.solve(r1) - r2);
          u = mfac.solve(r1 - bmat * v);
        } else {
          v = Eigen::VectorXd(0);
          u = mfac.solve(r1);
        }
      };
      saddle(h, rf, dy, dxf);
      std::vector<Eigen::MatrixXd> atdy = apply_at(dy);
      dz.resize(nb);
      dx.resize(nb);
      for (int k = 0; k < nb; ++k) {
        dz[k] = rd[k] - atdy[k];
        Eigen::MatrixXd t = rmat[k] - w[k] * dz[k] * w[k];
        dx[k] = 0.5 * (t + t.transpose());
      }
      // Refinement against the residual of the computed step. Near a
      // rank-deficient optimum W is badly conditioned and both the formed M
      // and R - W dZ W lose accuracy.
      for (int refine = 0; refine < 2; ++refine) {
        Eigen::VectorXd e1 = rp - apply_a(dx);
        if (nf > 0) e1 -= bmat * dxf;
        Eigen::VectorXd e2 = rf - bmat.transpose() * dy;
        Eigen::VectorXd cu, cv;
        saddle(e1, e2, cu, cv);
        dy += cu;
        if (nf > 0) dxf += cv;
        std::vector<Eigen::MatrixXd> atcu = apply_at(cu);
        for (int k = 0; k < nb; ++k) {
          dz[k] -= atcu[k];
          Eigen::MatrixXd t = w[k] * atcu[k] * w[k];
          dx[k] += 0.5 * (t + t.transpose());
        }
      }
    };

    // Predictor: H = -lambda^2.
    std::vector<Eigen::MatrixXd> hs(nb);
    for (int k = 0; k < nb; ++k) hs[k] = Eigen::MatrixXd(Eigen::VectorXd(-lam[k].array().square()).asDiagonal());
    std::vector<Eigen::MatrixXd> dx, dz;
    Eigen::VectorXd dxf, dy;
    direction(hs, dx, dxf, dy, dz);
    double ap = 1, ad = 1;
    for (int k = 0; k < nb; ++k) {
      ap = std::min(ap, max_step(x[k], dx[k]));
      ad = std::min(ad, max_step(z[k], dz[k]));
    }
    double mu_aff = 0;
    for (int k = 0; k < nb; ++k) mu_aff += (x[k] + ap * dx[k]).cwiseProduct(z[k] + ad * dz[k]).sum();
    mu_aff /= static_cast<double>(std::max<long>(ntot, 1));
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);
    // Corrector: H = sigma mu I - lambda^2 - dx~ o dz~ of the predictor step.
    const bool recenter = last_step < 0.2;
    if (recenter) sigma = std::max(sigma, 0.5);
    for (int k = 0; k < nb; ++k) {
      const int s = prob.sizes[k];
      hs[k] = sigma * mu * Eigen::MatrixXd::Identity(s, s);
      hs[k].diagonal() -= lam[k].array().square().matrix();
      if (!recenter) {
        Eigen::MatrixXd sx = ginv[k] * dx[k] * ginv[k].transpose();
        Eigen::MatrixXd sz = gs[k].transpose() * dz[k] * gs[k];
        hs[k] -= 0.5 * (sx * sz + sz * sx);
      }
    }
    direction(hs, dx, dxf, dy, dz);
    ap = 1;
    ad = 1;
    for (int k = 0; k < nb; ++k) {
      ap = std::min(ap, 0.95 * max_step(x[k], dx[k]));
      ad = std::min(ad, 0.95 * max_step(z[k], dz[k]));
    }
    if (opt.verbosity > 1) std::fprintf(stderr, "     sigma %.2e ap %.2e ad %.2e\n", sigma, ap, ad);
    if (ap < 1e-12 && ad < 1e-12) {
      res.message = "step length vanished";
      break;
    }
    for (int k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
    }
    xf += ap * dxf;
    y += ad * dy;
    last_step = std::min(ap, ad);
  }
  if (res.status != SolveStatus::kOptimal && res.status != SolveStatus::kInfeasible &&
      res.status != SolveStatus::kUnbounded && best.merit < std::numeric_limits<double>::infinity()) {
    // Return the best iterate seen; accept it at reduced accuracy when close.
    x = best.x;
    xf = best.xf;
    res.pinf = best.pinf;
    res.dinf = best.dinf;
    res.gap = best.gap;
    res.pobj = best.pobj;
    res.dobj = best.dobj;
    const double feas = std::max(10 * opt.tolerance, 1e-7);
    if (res.pinf < feas && res.dinf < feas && res.gap < opt.acceptable_gap) res.status = SolveStatus::kInaccurate;
  }
  if (res.status == SolveStatus::kFailed && res.message.empty()) res.message = "iteration limit";
  res.x_mat = std::move(x);
  res.x_free = std::move(xf);
  return res;
}

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace detail

/// Evaluates all constraints of the complex model at (G, x) and returns the
/// largest absolute residual.
inline double max_constraint_residual(const SdpProblem& p, const std::vector<Eigen::MatrixXcd>& g,
                                      const std::vector<double>& x) {
  double worst = 0;
  for (const auto& c : p.constraints) {
    Complex v = -ScalarTraits<QComplex>::to_complex(c.rhs);
    for (const auto& t : c.gram) v += ScalarTraits<QComplex>::to_complex(t.coeff) * g[t.block](t.row, t.col);
    for (const auto& f : c.free) v += ScalarTraits<QComplex>::to_complex(f.coeff) * x[f.var];
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

namespace detail {

/// Lowers a real model (after realify) to the core form. Extra 1x1 blocks are
/// appended for the epsilon floor and returned through `slack_blocks`.
inline CoreProblem lower(const SdpProblem& q, const std::vector<std::pair<int, double>>& objective,
                         std::vector<CoreRow> extra_rows, int extra_blocks) {
  CoreProblem c;
  for (const auto& b : q.blocks) c.sizes.push_back(b.size);
  for (int k = 0; k < extra_blocks; ++k) c.sizes.push_back(1);
  c.nfree = q.num_free();
  for (const auto& con : q.constraints) {
    if (con.rhs.im != 0) throw std::invalid_argument("real model has complex right-hand side");
    CoreRow row;
    row.b = to_double(con.rhs.re);
    for (const auto& t : con.gram) {
      if (t.coeff.im != 0) throw std::invalid_argument("real model has complex coefficient in " + con.label);
      double v = to_double(t.coeff.re);
      // c * Y(r, c) on a symmetric matrix: half on each off-diagonal twin.
      if (t.row == t.col)
        row.a.push_back({t.block, t.row, t.col, v});
      else
        row.a.push_back({t.block, std::min(t.row, t.col), std::max(t.row, t.col), 0.5 * v});
    }
    for (const auto& f : con.free) {
      if (f.coeff.im != 0) throw std::invalid_argument("real model has complex coefficient in " + con.label);
      row.f.push_back({f.var, to_double(f.coeff.re)});
    }
    row.a = canonical_entries(std::move(row.a));
    c.rows.push_back(std::move(row));
  }
  for (auto& r : extra_rows) c.rows.push_back(std::move(r));
  c.c_free.assign(c.nfree, 0.0);
  for (const auto& [j, v] : objective) c.c_free[j] += v;
  return c;
}

/// Adds sum_b tr(X_b) + s = R over the first `model_blocks` blocks and solves,
/// raising R while the bound is active. Without it the dual of the witness
/// problems has no interior point (zero-cost recession directions in w) and
/// the central path diverges.
inline CoreResult solve_with_trace_bound(CoreProblem core, int model_blocks, const SolverOptions& opt) {
  long total = 0;
  for (int k = 0; k < model_blocks; ++k) total += core.sizes[k];
  double bound = opt.trace_bound > 0 ? opt.trace_bound : 10.0 * static_cast<double>(std::max<long>(total, 1));
  const int slack = static_cast<int>(core.sizes.size());
  core.sizes.push_back(1);
  CoreRow row;
  for (int k = 0; k < model_blocks; ++k)
    for (int i = 0; i < core.sizes[k]; ++i) row.a.push_back({k, i, i, 1.0});
  row.a.push_back({slack, 0, 0, 1.0});
  core.rows.push_back(row);
  CoreResult r;
  for (int attempt = 0; attempt < 4; ++attempt) {
    core.rows.back().b = bound;
    r = solve_core(core, opt);
    if (r.x_mat.size() <= static_cast<size_t>(slack)) break;
    const double s = r.x_mat[slack](0, 0);
    if (s > 1e-4 * bound) break;
    if (attempt == 3) {
      r.message += (r.message.empty() ? "" : "; ") + std::string("trace bound active");
      break;
    }
    bound *= 100;
  }
  return r;
}

inline SdpSolution finish(const SdpProblem& p, const CoreResult& r, int num_blocks, double tol) {
  SdpSolution sol;
  sol.status = r.status;
  sol.iterations = r.iterations;
  sol.gap = r.gap;
  sol.dual_residual = r.dinf;
  sol.message = r.message;
  sol.free.assign(r.x_free.data(), r.x_free.data() + r.x_free.size());
  sol.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int k = 0; k < num_blocks && k < static_cast<int>(r.x_mat.size()); ++k) {
    Eigen::MatrixXcd g = p.hermitian ? hermitian_from_embedding(r.x_mat[k])
                                     : Eigen::MatrixXcd(0.5 * (r.x_mat[k] + r.x_mat[k].transpose()).cast<Complex>());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    sol.min_eigenvalue = std::min(sol.min_eigenvalue, es.eigenvalues()[0]);
    sol.gram.push_back(std::move(g));
  }
  if (sol.gram.size() == static_cast<size_t>(num_blocks) && !sol.free.empty()) {
    sol.primal_residual = max_constraint_residual(p, sol.gram, sol.free);
  }
  if (p.epsilon_var >= 0 && p.epsilon_var < static_cast<int>(sol.free.size())) sol.epsilon = sol.free[p.epsilon_var];
  sol.objective = r.pobj;
  (void)tol;
  return sol;
}

}  // namespace detail

/// Minimizes the model objective. For problems with an epsilon floor, a
/// solution sitting on the floor is reported as kUnbounded with objective
/// -infinity (the unfloored problem is unbounded, see assemble_pop).
inline SdpSolution solve(const SdpProblem& p, const SolverOptions& opt = {}) {
  const SdpProblem q = realify(p);
  std::vector<std::pair<int, double>> obj;
  for (const auto& [j, v] : p.objective) obj.push_back({j, detail::to_double(v)});
  std::vector<detail::CoreRow> extra;
  int extra_blocks = 0;
  if (p.epsilon_floor) {
    if (p.epsilon_var < 0) throw std::invalid_argument("epsilon floor without epsilon variable");
    // epsilon - s = floor with s >= 0 as a 1x1 block.
    detail::CoreRow row;
    row.f.push_back({p.epsilon_var, 1.0});
    row.a.push_back({static_cast<int>(q.blocks.size()), 0, 0, -1.0});
    row.b = detail::to_double(*p.epsilon_floor);
    extra.push_back(std::move(row));
    extra_blocks = 1;
  }
  detail::CoreProblem core = detail::lower(q, obj, std::move(extra), extra_blocks);
  detail::CoreResult r = detail::solve_with_trace_bound(std::move(core), static_cast<int>(q.blocks.size()), opt);
  SdpSolution sol = detail::finish(p, r, static_cast<int>(p.blocks.size()), opt.tolerance);
  if (sol.usable() && p.epsilon_floor) {
    const double floor = detail::to_double(*p.epsilon_floor);
    if (sol.epsilon - floor <= 1e-6 * (1 + std::abs(floor))) {
      sol.status = SolveStatus::kUnbounded;
      sol.objective = -std::numeric_limits<double>::infinity();
      sol.message = "epsilon reached its floor; the unfloored problem is unbounded below";
    }
  }
  return sol;
}

/// Fixes epsilon = theta and maximizes t subject to G - t I >= 0 (t <= 1).
/// Returns kOptimal with min_eigenvalue = t* when t* > 0 and kInfeasible when
/// no positive semidefinite G exists (t* < -tolerance).
inline SdpSolution solve_feasibility(const SdpProblem& p, const Rational& theta, const SolverOptions& opt = {}) {
  if (p.epsilon_var < 0) throw std::invalid_argument("problem has no epsilon variable");
  // G = G' + t I: each constraint gains t * (sum of its diagonal coefficients).
  SdpProblem f = p;
  f.epsilon_floor.reset();
  const int t_var = f.add_free("t");
  for (auto& c : f.constraints) {
    QComplex diag;
    std::vector<FreeTerm> free;
    for (const auto& term : c.gram)
      if (term.row == term.col) diag += term.coeff;
    for (const auto& term : c.free) {
      if (term.var == p.epsilon_var)
        c.rhs -= term.coeff * QComplex(theta);
      else
        free.push_back(term);
    }
    if (!diag.is_zero()) free.push_back({t_var, diag});
    c.free = std::move(free);
  }
  // epsilon itself stays a free variable with no remaining occurrences; pin it.
  LinearConstraint pin;
  pin.free.push_back({p.epsilon_var, QComplex(1)});
  pin.rhs = QComplex(theta);
  pin.label = "epsilon=theta";
  f.constraints.push_back(pin);
  f.objective = {{t_var, Rational(-1)}};

  const SdpProblem q = realify(f);
  detail::CoreRow cap;
  cap.f.push_back({t_var, 1.0});
  cap.a.push_back({static_cast<int>(q.blocks.size()), 0, 0, 1.0});
  cap.b = 1.0;
  detail::CoreProblem core = detail::lower(q, {{t_var, -1.0}}, {cap}, 1);
  detail::CoreResult r = detail::solve_with_trace_bound(std::move(core), static_cast<int>(q.blocks.size()), opt);
  SdpSolution sol = detail::finish(f, r, static_cast<int>(f.blocks.size()), opt.tolerance);
  const double t = sol.free.empty() ? 0 : sol.free[t_var];
  // Report the actual G = G' + t I and drop t from the free vector.
  for (auto& g : sol.gram) g += t * Eigen::MatrixXcd::Identity(g.rows(), g.cols());
  if (!sol.free.empty()) sol.free.pop_back();
  sol.epsilon = theta.get_d();
  sol.objective = t;
  if (!sol.gram.empty() && !sol.free.empty()) sol.primal_residual = max_constraint_residual(p, sol.gram, sol.free);
  sol.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& g : sol.gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    sol.min_eigenvalue = std::min(sol.min_eigenvalue, es.eigenvalues()[0]);
  }
  if (sol.usable() && t <= opt.tolerance) {
    sol.status = SolveStatus::kInfeasible;
    sol.message = "no positive semidefinite Gram matrix at this shift (max min-eigenvalue " + std::to_string(t) + ")";
  }
  return sol;
}

}  // namespace werner
