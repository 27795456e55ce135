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
#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace werner {

/// Largest supported arity. n! = 40320 is the regular-representation size.
inline constexpr int kMaxArity = 8;

inline void check_arity(int n) {
  if (n < 1 || n > kMaxArity) {
    throw std::out_of_range("arity n=" + std::to_string(n) + " outside the supported range 1.." +
                            std::to_string(kMaxArity));
  }
}

inline long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Weakly decreasing positive parts. Labels irreps and cycle types.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1]) {
        throw std::invalid_argument("partition parts must be weakly decreasing");
      }
    }
  }

  const std::vector<int>& parts() const { return parts_; }
  int height() const { return static_cast<int>(parts_.size()); }
  int size() const {
    int s = 0;
    for (int p : parts_) s += p;
    return s;
  }
  int operator[](size_t i) const { return parts_[i]; }

  std::string to_string() const {
    std::string s = "(";
    for (size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  friend auto operator<=>(const Partition&, const Partition&) = default;
  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
};

namespace detail {
inline void partitions_rec(int rem, int max_part, std::vector<int>& cur,
                           std::vector<Partition>& out) {
  if (rem == 0) {
    out.emplace_back(cur);
    return;
  }
  for (int k = std::min(rem, max_part); k >= 1; --k) {
    cur.push_back(k);
    partitions_rec(rem - k, k, cur, out);
    cur.pop_back();
  }
}
}  // namespace detail

/// All partitions of n in reverse-lexicographic order: (n), (n-1,1), ..., (1^n).
inline std::vector<Partition> partitions(int n) {
  check_arity(n);
  std::vector<Partition> out;
  std::vector<int> cur;
  detail::partitions_rec(n, n, cur, out);
  return out;
}

/// A permutation of {0..n-1} stored in one-line notation. Text I/O is 1-based.
///
/// Products compose right to left: (a * b)(i) = a(b(i)).
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n) {
    check_arity(n);
    Permutation p;
    p.n_ = static_cast<std::uint8_t>(n);
    for (int i = 0; i < n; ++i) p.img_[i] = static_cast<std::uint8_t>(i);
    return p;
  }

  /// From one-line images; `one_based` selects the {1..n} convention.
  static Permutation from_images(std::span<const int> images, bool one_based = true) {
    const int n = static_cast<int>(images.size());
    check_arity(n);
    Permutation p;
    p.n_ = static_cast<std::uint8_t>(n);
    std::array<bool, kMaxArity> seen{};
    for (int i = 0; i < n; ++i) {
      int v = images[i] - (one_based ? 1 : 0);
      if (v < 0 || v >= n || seen[v]) {
        throw std::invalid_argument("one-line notation is not a bijection on {1.." +
                                    std::to_string(n) + "}");
      }
      seen[v] = true;
      p.img_[i] = static_cast<std::uint8_t>(v);
    }
    return p;
  }

  static Permutation from_images(std::initializer_list<int> images, bool one_based = true) {
    std::vector<int> v(images);
    return from_images(std::span<const int>(v), one_based);
  }

  /// From disjoint cycles given with 1-based points.
  static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    Permutation p = identity(n);
    std::array<bool, kMaxArity> used{};
    for (const auto& c : cycles) {
      for (size_t k = 0; k < c.size(); ++k) {
        int a = c[k] - 1;
        int b = c[(k + 1) % c.size()] - 1;
        if (a < 0 || a >= n || b < 0 || b >= n) throw std::invalid_argument("cycle point out of range");
        if (used[a]) throw std::invalid_argument("cycles are not disjoint");
        used[a] = true;
        p.img_[a] = static_cast<std::uint8_t>(b);
      }
    }
    return p;
  }

  /// Parses cycle notation such as "(12)(34)", "(1 2)(3,4)" or "id".
  static Permutation parse_cycles(int n, std::string_view text) {
    std::vector<std::vector<int>> cycles;
    size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip_ws();
    if (text.substr(i) == "id" || text.substr(i) == "e" || text.substr(i).empty()) return identity(n);
    while (i < text.size()) {
      skip_ws();
      if (i >= text.size()) break;
      if (text[i] != '(') throw std::invalid_argument("expected '(' in cycle notation");
      size_t close = text.find(')', i);
      if (close == std::string_view::npos) throw std::invalid_argument("unterminated cycle");
      std::string_view body = text.substr(i + 1, close - i - 1);
      std::vector<int> cyc;
      bool separated = body.find_first_of(" ,") != std::string_view::npos;
      if (separated) {
        std::string tok;
        for (char ch : std::string(body) + " ") {
          if (ch == ' ' || ch == ',') {
            if (!tok.empty()) cyc.push_back(std::stoi(tok));
            tok.clear();
          } else {
            tok += ch;
          }
        }
      } else {
        for (char ch : body) {
          if (ch < '0' || ch > '9') throw std::invalid_argument("bad character in cycle");
          cyc.push_back(ch - '0');
        }
      }
      if (!cyc.empty()) cycles.push_back(cyc);
      i = close + 1;
    }
    return from_cycles(n, cycles);
  }

  int size() const { return n_; }
  int operator()(int i) const { return img_[i]; }

  std::vector<int> one_line() const {
    std::vector<int> v(n_);
    for (int i = 0; i < n_; ++i) v[i] = img_[i] + 1;
    return v;
  }

  bool is_identity() const {
    for (int i = 0; i < n_; ++i)
      if (img_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    Permutation p;
    p.n_ = n_;
    for (int i = 0; i < n_; ++i) p.img_[img_[i]] = static_cast<std::uint8_t>(i);
    return p;
  }

  friend Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.n_ != b.n_) throw std::invalid_argument("composing permutations of different arity");
    Permutation p;
    p.n_ = a.n_;
    for (int i = 0; i < a.n_; ++i) p.img_[i] = a.img_[b.img_[i]];
    return p;
  }

  /// Cycles (0-based points), each starting at its smallest point, ordered by
  /// that point. Fixed points are included as 1-cycles.
  std::vector<std::vector<int>> cycles() const {
    std::vector<std::vector<int>> out;
    std::array<bool, kMaxArity> seen{};
    for (int i = 0; i < n_; ++i) {
      if (seen[i]) continue;
      std::vector<int> c;
      for (int j = i; !seen[j]; j = img_[j]) {
        seen[j] = true;
        c.push_back(j);
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  int num_cycles() const { return static_cast<int>(cycles().size()); }

  Partition cycle_type() const {
    std::vector<int> lens;
    for (const auto& c : cycles()) lens.push_back(static_cast<int>(c.size()));
    std::sort(lens.rbegin(), lens.rend());
    return Partition(lens);
  }

  int sign() const { return ((n_ - num_cycles()) % 2 == 0) ? 1 : -1; }

  /// Cycle notation with 1-based points, omitting fixed points: "(12)(34)", "id".
  std::string to_string() const {
    std::string s;
    for (const auto& c : cycles()) {
      if (c.size() == 1) continue;
      s += "(";
      for (size_t k = 0; k < c.size(); ++k) {
        if (n_ > 9 && k) s += " ";
        s += std::to_string(c[k] + 1);
      }
      s += ")";
    }
    return s.empty() ? "id" : s;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) {
    if (a.n_ != b.n_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.img_[i] != b.img_[i]) return false;
    return true;
  }
  friend std::strong_ordering operator<=>(const Permutation& a, const Permutation& b) {
    if (a.n_ != b.n_) return a.n_ <=> b.n_;
    for (int i = 0; i < a.n_; ++i)
      if (a.img_[i] != b.img_[i]) return a.img_[i] <=> b.img_[i];
    return std::strong_ordering::equal;
  }

  size_t hash() const {
    size_t h = n_;
    for (int i = 0; i < n_; ++i) h = h * 131 + img_[i];
    return h;
  }

 private:
  std::uint8_t n_ = 0;
  std::array<std::uint8_t, kMaxArity> img_{};
};

/// S_n in lexicographic order of one-line notation (identity first).
inline std::vector<Permutation> all_permutations(int n) {
  check_arity(n);
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  std::vector<Permutation> out;
  out.reserve(factorial(n));
  do {
    out.push_back(Permutation::from_images(std::span<const int>(v), false));
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

/// Position of `p` in all_permutations(p.size()) (Lehmer code).
inline long permutation_rank(const Permutation& p) {
  const int n = p.size();
  long rank = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (p(j) < p(i)) ++smaller;
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

}  // namespace werner

template <>
struct std::hash<werner::Permutation> {
  size_t operator()(const werner::Permutation& p) const noexcept { return p.hash(); }
};
