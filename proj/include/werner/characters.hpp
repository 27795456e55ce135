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

// Irreducible characters of S_n by the Murnaghan-Nakayama rule.

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "werner/permutation.hpp"

namespace werner {

namespace detail {

// Beta-set (first-column hook lengths) of a partition padded to `h` rows.
inline std::vector<int> beta_set(const std::vector<int>& parts, int h) {
  std::vector<int> b(h);
  for (int i = 0; i < h; ++i) {
    int p = i < static_cast<int>(parts.size()) ? parts[i] : 0;
    b[i] = p + (h - 1 - i);
  }
  return b;
}

inline std::vector<int> parts_from_beta(std::vector<int> b) {
  std::sort(b.rbegin(), b.rend());
  const int h = static_cast<int>(b.size());
  std::vector<int> parts;
  for (int i = 0; i < h; ++i) {
    int p = b[i] - (h - 1 - i);
    if (p > 0) parts.push_back(p);
  }
  return parts;
}

class CharacterMemo {
 public:
  static CharacterMemo& instance() {
    static CharacterMemo memo;
    return memo;
  }

  long get(const std::vector<int>& lambda, const std::vector<int>& mu) {
    if (mu.empty()) return 1;
    auto key = std::make_pair(lambda, mu);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = table_.find(key);
      if (it != table_.end()) return it->second;
    }
    long value = compute(lambda, mu);
    std::lock_guard<std::mutex> lock(mutex_);
    table_.emplace(std::move(key), value);
    return value;
  }

 private:
  long compute(const std::vector<int>& lambda, const std::vector<int>& mu) {
    const int k = mu.front();
    std::vector<int> rest(mu.begin() + 1, mu.end());
    const int h = static_cast<int>(lambda.size());
    std::vector<int> b = beta_set(lambda, h);
    long total = 0;
    for (int i = 0; i < h; ++i) {
      int target = b[i] - k;
      if (target < 0) continue;
      if (std::find(b.begin(), b.end(), target) != b.end()) continue;
      int between = 0;
      for (int x : b)
        if (x > target && x < b[i]) ++between;
      std::vector<int> nb = b;
      nb[i] = target;
      long sub = get(parts_from_beta(nb), rest);
      total += (between % 2 == 0) ? sub : -sub;
    }
    return total;
  }

  std::mutex mutex_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, long> table_;
};

}  // namespace detail

/// chi_lambda evaluated on the class of cycle type `ct`.
inline long character(const Partition& lambda, const Partition& ct) {
  if (lambda.size() != ct.size()) {
    throw std::invalid_argument("character: partitions " + lambda.to_string() + " and " +
                                ct.to_string() + " have different sizes");
  }
  check_arity(lambda.size());
  return detail::CharacterMemo::instance().get(lambda.parts(), ct.parts());
}

inline long character(const Partition& lambda, const Permutation& sigma) {
  return character(lambda, sigma.cycle_type());
}

/// Rows are irreps, columns are cycle types, both in partitions(n) order.
class CharacterTable {
 public:
  explicit CharacterTable(int n) : n_(n), labels_(partitions(n)) {
    const size_t k = labels_.size();
    values_.assign(k, std::vector<long>(k));
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j) values_[i][j] = character(labels_[i], labels_[j]);
  }

  int n() const { return n_; }
  const std::vector<Partition>& labels() const { return labels_; }
  long operator()(size_t row, size_t col) const { return values_[row][col]; }

  long at(const Partition& lambda, const Partition& ct) const {
    return values_.at(index(lambda)).at(index(ct));
  }

  size_t index(const Partition& p) const {
    auto it = std::find(labels_.begin(), labels_.end(), p);
    if (it == labels_.end()) throw std::invalid_argument("partition " + p.to_string() + " not in table");
    return static_cast<size_t>(it - labels_.begin());
  }

  /// Size of the conjugacy class with cycle type `ct`.
  static long class_size(const Partition& ct) {
    long denom = 1;
    std::map<int, int> mult;
    for (int p : ct.parts()) {
      denom *= p;
      ++mult[p];
    }
    for (auto [p, m] : mult) denom *= factorial(m);
    return factorial(ct.size()) / denom;
  }

 private:
  int n_;
  std::vector<Partition> labels_;
  std::vector<std::vector<long>> values_;
};

}  // namespace werner
