// Copyright 2026 The Sigrid Authors. All Rights Reserved.
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

#include <numeric>
#include <utility>
#include <vector>

namespace sigrid::detail {

// Disjoint sets with explicit merge direction: merge_into(a, b) makes b's
// root the representative, so callers control which id survives.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : UnionFind(std::vector<std::size_t>(n, 1)) {}

  // Each element starts with the given weight; roots carry the group total.
  explicit UnionFind(std::vector<std::size_t> weights)
      : parent_(weights.size()), size_(std::move(weights)) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  std::size_t merge_into(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return b;
    parent_[a] = b;
    size_[b] += size_[a];
    return b;
  }

  // Union where the smaller index stays the representative.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    return a < b ? merge_into(b, a) : merge_into(a, b);
  }

  std::size_t weight(std::size_t v) { return size_[find(v)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace sigrid::detail
