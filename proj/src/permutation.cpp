// Copyright 2026 The hbac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hbac/permutation.hpp"

#include "hbac/errors.hpp"

namespace hbac {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t d : map_) {
    if (d >= map_.size() || seen[d]) throw ValidationError("permutation map is not a bijection");
    seen[d] = true;
  }
}

Permutation Permutation::identity(std::size_t size) {
  std::vector<std::size_t> m(size);
  for (std::size_t i = 0; i < size; ++i) m[i] = i;
  return Permutation(std::move(m));
}

Permutation Permutation::from_order(std::span<const std::size_t> order) {
  std::vector<std::size_t> m(order.size(), order.size());
  for (std::size_t d = 0; d < order.size(); ++d) {
    if (order[d] >= order.size() || m[order[d]] != order.size()) {
      throw ValidationError("placement order is not a bijection");
    }
    m[order[d]] = d;
  }
  return Permutation(std::move(m));
}

Permutation Permutation::two_sort(std::size_t size) {
  std::vector<std::size_t> m(size);
  for (std::size_t i = 0; i < size; ++i) m[i] = i;
  for (std::size_t j = 1; j + 2 < size; j += 2) {
    m[j] = j + 1;
    m[j + 1] = j;
  }
  return Permutation(std::move(m));
}

std::vector<std::size_t> Permutation::order() const {
  std::vector<std::size_t> o(map_.size());
  for (std::size_t i = 0; i < map_.size(); ++i) o[map_[i]] = i;
  return o;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

Permutation Permutation::inverse() const { return Permutation(order()); }

Permutation Permutation::operator*(const Permutation& other) const {
  if (other.size() != size()) throw ValidationError("permutation size mismatch");
  std::vector<std::size_t> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = map_[other.map_[i]];
  return Permutation(std::move(m));
}

std::vector<double> Permutation::apply(std::span<const double> v) const {
  if (v.size() != size()) throw ValidationError("permutation/vector size mismatch");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[map_[i]] = v[i];
  return out;
}

std::vector<Permutation::Cycle> Permutation::cycles() const {
  std::vector<Cycle> result;
  std::vector<bool> seen(map_.size(), false);
  // Scanning starts in increasing order, so each cycle begins at its minimum.
  for (std::size_t start = 0; start < map_.size(); ++start) {
    if (seen[start]) continue;
    Cycle c;
    for (std::size_t j = start; !seen[j]; j = map_[j]) {
      seen[j] = true;
      c.push_back(j);
    }
    result.push_back(std::move(c));
  }
  return result;
}

}  // namespace hbac
