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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace hbac {

/// Number of distinct cycle lengths of a permutation, with and without the
/// length-1 cycles (fixed points).
struct Nbds {
  int incl_fixed = 0;
  int excl_fixed = 0;
  friend bool operator==(const Nbds&, const Nbds&) = default;
};

/// Bijection on {0, ..., size-1}. map[i] is the destination index of source i,
/// so applying it to a vector v gives w with w[map[i]] = v[i].
class Permutation {
 public:
  using Cycle = std::vector<std::size_t>;

  /// Throws ValidationError unless `map` is a bijection.
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t size);
  /// From a placement order: order[d] is the source that lands at position d.
  static Permutation from_order(std::span<const std::size_t> order);
  /// The two-sort relabeling: fixes 0 and size-1, swaps (j, j+1) for odd j.
  static Permutation two_sort(std::size_t size);

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  std::span<const std::size_t> map() const { return map_; }
  /// order()[d] = source placed at d.
  std::vector<std::size_t> order() const;

  bool is_identity() const;
  Permutation inverse() const;
  /// (this * other)(i) = this(other(i)): other is applied first.
  Permutation operator*(const Permutation& other) const;

  std::vector<double> apply(std::span<const double> v) const;

  /// Disjoint cycles covering every index; each starts at its minimum element
  /// and the list is ordered by that minimum. Fixed points are 1-cycles.
  std::vector<Cycle> cycles() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> map_;
};

}  // namespace hbac
