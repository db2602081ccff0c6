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

// Data-parallel inner loops of the population dynamics. Each kernel has a
// portable scalar reference and, on x86-64, an AVX2 variant; the active
// implementation is chosen once at run time from the CPU features and the
// HBAC_SIMD environment variable ("scalar" forces the reference path).
//
// The element-wise kernels (reset_split, tsac_fused, two_sort_inplace,
// transfer_apply, pair_sums) produce bit-identical results on every backend.
// Reductions (sum, l1_distance) may differ in the last bits because the
// summation order differs.

#include <cstddef>
#include <span>
#include <string_view>

namespace hbac::kernels {

enum class Backend { kScalar, kAvx2 };

struct KernelTable {
  Backend backend;
  std::string_view name;

  /// out[2k] = (in[2k]+in[2k+1])*up, out[2k+1] = (in[2k]+in[2k+1])*down.
  void (*reset_split)(std::span<const double> in, std::span<double> out, double up,
                      double down);
  /// Swaps (j, j+1) for every odd j <= size-3; size must be even and >= 2.
  void (*two_sort_inplace)(std::span<double> v);
  /// two_sort(reset_split(in)) in one pass.
  void (*tsac_fused)(std::span<const double> in, std::span<double> out, double up,
                     double down);
  /// out = T p for the two-sort transfer matrix; size >= 2.
  void (*transfer_apply)(std::span<const double> p, std::span<double> out, double up,
                         double down);
  /// out[k] = in[2k] + in[2k+1].
  void (*pair_sums)(std::span<const double> in, std::span<double> out);
  double (*sum)(std::span<const double> v);
  /// sum |a_i - b_i|.
  double (*l1_distance)(std::span<const double> a, std::span<const double> b);
  void (*scale)(std::span<double> v, double factor);
};

const KernelTable& scalar_table();
/// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

}  // namespace hbac::kernels
