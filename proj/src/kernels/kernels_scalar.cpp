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

#include <cmath>

#include "hbac/kernels.hpp"

namespace hbac::kernels {
namespace {

void reset_split(std::span<const double> in, std::span<double> out, double up,
                 double down) {
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const double p = in[i] + in[i + 1];
    out[i] = p * up;
    out[i + 1] = p * down;
  }
}

void two_sort_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  for (std::size_t j = 1; j + 2 < n; j += 2) {
    const double t = v[j];
    v[j] = v[j + 1];
    v[j + 1] = t;
  }
}

// After reset the split array is zeta[2k] = p_k*up, zeta[2k+1] = p_k*down;
// the swap then gives out[0] = p_0*up, out[2k] = p_{k-1}*down and
// out[2k+1] = p_{k+1}*up in the interior, out[last] = p_{K-1}*down.
void tsac_fused(std::span<const double> in, std::span<double> out, double up,
                double down) {
  const std::size_t half = in.size() / 2;
  if (half == 1) {
    const double p = in[0] + in[1];
    out[0] = p * up;
    out[1] = p * down;
    return;
  }
  double prev = in[0] + in[1];
  double cur = in[2] + in[3];
  out[0] = prev * up;
  out[1] = cur * up;
  for (std::size_t k = 1; k + 1 < half; ++k) {
    const double next = in[2 * k + 2] + in[2 * k + 3];
    out[2 * k] = prev * down;
    out[2 * k + 1] = next * up;
    prev = cur;
    cur = next;
  }
  out[2 * half - 2] = prev * down;
  out[2 * half - 1] = cur * down;
}

void transfer_apply(std::span<const double> p, std::span<double> out, double up,
                    double down) {
  const std::size_t n = p.size();
  if (n == 2) {
    const double s = p[0] + p[1];
    out[0] = s * up;
    out[1] = s * down;
    return;
  }
  out[0] = (p[0] + p[1]) * up;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = p[i - 1] * down + p[i + 1] * up;
  }
  out[n - 1] = (p[n - 2] + p[n - 1]) * down;
}

void pair_sums(std::span<const double> in, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = in[2 * k] + in[2 * k + 1];
}

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void scale(std::span<double> v, double factor) {
  for (double& x : v) x *= factor;
}

constexpr KernelTable kScalar{Backend::kScalar, "scalar", reset_split, two_sort_inplace,
                              tsac_fused, transfer_apply, pair_sums, sum, l1_distance,
                              scale};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace hbac::kernels
