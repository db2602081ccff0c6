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

// Compiled with -mavx2. Only reached through avx2_table() after a CPU check.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "hbac/kernels.hpp"

namespace hbac::kernels {
namespace {

// Multiplies and adds are issued separately (no FMA) so that every
// element-wise kernel rounds exactly like the scalar reference.

void reset_split(std::span<const double> in, std::span<double> out, double up,
                 double down) {
  const std::size_t n = in.size();
  const __m256d w = _mm256_setr_pd(up, down, up, down);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(in.data() + i);
    // [a0+a1, a0+a1, a2+a3, a2+a3]
    const __m256d p = _mm256_hadd_pd(x, x);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(p, w));
  }
  for (; i < n; i += 2) {
    const double p = in[i] + in[i + 1];
    out[i] = p * up;
    out[i + 1] = p * down;
  }
}

void two_sort_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (n < 4) return;
  // Pairs (1,2),(3,4),... : process the window starting at odd j, four lanes
  // covering two pairs at a time.
  std::size_t j = 1;
  for (; j + 4 <= n - 1; j += 4) {
    const __m256d x = _mm256_loadu_pd(v.data() + j);
    _mm256_storeu_pd(v.data() + j, _mm256_permute_pd(x, 0b0101));
  }
  for (; j + 2 < n; j += 2) {
    const double t = v[j];
    v[j] = v[j + 1];
    v[j + 1] = t;
  }
}

void pair_sums(std::span<const double> in, std::span<double> out) {
  const std::size_t half = out.size();
  std::size_t k = 0;
  for (; k + 4 <= half; k += 4) {
    const __m256d a = _mm256_loadu_pd(in.data() + 2 * k);
    const __m256d b = _mm256_loadu_pd(in.data() + 2 * k + 4);
    // hadd gives [a0+a1, b0+b1, a2+a3, b2+b3]; reorder lanes to k order.
    const __m256d h = _mm256_hadd_pd(a, b);
    _mm256_storeu_pd(out.data() + k, _mm256_permute4x64_pd(h, 0b11011000));
  }
  for (; k < half; ++k) out[k] = in[2 * k] + in[2 * k + 1];
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
  const __m256d vu = _mm256_set1_pd(up);
  const __m256d vd = _mm256_set1_pd(down);
  std::size_t i = 1;
  for (; i + 4 <= n - 1; i += 4) {
    const __m256d lo = _mm256_loadu_pd(p.data() + i - 1);
    const __m256d hi = _mm256_loadu_pd(p.data() + i + 1);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_add_pd(_mm256_mul_pd(lo, vd), _mm256_mul_pd(hi, vu)));
  }
  for (; i + 1 < n; ++i) out[i] = p[i - 1] * down + p[i + 1] * up;
  out[n - 1] = (p[n - 2] + p[n - 1]) * down;
}

void tsac_fused(std::span<const double> in, std::span<double> out, double up,
                double down) {
  const std::size_t n = in.size();
  if (n < 8) {
    scalar_table().tsac_fused(in, out, up, down);
    return;
  }
  const std::size_t half = n / 2;
  // Stage the merged populations p_k, then interleave
  //   out[2k] = p_{k-1}*down, out[2k+1] = p_{k+1}*up   for 1 <= k <= half-2.
  thread_local std::vector<double> pbuf;
  pbuf.resize(half);
  pair_sums(in, pbuf);
  const double* p = pbuf.data();
  out[0] = p[0] * up;
  out[1] = p[1] * up;
  const __m256d vu = _mm256_set1_pd(up);
  const __m256d vd = _mm256_set1_pd(down);
  std::size_t k = 1;
  for (; k + 4 <= half - 1; k += 4) {
    const __m256d lo = _mm256_mul_pd(_mm256_loadu_pd(p + k - 1), vd);  // even slots
    const __m256d hi = _mm256_mul_pd(_mm256_loadu_pd(p + k + 1), vu);  // odd slots
    const __m256d a = _mm256_unpacklo_pd(lo, hi);  // [lo0, hi0, lo2, hi2]
    const __m256d b = _mm256_unpackhi_pd(lo, hi);  // [lo1, hi1, lo3, hi3]
    _mm256_storeu_pd(out.data() + 2 * k, _mm256_permute2f128_pd(a, b, 0x20));
    _mm256_storeu_pd(out.data() + 2 * k + 4, _mm256_permute2f128_pd(a, b, 0x31));
  }
  for (; k + 1 < half; ++k) {
    out[2 * k] = p[k - 1] * down;
    out[2 * k + 1] = p[k + 1] * up;
  }
  out[n - 2] = p[half - 2] * down;
  out[n - 1] = p[half - 1] * down;
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum(std::span<const double> v) {
  const std::size_t n = v.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(v.data() + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(v.data() + i + 4));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += v[i];
  return s;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i),
                                    _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

void scale(std::span<double> v, double factor) {
  const std::size_t n = v.size();
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(v.data() + i, _mm256_mul_pd(_mm256_loadu_pd(v.data() + i), f));
  }
  for (; i < n; ++i) v[i] *= factor;
}

constexpr KernelTable kAvx2{Backend::kAvx2, "avx2", reset_split, two_sort_inplace,
                            tsac_fused, transfer_apply, pair_sums, sum, l1_distance,
                            scale};

}  // namespace

const KernelTable& avx2_table_unchecked() { return kAvx2; }

}  // namespace hbac::kernels
