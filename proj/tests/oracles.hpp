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

// Reference computations written directly from the definitions, kept apart
// from the library so the tests do not check the code against itself.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hbac::testing {

inline double bath_up(double eps) { return std::exp(eps) / (std::exp(eps) + std::exp(-eps)); }
inline double bath_down(double eps) { return std::exp(-eps) / (std::exp(eps) + std::exp(-eps)); }

inline std::vector<double> random_simplex(std::size_t size, std::mt19937_64& gen) {
  std::exponential_distribution<double> dist(1.0);
  std::vector<double> v(size);
  double total = 0.0;
  for (auto& x : v) total += (x = dist(gen));
  for (auto& x : v) x /= total;
  return v;
}

/// Brute-force OAS: p0 e^{-2 eps k}, normalised by explicit summation.
inline std::vector<double> oas_bruteforce(int n, double eps) {
  const std::size_t k = std::size_t{1} << n;
  std::vector<double> v(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += (v[i] = std::exp(-2.0 * eps * static_cast<double>(i)));
  for (auto& x : v) x /= total;
  return v;
}

/// (1/2) ln(P0/P1) of qubit q (0 = most significant) by summing bits.
inline double polarization_bruteforce(const std::vector<double>& p, int num_qubits, int q) {
  double p0 = 0.0, p1 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    ((i >> (num_qubits - 1 - q)) & 1 ? p1 : p0) += p[i];
  }
  return 0.5 * std::log(p0 / p1);
}

/// Dense (n+1)-qubit two-sort matrix from its block structure diag(1, X, ..., X, 1).
inline Eigen::MatrixXd two_sort_dense(int num_qubits) {
  const Eigen::Index d = Eigen::Index{1} << num_qubits;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(d, d);
  u(0, 0) = 1.0;
  u(d - 1, d - 1) = 1.0;
  for (Eigen::Index j = 1; j + 1 < d; j += 2) {
    u(j, j + 1) = 1.0;
    u(j + 1, j) = 1.0;
  }
  return u;
}

/// Tr_R(rho) (x) rho_R for a dense density matrix, by explicit index loops.
inline Eigen::MatrixXcd reset_dense(const Eigen::MatrixXcd& rho, double eps) {
  const Eigen::Index d = rho.rows();
  const Eigen::Index half = d / 2;
  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(half, half);
  for (Eigen::Index a = 0; a < half; ++a) {
    for (Eigen::Index b = 0; b < half; ++b) {
      reduced(a, b) = rho(2 * a, 2 * b) + rho(2 * a + 1, 2 * b + 1);
    }
  }
  const double r[2] = {bath_up(eps), bath_down(eps)};
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index a = 0; a < half; ++a) {
    for (Eigen::Index b = 0; b < half; ++b) {
      for (int s = 0; s < 2; ++s) out(2 * a + s, 2 * b + s) = reduced(a, b) * r[s];
    }
  }
  return out;
}

/// Random full-rank density matrix with coherences: G G^dagger / tr.
inline Eigen::MatrixXcd random_density(Eigen::Index dim, std::mt19937_64& gen) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {g(gen), g(gen)};
  }
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace();
  return (rho + rho.adjoint()) / 2.0;
}

/// Dense transfer matrix written entry by entry from the update rules.
inline Eigen::MatrixXd transfer_dense(int n, double eps) {
  const Eigen::Index k = Eigen::Index{1} << n;
  const double up = bath_up(eps), down = bath_down(eps);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  if (k == 2) {
    t << up, up, down, down;
    return t;
  }
  t(0, 0) = up;
  t(0, 1) = up;
  for (Eigen::Index i = 1; i + 1 < k; ++i) {
    t(i, i - 1) = down;
    t(i, i + 1) = up;
  }
  t(k - 1, k - 2) = down;
  t(k - 1, k - 1) = down;
  return t;
}

}  // namespace hbac::testing
