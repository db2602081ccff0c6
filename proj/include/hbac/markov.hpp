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

// Exact Markov-chain description of TSAC on the computation-qubit populations.
//
// One TSAC iteration maps the 2^n computation populations p to T p where T is
// column stochastic and tridiagonal:
//   T[0][0] = T[0][1] = up,  T[i][i-1] = down, T[i][i+1] = up (interior),
//   T[K-1][K-2] = T[K-1][K-1] = down,
// with up = e^{eps}/z and down = e^{-eps}/z. Its spectrum is {1} together with
// 2 cos(k pi / 2^n) / z for k = 1 .. 2^n-1, and its +1 eigenvector is the
// geometric profile p0 e^{-2 eps k}.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hbac/state.hpp"

namespace hbac {

inline constexpr int kMaxTransferQubits = 14;
inline constexpr int kMaxDenseTransferQubits = 12;
inline constexpr int kMaxSpectrumQubits = 10;
/// Largest supported (2^n - 1) eps before the smallest OAS population underflows.
inline constexpr double kMaxUnderflowExponent = 600.0;

/// Banded storage; the matrix has at most two nonzeros per column.
class TransferMatrix {
 public:
  TransferMatrix(int n, const ResetSpec& reset);

  int n() const { return n_; }
  double epsilon() const { return reset_.epsilon(); }
  const ResetSpec& reset() const { return reset_; }
  std::size_t dim() const { return std::size_t{1} << n_; }

  double at(std::size_t row, std::size_t col) const;
  /// Dense copy; n <= kMaxDenseTransferQubits.
  Eigen::MatrixXd dense() const;

 private:
  int n_;
  ResetSpec reset_;
};

TransferMatrix build_transfer_matrix(int n, const ResetSpec& reset);

std::vector<double> apply_transfer(const TransferMatrix& t, std::span<const double> p);

/// {1} and 2cos(k pi/2^n)/z for k = 1..2^n-1, sorted descending.
std::vector<double> analytic_eigenvalues(int n, const ResetSpec& reset);

/// Optimal asymptotic state on n computation qubits: p0 e^{-2 eps k}.
DiagonalState oas(int n, const ResetSpec& reset);

struct GapReport {
  double gap;
  double lower_bound;  // (z-2)/z
};

GapReport spectral_gap(int n, const ResetSpec& reset);

/// ln(1/(xi l))/gap with l = p0 e^{-2 (2^n-1) eps}, the smallest OAS population.
/// Evaluated in log space, so it stays finite beyond the OAS underflow guard.
double mixing_time_bound(int n, const ResetSpec& reset, double xi);

/// Iterations of T from `start` until the TV distance to oas(n) is <= xi;
/// returns max_iters + 1 if it never gets there.
std::size_t empirical_mixing_time(int n, const ResetSpec& reset, double xi,
                                  std::span<const double> start, std::size_t max_iters);

enum class EigenMethod {
  /// Diagonal similarity to a symmetric tridiagonal matrix, then a symmetric
  /// eigensolver. Accurate for every supported (n, eps).
  kSymmetrized,
  /// General non-symmetric dense eigensolver on T itself. Loses accuracy once
  /// e^{eps 2^n} makes T strongly non-normal.
  kGeneral,
};

struct SpectrumReport {
  int n = 0;
  double epsilon = 0.0;
  std::string method;
  std::vector<double> analytic_eigenvalues;
  std::vector<double> numeric_eigenvalues;
  double gap = 0.0;
  double gap_lower_bound = 0.0;
  double max_abs_error = 0.0;
  /// TV distance between the normalized +1 eigenvector and oas(n).
  double stationary_tv_to_oas = 0.0;
};

/// Dense eigen-decomposition of T compared against the closed form. With
/// kGeneral, imaginary parts above 1e-9 raise AssertionFailure.
SpectrumReport verify_spectrum(int n, const ResetSpec& reset,
                               EigenMethod method = EigenMethod::kSymmetrized);

std::string to_json(const SpectrumReport& report);
void write_dense_csv(std::ostream& out, const TransferMatrix& t);

}  // namespace hbac
