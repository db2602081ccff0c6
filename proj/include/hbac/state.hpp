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

// Population (diagonal) and full density-matrix representations of an m-qubit
// register. Basis index i is big-endian: qubit 0 is the most significant bit,
// and the reset qubit is the last, least significant one.

#include <complex>
#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hbac {

inline constexpr double kNegativeTolerance = 1e-14;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr int kMaxDiagonalQubits = 30;
inline constexpr int kMaxDensityQubits = 12;

/// Heat-bath reset qubit at polarization epsilon: populations e^{+eps}/z and
/// e^{-eps}/z with z = e^{eps} + e^{-eps}.
class ResetSpec {
 public:
  explicit ResetSpec(double epsilon);

  double epsilon() const { return epsilon_; }
  double z() const { return z_; }
  /// e^{eps}/z, the population of |0> after a reset.
  double up() const { return up_; }
  /// e^{-eps}/z. up() + down() == 1 exactly.
  double down() const { return down_; }

 private:
  double epsilon_;
  double z_;
  double up_;
  double down_;
};

class DiagonalState {
 public:
  /// Validates length 2^m, entries >= -1e-14 (tiny negatives are clamped to
  /// zero) and |sum - 1| <= 1e-12. Throws ValidationError otherwise.
  DiagonalState(int num_qubits, std::vector<double> probs);

  /// Accepts a vector whose sum drifted by at most 1e-12 and divides it out.
  static DiagonalState renormalized(int num_qubits, std::vector<double> probs);

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// Populations of the first `count` qubits with the remaining ones traced out.
  DiagonalState marginal_leading(int count) const;

  friend bool operator==(const DiagonalState&, const DiagonalState&) = default;

 private:
  int num_qubits_;
  std::vector<double> probs_;
};

class DensityMatrix {
 public:
  /// Validates shape, Hermiticity (1e-12), unit trace (1e-12) and positive
  /// semidefiniteness (eigenvalues >= -1e-10).
  DensityMatrix(int num_qubits, Eigen::MatrixXcd entries);

  static DensityMatrix from_diagonal(const DiagonalState& state);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }

 private:
  int num_qubits_;
  Eigen::MatrixXcd entries_;
};

struct PolarizationReading {
  int qubit_index;
  double value;
};

DiagonalState make_thermal(int num_qubits, const ResetSpec& reset);
DiagonalState make_maximally_mixed(int num_qubits);

/// (1/2) ln(P0/P1) of one qubit's marginal populations.
PolarizationReading polarization(const DiagonalState& state, int qubit_index);

/// Bias P0 - P1 that corresponds to a log-ratio polarization: tanh(value).
double bias_from_polarization(double polarization);
double polarization_from_bias(double bias);

DiagonalState diagonal_of(const DensityMatrix& dm);

/// Total-variation distance (1/2) sum |a_i - b_i|.
double tv_distance(const DiagonalState& a, const DiagonalState& b);
double tv_distance(std::span<const double> a, std::span<const double> b);

/// Product state: a's qubits first, then b's.
DiagonalState tensor(const DiagonalState& a, const DiagonalState& b);

// CSV: header "# m=<num_qubits>" followed by one probability per line.
void write_csv(std::ostream& out, const DiagonalState& state);
DiagonalState read_diagonal_csv(std::istream& in);

// CSV: header "# m=<num_qubits>" followed by one matrix row per line, each
// entry written as "re,im" (row-major, comma separated).
void write_csv(std::ostream& out, const DensityMatrix& dm);
DensityMatrix read_density_csv(std::istream& in);

}  // namespace hbac
