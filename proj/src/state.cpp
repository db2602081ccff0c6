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

#include "hbac/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hbac/csv.hpp"
#include "hbac/errors.hpp"
#include "hbac/kernels.hpp"

namespace hbac {
namespace {

void check_num_qubits(int num_qubits, int max_qubits) {
  if (num_qubits < 1 || num_qubits > max_qubits) {
    throw ValidationError("num_qubits must be in [1, " + std::to_string(max_qubits) +
                          "], got " + std::to_string(num_qubits));
  }
}

int parse_header(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty()) continue;
    if (t.rfind("# m=", 0) != 0) throw ValidationError("expected '# m=<num_qubits>' header");
    return static_cast<int>(csv::parse_int(t.substr(4)));
  }
  throw ValidationError("empty CSV input");
}

}  // namespace

ResetSpec::ResetSpec(double epsilon) : epsilon_(epsilon) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0) {
    throw ValidationError("reset polarization epsilon must be finite and > 0");
  }
  z_ = std::exp(epsilon) + std::exp(-epsilon);
  // Logistic form keeps down() relatively accurate for large epsilon.
  const double r = std::exp(-2.0 * epsilon);
  down_ = r / (1.0 + r);
  up_ = 1.0 - down_;
}

DiagonalState::DiagonalState(int num_qubits, std::vector<double> probs)
    : num_qubits_(num_qubits), probs_(std::move(probs)) {
  check_num_qubits(num_qubits, kMaxDiagonalQubits);
  if (probs_.size() != (std::size_t{1} << num_qubits)) {
    throw ValidationError("probability vector length must be 2^num_qubits");
  }
  for (double& p : probs_) {
    if (!std::isfinite(p)) throw ValidationError("non-finite probability");
    if (p < -kNegativeTolerance) throw ValidationError("negative probability");
    if (p < 0.0) p = 0.0;
  }
  const double s = kernels::active().sum(probs_);
  if (std::fabs(s - 1.0) > kNormTolerance) {
    throw ValidationError("probabilities sum to " + csv::format_double(s) + ", not 1");
  }
}

DiagonalState DiagonalState::renormalized(int num_qubits, std::vector<double> probs) {
  const double s = kernels::active().sum(probs);
  if (!(std::fabs(s - 1.0) <= kNormTolerance)) {
    throw ValidationError("normalization drift beyond tolerance: sum = " +
                          csv::format_double(s));
  }
  kernels::active().scale(probs, 1.0 / s);
  return DiagonalState(num_qubits, std::move(probs));
}

DiagonalState DiagonalState::marginal_leading(int count) const {
  if (count < 1 || count > num_qubits_) throw ValidationError("marginal qubit count out of range");
  const std::size_t block = std::size_t{1} << (num_qubits_ - count);
  std::vector<double> out(std::size_t{1} << count, 0.0);
  for (std::size_t i = 0; i < probs_.size(); ++i) out[i / block] += probs_[i];
  return DiagonalState::renormalized(count, std::move(out));
}

DensityMatrix::DensityMatrix(int num_qubits, Eigen::MatrixXcd entries)
    : num_qubits_(num_qubits), entries_(std::move(entries)) {
  check_num_qubits(num_qubits, kMaxDensityQubits);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  if (entries_.rows() != dim || entries_.cols() != dim) {
    throw ValidationError("density matrix must be 2^num_qubits square");
  }
  if (!entries_.allFinite()) throw ValidationError("non-finite density matrix entry");
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(entries_.trace() - std::complex<double>(1.0, 0.0)) > kNormTolerance) {
    throw ValidationError("density matrix trace is not 1");
  }
  Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
    throw ValidationError("density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_diagonal(const DiagonalState& state) {
  const auto dim = static_cast<Eigen::Index>(state.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = state[static_cast<std::size_t>(i)];
  return DensityMatrix(state.num_qubits(), std::move(m));
}

DiagonalState make_thermal(int num_qubits, const ResetSpec& reset) {
  check_num_qubits(num_qubits, kMaxDiagonalQubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  std::vector<double> probs(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double p = 1.0;
    for (int b = 0; b < num_qubits; ++b) p *= ((i >> b) & 1u) ? reset.down() : reset.up();
    probs[i] = p;
  }
  return DiagonalState::renormalized(num_qubits, std::move(probs));
}

DiagonalState make_maximally_mixed(int num_qubits) {
  check_num_qubits(num_qubits, kMaxDiagonalQubits);
  const std::size_t dim = std::size_t{1} << num_qubits;
  return DiagonalState(num_qubits, std::vector<double>(dim, 1.0 / static_cast<double>(dim)));
}

PolarizationReading polarization(const DiagonalState& state, int qubit_index) {
  if (qubit_index < 0 || qubit_index >= state.num_qubits()) {
    throw ValidationError("qubit index out of range");
  }
  const int shift = state.num_qubits() - 1 - qubit_index;
  double p0 = 0.0;
  double p1 = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if ((i >> shift) & 1u) {
      p1 += state[i];
    } else {
      p0 += state[i];
    }
  }
  if (p0 <= 0.0 || p1 <= 0.0) {
    throw DegenerateMarginalError("qubit " + std::to_string(qubit_index) +
                                  " has a zero marginal population");
  }
  return {qubit_index, 0.5 * std::log(p0 / p1)};
}

double bias_from_polarization(double polarization) { return std::tanh(polarization); }

double polarization_from_bias(double bias) {
  if (!(bias > -1.0 && bias < 1.0)) throw ValidationError("bias must lie in (-1, 1)");
  return std::atanh(bias);
}

DiagonalState diagonal_of(const DensityMatrix& dm) {
  std::vector<double> probs(dm.dim());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    probs[i] = dm.entries()(k, k).real();
  }
  return DiagonalState::renormalized(dm.num_qubits(), std::move(probs));
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("tv_distance: length mismatch");
  return 0.5 * kernels::active().l1_distance(a, b);
}

double tv_distance(const DiagonalState& a, const DiagonalState& b) {
  return tv_distance(a.probs(), b.probs());
}

DiagonalState tensor(const DiagonalState& a, const DiagonalState& b) {
  std::vector<double> out;
  out.reserve(a.size() * b.size());
  for (double x : a.probs()) {
    for (double y : b.probs()) out.push_back(x * y);
  }
  return DiagonalState::renormalized(a.num_qubits() + b.num_qubits(), std::move(out));
}

void write_csv(std::ostream& out, const DiagonalState& state) {
  out << "# m=" << state.num_qubits() << '\n';
  for (double p : state.probs()) out << csv::format_double(p) << '\n';
}

DiagonalState read_diagonal_csv(std::istream& in) {
  const int m = parse_header(in);
  check_num_qubits(m, kMaxDiagonalQubits);
  std::vector<double> probs;
  std::string line;
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    probs.push_back(csv::parse_double(t));
  }
  return DiagonalState(m, std::move(probs));
}

void write_csv(std::ostream& out, const DensityMatrix& dm) {
  out << "# m=" << dm.num_qubits() << '\n';
  const auto& e = dm.entries();
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      if (c) out << ',';
      out << csv::format_double(e(r, c).real()) << ',' << csv::format_double(e(r, c).imag());
    }
    out << '\n';
  }
}

DensityMatrix read_density_csv(std::istream& in) {
  const int m = parse_header(in);
  check_num_qubits(m, kMaxDensityQubits);
  const Eigen::Index dim = Eigen::Index{1} << m;
  Eigen::MatrixXcd e(dim, dim);
  Eigen::Index row = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (row >= dim) throw ValidationError("too many rows in density CSV");
    auto fields = csv::split(t, ',');
    if (static_cast<Eigen::Index>(fields.size()) != 2 * dim) {
      throw ValidationError("density CSV row must hold 2^m re,im pairs");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      e(row, c) = {csv::parse_double(fields[2 * c]), csv::parse_double(fields[2 * c + 1])};
    }
    ++row;
  }
  if (row != dim) throw ValidationError("too few rows in density CSV");
  return DensityMatrix(m, std::move(e));
}

}  // namespace hbac
