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

#include "hbac/markov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <json.hpp>

#include "hbac/csv.hpp"
#include "hbac/errors.hpp"
#include "hbac/kernels.hpp"

namespace hbac {
namespace {

void check_n(int n, int max_n, const char* what) {
  if (n < 1 || n > max_n) {
    throw ValidationError(std::string(what) + ": n must be in [1, " + std::to_string(max_n) +
                          "], got " + std::to_string(n));
  }
}

// cos(k pi / dim), exactly 0 at k = dim/2 and exactly odd about it.
double cos_pi_fraction(std::size_t k, std::size_t dim) {
  if (2 * k == dim) return 0.0;
  if (2 * k > dim) return -cos_pi_fraction(dim - k, dim);
  return std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(dim));
}

// ln p0 = ln(1 - e^{-2 eps}) - ln(1 - e^{-2 eps 2^n}).
double log_p0(int n, double eps) {
  const double dim = std::ldexp(1.0, n);
  return std::log(-std::expm1(-2.0 * eps)) - std::log(-std::expm1(-2.0 * eps * dim));
}

}  // namespace

TransferMatrix::TransferMatrix(int n, const ResetSpec& reset) : n_(n), reset_(reset) {
  check_n(n, kMaxTransferQubits, "transfer matrix");
}

double TransferMatrix::at(std::size_t row, std::size_t col) const {
  const std::size_t last = dim() - 1;
  if (row > last || col > last) throw ValidationError("transfer matrix index out of range");
  if (row == 0 && col <= 1) return reset_.up();
  if (row == last && col + 1 >= last) return reset_.down();
  if (row > 0 && row < last) {
    if (col + 1 == row) return reset_.down();
    if (col == row + 1) return reset_.up();
  }
  return 0.0;
}

Eigen::MatrixXd TransferMatrix::dense() const {
  check_n(n_, kMaxDenseTransferQubits, "dense transfer matrix");
  const auto k = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index lo = std::max<Eigen::Index>(0, c - 1);
    const Eigen::Index hi = std::min<Eigen::Index>(k - 1, c + 1);
    for (Eigen::Index r = lo; r <= hi; ++r) {
      m(r, c) = at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  return m;
}

TransferMatrix build_transfer_matrix(int n, const ResetSpec& reset) {
  return TransferMatrix(n, reset);
}

std::vector<double> apply_transfer(const TransferMatrix& t, std::span<const double> p) {
  if (p.size() != t.dim()) throw ValidationError("apply_transfer: length mismatch");
  std::vector<double> out(p.size());
  kernels::active().transfer_apply(p, out, t.reset().up(), t.reset().down());
  return out;
}

std::vector<double> analytic_eigenvalues(int n, const ResetSpec& reset) {
  check_n(n, kMaxDiagonalQubits, "analytic eigenvalues");
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> ev;
  ev.reserve(dim);
  ev.push_back(1.0);
  for (std::size_t k = 1; k < dim; ++k) ev.push_back(2.0 * cos_pi_fraction(k, dim) / reset.z());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

DiagonalState oas(int n, const ResetSpec& reset) {
  check_n(n, kMaxDiagonalQubits, "oas");
  const double eps = reset.epsilon();
  const std::size_t dim = std::size_t{1} << n;
  if (static_cast<double>(dim - 1) * eps > kMaxUnderflowExponent) {
    throw ValidationError("(2^n - 1) * epsilon exceeds 600; the asymptotic state underflows");
  }
  const double p0 = std::exp(log_p0(n, eps));
  std::vector<double> probs(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    probs[k] = p0 * std::exp(-2.0 * eps * static_cast<double>(k));
  }
  return DiagonalState(n, std::move(probs));
}

GapReport spectral_gap(int n, const ResetSpec& reset) {
  check_n(n, 60, "spectral gap");
  const std::size_t dim = std::size_t{1} << n;
  GapReport r{1.0 - 2.0 * cos_pi_fraction(1, dim) / reset.z(), (reset.z() - 2.0) / reset.z()};
  if (!(r.gap >= r.lower_bound)) throw AssertionFailure("spectral gap below (z-2)/z");
  return r;
}

double mixing_time_bound(int n, const ResetSpec& reset, double xi) {
  check_n(n, 60, "mixing time bound");
  if (!(xi > 0.0 && xi < 1.0)) throw ValidationError("xi must lie in (0, 1)");
  const double eps = reset.epsilon();
  const double log_inv_l = -log_p0(n, eps) + 2.0 * (std::ldexp(1.0, n) - 1.0) * eps;
  return (-std::log(xi) + log_inv_l) / spectral_gap(n, reset).gap;
}

std::size_t empirical_mixing_time(int n, const ResetSpec& reset, double xi,
                                  std::span<const double> start, std::size_t max_iters) {
  const TransferMatrix t(n, reset);
  if (start.size() != t.dim()) throw ValidationError("start vector has the wrong length");
  const DiagonalState target = oas(n, reset);
  std::vector<double> p(start.begin(), start.end());
  std::vector<double> next(p.size());
  const auto& k = kernels::active();
  for (std::size_t it = 0; it <= max_iters; ++it) {
    if (tv_distance(p, target.probs()) <= xi) return it;
    k.transfer_apply(p, next, reset.up(), reset.down());
    p.swap(next);
  }
  return max_iters + 1;
}

SpectrumReport verify_spectrum(int n, const ResetSpec& reset, EigenMethod method) {
  check_n(n, kMaxSpectrumQubits, "verify_spectrum");
  const TransferMatrix tm(n, reset);
  const Eigen::MatrixXd t = tm.dense();
  const Eigen::Index dim = t.rows();

  SpectrumReport rep;
  rep.n = n;
  rep.epsilon = reset.epsilon();
  rep.analytic_eigenvalues = analytic_eigenvalues(n, reset);
  const GapReport g = spectral_gap(n, reset);
  rep.gap = g.gap;
  rep.gap_lower_bound = g.lower_bound;

  Eigen::VectorXd stationary(dim);
  if (method == EigenMethod::kSymmetrized) {
    rep.method = "symmetrized";
    // T = D S D^{-1} with S symmetric; d_{i+1}/d_i = sqrt(T[i+1][i] / T[i][i+1]).
    Eigen::VectorXd d(dim);
    d(0) = 1.0;
    for (Eigen::Index i = 0; i + 1 < dim; ++i) {
      if (t(i + 1, i) <= 0.0 || t(i, i + 1) <= 0.0) {
        throw AssertionFailure("transfer matrix off-diagonals must be positive");
      }
      d(i + 1) = d(i) * std::sqrt(t(i + 1, i) / t(i, i + 1));
    }
    Eigen::MatrixXd s = d.cwiseInverse().asDiagonal() * t * d.asDiagonal();
    s = 0.5 * (s + s.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    const Eigen::VectorXd& values = solver.eigenvalues();
    rep.numeric_eigenvalues.assign(values.data(), values.data() + dim);
    Eigen::Index top = 0;
    values.maxCoeff(&top);
    stationary = d.cwiseProduct(solver.eigenvectors().col(top));
  } else {
    rep.method = "general";
    Eigen::EigenSolver<Eigen::MatrixXd> solver(t);
    const Eigen::VectorXcd values = solver.eigenvalues();
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(values(i).imag()) > 1e-9) {
        throw AssertionFailure("general eigensolver returned eigenvalue with imaginary part " +
                               csv::format_double(values(i).imag()));
      }
      rep.numeric_eigenvalues.push_back(values(i).real());
    }
    Eigen::Index top = 0;
    (values.array() - 1.0).abs().minCoeff(&top);
    stationary = solver.eigenvectors().col(top).real();
  }
  std::sort(rep.numeric_eigenvalues.begin(), rep.numeric_eigenvalues.end(), std::greater<>());
  for (std::size_t i = 0; i < rep.numeric_eigenvalues.size(); ++i) {
    rep.max_abs_error = std::max(
        rep.max_abs_error, std::fabs(rep.numeric_eigenvalues[i] - rep.analytic_eigenvalues[i]));
  }
  stationary /= stationary.sum();
  const DiagonalState target = oas(n, reset);
  double l1 = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    l1 += std::fabs(stationary(i) - target[static_cast<std::size_t>(i)]);
  }
  rep.stationary_tv_to_oas = 0.5 * l1;
  return rep;
}

std::string to_json(const SpectrumReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["epsilon"] = report.epsilon;
  j["method"] = report.method;
  j["gap"] = report.gap;
  j["gap_lower_bound"] = report.gap_lower_bound;
  j["max_abs_error"] = report.max_abs_error;
  j["stationary_tv_to_oas"] = report.stationary_tv_to_oas;
  j["analytic_eigenvalues"] = report.analytic_eigenvalues;
  j["numeric_eigenvalues"] = report.numeric_eigenvalues;
  return j.dump(2);
}

void write_dense_csv(std::ostream& out, const TransferMatrix& t) {
  const Eigen::MatrixXd m = t.dense();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << csv::format_double(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace hbac
