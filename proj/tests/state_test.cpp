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

#include <cmath>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "hbac/errors.hpp"
#include "hbac/markov.hpp"
#include "oracles.hpp"

using namespace hbac;
using hbac::testing::bath_down;
using hbac::testing::bath_up;

TEST(reset_spec, populations) {
  const ResetSpec r(0.02);
  EXPECT_DOUBLE_EQ(r.z(), std::exp(0.02) + std::exp(-0.02));
  EXPECT_NEAR(r.up(), bath_up(0.02), 1e-16);
  EXPECT_NEAR(r.down(), bath_down(0.02), 1e-16);
  EXPECT_EQ(r.up() + r.down(), 1.0);
  EXPECT_GT(r.z(), 2.0);
}

TEST(reset_spec, rejects_bad_epsilon) {
  EXPECT_THROW(ResetSpec{0.0}, ValidationError);
  EXPECT_THROW(ResetSpec{-0.1}, ValidationError);
  EXPECT_THROW(ResetSpec{NAN}, ValidationError);
  EXPECT_THROW(ResetSpec{INFINITY}, ValidationError);
}

TEST(reset_spec, tiny_and_large_epsilon_sum_exactly) {
  for (double eps : {1e-12, 1e-6, 0.3, 5.0, 30.0}) {
    const ResetSpec r(eps);
    EXPECT_EQ(r.up() + r.down(), 1.0) << eps;
    EXPECT_NEAR(std::log(r.up() / r.down()), 2.0 * eps, 1e-12 * std::max(1.0, eps));
  }
}

TEST(diagonal_state, validation) {
  EXPECT_NO_THROW(DiagonalState(1, {0.5, 0.5}));
  EXPECT_THROW(DiagonalState(1, {0.5, 0.25, 0.25}), ValidationError);
  EXPECT_THROW(DiagonalState(1, {1.1, -0.1}), ValidationError);
  EXPECT_THROW(DiagonalState(1, {0.5, 0.4}), ValidationError);
  EXPECT_THROW(DiagonalState(1, {0.5 + 1e-11, 0.5}), ValidationError);
  EXPECT_THROW(DiagonalState(1, {NAN, 0.5}), ValidationError);
  const DiagonalState clamped(1, {1.0 + 1e-15, -1e-15});
  EXPECT_EQ(clamped[1], 0.0);
}

TEST(diagonal_state, renormalized) {
  const auto s = DiagonalState::renormalized(1, {0.5 + 4e-13, 0.5});
  EXPECT_NEAR(s[0] + s[1], 1.0, 2.3e-16);
  EXPECT_THROW(DiagonalState::renormalized(1, {0.6, 0.5}), ValidationError);
}

TEST(make_thermal, single_qubit_is_reset_state) {
  const auto s = make_thermal(1, ResetSpec(0.02));
  const double z = std::exp(0.02) + std::exp(-0.02);
  EXPECT_NEAR(s[0], std::exp(0.02) / z, 1e-16);
  EXPECT_NEAR(s[1], std::exp(-0.02) / z, 1e-16);
}

TEST(make_thermal, two_qubits_is_tensor_square) {
  const double eps = 0.3;
  const auto s = make_thermal(2, ResetSpec(eps));
  const double z = std::exp(eps) + std::exp(-eps);
  EXPECT_NEAR(s[0], std::exp(2 * eps) / (z * z), 1e-16);
  EXPECT_NEAR(s[1], 1.0 / (z * z), 1e-16);
  EXPECT_NEAR(s[3], std::exp(-2 * eps) / (z * z), 1e-16);
}

TEST(make_thermal, sums_to_one) {
  const auto s = make_thermal(3, ResetSpec(0.1));
  double total = 0.0;
  for (double p : s.probs()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(make_maximally_mixed, entries_and_polarization) {
  EXPECT_EQ(make_maximally_mixed(1).probs()[0], 0.5);
  const auto s = make_maximally_mixed(2);
  for (double p : s.probs()) EXPECT_EQ(p, 0.25);
  const auto big = make_maximally_mixed(5);
  for (int q = 0; q < 5; ++q) EXPECT_EQ(polarization(big, q).value, 0.0);
}

TEST(polarization, thermal_every_qubit_is_epsilon) {
  for (double eps : {0.02, 0.1, 0.5}) {
    const auto s = make_thermal(4, ResetSpec(eps));
    for (int q = 0; q < 4; ++q) {
      const auto r = polarization(s, q);
      EXPECT_EQ(r.qubit_index, q);
      EXPECT_NEAR(r.value, eps, 1e-14);
    }
  }
}

TEST(polarization, oas_first_qubit) {
  const int n = 3;
  const double eps = 0.1;
  const auto brute = hbac::testing::oas_bruteforce(n, eps);
  EXPECT_NEAR(hbac::testing::polarization_bruteforce(brute, n, 0), 0.4, 1e-12);
  EXPECT_NEAR(polarization(oas(n, ResetSpec(eps)), 0).value, 0.4, 1e-12);
}

TEST(polarization, errors) {
  const auto s = make_thermal(2, ResetSpec(0.1));
  EXPECT_THROW(polarization(s, 2), ValidationError);
  EXPECT_THROW(polarization(s, -1), ValidationError);
  EXPECT_THROW(polarization(DiagonalState(1, {1.0, 0.0}), 0), DegenerateMarginalError);
}

TEST(polarization, bias_conversion) {
  EXPECT_NEAR(bias_from_polarization(0.1), std::tanh(0.1), 1e-16);
  EXPECT_NEAR(polarization_from_bias(bias_from_polarization(0.37)), 0.37, 1e-14);
  // On a single qubit the bias is P0 - P1.
  const ResetSpec r(0.25);
  EXPECT_NEAR(bias_from_polarization(0.25), r.up() - r.down(), 1e-15);
}

TEST(polarization, invariant_under_appending_thermal_qubits) {
  std::mt19937_64 gen(7);
  const auto t = make_thermal(2, ResetSpec(0.3));
  for (int trial = 0; trial < 20; ++trial) {
    const DiagonalState s = DiagonalState::renormalized(3, hbac::testing::random_simplex(8, gen));
    const auto joined = tensor(s, t);
    ASSERT_EQ(joined.num_qubits(), 5);
    for (int q = 0; q < 3; ++q) {
      EXPECT_NEAR(polarization(joined, q).value, polarization(s, q).value, 1e-12);
    }
  }
}

TEST(tv_distance, examples) {
  const DiagonalState a(1, {0.7, 0.3});
  EXPECT_EQ(tv_distance(a, a), 0.0);
  EXPECT_EQ(tv_distance(DiagonalState(1, {1, 0}), DiagonalState(1, {0, 1})), 1.0);
  EXPECT_NEAR(tv_distance(a, DiagonalState(1, {0.6, 0.4})), 0.1, 1e-15);
  EXPECT_THROW(tv_distance(a, make_maximally_mixed(2)), ValidationError);
}

TEST(marginal_leading, sums_over_trailing_qubits) {
  const DiagonalState s(2, {0.1, 0.2, 0.3, 0.4});
  const auto m = s.marginal_leading(1);
  EXPECT_NEAR(m[0], 0.3, 1e-16);
  EXPECT_NEAR(m[1], 0.7, 1e-16);
  EXPECT_EQ(s.marginal_leading(2), s);
}

TEST(density_matrix, validation) {
  Eigen::MatrixXcd m(2, 2);
  m << 0.6, 0.1, 0.1, 0.4;
  EXPECT_NO_THROW(DensityMatrix(1, m));
  Eigen::MatrixXcd not_hermitian = m;
  not_hermitian(0, 1) = 0.2;
  EXPECT_THROW(DensityMatrix(1, not_hermitian), ValidationError);
  Eigen::MatrixXcd bad_trace = m * 1.1;
  EXPECT_THROW(DensityMatrix(1, bad_trace), ValidationError);
  Eigen::MatrixXcd not_psd(2, 2);
  not_psd << 0.5, 0.9, 0.9, 0.5;
  EXPECT_THROW(DensityMatrix(1, not_psd), ValidationError);
  EXPECT_THROW(DensityMatrix(2, m), ValidationError);
}

TEST(diagonal_of, examples) {
  Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
  const auto d = diagonal_of(DensityMatrix(1, half));
  EXPECT_EQ(d[0], 0.5);
  EXPECT_EQ(d[1], 0.5);
  Eigen::MatrixXcd m(2, 2);
  m << 0.6, 0.1, 0.1, 0.4;
  const auto e = diagonal_of(DensityMatrix(1, m));
  EXPECT_NEAR(e[0], 0.6, 1e-16);
  EXPECT_NEAR(e[1], 0.4, 1e-16);
}

TEST(diagonal_of, random_density_read_off) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXcd rho = hbac::testing::random_density(8, gen);
    const auto d = diagonal_of(DensityMatrix(3, rho));
    for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(d[i], rho(i, i).real(), 1e-14);
  }
}

TEST(diagonal_of, embedding_round_trip) {
  std::mt19937_64 gen(3);
  const DiagonalState s = DiagonalState::renormalized(4, hbac::testing::random_simplex(16, gen));
  const auto back = diagonal_of(DensityMatrix::from_diagonal(s));
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-14);
}

TEST(state_csv, diagonal_round_trip_is_exact) {
  std::mt19937_64 gen(5);
  const DiagonalState s = DiagonalState::renormalized(3, hbac::testing::random_simplex(8, gen));
  std::stringstream io;
  write_csv(io, s);
  EXPECT_EQ(read_diagonal_csv(io), s);
}

TEST(state_csv, density_round_trip_is_exact) {
  std::mt19937_64 gen(6);
  const DensityMatrix dm(2, hbac::testing::random_density(4, gen));
  std::stringstream io;
  write_csv(io, dm);
  const DensityMatrix back = read_density_csv(io);
  EXPECT_EQ(back.entries(), dm.entries());
}

TEST(state_csv, rejects_malformed_input) {
  std::stringstream missing_header("0.5\n0.5\n");
  EXPECT_THROW(read_diagonal_csv(missing_header), ValidationError);
  std::stringstream wrong_count("# m=2\n0.5\n0.5\n");
  EXPECT_THROW(read_diagonal_csv(wrong_count), ValidationError);
  std::stringstream garbage("# m=1\n0.5\nabc\n");
  EXPECT_THROW(read_diagonal_csv(garbage), ValidationError);
}
