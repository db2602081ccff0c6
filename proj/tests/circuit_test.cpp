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

#include "hbac/circuit.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "hbac/errors.hpp"
#include "hbac/protocols.hpp"
#include "oracles.hpp"

using namespace hbac;
using namespace hbac::circuit;

namespace {

double unitarity_error(const Eigen::MatrixXcd& u) {
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

std::size_t bit_reverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int b = 0; b < bits; ++b) r |= ((x >> b) & 1) << (bits - 1 - b);
  return r;
}

}  // namespace

TEST(gate, validation) {
  GateSequence seq(3);
  EXPECT_THROW(seq.append(x(3)), ValidationError);
  EXPECT_THROW(seq.append(cx(1, 1)), ValidationError);
  EXPECT_THROW(seq.append(rz(0, NAN)), ValidationError);
  EXPECT_THROW(seq.append(cphase(0, 1, INFINITY)), ValidationError);
  EXPECT_THROW(seq.append(mcx({0, 2}, 2)), ValidationError);
  EXPECT_THROW(seq.append(ccx(0, 0, 1)), ValidationError);
  EXPECT_NO_THROW(seq.append(mcx({0, 1}, 2)));
  EXPECT_THROW(GateSequence(0), ValidationError);
}

TEST(synth_qft, one_qubit) {
  const auto seq = synth_qft(1);
  ASSERT_EQ(seq.size(), 1u);
  EXPECT_EQ(seq.gates()[0].kind, GateKind::kH);
  const auto u = gates_to_unitary(seq);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(u(0, 0) - s), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u(1, 1) + s), 0.0, 1e-15);
}

TEST(synth_qft, two_qubits_gate_list) {
  const auto seq = synth_qft(2);
  ASSERT_EQ(seq.size(), 3u);
  EXPECT_EQ(seq.gates()[0].kind, GateKind::kH);
  EXPECT_EQ(seq.gates()[1].kind, GateKind::kCPhase);
  EXPECT_NEAR(seq.gates()[1].theta, std::numbers::pi / 2, 1e-16);
  EXPECT_EQ(seq.gates()[2].kind, GateKind::kH);
}

TEST(synth_qft, matches_bit_reversed_dft) {
  for (int m = 1; m <= 5; ++m) {
    const std::size_t n = std::size_t{1} << m;
    Eigen::MatrixXcd dft = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t xx = 0; xx < n; ++xx) {
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>((xx * k) % n) / n;
        dft(bit_reverse(k, m), xx) = std::polar(1.0 / std::sqrt(double(n)), angle);
      }
    }
    const auto seq = synth_qft(m);
    EXPECT_EQ(seq.size(), static_cast<std::size_t>(m * (m + 1) / 2));
    EXPECT_LE((gates_to_unitary(seq) - dft).cwiseAbs().maxCoeff(), 1e-10) << m;
  }
}

TEST(synth_shift, examples) {
  EXPECT_LE(distance_up_to_phase(gates_to_unitary(synth_shift(0, 3)),
                                 Eigen::MatrixXcd::Identity(8, 8)),
            1e-10);
  const auto u = gates_to_unitary(synth_shift(1, 3));
  EXPECT_NEAR(std::abs(u(0b110, 0b101)), 1.0, 1e-10);
  const auto back = gates_to_unitary(synth_shift(7, 3));
  EXPECT_LE(distance_up_to_phase(back * u, Eigen::MatrixXcd::Identity(8, 8)), 1e-10);
  EXPECT_LE(distance_up_to_phase(gates_to_unitary(synth_shift(-1, 3)), back), 1e-10);
}

TEST(synth_shift, matches_cyclic_shift_and_counts) {
  for (int m = 1; m <= 7; ++m) {
    for (long long s : {1LL, 2LL, 3LL, -1LL, 5LL}) {
      const auto seq = synth_shift(s, m);
      EXPECT_EQ(seq.size(), static_cast<std::size_t>(m * m + 2 * m));
      EXPECT_LE(distance_up_to_phase(gates_to_unitary(seq), shift_matrix(s, m)), 1e-10);
    }
  }
}

TEST(synth_shift, group_law) {
  for (int m = 2; m <= 6; ++m) {
    const long long n = 1LL << m;
    for (long long a = 0; a < n; a += 3) {
      for (long long b = 1; b < n; b += 5) {
        GateSequence seq = synth_shift(b, m);
        seq.append(synth_shift(a, m));
        EXPECT_LE(distance_up_to_phase(gates_to_unitary(seq), shift_matrix((a + b) % n, m)), 1e-9);
      }
    }
  }
}

TEST(synth_mcx, small_cases) {
  const auto one = synth_mcx(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.gates()[0].kind, GateKind::kX);
  const auto two = synth_mcx(2);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two.gates()[0].kind, GateKind::kCX);
  const auto four = gates_to_unitary(synth_mcx(4));
  for (Eigen::Index i = 0; i < 16; ++i) {
    const Eigen::Index image = i == 14 ? 15 : i == 15 ? 14 : i;
    EXPECT_NEAR(std::abs(four(image, i)), 1.0, 1e-15);
  }
}

TEST(synth_two_sort, block_structure) {
  Eigen::MatrixXcd four = Eigen::MatrixXcd::Zero(4, 4);
  four(0, 0) = four(1, 2) = four(2, 1) = four(3, 3) = 1.0;
  EXPECT_LE(distance_up_to_phase(gates_to_unitary(synth_two_sort(2)), four), 1e-9);

  const auto u = gates_to_unitary(synth_two_sort(3));
  const int image[] = {0, 2, 1, 4, 3, 6, 5, 7};
  const std::complex<double> phase = u(0, 0);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(std::abs(u(image[i], i) - phase), 0.0, 1e-9);
  EXPECT_THROW(synth_two_sort(1), ValidationError);
}

TEST(synth_two_sort, exact_for_all_tested_widths) {
  for (int m = 2; m <= 8; ++m) {
    const auto u = gates_to_unitary(synth_two_sort(m));
    const Eigen::MatrixXcd expected = hbac::testing::two_sort_dense(m).cast<std::complex<double>>();
    EXPECT_LE(distance_up_to_phase(u, expected), 1e-9) << m;
    EXPECT_LE(distance_up_to_phase(u * u, Eigen::MatrixXcd::Identity(u.rows(), u.cols())), 1e-9);
    EXPECT_LE(unitarity_error(u), 1e-10);
  }
}

TEST(synth_two_sort, acts_like_protocol_two_sort) {
  std::mt19937_64 gen(97);
  for (int m = 2; m <= 6; ++m) {
    const auto u = gates_to_unitary(synth_two_sort(m));
    const auto s = DiagonalState::renormalized(m, hbac::testing::random_simplex(std::size_t{1} << m, gen));
    const Eigen::MatrixXcd rho = DensityMatrix::from_diagonal(s).entries();
    const Eigen::MatrixXcd out = u * rho * u.adjoint();
    const auto expected = two_sort(s);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(out(i, i).real(), expected[i], 1e-12);
  }
}

TEST(gates_to_unitary, examples) {
  EXPECT_EQ(gates_to_unitary(GateSequence(2)), Eigen::MatrixXcd::Identity(4, 4));
  GateSequence one(1);
  one.append(x(0));
  Eigen::MatrixXcd xm(2, 2);
  xm << 0, 1, 1, 0;
  EXPECT_EQ(gates_to_unitary(one), xm);
  EXPECT_THROW(gates_to_unitary(GateSequence(11)), ValidationError);
}

TEST(gates_to_unitary, random_sequences_are_unitary) {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    GateSequence seq(3);
    for (int g = 0; g < 5; ++g) {
      const int a = static_cast<int>(gen() % 3);
      const int b = (a + 1 + static_cast<int>(gen() % 2)) % 3;
      const int c = 3 - a - b;
      switch (gen() % 6) {
        case 0: seq.append(x(a)); break;
        case 1: seq.append(h(a)); break;
        case 2: seq.append(cx(a, b)); break;
        case 3: seq.append(ccx(a, b, c)); break;
        case 4: seq.append(cphase(a, b, angle(gen))); break;
        default: seq.append(rz(a, angle(gen))); break;
      }
    }
    EXPECT_LE(unitarity_error(gates_to_unitary(seq)), 1e-12);
  }
}

TEST(adjoint, inverts) {
  const auto seq = synth_shift(3, 4);
  GateSequence both = seq;
  both.append(seq.adjoint());
  EXPECT_LE(distance_up_to_phase(gates_to_unitary(both), Eigen::MatrixXcd::Identity(16, 16)), 1e-10);
}

TEST(expand_mcx, equivalent_with_borrowed_qubit) {
  for (int m = 3; m <= 9; ++m) {
    const auto macro = synth_mcx(m);
    const auto expanded = expand_mcx(macro);
    if (m <= 3) {
      EXPECT_EQ(expanded.num_qubits(), m);
    } else {
      EXPECT_EQ(expanded.num_qubits(), m + 1);
    }
    for (const auto& g : expanded.gates()) EXPECT_NE(g.kind, GateKind::kMCX);
    const int extra = expanded.num_qubits() - m;
    const std::size_t dim = std::size_t{1} << m;
    for (std::size_t basis = 0; basis < dim; ++basis) {
      const std::size_t want = classical_image(macro, basis);
      for (std::size_t anc = 0; anc < (std::size_t{1} << extra); ++anc) {
        const std::size_t in = (basis << extra) | anc;
        EXPECT_EQ(classical_image(expanded, in), (want << extra) | anc) << m << " " << basis;
      }
    }
  }
}

TEST(expand_mcx, linear_toffoli_count) {
  for (int m = 4; m <= 20; ++m) {
    const auto c = gate_count(synth_mcx(m), true);
    EXPECT_LE(c.total, static_cast<std::size_t>(16 * m)) << m;
  }
}

TEST(gate_count, shift_and_two_sort) {
  for (int m = 1; m <= 10; ++m) {
    EXPECT_EQ(gate_count(synth_shift(1, m), false).total, static_cast<std::size_t>(m * m + 2 * m));
  }
  for (int m = 2; m <= 10; ++m) {
    const auto c = gate_count(synth_two_sort(m), false);
    EXPECT_EQ(c.total, static_cast<std::size_t>(2 * (m * m + 2 * m) + 2));
    std::size_t sum = 0;
    for (const auto& [kind, count] : c.per_kind) sum += count;
    EXPECT_EQ(sum, c.total);
  }
}

TEST(gate_count, quadratic_growth) {
  double c = 0.0;
  std::vector<double> ratios;
  for (int m = 3; m <= 12; ++m) {
    const double r = static_cast<double>(gate_count(synth_two_sort(m), true).total) / (m * m);
    ratios.push_back(r);
    c = std::max(c, r);
  }
  EXPECT_LT(c, 10.0);
  EXPECT_LE(ratios.back(), ratios.front() + 1.0);
}

TEST(netlist, round_trip) {
  for (int m = 2; m <= 6; ++m) {
    const auto seq = synth_two_sort(m);
    std::stringstream io;
    write_netlist(io, seq);
    EXPECT_EQ(read_netlist(io), seq);
  }
  std::stringstream bad("# qubits=2\nFOO q0\n");
  EXPECT_THROW(read_netlist(bad), ValidationError);
  std::stringstream headless("X q0\n");
  EXPECT_THROW(read_netlist(headless), ValidationError);
}

TEST(qasm, emits_header_and_gates) {
  std::ostringstream out;
  write_qasm(out, synth_two_sort(4));
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("OPENQASM 2.0;", 0), 0u);
  EXPECT_NE(s.find("qreg q[4];"), std::string::npos);
  EXPECT_NE(s.find("cu1("), std::string::npos);
  EXPECT_NE(s.find("mcx "), std::string::npos);
}
