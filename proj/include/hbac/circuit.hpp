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

// Gate-level synthesis of the two-sort unitary.
//
// With SHIFT_{+1}|x> = |x+1 mod 2^m>, the relabeling U' = X_last * MCX swaps
// (2k, 2k+1) for every pair except the last one, and
//   U_TS = SHIFT_{+1} U' SHIFT_{-1},
// so the circuit is SHIFT_{-1}, MCX, X on the last qubit, SHIFT_{+1}. Each
// shift is QFT^dagger * (one RZ per qubit) * QFT without a swap layer.
//
// Qubit 0 is the most significant bit of a basis index throughout.

#include <complex>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hbac::circuit {

inline constexpr int kMaxReconstructQubits = 10;

enum class GateKind { kX, kH, kCX, kCCX, kCPhase, kRZ, kMCX };

const char* to_string(GateKind kind);

struct Gate {
  GateKind kind;
  std::vector<int> targets;
  std::vector<int> controls;
  double theta = 0.0;  // radians, CPHASE and RZ only

  friend bool operator==(const Gate&, const Gate&) = default;
};

Gate x(int target);
Gate h(int target);
Gate cx(int control, int target);
Gate ccx(int c0, int c1, int target);
Gate cphase(int control, int target, double theta);
Gate rz(int target, double theta);
Gate mcx(std::vector<int> controls, int target);

class GateSequence {
 public:
  explicit GateSequence(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  /// Validates ranges and control/target disjointness.
  void append(Gate g);
  void append(const GateSequence& other);
  /// Reversed order with every gate inverted.
  GateSequence adjoint() const;

  std::map<std::string, std::size_t> counts() const;

  friend bool operator==(const GateSequence&, const GateSequence&) = default;

 private:
  int num_qubits_;
  std::vector<Gate> gates_;
};

/// H plus controlled-phase ladder, no terminal swaps: |x> maps to
/// sum_k e^{2 pi i x k / 2^m} |bitreverse(k)> / sqrt(2^m). m(m+1)/2 gates.
GateSequence synth_qft(int num_qubits);

/// |x> -> |x + shift mod 2^m> up to a global phase; m^2 + 2m gates.
GateSequence synth_shift(long long shift, int num_qubits);

/// X on the last qubit controlled by all others, as one macro gate.
GateSequence synth_mcx(int num_qubits);

GateSequence synth_two_sort(int num_qubits);

/// Rewrites MCX macros with three or more controls into CCX/CX/X using one
/// extra borrowed qubit (index num_qubits), which may hold any state and is
/// returned unchanged; Toffoli count is linear in the number of controls.
/// The result acts as the original circuit tensored with identity on the
/// extra qubit. Sequences without such gates are returned unchanged.
GateSequence expand_mcx(const GateSequence& seq);

struct GateCounts {
  std::map<std::string, std::size_t> per_kind;
  std::size_t total = 0;
};

GateCounts gate_count(const GateSequence& seq, bool expand);

/// Ordered product of the gate matrices; num_qubits <= kMaxReconstructQubits.
Eigen::MatrixXcd gates_to_unitary(const GateSequence& seq);

/// Basis-state image for circuits made only of X/CX/CCX/MCX.
std::size_t classical_image(const GateSequence& seq, std::size_t basis_index);

/// The two-sort permutation matrix on num_qubits qubits.
Eigen::MatrixXcd two_sort_matrix(int num_qubits);
/// Permutation matrix of |x> -> |x + shift mod 2^m>.
Eigen::MatrixXcd shift_matrix(long long shift, int num_qubits);

/// max |a - e^{i phi} b| after aligning phases on the largest entry of b.
double distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// One gate per line: "KIND q<targets> c<controls> [theta]", index lists comma
/// separated, with a "# qubits=<m>" header.
void write_netlist(std::ostream& out, const GateSequence& seq);
GateSequence read_netlist(std::istream& in);

/// OpenQASM 2 style text; MCX with more than two controls is emitted as a
/// non-standard "mcx" instruction.
void write_qasm(std::ostream& out, const GateSequence& seq);

}  // namespace hbac::circuit
