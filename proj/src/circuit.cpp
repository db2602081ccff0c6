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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>

#include "hbac/csv.hpp"
#include "hbac/errors.hpp"
#include "hbac/permutation.hpp"

namespace hbac::circuit {
namespace {

using cd = std::complex<double>;

std::size_t bit_mask(int num_qubits, int qubit) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

std::size_t controls_mask(int num_qubits, const std::vector<int>& controls) {
  std::size_t m = 0;
  for (int c : controls) m |= bit_mask(num_qubits, c);
  return m;
}

bool is_classical(GateKind k) {
  return k == GateKind::kX || k == GateKind::kCX || k == GateKind::kCCX || k == GateKind::kMCX;
}

Gate controlled_x(std::vector<int> controls, int target) {
  switch (controls.size()) {
    case 0:
      return x(target);
    case 1:
      return cx(controls[0], target);
    case 2:
      return ccx(controls[0], controls[1], target);
    default:
      return mcx(std::move(controls), target);
  }
}

// Toffoli ladder for k >= 3 controls using k-2 borrowed qubits whose state is
// restored (4(k-2) Toffolis).
void v_chain(const std::vector<int>& c, int target, const std::vector<int>& pool,
             std::vector<Gate>& out) {
  const std::size_t k = c.size();
  const auto& a = pool;  // a[0] .. a[k-3]
  auto descend = [&] {
    for (std::size_t i = k - 2; i >= 2; --i) out.push_back(ccx(c[i], a[i - 2], a[i - 1]));
  };
  auto ascend = [&] {
    for (std::size_t i = 2; i <= k - 2; ++i) out.push_back(ccx(c[i], a[i - 2], a[i - 1]));
  };
  out.push_back(ccx(c[k - 1], a[k - 3], target));
  descend();
  out.push_back(ccx(c[0], c[1], a[0]));
  ascend();
  out.push_back(ccx(c[k - 1], a[k - 3], target));
  descend();
  out.push_back(ccx(c[0], c[1], a[0]));
  ascend();
}

// Emits a controlled-X with `c` controls using idle qubits from `pool` as
// borrowed workspace; requires pool.size() >= c.size() - 2 when c.size() >= 3.
void emit_controlled_x(const std::vector<int>& c, int target, const std::vector<int>& pool,
                       std::vector<Gate>& out) {
  if (c.size() <= 2) {
    out.push_back(controlled_x(c, target));
    return;
  }
  if (pool.size() + 2 < c.size()) throw AssertionFailure("not enough borrowed qubits");
  v_chain(c, target, pool, out);
}

// C^k X with one borrowed qubit: split the controls into A and B and use
//   t ^= B.(a ^ A), then t ^= B.a  ==>  t ^= B.A  (a restored by the repeat).
void expand_one(const Gate& g, int ancilla, std::vector<Gate>& out) {
  const std::vector<int>& c = g.controls;
  const int t = g.targets[0];
  const std::size_t k1 = (c.size() + 1) / 2;
  std::vector<int> a_set(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k1));
  std::vector<int> b_set(c.begin() + static_cast<std::ptrdiff_t>(k1), c.end());
  std::vector<int> b_plus = b_set;
  b_plus.push_back(ancilla);
  std::vector<int> pool_for_a = b_set;
  pool_for_a.push_back(t);
  for (int rep = 0; rep < 2; ++rep) {
    emit_controlled_x(a_set, ancilla, pool_for_a, out);
    emit_controlled_x(b_plus, t, a_set, out);
  }
}

void apply_gate(Eigen::MatrixXcd& u, int num_qubits, const Gate& g) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const std::size_t tmask = bit_mask(num_qubits, g.targets[0]);
  const std::size_t cmask = controls_mask(num_qubits, g.controls);
  auto row = [&](std::size_t i) { return u.row(static_cast<Eigen::Index>(i)); };
  switch (g.kind) {
    case GateKind::kX:
    case GateKind::kCX:
    case GateKind::kCCX:
    case GateKind::kMCX:
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & tmask) || (i & cmask) != cmask) continue;
        row(i).swap(row(i | tmask));
      }
      break;
    case GateKind::kH: {
      const double s = 1.0 / std::numbers::sqrt2;
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & tmask) continue;
        Eigen::RowVectorXcd r0 = row(i);
        Eigen::RowVectorXcd r1 = row(i | tmask);
        row(i) = s * (r0 + r1);
        row(i | tmask) = s * (r0 - r1);
      }
      break;
    }
    case GateKind::kRZ: {
      const cd lo = std::polar(1.0, -0.5 * g.theta);
      const cd hi = std::polar(1.0, 0.5 * g.theta);
      for (std::size_t i = 0; i < dim; ++i) row(i) *= (i & tmask) ? hi : lo;
      break;
    }
    case GateKind::kCPhase: {
      const cd ph = std::polar(1.0, g.theta);
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & tmask) && (i & cmask) == cmask) row(i) *= ph;
      }
      break;
    }
  }
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<int> parse_list(std::string_view text) {
  std::vector<int> v;
  if (text.empty()) return v;
  for (auto part : csv::split(text, ',')) v.push_back(static_cast<int>(csv::parse_int(part)));
  return v;
}

GateKind parse_kind(std::string_view s) {
  for (GateKind k : {GateKind::kX, GateKind::kH, GateKind::kCX, GateKind::kCCX, GateKind::kCPhase,
                     GateKind::kRZ, GateKind::kMCX}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown gate kind '" + std::string(s) + "'");
}

std::size_t expected_controls(GateKind k) {
  switch (k) {
    case GateKind::kX:
    case GateKind::kH:
    case GateKind::kRZ:
      return 0;
    case GateKind::kCX:
    case GateKind::kCPhase:
      return 1;
    case GateKind::kCCX:
      return 2;
    case GateKind::kMCX:
      return 0;  // any
  }
  return 0;
}

}  // namespace

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::kX:
      return "X";
    case GateKind::kH:
      return "H";
    case GateKind::kCX:
      return "CX";
    case GateKind::kCCX:
      return "CCX";
    case GateKind::kCPhase:
      return "CPHASE";
    case GateKind::kRZ:
      return "RZ";
    case GateKind::kMCX:
      return "MCX";
  }
  return "?";
}

Gate x(int target) { return {GateKind::kX, {target}, {}, 0.0}; }
Gate h(int target) { return {GateKind::kH, {target}, {}, 0.0}; }
Gate cx(int control, int target) { return {GateKind::kCX, {target}, {control}, 0.0}; }
Gate ccx(int c0, int c1, int target) { return {GateKind::kCCX, {target}, {c0, c1}, 0.0}; }
Gate cphase(int control, int target, double theta) {
  return {GateKind::kCPhase, {target}, {control}, theta};
}
Gate rz(int target, double theta) { return {GateKind::kRZ, {target}, {}, theta}; }
Gate mcx(std::vector<int> controls, int target) {
  return {GateKind::kMCX, {target}, std::move(controls), 0.0};
}

GateSequence::GateSequence(int num_qubits) : num_qubits_(num_qubits) {
  if (num_qubits < 1) throw ValidationError("a gate sequence needs at least one qubit");
}

void GateSequence::append(Gate g) {
  if (g.targets.size() != 1) throw ValidationError("gates act on exactly one target");
  if (g.kind != GateKind::kMCX && g.controls.size() != expected_controls(g.kind)) {
    throw ValidationError(std::string("wrong number of controls for ") + to_string(g.kind));
  }
  std::vector<int> all = g.controls;
  all.push_back(g.targets[0]);
  for (int q : all) {
    if (q < 0 || q >= num_qubits_) throw ValidationError("gate qubit index out of range");
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw ValidationError("gate targets and controls must be distinct");
  }
  if (!std::isfinite(g.theta)) throw ValidationError("gate angle must be finite");
  gates_.push_back(std::move(g));
}

void GateSequence::append(const GateSequence& other) {
  if (other.num_qubits_ > num_qubits_) throw ValidationError("appended sequence is wider");
  for (const Gate& g : other.gates_) append(g);
}

GateSequence GateSequence::adjoint() const {
  GateSequence out(num_qubits_);
  for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
    Gate g = *it;
    g.theta = -g.theta;
    out.gates_.push_back(std::move(g));
  }
  return out;
}

std::map<std::string, std::size_t> GateSequence::counts() const {
  std::map<std::string, std::size_t> c;
  for (const Gate& g : gates_) ++c[to_string(g.kind)];
  return c;
}

GateSequence synth_qft(int num_qubits) {
  GateSequence seq(num_qubits);
  for (int j = 0; j < num_qubits; ++j) {
    seq.append(h(j));
    for (int k = j + 1; k < num_qubits; ++k) {
      seq.append(cphase(k, j, std::numbers::pi / std::ldexp(1.0, k - j)));
    }
  }
  return seq;
}

GateSequence synth_shift(long long shift, int num_qubits) {
  if (num_qubits < 1 || num_qubits > 62) throw ValidationError("shift width out of range");
  const GateSequence qft = synth_qft(num_qubits);
  GateSequence seq(num_qubits);
  seq.append(qft);
  // Without the swap layer the Fourier register is bit reversed, so qubit q
  // carries the frequency weight 2^q: phase 2 pi shift 2^q / 2^m.
  for (int q = 0; q < num_qubits; ++q) {
    const long long period = 1LL << (num_qubits - q);
    const long long r = ((shift % period) + period) % period;
    seq.append(rz(q, 2.0 * std::numbers::pi * static_cast<double>(r) /
                         static_cast<double>(period)));
  }
  seq.append(qft.adjoint());
  return seq;
}

GateSequence synth_mcx(int num_qubits) {
  GateSequence seq(num_qubits);
  std::vector<int> controls;
  for (int q = 0; q + 1 < num_qubits; ++q) controls.push_back(q);
  seq.append(controlled_x(std::move(controls), num_qubits - 1));
  return seq;
}

GateSequence synth_two_sort(int num_qubits) {
  if (num_qubits < 2) throw ValidationError("two-sort synthesis needs at least two qubits");
  GateSequence seq(num_qubits);
  seq.append(synth_shift(-1, num_qubits));
  seq.append(synth_mcx(num_qubits));
  seq.append(x(num_qubits - 1));
  seq.append(synth_shift(+1, num_qubits));
  return seq;
}

GateSequence expand_mcx(const GateSequence& seq) {
  const bool needs_ancilla = std::any_of(seq.gates().begin(), seq.gates().end(), [](const Gate& g) {
    return g.kind == GateKind::kMCX && g.controls.size() >= 3;
  });
  if (!needs_ancilla) {
    GateSequence out(seq.num_qubits());
    for (const Gate& g : seq.gates()) {
      out.append(g.kind == GateKind::kMCX ? controlled_x(g.controls, g.targets[0]) : g);
    }
    return out;
  }
  const int ancilla = seq.num_qubits();
  GateSequence out(seq.num_qubits() + 1);
  std::vector<Gate> buf;
  for (const Gate& g : seq.gates()) {
    if (g.kind == GateKind::kMCX && g.controls.size() >= 3) {
      buf.clear();
      expand_one(g, ancilla, buf);
      for (Gate& e : buf) out.append(std::move(e));
    } else {
      out.append(g.kind == GateKind::kMCX ? controlled_x(g.controls, g.targets[0]) : g);
    }
  }
  return out;
}

GateCounts gate_count(const GateSequence& seq, bool expand) {
  GateCounts c;
  c.per_kind = expand ? expand_mcx(seq).counts() : seq.counts();
  for (const auto& [k, v] : c.per_kind) c.total += v;
  return c;
}

Eigen::MatrixXcd gates_to_unitary(const GateSequence& seq) {
  if (seq.num_qubits() > kMaxReconstructQubits) {
    throw ValidationError("unitary reconstruction limited to 10 qubits");
  }
  const auto dim = Eigen::Index{1} << seq.num_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const Gate& g : seq.gates()) apply_gate(u, seq.num_qubits(), g);
  return u;
}

std::size_t classical_image(const GateSequence& seq, std::size_t basis_index) {
  const int m = seq.num_qubits();
  for (const Gate& g : seq.gates()) {
    if (!is_classical(g.kind)) throw ValidationError("circuit is not a classical reversible one");
    const std::size_t cm = controls_mask(m, g.controls);
    if ((basis_index & cm) == cm) basis_index ^= bit_mask(m, g.targets[0]);
  }
  return basis_index;
}

Eigen::MatrixXcd two_sort_matrix(int num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const Permutation p = Permutation::two_sort(dim);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    u(static_cast<Eigen::Index>(p(i)), static_cast<Eigen::Index>(i)) = 1.0;
  }
  return u;
}

Eigen::MatrixXcd shift_matrix(long long shift, int num_qubits) {
  const auto dim = static_cast<long long>(1) << num_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  const long long s = ((shift % dim) + dim) % dim;
  for (long long x = 0; x < dim; ++x) u((x + s) % dim, x) = 1.0;
  return u;
}

double distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ValidationError("matrix shape mismatch");
  }
  Eigen::Index r = 0, c = 0;
  b.cwiseAbs().maxCoeff(&r, &c);
  cd phase = 1.0;
  if (std::abs(a(r, c)) > 0.0 && std::abs(b(r, c)) > 0.0) {
    phase = (a(r, c) / std::abs(a(r, c))) / (b(r, c) / std::abs(b(r, c)));
  }
  return (a - phase * b).cwiseAbs().maxCoeff();
}

void write_netlist(std::ostream& out, const GateSequence& seq) {
  out << "# qubits=" << seq.num_qubits() << '\n';
  for (const Gate& g : seq.gates()) {
    out << to_string(g.kind) << " q" << join(g.targets) << " c" << join(g.controls);
    if (g.kind == GateKind::kCPhase || g.kind == GateKind::kRZ) {
      out << ' ' << csv::format_double(g.theta);
    }
    out << '\n';
  }
}

GateSequence read_netlist(std::istream& in) {
  std::string line;
  int qubits = -1;
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty()) continue;
    if (t.rfind("# qubits=", 0) != 0) throw ValidationError("netlist must start with '# qubits=<m>'");
    qubits = static_cast<int>(csv::parse_int(t.substr(9)));
    break;
  }
  if (qubits < 1) throw ValidationError("netlist header missing");
  GateSequence seq(qubits);
  while (std::getline(in, line)) {
    auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string_view> fields;
    for (auto f : csv::split(t, ' ')) {
      if (!f.empty()) fields.push_back(f);
    }
    if (fields.size() < 3 || fields[1].front() != 'q' || fields[2].front() != 'c') {
      throw ValidationError("malformed netlist line: " + std::string(t));
    }
    Gate g{parse_kind(fields[0]), parse_list(fields[1].substr(1)), parse_list(fields[2].substr(1)),
           0.0};
    const bool angled = g.kind == GateKind::kCPhase || g.kind == GateKind::kRZ;
    if (fields.size() != (angled ? 4u : 3u)) {
      throw ValidationError("malformed netlist line: " + std::string(t));
    }
    if (angled) g.theta = csv::parse_double(fields[3]);
    seq.append(std::move(g));
  }
  return seq;
}

void write_qasm(std::ostream& out, const GateSequence& seq) {
  out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out << "qreg q[" << seq.num_qubits() << "];\n";
  auto qref = [](int q) { return "q[" + std::to_string(q) + "]"; };
  for (const Gate& g : seq.gates()) {
    std::string args;
    for (int c : g.controls) args += qref(c) + ",";
    args += qref(g.targets[0]);
    switch (g.kind) {
      case GateKind::kX:
        out << "x " << args;
        break;
      case GateKind::kH:
        out << "h " << args;
        break;
      case GateKind::kCX:
        out << "cx " << args;
        break;
      case GateKind::kCCX:
        out << "ccx " << args;
        break;
      case GateKind::kCPhase:
        out << "cu1(" << csv::format_double(g.theta) << ") " << args;
        break;
      case GateKind::kRZ:
        out << "rz(" << csv::format_double(g.theta) << ") " << args;
        break;
      case GateKind::kMCX:
        out << "mcx " << args;
        break;
    }
    out << ";\n";
  }
}

}  // namespace hbac::circuit
