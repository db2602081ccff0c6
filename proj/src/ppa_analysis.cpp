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

#include "hbac/ppa_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hbac/csv.hpp"
#include "hbac/errors.hpp"

namespace hbac {

std::vector<Permutation::Cycle> cycle_decomposition(const Permutation& perm) {
  return perm.cycles();
}

Nbds nbds(const Permutation& perm) {
  std::set<std::size_t> lengths;
  for (const auto& c : perm.cycles()) lengths.insert(c.size());
  Nbds result;
  result.incl_fixed = static_cast<int>(lengths.size());
  result.excl_fixed = result.incl_fixed - static_cast<int>(lengths.count(1));
  return result;
}

NbdsRecord nbds_trajectory(int n, const ResetSpec& reset, const DiagonalState& initial,
                           std::size_t max_iters) {
  if (n < 2) throw ValidationError("nbds_trajectory needs n >= 2");
  if (initial.num_qubits() != n + 1) {
    throw ValidationError("initial state must hold n computation qubits plus the reset qubit");
  }
  RunOptions opts;
  opts.max_iters = max_iters;
  opts.stop_tv = 1e-15;
  Trajectory traj = run_protocol(initial, reset, ProtocolKind::kPpa, opts);

  NbdsRecord rec;
  rec.n = n;
  rec.epsilon = reset.epsilon();
  rec.iterations_run = traj.steps.size();
  for (const auto& s : traj.steps) {
    rec.per_iteration_nbds.push_back(s.nbds->excl_fixed);
    rec.per_iteration_nbds_incl.push_back(s.nbds->incl_fixed);
  }
  if (!rec.per_iteration_nbds.empty()) {
    rec.max_nbds = *std::max_element(rec.per_iteration_nbds.begin(), rec.per_iteration_nbds.end());
    rec.max_nbds_incl = *std::max_element(rec.per_iteration_nbds_incl.begin(),
                                          rec.per_iteration_nbds_incl.end());
  }
  return rec;
}

std::pair<DiagonalState, Permutation> noisy_ppa_step(const DiagonalState& state,
                                                     const ResetSpec& reset, double sigma,
                                                     Rng& rng) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw ValidationError("sigma must be >= 0");
  if (sigma == 0.0) return ppa_step(state, reset);
  std::vector<double> estimate(state.probs().begin(), state.probs().end());
  for (double& e : estimate) e += rng.normal(0.0, sigma);
  Permutation perm = sort_permutation(estimate);
  DiagonalState permuted(state.num_qubits(), perm.apply(state.probs()));
  return {reset_channel(permuted, reset), std::move(perm)};
}

double log2_growth_slope(const std::vector<std::pair<int, int>>& n_and_max_nbds) {
  if (n_and_max_nbds.size() < 2) throw ValidationError("slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [n, v] : n_and_max_nbds) {
    if (v <= 0) throw ValidationError("max NBDS must be positive to take log2");
    const double x = n;
    const double y = std::log2(static_cast<double>(v));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(n_and_max_nbds.size());
  const double denom = k * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("slope needs at least two distinct n");
  return (k * sxy - sx * sy) / denom;
}

void write_nbds_csv_header(std::ostream& out) { out << "n,epsilon,iter,nbds_incl,nbds_excl\n"; }

void write_nbds_csv_rows(std::ostream& out, const NbdsRecord& record) {
  const std::string eps = csv::format_double(record.epsilon);
  for (std::size_t i = 0; i < record.per_iteration_nbds.size(); ++i) {
    out << record.n << ',' << eps << ',' << (i + 1) << ',' << record.per_iteration_nbds_incl[i]
        << ',' << record.per_iteration_nbds[i] << '\n';
  }
}

}  // namespace hbac
