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

#include "hbac/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "hbac/csv.hpp"
#include "hbac/errors.hpp"
#include "hbac/kernels.hpp"
#include "hbac/ppa_analysis.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace hbac {
namespace {

void require_reset_qubit(const DiagonalState& state) {
  if (state.num_qubits() < 2) {
    throw ValidationError("need at least one computation qubit plus the reset qubit");
  }
}

}  // namespace

const char* to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::kTsac:
      return "tsac";
    case ProtocolKind::kPpa:
      return "ppa";
    case ProtocolKind::kNoisyPpa:
      return "noisy_ppa";
  }
  return "?";
}

DiagonalState reset_channel(const DiagonalState& state, const ResetSpec& reset) {
  require_reset_qubit(state);
  std::vector<double> out(state.size());
  kernels::active().reset_split(state.probs(), out, reset.up(), reset.down());
  return DiagonalState::renormalized(state.num_qubits(), std::move(out));
}

DiagonalState two_sort(const DiagonalState& state) {
  std::vector<double> out(state.probs().begin(), state.probs().end());
  kernels::active().two_sort_inplace(out);
  return DiagonalState(state.num_qubits(), std::move(out));
}

DiagonalState tsac_step(const DiagonalState& state, const ResetSpec& reset) {
  require_reset_qubit(state);
  std::vector<double> out(state.size());
  kernels::active().tsac_fused(state.probs(), out, reset.up(), reset.down());
  return DiagonalState::renormalized(state.num_qubits(), std::move(out));
}

DensityMatrix tsac_step_density(const DensityMatrix& dm, const ResetSpec& reset) {
  if (dm.num_qubits() < 2) {
    throw ValidationError("need at least one computation qubit plus the reset qubit");
  }
  const auto dim = static_cast<Eigen::Index>(dm.dim());
  const Eigen::Index half = dim / 2;
  const Eigen::MatrixXcd& rho = dm.entries();

  Eigen::MatrixXcd reduced(half, half);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (Eigen::Index j = 0; j < half; ++j) {
      reduced(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    }
  }
  Eigen::Matrix2cd rho_r = Eigen::Matrix2cd::Zero();
  rho_r(0, 0) = reset.up();
  rho_r(1, 1) = reset.down();
  Eigen::MatrixXcd refreshed = Eigen::kroneckerProduct(reduced, rho_r);

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  const Permutation swap = Permutation::two_sort(dm.dim());
  for (std::size_t i = 0; i < dm.dim(); ++i) {
    u(static_cast<Eigen::Index>(swap(i)), static_cast<Eigen::Index>(i)) = 1.0;
  }
  Eigen::MatrixXcd out = u.adjoint() * refreshed * u;
  return DensityMatrix(dm.num_qubits(), std::move(out));
}

Permutation sort_permutation(std::span<const double> populations) {
  const std::size_t n = populations.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return populations[a] > populations[b];
  });
  // Runs of near-equal neighbours in sorted order go back to source order, so
  // rounding noise between exactly-tied values cannot produce a swap.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n) {
      const double a = populations[order[j]];
      const double b = populations[order[j + 1]];
      if (std::fabs(a - b) > kSortTieTolerance * std::max(std::fabs(a), std::fabs(b))) break;
      ++j;
    }
    if (j > i) std::sort(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(j + 1));
    i = j + 1;
  }
  return Permutation::from_order(order);
}

Permutation ppa_sort_permutation(const DiagonalState& state) {
  return sort_permutation(state.probs());
}

std::pair<DiagonalState, Permutation> ppa_step(const DiagonalState& state,
                                               const ResetSpec& reset) {
  require_reset_qubit(state);
  Permutation perm = ppa_sort_permutation(state);
  DiagonalState sorted(state.num_qubits(), perm.apply(state.probs()));
  return {reset_channel(sorted, reset), std::move(perm)};
}

Trajectory run_protocol(const DiagonalState& initial, const ResetSpec& reset,
                        ProtocolKind kind, const RunOptions& options) {
  require_reset_qubit(initial);
  if (options.max_iters < 1) throw ValidationError("max_iters must be >= 1");
  if (!(options.stop_tv >= 0.0)) throw ValidationError("stop_tv must be >= 0");
  if (!std::isfinite(options.noise_sigma) || options.noise_sigma < 0.0) {
    throw ValidationError("noise sigma must be finite and >= 0");
  }
  if (kind == ProtocolKind::kPpa && options.noise_sigma != 0.0) {
    throw ValidationError("plain PPA takes no noise; use the noisy PPA kind");
  }

  Trajectory traj{kind, reset, initial, initial, {}, {}, {}};
  traj.polarization_series.push_back(polarization(initial, 0).value);
  if (options.keep_states) traj.states.push_back(initial);
  if (options.observer) options.observer(0, initial);

  std::shared_ptr<const Permutation> fixed_swap;
  if (kind == ProtocolKind::kTsac && options.keep_permutations) {
    fixed_swap = std::make_shared<const Permutation>(Permutation::two_sort(initial.size()));
  }
  Rng rng(options.rng_seed);
  std::vector<double> estimate;

  DiagonalState current = initial;
  for (std::size_t t = 1; t <= options.max_iters; ++t) {
    ProtocolStep step{kind, t, nullptr, 0.0, 0.0, std::nullopt};
    std::optional<DiagonalState> next;
    switch (kind) {
      case ProtocolKind::kTsac: {
        if (options.noise_sigma > 0.0) {
          // The estimate exists but the fixed operation never reads it.
          estimate.resize(current.size());
          for (double& e : estimate) e = rng.normal(0.0, options.noise_sigma);
        }
        next.emplace(tsac_step(current, reset));
        step.applied_permutation = fixed_swap;
        break;
      }
      case ProtocolKind::kPpa:
      case ProtocolKind::kNoisyPpa: {
        auto [state, perm] = kind == ProtocolKind::kPpa
                                 ? ppa_step(current, reset)
                                 : noisy_ppa_step(current, reset, options.noise_sigma, rng);
        step.nbds = nbds(perm);
        if (options.keep_permutations) {
          step.applied_permutation = std::make_shared<const Permutation>(std::move(perm));
        }
        next.emplace(std::move(state));
        break;
      }
    }
    step.tv_to_prev = tv_distance(*next, current);
    current = std::move(*next);
    step.pol_q0 = polarization(current, 0).value;
    traj.polarization_series.push_back(step.pol_q0);
    if (options.keep_states) traj.states.push_back(current);
    if (options.observer) options.observer(t, current);
    const bool converged = step.tv_to_prev < options.stop_tv;
    traj.steps.push_back(std::move(step));
    if (converged) break;
  }
  traj.final_state = std::move(current);
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "iter,tv_to_prev,pol_q0,nbds\n";
  out << "0,," << csv::format_double(trajectory.polarization_series.front()) << ",\n";
  for (const ProtocolStep& s : trajectory.steps) {
    out << s.iteration << ',' << csv::format_double(s.tv_to_prev) << ','
        << csv::format_double(s.pol_q0) << ',';
    if (s.nbds) out << s.nbds->excl_fixed;
    out << '\n';
  }
}

}  // namespace hbac
