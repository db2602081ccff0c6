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

// Cooling protocols on the population vector of n computation qubits plus one
// reset qubit (the least significant bit):
//   TSAC  - reset, then the fixed two-sort relabeling, every iteration;
//   PPA   - sort all populations into non-increasing order, then reset;
//   noisy PPA - as PPA but the sort order comes from a Gaussian-perturbed
//               estimate of the populations while the true state is permuted.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hbac/permutation.hpp"
#include "hbac/state.hpp"

namespace hbac {

enum class ProtocolKind { kTsac, kPpa, kNoisyPpa };

const char* to_string(ProtocolKind kind);

/// Relative tolerance under which two populations count as tied when sorting.
inline constexpr double kSortTieTolerance = 1e-12;

DiagonalState reset_channel(const DiagonalState& state, const ResetSpec& reset);
DiagonalState two_sort(const DiagonalState& state);
DiagonalState tsac_step(const DiagonalState& state, const ResetSpec& reset);

/// U_TS^dagger (Tr_R(dm) (x) rho_R) U_TS with explicit matrices.
DensityMatrix tsac_step_density(const DensityMatrix& dm, const ResetSpec& reset);

/// Permutation that arranges `populations` in non-increasing order. Equal
/// entries, and entries within kSortTieTolerance relative of each other, keep
/// their original relative order.
Permutation sort_permutation(std::span<const double> populations);
Permutation ppa_sort_permutation(const DiagonalState& state);

std::pair<DiagonalState, Permutation> ppa_step(const DiagonalState& state,
                                               const ResetSpec& reset);

struct ProtocolStep {
  ProtocolKind kind;
  std::size_t iteration;  // 1-based: the step that produced state t from t-1
  /// Permutation applied during compression; null unless
  /// RunOptions::keep_permutations is set.
  std::shared_ptr<const Permutation> applied_permutation;
  double tv_to_prev;
  double pol_q0;
  /// Only for the PPA kinds.
  std::optional<Nbds> nbds;
};

struct Trajectory {
  ProtocolKind kind;
  ResetSpec reset;
  DiagonalState initial;
  DiagonalState final_state;
  std::vector<ProtocolStep> steps;
  /// First-qubit polarization of the initial state followed by one entry per step.
  std::vector<double> polarization_series;
  /// initial followed by every post-step state, when RunOptions::keep_states.
  std::vector<DiagonalState> states;
};

struct RunOptions {
  std::size_t max_iters = 1000;
  /// Stop once the TV distance between consecutive iterates drops below this.
  double stop_tv = 0.0;
  /// Standard deviation of the estimation noise. Must be 0 for plain PPA.
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  bool keep_states = false;
  bool keep_permutations = false;
  /// Called with (iteration, state) for the initial state (iteration 0) and
  /// after every step.
  std::function<void(std::size_t, const DiagonalState&)> observer;
};

Trajectory run_protocol(const DiagonalState& initial, const ResetSpec& reset,
                        ProtocolKind kind, const RunOptions& options);

/// CSV with columns iter,tv_to_prev,pol_q0,nbds (nbds = excl_fixed, blank for
/// TSAC). Row 0 is the initial state with blank tv_to_prev.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace hbac
