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

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "hbac/permutation.hpp"
#include "hbac/protocols.hpp"
#include "hbac/rng.hpp"
#include "hbac/state.hpp"

namespace hbac {

std::vector<Permutation::Cycle> cycle_decomposition(const Permutation& perm);

/// Distinct cycle lengths ("blocks of different size") of a sort permutation.
Nbds nbds(const Permutation& perm);

struct NbdsRecord {
  int n = 0;
  double epsilon = 0.0;
  std::vector<int> per_iteration_nbds;       // excl_fixed, the headline variant
  std::vector<int> per_iteration_nbds_incl;  // incl_fixed
  int max_nbds = 0;
  int max_nbds_incl = 0;
  std::size_t iterations_run = 0;
};

/// Runs PPA from `initial` (n computation qubits + reset) and records the NBDS
/// of every iteration's sort permutation. Stops early once the state stops
/// changing (TV between iterates below 1e-15).
NbdsRecord nbds_trajectory(int n, const ResetSpec& reset, const DiagonalState& initial,
                           std::size_t max_iters);

/// One PPA iteration driven by a noisy estimate p~_i = p_i + g_i with
/// g_i ~ Normal(0, sigma^2). The sort order of the estimate is applied to the
/// true populations, then the reset qubit is reset.
std::pair<DiagonalState, Permutation> noisy_ppa_step(const DiagonalState& state,
                                                     const ResetSpec& reset, double sigma,
                                                     Rng& rng);

/// Least-squares slope of log2(max_nbds) against n. Entries with max_nbds == 0
/// are rejected.
double log2_growth_slope(const std::vector<std::pair<int, int>>& n_and_max_nbds);

// "n,epsilon,iter,nbds_incl,nbds_excl"
void write_nbds_csv_header(std::ostream& out);
void write_nbds_csv_rows(std::ostream& out, const NbdsRecord& record);

}  // namespace hbac
