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

// Experiment runner behind the `hbac` command line tool. Each experiment
// validates its configuration before allocating anything large, writes CSV
// (and JSON summaries) into the output directory, and returns a RunRecord.
// Identical configurations and seeds give byte-identical CSV files.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace hbac::harness {

enum class Experiment { kConverge, kSpectrum, kNbds, kNoise, kCircuit };
enum class InitialKind { kThermal, kMixed, kCustom };

const char* to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::kConverge;
  /// Computation qubits (converge, spectrum, noise); the largest n of the nbds
  /// sweep; the largest verified width for circuit. 0 picks the experiment
  /// default (2, 2, 10, 2 and 8 respectively).
  int n = 0;
  /// Smallest n of the nbds sweep (default 3) and smallest width for circuit
  /// (default 2).
  int n_min = 0;
  /// Several values only for nbds.
  std::vector<double> epsilons = {0.1};
  std::vector<double> sigma_list = {0.0};
  double xi = 1e-6;
  /// 0 picks an experiment-specific default.
  std::size_t max_iters = 0;
  double stop_tv = 0.0;
  /// Empty picks 1..20 for noise and {1} elsewhere.
  std::vector<std::uint64_t> seeds;
  InitialKind initial = InitialKind::kThermal;
  std::string initial_path;
  std::string output_path = "out";
  /// Largest width for the circuit gate-count table.
  int count_max = 12;

  double epsilon() const { return epsilons.front(); }
};

/// Copy with every "0 = default" field resolved for its experiment.
ExperimentConfig resolve_defaults(ExperimentConfig config);

/// Applies one key=value setting. Keys: experiment, n, n_min, epsilon, sigma,
/// xi, iters, stop_tv, seeds, initial, out, count_max. Lists are comma
/// separated; seeds also accept ranges such as 1-20.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Flat key=value file; '#' starts a comment.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Range checks for the chosen experiment; throws ValidationError.
void validate(const ExperimentConfig& config);

/// Canonical key=value text of a configuration (stable key order).
std::string canonical_text(const ExperimentConfig& config);

/// SHA-1 over "blob <size>\0<content>", the way git names file contents.
std::string git_blob_hash(const std::string& content);

struct RunRecord {
  ExperimentConfig config;
  std::string started;
  std::string finished;
  std::string input_hash;
  std::vector<std::string> result_files;
  /// Experiment-specific scalars, also written to summary JSON.
  std::map<std::string, double> metrics;
};

RunRecord run_converge(const ExperimentConfig& config);
RunRecord run_spectrum(const ExperimentConfig& config);
RunRecord run_nbds(const ExperimentConfig& config);
RunRecord run_noise(const ExperimentConfig& config);
RunRecord run_circuit(const ExperimentConfig& config);

/// Validates, dispatches on config.experiment and writes run.json.
RunRecord run_experiment(const ExperimentConfig& config);

/// Worker count: HBAC_THREADS if set (>= 1), else hardware concurrency.
unsigned worker_threads();

/// Runs task(i) for i in [0, count) on up to `threads` workers. Tasks must
/// write only their own result slot.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& task);

}  // namespace hbac::harness
