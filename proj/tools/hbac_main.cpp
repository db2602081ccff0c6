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

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hbac/errors.hpp"
#include "hbac/harness.hpp"

namespace {

struct Overrides {
  std::optional<std::string> n, n_min, epsilon, xi, sigma, seeds, iters, out, initial, stop_tv;
};

void add_common(CLI::App& sub, std::string& config_path, Overrides& o) {
  sub.add_option("--config", config_path, "key=value configuration file");
  sub.add_option("--n", o.n, "computation qubits (largest n for sweeps)");
  sub.add_option("--n-min", o.n_min, "smallest n for sweeps");
  sub.add_option("--epsilon", o.epsilon, "reset bias; comma list for nbds");
  sub.add_option("--xi", o.xi, "target TV distance for mixing time");
  sub.add_option("--sigma", o.sigma, "comma list of noise standard deviations");
  sub.add_option("--seeds", o.seeds, "comma list or range, e.g. 1-20");
  sub.add_option("--iters", o.iters, "iteration count");
  sub.add_option("--stop-tv", o.stop_tv, "stop once successive TV falls below this");
  sub.add_option("--initial", o.initial, "thermal, mixed or a diagonal-state CSV path");
  sub.add_option("--out", o.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hbac::harness;
  CLI::App app{"heat-bath algorithmic cooling experiments"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides o;
  for (const char* name : {"converge", "spectrum", "nbds", "noise", "circuit"}) {
    add_common(*app.add_subcommand(name, std::string("run the ") + name + " experiment"),
               config_path, o);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig config;
    config.experiment = parse_experiment(app.get_subcommands().front()->get_name());
    if (!config_path.empty()) {
      config = load_config(config_path, config);
      config.experiment = parse_experiment(app.get_subcommands().front()->get_name());
    }
    const std::pair<const char*, const std::optional<std::string>*> flags[] = {
        {"n", &o.n},         {"n_min", &o.n_min}, {"epsilon", &o.epsilon}, {"xi", &o.xi},
        {"sigma", &o.sigma}, {"seeds", &o.seeds}, {"iters", &o.iters},     {"out", &o.out},
        {"initial", &o.initial}, {"stop_tv", &o.stop_tv}};
    for (const auto& [key, value] : flags) {
      if (*value) apply_setting(config, key, **value);
    }
    const RunRecord rec = run_experiment(config);
    for (const auto& f : rec.result_files) std::printf("%s/%s\n", config.output_path.c_str(), f.c_str());
    return 0;
  } catch (const hbac::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const hbac::AssertionFailure& e) {
    std::fprintf(stderr, "assertion failed: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
