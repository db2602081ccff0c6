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

#include "hbac/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hbac/circuit.hpp"
#include "hbac/csv.hpp"
#include "hbac/errors.hpp"
#include "hbac/markov.hpp"
#include "hbac/ppa_analysis.hpp"
#include "hbac/protocols.hpp"
#include "hbac/rng.hpp"
#include "hbac/state.hpp"

namespace hbac::harness {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kMaxConvergeQubits = 16;
constexpr int kMaxNbdsQubits = 12;
constexpr int kMaxNoiseQubits = 14;
constexpr int kMaxCountWidth = 20;

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> parse_double_list(const std::string& value) {
  std::vector<double> out;
  for (auto part : csv::split(value, ',')) {
    if (!csv::trim(part).empty()) out.push_back(csv::parse_double(part));
  }
  if (out.empty()) throw ValidationError("empty list");
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& value) {
  std::vector<std::uint64_t> out;
  for (auto part : csv::split(value, ',')) {
    part = csv::trim(part);
    if (part.empty()) continue;
    const auto dash = part.find('-', 1);
    if (dash != std::string_view::npos) {
      const long long lo = csv::parse_int(part.substr(0, dash));
      const long long hi = csv::parse_int(part.substr(dash + 1));
      if (lo < 0 || hi < lo) throw ValidationError("bad seed range");
      for (long long s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
    } else {
      const long long s = csv::parse_int(part);
      if (s < 0) throw ValidationError("seeds must be non-negative");
      out.push_back(static_cast<std::uint64_t>(s));
    }
  }
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += csv::format_double(v[i]);
  }
  return s;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void check_underflow(int n, double eps) {
  require(std::ldexp(1.0, n) - 1.0 <= kMaxUnderflowExponent / eps,
          "(2^n - 1) * epsilon = " + csv::format_double((std::ldexp(1.0, n) - 1.0) * eps) +
              " exceeds 600 (n=" + std::to_string(n) + ", epsilon=" + csv::format_double(eps) + ")");
}

DiagonalState initial_state(const ExperimentConfig& c, int num_qubits, const ResetSpec& reset) {
  switch (c.initial) {
    case InitialKind::kThermal:
      return make_thermal(num_qubits, reset);
    case InitialKind::kMixed:
      return make_maximally_mixed(num_qubits);
    case InitialKind::kCustom: {
      std::ifstream in(c.initial_path);
      require(in.good(), "cannot open initial state file " + c.initial_path);
      DiagonalState s = read_diagonal_csv(in);
      require(s.num_qubits() == num_qubits,
              "initial state must have " + std::to_string(num_qubits) + " qubits");
      return s;
    }
  }
  throw ValidationError("unknown initial state kind");
}

class OutputDir {
 public:
  OutputDir(const fs::path& root, RunRecord& record) : root_(root), record_(record) {
    fs::create_directories(root_);
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = root_ / name;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    record_.result_files.push_back(name);
    return out;
  }

  void write(const std::string& name, const std::string& content) { open(name) << content; }

 private:
  fs::path root_;
  RunRecord& record_;
};

RunRecord start_record(const ExperimentConfig& config) {
  RunRecord r;
  r.config = config;
  r.started = now_utc();
  std::string inputs = canonical_text(config);
  if (config.initial == InitialKind::kCustom) {
    std::ifstream in(config.initial_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    inputs += "\n" + ss.str();
  }
  r.input_hash = git_blob_hash(inputs);
  return r;
}

json metrics_json(const RunRecord& r) {
  json j;
  for (const auto& [k, v] : r.metrics) j[k] = v;
  return j;
}

// First iteration whose TV to the target is <= xi, or -1.
long long first_at_or_below(const std::vector<double>& series, double xi) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] <= xi) return static_cast<long long>(i);
  }
  return -1;
}

}  // namespace

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::kConverge:
      return "converge";
    case Experiment::kSpectrum:
      return "spectrum";
    case Experiment::kNbds:
      return "nbds";
    case Experiment::kNoise:
      return "noise";
    case Experiment::kCircuit:
      return "circuit";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::kConverge, Experiment::kSpectrum, Experiment::kNbds,
                       Experiment::kNoise, Experiment::kCircuit}) {
    if (name == to_string(e)) return e;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw) {
  const std::string value(csv::trim(raw));
  if (key == "experiment") {
    c.experiment = parse_experiment(value);
  } else if (key == "n") {
    c.n = static_cast<int>(csv::parse_int(value));
  } else if (key == "n_min") {
    c.n_min = static_cast<int>(csv::parse_int(value));
  } else if (key == "epsilon") {
    c.epsilons = parse_double_list(value);
  } else if (key == "sigma") {
    c.sigma_list = parse_double_list(value);
  } else if (key == "xi") {
    c.xi = csv::parse_double(value);
  } else if (key == "iters") {
    const long long v = csv::parse_int(value);
    require(v >= 0, "iters must be >= 0");
    c.max_iters = static_cast<std::size_t>(v);
  } else if (key == "stop_tv") {
    c.stop_tv = csv::parse_double(value);
  } else if (key == "seeds") {
    c.seeds = parse_seeds(value);
  } else if (key == "initial") {
    if (value == "thermal") {
      c.initial = InitialKind::kThermal;
    } else if (value == "mixed") {
      c.initial = InitialKind::kMixed;
    } else {
      c.initial = InitialKind::kCustom;
      c.initial_path = value;
    }
  } else if (key == "out") {
    c.output_path = value;
  } else if (key == "count_max") {
    c.count_max = static_cast<int>(csv::parse_int(value));
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

ExperimentConfig load_config(const fs::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    std::string_view t = csv::trim(std::string_view(line).substr(0, hash));
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    apply_setting(base, std::string(csv::trim(t.substr(0, eq))), std::string(t.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig resolve_defaults(ExperimentConfig c) {
  if (c.n == 0) {
    switch (c.experiment) {
      case Experiment::kNbds:
        c.n = 10;
        break;
      case Experiment::kCircuit:
        c.n = 8;
        break;
      default:
        c.n = 2;
    }
  }
  if (c.seeds.empty()) {
    if (c.experiment == Experiment::kNoise) {
      for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
    } else {
      c.seeds = {1};
    }
  }
  if (c.n_min == 0) c.n_min = c.experiment == Experiment::kCircuit ? 2 : 3;
  if (c.max_iters == 0) {
    switch (c.experiment) {
      case Experiment::kConverge: {
        // The first-qubit polarization depends on relative accuracy in the far
        // tail; the bound's ln(1/l) term covers that at a tight xi.
        if (c.n >= 1 && c.n <= kMaxConvergeQubits && c.epsilon() > 0.0) {
          const double b = mixing_time_bound(c.n, ResetSpec(c.epsilon()), 1e-13);
          c.max_iters = static_cast<std::size_t>(std::ceil(b)) + 1;
        } else {
          c.max_iters = 1000;
        }
        break;
      }
      case Experiment::kNbds:
        c.max_iters = 20000;
        break;
      case Experiment::kNoise:
        c.max_iters = 500;
        break;
      default:
        c.max_iters = 1;
    }
  }
  return c;
}

void validate(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  require(!c.epsilons.empty(), "epsilon is required");
  for (double e : c.epsilons) {
    require(std::isfinite(e) && e > 0.0, "epsilon must be finite and > 0");
  }
  require(c.experiment == Experiment::kNbds || c.epsilons.size() == 1,
          "only the nbds experiment accepts several epsilon values");
  require(c.stop_tv >= 0.0, "stop_tv must be >= 0");
  switch (c.experiment) {
    case Experiment::kConverge:
      require(c.n >= 1 && c.n <= kMaxConvergeQubits, "converge: n must be in [1, 16]");
      check_underflow(c.n, c.epsilon());
      require(c.xi > 0.0 && c.xi < 1.0, "xi must lie in (0, 1)");
      break;
    case Experiment::kSpectrum:
      require(c.n >= 1 && c.n <= kMaxSpectrumQubits, "spectrum: n must be in [1, 10]");
      check_underflow(c.n, c.epsilon());
      break;
    case Experiment::kNbds:
      require(c.n_min >= 2 && c.n_min <= c.n && c.n <= kMaxNbdsQubits,
              "nbds: need 2 <= n_min <= n <= 12");
      for (double e : c.epsilons) check_underflow(c.n, e);
      break;
    case Experiment::kNoise:
      require(c.n >= 1 && c.n <= kMaxNoiseQubits, "noise: n must be in [1, 14]");
      check_underflow(c.n, c.epsilon());
      require(!c.seeds.empty(), "noise: at least one seed is required");
      require(!c.sigma_list.empty(), "noise: at least one sigma is required");
      for (double s : c.sigma_list) require(std::isfinite(s) && s >= 0.0, "sigma must be >= 0");
      break;
    case Experiment::kCircuit:
      require(c.n_min >= 2 && c.n_min <= c.n && c.n <= circuit::kMaxReconstructQubits,
              "circuit: need 2 <= n_min <= n <= 10");
      require(c.count_max >= 3 && c.count_max <= kMaxCountWidth,
              "circuit: count_max must be in [3, 20]");
      break;
  }
  if (c.initial == InitialKind::kCustom) {
    require(fs::exists(c.initial_path), "initial state file not found: " + c.initial_path);
  }
}

std::string canonical_text(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  std::ostringstream s;
  s << "experiment=" << to_string(c.experiment) << '\n'
    << "n=" << c.n << '\n'
    << "n_min=" << c.n_min << '\n'
    << "epsilon=" << join_doubles(c.epsilons) << '\n'
    << "sigma=" << join_doubles(c.sigma_list) << '\n'
    << "xi=" << csv::format_double(c.xi) << '\n'
    << "iters=" << c.max_iters << '\n'
    << "stop_tv=" << csv::format_double(c.stop_tv) << '\n'
    << "seeds=";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) s << (i ? "," : "") << c.seeds[i];
  s << '\n' << "initial=";
  switch (c.initial) {
    case InitialKind::kThermal:
      s << "thermal";
      break;
    case InitialKind::kMixed:
      s << "mixed";
      break;
    case InitialKind::kCustom:
      s << c.initial_path;
      break;
  }
  s << '\n' << "count_max=" << c.count_max << '\n';
  return s.str();
}

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("HBAC_THREADS")) {
    const long long v = csv::parse_int(env);
    if (v < 1) throw ValidationError("HBAC_THREADS must be >= 1");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& task) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RunRecord run_converge(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec = start_record(c);
  OutputDir out(c.output_path, rec);

  const ResetSpec reset(c.epsilon());
  const DiagonalState init = initial_state(c, c.n + 1, reset);
  const DiagonalState target = oas(c.n, reset);
  const double bound = mixing_time_bound(c.n, reset, c.xi);

  std::vector<double> tv_tsac, tv_ppa;
  auto run = [&](ProtocolKind kind, std::vector<double>& tv) {
    RunOptions o;
    o.max_iters = c.max_iters;
    o.stop_tv = c.stop_tv;
    o.observer = [&](std::size_t, const DiagonalState& s) {
      tv.push_back(tv_distance(s.marginal_leading(c.n), target));
    };
    return run_protocol(init, reset, kind, o);
  };
  const Trajectory tsac = run(ProtocolKind::kTsac, tv_tsac);
  const Trajectory ppa = run(ProtocolKind::kPpa, tv_ppa);

  {
    auto f = out.open("converge_tsac.csv");
    write_trajectory_csv(f, tsac);
  }
  {
    auto f = out.open("converge_ppa.csv");
    write_trajectory_csv(f, ppa);
  }
  {
    auto f = out.open("converge_tv_to_oas.csv");
    f << "iter,tsac_tv_to_oas,ppa_tv_to_oas\n";
    for (std::size_t i = 0; i < std::max(tv_tsac.size(), tv_ppa.size()); ++i) {
      f << i << ',';
      if (i < tv_tsac.size()) f << csv::format_double(tv_tsac[i]);
      f << ',';
      if (i < tv_ppa.size()) f << csv::format_double(tv_ppa[i]);
      f << '\n';
    }
  }
  out.write("plots/converge.recipe",
            "converge_tsac.csv / converge_ppa.csv: x=iter, y=pol_q0 (first-qubit polarization)\n"
            "converge_tv_to_oas.csv: x=iter, y=tsac_tv_to_oas and ppa_tv_to_oas, log y axis\n");

  const long long t_tsac = first_at_or_below(tv_tsac, c.xi);
  const long long t_ppa = first_at_or_below(tv_ppa, c.xi);
  rec.metrics["mixing_time_bound"] = bound;
  rec.metrics["empirical_tmix_tsac"] = static_cast<double>(t_tsac);
  rec.metrics["empirical_tmix_ppa"] = static_cast<double>(t_ppa);
  rec.metrics["final_pol_tsac"] = tsac.polarization_series.back();
  rec.metrics["final_pol_ppa"] = ppa.polarization_series.back();
  rec.metrics["oas_pol"] = std::ldexp(c.epsilon(), c.n - 1);
  rec.metrics["final_tv_to_oas_tsac"] = tv_tsac.back();
  rec.metrics["final_tv_to_oas_ppa"] = tv_ppa.back();
  rec.metrics["iterations_tsac"] = static_cast<double>(tsac.steps.size());
  rec.metrics["iterations_ppa"] = static_cast<double>(ppa.steps.size());

  json summary;
  summary["n"] = c.n;
  summary["epsilon"] = c.epsilon();
  summary["xi"] = c.xi;
  summary["metrics"] = metrics_json(rec);
  out.write("summary.json", summary.dump(2) + "\n");

  if (t_tsac < 0) {
    if (static_cast<double>(c.max_iters) < bound) {
      throw ValidationError("TSAC did not reach xi within iters=" + std::to_string(c.max_iters) +
                            "; raise iters to at least the bound " + csv::format_double(bound));
    }
    throw AssertionFailure("TSAC did not reach xi within the mixing-time bound");
  }
  if (static_cast<double>(t_tsac) > bound) {
    throw AssertionFailure("empirical mixing time " + std::to_string(t_tsac) +
                           " exceeds the bound " + csv::format_double(bound));
  }
  return rec;
}

RunRecord run_spectrum(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec = start_record(c);
  OutputDir out(c.output_path, rec);
  const ResetSpec reset(c.epsilon());
  const SpectrumReport rep = verify_spectrum(c.n, reset);
  out.write("spectrum.json", to_json(rep) + "\n");
  if (c.n <= 8) {
    auto f = out.open("transfer_matrix.csv");
    write_dense_csv(f, build_transfer_matrix(c.n, reset));
  }
  rec.metrics["max_abs_error"] = rep.max_abs_error;
  rec.metrics["gap"] = rep.gap;
  rec.metrics["gap_lower_bound"] = rep.gap_lower_bound;
  rec.metrics["stationary_tv_to_oas"] = rep.stationary_tv_to_oas;
  return rec;
}

RunRecord run_nbds(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec = start_record(c);
  OutputDir out(c.output_path, rec);

  struct Task {
    int n;
    double eps;
  };
  std::vector<Task> tasks;
  for (double e : c.epsilons) {
    for (int n = c.n_min; n <= c.n; ++n) tasks.push_back({n, e});
  }
  std::vector<NbdsRecord> results(tasks.size());
  parallel_for(tasks.size(), worker_threads(), [&](std::size_t i) {
    const ResetSpec reset(tasks[i].eps);
    results[i] = nbds_trajectory(tasks[i].n, reset, initial_state(c, tasks[i].n + 1, reset),
                                 c.max_iters);
  });

  {
    auto f = out.open("nbds.csv");
    write_nbds_csv_header(f);
    for (const auto& r : results) write_nbds_csv_rows(f, r);
  }
  json per_eps = json::array();
  {
    auto f = out.open("nbds_summary.csv");
    f << "n,epsilon,max_nbds_excl,max_nbds_incl,iterations_run\n";
    for (const auto& r : results) {
      f << r.n << ',' << csv::format_double(r.epsilon) << ',' << r.max_nbds << ','
        << r.max_nbds_incl << ',' << r.iterations_run << '\n';
    }
  }
  std::size_t idx = 0;
  for (double e : c.epsilons) {
    std::vector<std::pair<int, int>> pts;
    bool monotone = true;
    for (int n = c.n_min; n <= c.n; ++n, ++idx) {
      pts.emplace_back(n, results[idx].max_nbds);
      if (pts.size() > 1 && pts.back().second < pts[pts.size() - 2].second) monotone = false;
    }
    json j;
    j["epsilon"] = e;
    const bool fit = pts.size() >= 2 &&
                     std::all_of(pts.begin(), pts.end(), [](auto p) { return p.second > 0; });
    const double slope = fit ? log2_growth_slope(pts) : 0.0;
    j["log2_slope"] = fit ? json(slope) : json(nullptr);
    j["non_decreasing"] = monotone;
    json maxes = json::array();
    for (auto [n, v] : pts) maxes.push_back({{"n", n}, {"max_nbds", v}});
    j["max_nbds"] = maxes;
    per_eps.push_back(j);
    rec.metrics["log2_slope_eps_" + csv::format_double(e)] = slope;
  }
  json summary;
  summary["n_min"] = c.n_min;
  summary["n_max"] = c.n;
  summary["per_epsilon"] = per_eps;
  out.write("summary.json", summary.dump(2) + "\n");
  out.write("plots/nbds.recipe",
            "nbds_summary.csv: x=n, y=max_nbds_excl (log2 axis), one line per epsilon\n"
            "nbds.csv: x=iter, y=nbds_excl, facet by (n, epsilon)\n");
  return rec;
}

RunRecord run_noise(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec = start_record(c);
  OutputDir out(c.output_path, rec);
  const ResetSpec reset(c.epsilon());
  const DiagonalState init = initial_state(c, c.n + 1, reset);

  const std::size_t ns = c.sigma_list.size();
  const std::size_t nseed = c.seeds.size();
  // Slot (s, k) for sigma index s and seed index k; merged in that order.
  std::vector<std::vector<double>> ppa_pol(ns * nseed), tsac_pol(ns * nseed);
  parallel_for(ns * nseed, worker_threads(), [&](std::size_t slot) {
    const std::size_t s = slot / nseed;
    const std::size_t k = slot % nseed;
    RunOptions o;
    o.max_iters = c.max_iters;
    o.noise_sigma = c.sigma_list[s];
    o.rng_seed = c.seeds[k] ^ static_cast<std::uint64_t>(s);
    ppa_pol[slot] = run_protocol(init, reset, ProtocolKind::kNoisyPpa, o).polarization_series;
    tsac_pol[slot] = run_protocol(init, reset, ProtocolKind::kTsac, o).polarization_series;
  });

  auto write_runs = [&](const std::string& name, const std::vector<std::vector<double>>& pol) {
    auto f = out.open(name);
    f << "sigma,seed,iter,pol_q0\n";
    for (std::size_t slot = 0; slot < pol.size(); ++slot) {
      const std::string sig = csv::format_double(c.sigma_list[slot / nseed]);
      const auto seed = c.seeds[slot % nseed];
      for (std::size_t t = 0; t < pol[slot].size(); ++t) {
        f << sig << ',' << seed << ',' << t << ',' << csv::format_double(pol[slot][t]) << '\n';
      }
    }
  };
  write_runs("noise.csv", ppa_pol);
  write_runs("noise_tsac.csv", tsac_pol);

  const std::size_t window_lo = std::min<std::size_t>(200, c.max_iters);
  json per_sigma = json::array();
  {
    auto f = out.open("noise_summary.csv");
    f << "sigma,iter,mean,min,max\n";
    for (std::size_t s = 0; s < ns; ++s) {
      const std::size_t len = ppa_pol[s * nseed].size();
      double window_sum = 0.0;
      std::size_t window_count = 0;
      for (std::size_t t = 0; t < len; ++t) {
        double sum = 0.0, lo = INFINITY, hi = -INFINITY;
        for (std::size_t k = 0; k < nseed; ++k) {
          const double v = ppa_pol[s * nseed + k][t];
          sum += v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        const double mean = sum / static_cast<double>(nseed);
        if (t >= window_lo) {
          window_sum += mean;
          ++window_count;
        }
        f << csv::format_double(c.sigma_list[s]) << ',' << t << ',' << csv::format_double(mean)
          << ',' << csv::format_double(lo) << ',' << csv::format_double(hi) << '\n';
      }
      json j;
      j["sigma"] = c.sigma_list[s];
      j["window_mean_pol_q0"] = window_sum / static_cast<double>(std::max<std::size_t>(1, window_count));
      per_sigma.push_back(j);
    }
  }
  bool tsac_identical = true;
  for (std::size_t slot = 1; slot < tsac_pol.size(); ++slot) {
    if (tsac_pol[slot] != tsac_pol[0]) tsac_identical = false;
  }
  rec.metrics["tsac_identical_across_sigma"] = tsac_identical ? 1.0 : 0.0;
  rec.metrics["oas_pol"] = std::ldexp(c.epsilon(), c.n - 1);

  json summary;
  summary["n"] = c.n;
  summary["epsilon"] = c.epsilon();
  summary["window"] = {window_lo, c.max_iters};
  summary["per_sigma"] = per_sigma;
  summary["tsac_identical_across_sigma"] = tsac_identical;
  out.write("summary.json", summary.dump(2) + "\n");
  out.write("plots/noise.recipe",
            "noise_summary.csv: x=iter, y=mean with [min,max] band, one curve per sigma\n"
            "noise_tsac.csv: x=iter, y=pol_q0; identical for every sigma\n");
  if (!tsac_identical) throw AssertionFailure("TSAC trajectories differ across sigma");
  return rec;
}

RunRecord run_circuit(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec = start_record(c);
  OutputDir out(c.output_path, rec);

  json verify = json::array();
  bool all_ok = true;
  for (int m = c.n_min; m <= c.n; ++m) {
    const circuit::GateSequence seq = circuit::synth_two_sort(m);
    const double err =
        circuit::distance_up_to_phase(circuit::gates_to_unitary(seq), circuit::two_sort_matrix(m));
    std::ostringstream net;
    circuit::write_netlist(net, seq);
    std::istringstream back(net.str());
    const bool round_trip = circuit::read_netlist(back) == seq;
    const bool ok = err <= 1e-9 && round_trip;
    all_ok = all_ok && ok;
    out.write("two_sort_m" + std::to_string(m) + ".netlist", net.str());
    auto qasm = out.open("two_sort_m" + std::to_string(m) + ".qasm");
    circuit::write_qasm(qasm, seq);
    verify.push_back({{"m", m}, {"max_abs_error", err}, {"netlist_round_trip", round_trip},
                      {"verified", ok}});
  }

  double c_fit = 0.0;
  json counts = json::array();
  {
    auto f = out.open("gate_counts.csv");
    f << "m,total,total_expanded,expanded_over_m2\n";
    for (int m = 3; m <= c.count_max; ++m) {
      const circuit::GateSequence seq = circuit::synth_two_sort(m);
      const auto plain = circuit::gate_count(seq, false);
      const auto expanded = circuit::gate_count(seq, true);
      const double ratio = static_cast<double>(expanded.total) / (m * m);
      c_fit = std::max(c_fit, ratio);
      f << m << ',' << plain.total << ',' << expanded.total << ',' << csv::format_double(ratio)
        << '\n';
      counts.push_back({{"m", m}, {"total", plain.total}, {"total_expanded", expanded.total}});
    }
  }
  rec.metrics["c_fit"] = c_fit;
  rec.metrics["all_verified"] = all_ok ? 1.0 : 0.0;
  json j;
  j["verification"] = verify;
  j["gate_counts"] = counts;
  j["c_fit"] = c_fit;
  out.write("circuit_verification.json", j.dump(2) + "\n");
  out.write("plots/circuit.recipe",
            "gate_counts.csv: x=m, y=total_expanded and c_fit*m^2\n");
  if (!all_ok) throw AssertionFailure("two-sort circuit verification failed");
  return rec;
}

RunRecord run_experiment(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolve_defaults(raw);
  validate(c);
  RunRecord rec;
  switch (c.experiment) {
    case Experiment::kConverge:
      rec = run_converge(c);
      break;
    case Experiment::kSpectrum:
      rec = run_spectrum(c);
      break;
    case Experiment::kNbds:
      rec = run_nbds(c);
      break;
    case Experiment::kNoise:
      rec = run_noise(c);
      break;
    case Experiment::kCircuit:
      rec = run_circuit(c);
      break;
  }
  rec.finished = now_utc();
  json j;
  j["experiment"] = to_string(c.experiment);
  j["config"] = canonical_text(c);
  j["input_hash"] = rec.input_hash;
  j["started"] = rec.started;
  j["finished"] = rec.finished;
  j["result_files"] = rec.result_files;
  j["metrics"] = metrics_json(rec);
  std::ofstream(fs::path(c.output_path) / "run.json") << j.dump(2) << '\n';
  return rec;
}

}  // namespace hbac::harness
