// Copyright 2026 The berrytrack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "berry/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "berry/bounds.hpp"
#include "berry/cost.hpp"
#include "berry/oracle.hpp"
#include "berry/tracker.hpp"
#include "json.hpp"

namespace berry::cli {
namespace {

using nlohmann::json;

// Raised for conditions that map to exit code 2.
struct PhaseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json header(const std::string& command) {
  return {{"schema_version", kSchemaVersion}, {"version", version()}, {"command", command}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw std::invalid_argument(std::string(flag) + ": bad value '" + item + "'");
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument(std::string(flag) + ": empty list");
  return values;
}

unsigned pool_size(std::size_t n_tasks) {
  // BERRY_THREADS sets the pool size outright so results can be checked
  // against thread count even on small machines.
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BERRY_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = static_cast<unsigned>(cap);
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(n_tasks, 1)));
}

struct TrackerFlags {
  std::string loop;
  std::string ansatz = "direct";
  bool reg = false;
  bool backtrack = false;
  double fidelity = 0.5;
  double m_thr = 1e-4;
  double block_tol = 1e-3;

  void add(CLI::App& app) {
    app.add_option("--loop", loop, "loop file or builtin:<name>")->required();
    app.add_option("--ansatz", ansatz, "uccd, npf:L or direct")->capture_default_str();
    app.add_flag("--reg", reg, "regularized Newton steps");
    app.add_flag("--backtrack", backtrack, "Armijo backtracking");
    app.add_option("--fidelity", fidelity, "minimum |omega|")->capture_default_str();
    app.add_option("--m-thr", m_thr, "convexity threshold")->capture_default_str();
    app.add_option("--block-tol", block_tol, "active-space alignment tolerance at closure")->capture_default_str();
  }

  TrackerConfig config(int n_steps) const {
    TrackerConfig cfg;
    cfg.n_steps = n_steps;
    cfg.reg = reg;
    cfg.backtrack = backtrack;
    cfg.fidelity = fidelity;
    cfg.m_thr = m_thr;
    return cfg;
  }
};

struct RunArgs {
  TrackerFlags tracker;
  int steps = 25;
  double sigma2_grad = 0.0;
  double sigma2_hess = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const LoopSpec loop = load_loop(a.tracker.loop);
  const AnsatzChoice choice = AnsatzChoice::parse(a.tracker.ansatz);
  TrackerConfig cfg = a.tracker.config(a.steps);
  cfg.sigma2_grad = a.sigma2_grad;
  cfg.sigma2_hess = a.sigma2_hess;
  cfg.seed = a.seed;
  cfg.validate();

  err << "run: loop " << loop.name << " (" << to_string(loop.kind) << "), ansatz " << choice.to_string() << ", N = "
      << cfg.n_steps << "\n";
  const auto cost = make_cost_model(loop, choice, a.tracker.block_tol);
  const BerryPhaseResult r = run_loop(*cost, cfg);
  err << "run: " << to_string(r.outcome) << " omega " << r.omega << " in " << r.wall_time_s << " s";
  if (!r.message.empty()) err << " (" << r.message << ")";
  err << "\n";

  json summary = header("run");
  summary["loop"] = loop.name;
  summary["ansatz"] = choice.to_string();
  summary["outcome"] = to_string(r.outcome);
  summary["fail_reason"] = to_string(r.reason);
  summary["omega"] = r.omega;
  summary["wall_time_s"] = r.wall_time_s;
  if (!a.out.empty()) {
    // The file omits timing so that equal commands produce equal files.
    json report = header("run");
    report["loop"] = loop.name;
    report["ansatz"] = choice.to_string();
    report["result"] = to_json(r, false);
    write_file(a.out, report.dump(1) + "\n");
    summary["out"] = a.out;
  }
  out << summary.dump() << "\n";
  return r.outcome == Outcome::Fail ? 2 : 0;
}

struct BenchmarkArgs {
  TrackerFlags tracker;
  std::string steps_list = "5,9,15,25";
  std::string sigma2_list = "1e-6,5e-6,1e-5,5e-5";
  int trials = 100;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out, std::ostream& err) {
  LoopSpec loop = load_loop(a.tracker.loop);
  // Keep every grid bundle resident; workers walk the loop out of phase.
  if (loop.n_grid() > 0) loop.cache = std::make_shared<BundleCache>(loop.n_grid());
  const AnsatzChoice choice = AnsatzChoice::parse(a.tracker.ansatz);
  if (a.trials < 1) throw std::invalid_argument("--trials must be positive");

  std::vector<int> steps;
  for (double v : parse_list(a.steps_list, "--steps-list")) {
    if (v != std::floor(v) || v < 2) throw std::invalid_argument("--steps-list: step counts must be integers >= 2");
    steps.push_back(static_cast<int>(v));
  }
  const std::vector<double> sigma2 = parse_list(a.sigma2_list, "--sigma2-list");
  for (int n : steps) {
    a.tracker.config(n).validate();
    loop.check_steps(n);
  }

  Phase reference;
  try {
    reference = discrete_berry_phase(exact_ground_path(loop));
  } catch (const OracleError& e) {
    throw PhaseFailure(std::string("oracle: ") + e.what());
  }
  err << "benchmark: oracle phase " << to_string(reference) << "\n";

  const std::size_t n_cells = steps.size() * sigma2.size();
  const std::size_t n_tasks = n_cells * static_cast<std::size_t>(a.trials);
  std::vector<Outcome> outcomes(n_tasks, Outcome::Fail);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  const auto worker = [&] {
    try {
      const auto cost = make_cost_model(loop, choice, a.tracker.block_tol);
      for (std::size_t i = next++; i < n_tasks; i = next++) {
        const std::size_t cell = i / static_cast<std::size_t>(a.trials);
        TrackerConfig cfg = a.tracker.config(steps[cell / sigma2.size()]);
        cfg.sigma2_grad = cfg.sigma2_hess = sigma2[cell % sigma2.size()];
        cfg.seed = trial_seed(a.seed, cell, i % static_cast<std::size_t>(a.trials));
        outcomes[i] = run_loop(*cost, cfg).outcome;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
      next = n_tasks;
    }
  };
  const unsigned n_threads = pool_size(n_tasks);
  err << "benchmark: " << n_tasks << " runs on " << n_threads << " threads\n";
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  const Outcome want = reference == Phase::Pi ? Outcome::Pi : Outcome::Zero;
  std::ostringstream csv;
  csv << "n_steps,sigma2,success_prob,n_fail\n";
  json rows = json::array();
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    int ok = 0, failed = 0;
    for (int k = 0; k < a.trials; ++k) {
      const Outcome o = outcomes[cell * static_cast<std::size_t>(a.trials) + static_cast<std::size_t>(k)];
      ok += o == want;
      failed += o == Outcome::Fail;
    }
    const int n = steps[cell / sigma2.size()];
    const double s2 = sigma2[cell % sigma2.size()];
    const double p = static_cast<double>(ok) / a.trials;
    csv << n << ',' << json(s2).dump() << ',' << json(p).dump() << ',' << failed << '\n';
    rows.push_back({{"n_steps", n}, {"sigma2", s2}, {"success_prob", p}, {"n_fail", failed}});
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.out.empty()) write_file(a.out, csv.str());

  json summary = header("benchmark");
  summary["loop"] = loop.name;
  summary["ansatz"] = choice.to_string();
  summary["oracle_phase"] = to_string(reference);
  summary["trials"] = a.trials;
  summary["seed"] = a.seed;
  summary["rows"] = rows;
  summary["wall_time_s"] = seconds;
  if (!a.out.empty()) summary["out"] = a.out;
  out << summary.dump() << "\n";
  return 0;
}

struct BoundsArgs {
  ProblemConstants c;
  std::string out;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out, std::ostream&) {
  json report = header("bounds");
  report["report"] = to_json(bounds_report(a.c));
  if (!a.out.empty()) {
    write_file(a.out, report.dump(1) + "\n");
    report["out"] = a.out;
  }
  out << report.dump() << "\n";
  return 0;
}

struct OracleArgs {
  std::string loop;
  int dense = 400;
  std::string gap_scan;
  std::string csv;
  std::string out;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out, std::ostream& err) {
  if (a.loop.empty() && a.gap_scan.empty()) throw std::invalid_argument("oracle: need --loop and/or --gap-scan");
  OracleOptions opt;
  opt.n_dense = a.dense;
  json report = header("oracle");
  try {
    if (!a.loop.empty()) {
      const LoopSpec loop = load_loop(a.loop);
      const GaugeFixedPath path = exact_ground_path(loop, opt);
      const Phase phase = discrete_berry_phase(path, opt.min_closing_overlap);
      err << "oracle: " << loop.name << " -> " << to_string(phase) << " (closing overlap " << path.closing_overlap
          << ")\n";
      report["loop"] = loop.name;
      report["phase"] = to_string(phase);
      report["n_points"] = path.states.size();
      report["closing_overlap"] = path.closing_overlap;
      report["min_gap"] = *std::min_element(path.gaps.begin(), path.gaps.end());
    }
  } catch (const OracleError& e) {
    json fail = header("oracle");
    fail["error"] = e.what();
    fail["t"] = e.t();
    out << fail.dump() << "\n";
    throw PhaseFailure(e.what());
  }
  if (!a.gap_scan.empty()) {
    const GapSurface s = gap_scan_file(a.gap_scan, opt);
    const GapPoint m = s.minimum();
    report["gap_scan"] = {{"n_points", s.points.size()},
                          {"param1_name", s.param1_name},
                          {"param2_name", s.param2_name},
                          {"minimum", {{"param1", m.param1}, {"param2", m.param2}, {"gap", m.gap}}}};
    if (!a.csv.empty()) {
      write_file(a.csv, s.to_csv());
      report["gap_scan"]["csv"] = a.csv;
    }
  }
  if (!a.out.empty()) {
    write_file(a.out, report.dump(1) + "\n");
    report["out"] = a.out;
  }
  out << report.dump() << "\n";
  return 0;
}

}  // namespace

std::string version() {
#ifdef BERRY_VERSION
  return BERRY_VERSION;
#else
  return "unknown";
#endif
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(base) ^ cell) ^ trial);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Berry phase tracking along closed parameter loops", "berry"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "track the ground state around one loop");
  run_args.tracker.add(*run);
  run->add_option("--steps", run_args.steps, "loop discretization N")->capture_default_str();
  run->add_option("--noise-sigma2-grad", run_args.sigma2_grad, "gradient noise variance");
  run->add_option("--noise-sigma2-hess", run_args.sigma2_hess, "Hessian noise variance");
  run->add_option("--seed", run_args.seed, "noise seed");
  run->add_option("--out", run_args.out, "result JSON file");

  BenchmarkArgs bench_args;
  CLI::App* bench = app.add_subcommand("benchmark", "success probability over steps and noise levels");
  bench_args.tracker.add(*bench);
  bench->add_option("--steps-list", bench_args.steps_list)->capture_default_str();
  bench->add_option("--sigma2-list", bench_args.sigma2_list)->capture_default_str();
  bench->add_option("--trials", bench_args.trials)->capture_default_str();
  bench->add_option("--seed", bench_args.seed);
  bench->add_option("--out", bench_args.out, "sweep CSV file");

  BoundsArgs bounds_args;
  CLI::App* bounds = app.add_subcommand("bounds", "sufficient step, noise and shot bounds");
  ProblemConstants& c = bounds_args.c;
  bounds->add_option("--m", c.m, "convexity lower bound")->capture_default_str();
  bounds->add_option("--lipschitz", c.L, "Hessian Lipschitz constant")->capture_default_str();
  bounds->add_option("--gdot-max", c.gdot_max)->capture_default_str();
  bounds->add_option("--n-params", c.n_p)->capture_default_str();
  bounds->add_option("--h-norm", c.H_norm)->capture_default_str();
  bounds->add_option("--hdot-norm", c.Hdot_norm)->capture_default_str();
  bounds->add_option("--gap", c.gap)->capture_default_str();
  bounds->add_option("--mh", c.M_H)->capture_default_str();
  bounds->add_option("--grad-norm", c.grad_norm)->capture_default_str();
  bounds->add_option("--out", bounds_args.out, "report JSON file");

  OracleArgs oracle_args;
  CLI::App* oracle = app.add_subcommand("oracle", "exact Berry phase and gap scans");
  oracle->add_option("--loop", oracle_args.loop, "loop file or builtin:<name>");
  oracle->add_option("--dense", oracle_args.dense, "grid points for analytic loops")->capture_default_str();
  oracle->add_option("--gap-scan", oracle_args.gap_scan, "gap grid JSON");
  oracle->add_option("--csv", oracle_args.csv, "gap surface CSV file");
  oracle->add_option("--out", oracle_args.out, "report JSON file");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(run_args, out, err);
    if (bench->parsed()) return cmd_benchmark(bench_args, out, err);
    if (bounds->parsed()) return cmd_bounds(bounds_args, out, err);
    return cmd_oracle(oracle_args, out, err);
  } catch (const PhaseFailure& e) {
    err << "berry: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "berry: " << e.what() << "\n";
    return 1;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace berry::cli
