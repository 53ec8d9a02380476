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

// Acceptance suite: one PASS/FAIL line per criterion, each within its time
// budget. Exit status is 0 when the failing set equals the one named by
// --expect-red (empty by default), so a known shortfall stays visible without
// hiding regressions or silent fixes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "berry/bounds.hpp"
#include "berry/cost.hpp"
#include "berry/noise.hpp"
#include "berry/oracle.hpp"
#include "berry/scf.hpp"
#include "berry/tracker.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "simulations.hpp"

namespace berry {
namespace {

namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double budget_s;
  std::function<Verdict()> check;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::string kFixtures = BERRY_FIXTURE_DIR;

Verdict analytic_loops() {
  std::ostringstream d;
  bool pass = true;
  for (const auto& [name, want] : {std::pair{"qubit-ci", Outcome::Pi}, std::pair{"qubit-trivial", Outcome::Zero}}) {
    const auto start = std::chrono::steady_clock::now();
    const LoopSpec loop = builtin_loop(name);
    TrackerConfig cfg;
    cfg.n_steps = 25;
    const BerryPhaseResult r = run_loop(*make_cost_model(loop, AnsatzChoice::parse("direct")), cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double target = want == Outcome::Pi ? -1.0 : 1.0;
    const Phase oracle = discrete_berry_phase(exact_ground_path(loop));
    const bool ok = r.outcome == want && std::abs(r.omega - target) <= 1e-6 && secs < 1.0 &&
                    to_string(oracle) == to_string(r.outcome);
    pass = pass && ok;
    d << fmt("%s %s omega %.11f (|omega %+g| = %.2e, tol 1e-6), oracle %s, %.3f s; ", name, to_string(r.outcome).c_str(),
             r.omega, -target, std::abs(r.omega - target), to_string(oracle).c_str(), secs);
  }
  std::string text = d.str();
  return {pass, text.substr(0, text.size() - 2)};
}

Verdict oracle_equivalence() {
  int compared = 0, disagreements = 0, fails = 0, loops = 0;
  auto check = [&](const LoopSpec& loop, const std::string& ansatz, const std::vector<int>& steps) {
    const Phase want = discrete_berry_phase(exact_ground_path(loop));
    const auto cost = make_cost_model(loop, AnsatzChoice::parse(ansatz));
    ++loops;
    for (bool reg : {false, true})
      for (int n : steps) {
        TrackerConfig cfg;
        cfg.n_steps = n;
        cfg.reg = reg;
        cfg.backtrack = reg;
        const BerryPhaseResult r = run_loop(*cost, cfg);
        if (r.outcome == Outcome::Fail) {
          ++fails;
          continue;
        }
        ++compared;
        disagreements += to_string(r.outcome) != to_string(want);
      }
  };
  for (const char* name : {"qubit-ci", "qubit-trivial", "effective-ci"}) check(builtin_loop(name), "direct", {25, 50, 100});
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) check(testing::random_real_loop(1 + k % 3, 1 + k % 2, 0.05, rng), "direct", {25, 50, 100});
  for (const char* name : {"ci_loop", "trivial_loop"}) check(load_loop(kFixtures + "/" + name + ".loop.json"), "uccd", {50});
  return {disagreements == 0 && compared > 0,
          fmt("%d loops (3 builtin, 20 random <= 3 qubits, 2 fixture bundle loops), %d runs compared, %d FAIL, "
              "%d disagreements",
              loops, compared, fails, disagreements)};
}

Verdict quadratic_convergence() {
  const testing::ConvergenceReport r = testing::quadratic_convergence_check(100, 7);
  return {r.n_ok == r.n_starts && r.n_starts == 100,
          fmt("%d/%d starts inside m/(4L) satisfy |theta_NR - theta*| <= (L/m)|theta0 - theta*|^2; worst margin %.3e",
              r.n_ok, r.n_starts, r.worst_margin)};
}

// Worst relative error of each derivative block of the orbital-optimized cost
// against central differences of its energy in the local [theta; kappa] chart.
struct BlockErrors {
  double grad_theta = 0, grad_kappa = 0, hess_theta = 0, hess_kappa = 0, hess_mixed = 0;
};

BlockErrors derivative_errors(const ActiveSpaceSpec& active, bool npf, std::uint64_t seed, const fs::path& dir) {
  std::mt19937_64 rng(seed);
  const IntegralBundle bundle = testing::random_bundle(active.n_orb(), rng);
  fs::create_directories(dir);
  save_bundle(bundle, dir / "a.json");
  save_bundle(bundle, dir / "b.json");
  std::ofstream(dir / "loop.json") << nlohmann::json{
      {"kind", "bundle-list"},
      {"points", {{{"t", 0.0}, {"path", "a.json"}}, {{"t", 0.5}, {"path", "b.json"}}}},
      {"active_space",
       {{"n_core", active.n_core}, {"n_active", active.n_active}, {"n_virtual", active.n_virtual},
        {"n_active_electrons", active.n_active_electrons}}}};
  const LoopSpec loop = load_loop((dir / "loop.json").string());
  AnsatzCircuit ansatz = npf ? build_npf_ansatz(active, 2) : build_uccd_ansatz(active);
  const OrbitalOptimizedCost cost(loop, ansatz, KappaIndex(active, !npf), testing::random_orthogonal(active.n_orb(), rng));
  Variables v = cost.initial_guess();
  v.theta = testing::random_vector(v.theta.size(), rng, 0.5);

  const CostDerivatives d = cost.derivatives(0.0, v, true);
  const auto n = static_cast<Eigen::Index>(cost.n_params());
  const auto nt = static_cast<Eigen::Index>(cost.n_theta());
  auto f = [&](const Eigen::VectorXd& x) { return cost.energy(0.0, cost.retract(v, x)); };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const double gscale = std::max(1.0, d.grad.cwiseAbs().maxCoeff());
  const double hscale = std::max(1.0, d.hess.cwiseAbs().maxCoeff());
  BlockErrors e;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double hg = 1e-5;
    Eigen::VectorXd xp = zero, xm = zero;
    xp(i) = hg;
    xm(i) = -hg;
    const double err = std::abs(d.grad(i) - (f(xp) - f(xm)) / (2 * hg)) / gscale;
    (i < nt ? e.grad_theta : e.grad_kappa) = std::max(i < nt ? e.grad_theta : e.grad_kappa, err);
    for (Eigen::Index k = 0; k <= i; ++k) {
      const double h = 1e-4;
      auto at = [&](double a, double b) {
        Eigen::VectorXd x = zero;
        x(i) += a;
        x(k) += b;
        return f(x);
      };
      const double fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
      const double herr = std::abs(d.hess(i, k) - fd) / hscale;
      double& slot = i < nt ? e.hess_theta : (k < nt ? e.hess_mixed : e.hess_kappa);
      slot = std::max(slot, herr);
    }
  }
  return e;
}

Verdict derivative_exactness() {
  const fs::path dir = fs::temp_directory_path() / fmt("berry_acceptance_%d", static_cast<int>(::getpid()));
  std::ostringstream d;
  bool pass = true;
  struct Case {
    const char* label;
    ActiveSpaceSpec active;
    bool npf;
    std::uint64_t seed;
  };
  const Case cases[] = {{"CAS(2,2) uccd", {1, 2, 1, 2}, false, 3},
                        {"CAS(2,2) npf", {1, 2, 1, 2}, true, 4},
                        {"CAS(4,4) uccd", {1, 4, 1, 4}, false, 5},
                        {"CAS(4,4) npf", {1, 4, 1, 4}, true, 6}};
  for (const Case& c : cases) {
    const BlockErrors e = derivative_errors(c.active, c.npf, c.seed, dir / c.label);
    const double g = std::max(e.grad_theta, e.grad_kappa);
    const double h = std::max({e.hess_theta, e.hess_kappa, e.hess_mixed});
    pass = pass && g <= 1e-7 && h <= 1e-5;
    d << fmt("%s grad %.1e/%.1e hess %.1e/%.1e/%.1e; ", c.label, e.grad_theta, e.grad_kappa, e.hess_theta, e.hess_kappa,
             e.hess_mixed);
  }
  fs::remove_all(dir);
  const std::string text = d.str();
  return {pass, "relative errors (theta/kappa, theta-theta/kappa-kappa/mixed), tol 1e-7 grad, 1e-5 hess: " +
                    text.substr(0, text.size() - 2)};
}

Verdict rotation_bounds() {
  const testing::RotationBoundReport r = testing::rotation_bound_check(1000, build_uccd_ansatz({0, 4, 0, 4}), 12);
  return {r.n_draws == 1000 && r.worst_product_margin >= -1e-10 && r.worst_overlap_margin >= -1e-10,
          fmt("%d draws; worst unitary-product margin %.3e, worst overlap margin %.3e (need >= -1e-10)", r.n_draws,
              r.worst_product_margin, r.worst_overlap_margin)};
}

Verdict bounds_formulas() {
  const auto [dt, sigma] = step_and_noise_budget(1.0, 1.0, 1.0);
  const double sigma_exact = (std::numbers::sqrt2 - 1.0) / 4.0;
  ProblemConstants unit, half;
  half.gap = 0.5;
  const ShotBounds a = total_shots_bound(half), b = total_shots_bound(unit);
  const double var_ratio = testing::variance_propagation_check(8, 20000, 5).worst_ratio;
  const bool pass = std::abs(dt - 0.125) < 1e-15 && std::abs(sigma - sigma_exact) < 1e-15 &&
                    std::abs(a.tight / b.tight - 256.0) < 1e-9 && std::abs(a.loose / b.loose - 256.0) < 1e-9 &&
                    var_ratio <= 1.05;
  return {pass, fmt("dt_max %.15g, sigma_theta_max %.15g (exact %.15g), m_tot ratio at half gap %.12g tight / %.12g "
                    "loose, Monte-Carlo variance / bound worst %.4f (<= 1.05)",
                    dt, sigma, sigma_exact, a.tight / b.tight, a.loose / b.loose, var_ratio)};
}

Verdict noise_budget() {
  const testing::TrackingReport r = testing::noise_budget_tracking(100, 1000, 1.0, 1.0, 1.0, 99);
  const testing::TrackingReport s = testing::noise_budget_tracking(100, 1000, 0.7, 2.0, 0.3, 199);
  return {r.n_ok >= 99 && s.n_ok >= 99,
          fmt("1000 steps at dt = dt_max, noise <= sigma_theta_max: %d/100 seeds (m=L=gdot=1, worst %.4f vs %.4f), "
              "%d/100 seeds (m=0.7, L=2, gdot=0.3, worst %.4f vs %.4f)",
              r.n_ok, r.worst_error, 1.0 / 16, s.n_ok, s.worst_error, 0.7 / 32)};
}

Verdict shot_estimate() {
  std::ostringstream d;
  bool pass = true;

  const nlohmann::json expected = nlohmann::json::parse(std::ifstream(kFixtures + "/expected.json"));
  const LoopSpec loop = load_loop(kFixtures + "/ci_loop.loop.json");
  const Eigen::MatrixXd c0 = initial_orbitals(loop);
  double max_norm = 0.0;
  ShotEstimate at_max;
  for (std::size_t k = 0; k < loop.n_grid(); ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(loop.n_grid());
    const ShotEstimate e = estimate_shots(build_active_hamiltonian(*loop_bundle(loop, t), c0, *loop.active, false), 1e-3);
    if (e.one_norm > max_norm) max_norm = e.one_norm, at_max = e;
  }
  const auto want_shots = static_cast<std::uint64_t>(std::ceil(max_norm * max_norm * 1e6));
  const double stored = expected.at("ci_loop").at("max_one_norm").get<double>();
  pass = std::abs(max_norm - stored) <= 1e-6 && at_max.n_shots == want_shots &&
         shots_for_norm(1.5376, 1e-3).n_shots == 2364214u;
  d << fmt("fixture ci_loop max one-norm %.9f vs stored %.9f, n_shots %llu = ceil(norm^2 1e6) %llu; ", max_norm, stored,
           static_cast<unsigned long long>(at_max.n_shots), static_cast<unsigned long long>(want_shots));

  if (const char* env = std::getenv("BERRY_BUNDLE_DIR")) {
    const fs::path p = fs::path(env) / "cx_sto3g.loop.json";
    if (fs::exists(p)) {
      const LoopSpec cx = load_loop(p.string());
      const Eigen::MatrixXd c = initial_orbitals(cx);
      double m = 0.0;
      for (std::size_t k = 0; k < cx.n_grid(); ++k)
        m = std::max(m, integral_one_norm(build_active_hamiltonian(
                            *loop_bundle(cx, static_cast<double>(k) / static_cast<double>(cx.n_grid())), c, *cx.active,
                            false)));
      pass = pass && std::abs(m - 1.5376) <= 0.01;
      d << fmt("ingest loop max one-norm %.4f vs 1.5376 +- 0.01", m);
    } else {
      d << "BERRY_BUNDLE_DIR set but has no cx_sto3g.loop.json";
    }
  } else {
    d << "no ingest bundles (BERRY_BUNDLE_DIR unset), stored fixture used";
  }
  return {pass, d.str()};
}

}  // namespace
}  // namespace berry

int main(int argc, char** argv) {
  using namespace berry;
  std::set<std::string> expect_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-red" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string id; std::getline(ss, id, ',');) expect_red.insert(id);
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-red id[,id...]]\n");
      return 1;
    }
  }

  const std::vector<Criterion> criteria = {
      {"analytic-loops", 2.0, analytic_loops},
      {"oracle-equivalence", 60.0, oracle_equivalence},
      {"quadratic-convergence", 10.0, quadratic_convergence},
      {"derivative-exactness", 120.0, derivative_exactness},
      {"rotation-overlap-bounds", 10.0, rotation_bounds},
      {"bounds-formulas", 30.0, bounds_formulas},
      {"noise-budget-tracking", 30.0, noise_budget},
      {"shot-estimate", 5.0, shot_estimate},
  };
  std::set<std::string> red;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = v.pass && secs <= c.budget_s;
    if (!pass) red.insert(c.id);
    std::printf("%s %s (%.2f s, budget %g s): %s\n", pass ? "PASS" : "FAIL", c.id.c_str(), secs, c.budget_s,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - red.size(), criteria.size());
  if (red != expect_red) {
    std::printf("failing set differs from --expect-red\n");
    return 1;
  }
  return 0;
}
