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

#include "berry/tracker.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "berry/oracle.hpp"

namespace berry {
namespace {

// Cost given by closed-form callbacks on a flat parameter space.
class ToyCost final : public CostModel {
 public:
  using Energy = std::function<double(double, const Eigen::VectorXd&)>;
  using Grad = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
  using Hess = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;

  ToyCost(Eigen::VectorXd start, Energy e, Grad g, Hess h)
      : start_(std::move(start)), e_(std::move(e)), g_(std::move(g)), h_(std::move(h)) {}

  Variables initial_guess() const override { return {start_, {}}; }
  std::size_t n_theta() const override { return static_cast<std::size_t>(start_.size()); }
  std::size_t n_params() const override { return n_theta(); }
  double energy(double t, const Variables& v) const override { return e_(t, v.theta); }
  CostDerivatives derivatives(double t, const Variables& v, bool) const override {
    return {e_(t, v.theta), g_(t, v.theta), h_(t, v.theta)};
  }
  Variables retract(const Variables& v, const Eigen::VectorXd& s) const override { return {v.theta + s, {}}; }
  OverlapResult final_overlap(const Variables& a, const Variables& b) const override {
    return {std::cos((a.theta - b.theta).norm()), true, "", 0.0, 0.0};
  }
  void check_steps(int) const override {}
  const AnsatzCircuit& ansatz() const override { return ansatz_; }

 private:
  Eigen::VectorXd start_;
  Energy e_;
  Grad g_;
  Hess h_;
  AnsatzCircuit ansatz_;
};

ToyCost quadratic_cost(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& start) {
  return ToyCost(
      start, [a, b](double, const Eigen::VectorXd& x) { return 0.5 * x.dot(a * x) - b.dot(x); },
      [a, b](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x - b); },
      [a](double, const Eigen::VectorXd&) { return a; });
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(NewtonStepTest, ZeroGradientGivesZeroStep) {
  const Eigen::MatrixXd h = Eigen::Vector2d(2.0, 3.0).asDiagonal();
  EXPECT_EQ(newton_step(Eigen::VectorXd::Zero(2), h).norm(), 0.0);
}

TEST(NewtonStepTest, QuadraticLandsOnMinimumInOneStep) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(4, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
  const Eigen::MatrixXd a = m * m.transpose() + Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(4, [&] { return n01(rng); });
  const Eigen::VectorXd x0 = Eigen::VectorXd::NullaryExpr(4, [&] { return n01(rng); });
  const Eigen::VectorXd x1 = x0 + newton_step(a * x0 - b, a);
  EXPECT_LT((x1 - a.fullPivLu().solve(b)).norm(), 1e-12);
}

TEST(NewtonStepTest, CubicErrorWithinQuadraticBound) {
  // E = th^2/2 + th^3/6 has m = 1, L = 1 and minimum 0.
  const double th0 = 0.25;
  const double th1 = th0 + newton_step(vec({th0 + th0 * th0 / 2}), Eigen::MatrixXd::Constant(1, 1, 1 + th0))(0);
  EXPECT_NEAR(th1, th0 * th0 / 2 / (1 + th0), 1e-15);
  EXPECT_LE(std::abs(th1), 1.0 / 16);
}

TEST(NewtonStepTest, SingularHessianThrows) {
  EXPECT_THROW(newton_step(vec({1, 1}), Eigen::MatrixXd::Zero(2, 2)), std::runtime_error);
}

TEST(RegularizedStepTest, ConvexCaseMatchesNewton) {
  const Eigen::MatrixXd h = Eigen::Vector2d(2.0, 0.5).asDiagonal();
  const Eigen::VectorXd g = vec({0.3, -0.2});
  TrackerConfig cfg;
  cfg.backtrack = true;
  const ToyCost cost = quadratic_cost(h, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2));
  const Eigen::VectorXd x = h.inverse() * g;  // gradient of the quadratic at x equals g
  const StepEnergy after = [&](const Eigen::VectorXd& s) { return cost.energy(0, {x + s, {}}); };
  const StepResult r = regularized_step(g, h, after, cost.energy(0, {x, {}}), cfg);
  EXPECT_TRUE(r.ok);
  EXPECT_FALSE(r.regularized);
  EXPECT_EQ(r.backtracks, 0);
  EXPECT_EQ(r.step, newton_step(g, h));
}

TEST(RegularizedStepTest, ShiftedHessianArithmetic) {
  const Eigen::MatrixXd h = Eigen::Vector2d(1.0, -0.1).asDiagonal();
  const Eigen::VectorXd g = vec({0.5, 0.2});
  TrackerConfig cfg;
  cfg.m_thr = 0.01;
  const StepResult r = regularized_step(g, h, nullptr, 0.0, cfg);
  EXPECT_TRUE(r.regularized);
  EXPECT_NEAR(r.lambda0, -0.1, 1e-15);
  EXPECT_NEAR(r.step(0), -0.5 / 1.2001, 1e-14);
  EXPECT_NEAR(r.step(1), -0.2 / 0.1001, 1e-12);
  EXPECT_LT(g.dot(r.step), 0.0);
}

TEST(RegularizedStepTest, BacktrackingRestoresDescent) {
  // E = sqrt(1 + th^2): the Newton step from th = 2 overshoots to -8.
  const auto e = [](double x) { return std::sqrt(1 + x * x); };
  const double x0 = 2.0, s = e(x0);
  const Eigen::VectorXd g = vec({x0 / s});
  const Eigen::MatrixXd h = Eigen::MatrixXd::Constant(1, 1, 1 / (s * s * s));
  TrackerConfig cfg;
  cfg.backtrack = true;
  const StepResult r = regularized_step(g, h, [&](const Eigen::VectorXd& d) { return e(x0 + d(0)); }, e(x0), cfg);
  ASSERT_TRUE(r.ok);
  // Scalar line search: halve until Armijo holds.
  double d = -x0 * s * s;
  int k = 0;
  while (e(x0 + d) > e(x0) + cfg.alpha * g(0) * d) d *= 0.5, ++k;
  EXPECT_EQ(r.backtracks, k);
  EXPECT_GT(k, 0);
  EXPECT_DOUBLE_EQ(r.step(0), d);
  EXPECT_LT(e(x0 + r.step(0)), e(x0));
}

TEST(RegularizedStepTest, ExhaustedBacktrackingFails) {
  TrackerConfig cfg;
  cfg.backtrack = true;
  cfg.max_backtrack = 3;
  const StepResult r = regularized_step(vec({1.0}), Eigen::MatrixXd::Identity(1, 1),
                                        [](const Eigen::VectorXd&) { return 1.0; }, 0.0, cfg);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.reason, FailReason::BacktrackExhausted);
}

TEST(FullOptimizeTest, QuadraticConvergesInOneIteration) {
  const ToyCost cost = quadratic_cost(Eigen::MatrixXd::Identity(1, 1), vec({1.0}), vec({0.0}));
  const OptimizeResult r = full_optimize(cost, 0.0, cost.initial_guess());
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.v.theta(0), 1.0, 1e-15);
}

TEST(FullOptimizeTest, EscapesSaddleOfQubitLoop) {
  // |0> is the excited state of Z: zero gradient, negative curvature.
  const auto cost = make_cost_model(builtin_loop("qubit-ci"), AnsatzChoice::parse("direct"));
  const OptimizeResult r = full_optimize(*cost, 0.0, cost->initial_guess());
  EXPECT_NEAR(r.energy, -1.0, 1e-12);
  EXPECT_LE(r.grad_norm, 1e-8);
  EXPECT_GT(r.lambda0, 0.0);
}

TEST(FullOptimizeTest, NonConvergenceReportsGradient) {
  // Unbounded below: every iteration keeps descending.
  const ToyCost cost(
      vec({0.0}), [](double, const Eigen::VectorXd& x) { return -x(0); },
      [](double, const Eigen::VectorXd&) { return vec({-1.0}); },
      [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); });
  OptimizeOptions opt;
  opt.max_iter = 5;
  try {
    full_optimize(cost, 0.0, cost.initial_guess(), opt);
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("gradient"), std::string::npos);
  }
}

BerryPhaseResult run_builtin(const std::string& name, TrackerConfig cfg = {}) {
  return run_loop(*make_cost_model(builtin_loop(name), AnsatzChoice::parse("direct")), cfg);
}

// One Newton step per point on E = -cos(2u), u the lag behind a minimum
// advancing by pi / N per step.
double qubit_ci_lag(int n_steps) {
  double u = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    u -= std::numbers::pi / n_steps;
    u -= 0.5 * std::tan(2.0 * u);
  }
  return u;
}

TEST(RunLoopTest, QubitCiIsPi) {
  const BerryPhaseResult r = run_builtin("qubit-ci");
  EXPECT_EQ(r.outcome, Outcome::Pi);
  EXPECT_NEAR(r.omega, -std::cos(qubit_ci_lag(25)), 1e-12);
  EXPECT_NEAR(r.omega, -1.0, 1e-5);
  EXPECT_EQ(r.trace.size(), 26u);
}

TEST(RunLoopTest, QubitCiOverlapApproachesMinusOne) {
  TrackerConfig cfg;
  cfg.n_steps = 50;
  EXPECT_NEAR(run_builtin("qubit-ci", cfg).omega, -1.0, 1e-6);
}

TEST(RunLoopTest, QubitTrivialIsZero) {
  const BerryPhaseResult r = run_builtin("qubit-trivial");
  EXPECT_EQ(r.outcome, Outcome::Zero);
  EXPECT_NEAR(r.omega, 1.0, 1e-6);
}

TEST(RunLoopTest, EffectiveCiEncirclingCrossingIsPi) {
  const LoopSpec loop = builtin_loop("effective-ci");
  const BerryPhaseResult r = run_builtin("effective-ci");
  EXPECT_EQ(r.outcome, Outcome::Pi);
  EXPECT_EQ(to_string(discrete_berry_phase(exact_ground_path(loop))), to_string(r.outcome));
}

TEST(RunLoopTest, TraceEnergiesMatchCost) {
  const LoopSpec loop = builtin_loop("effective-ci");
  const auto cost = make_cost_model(loop, AnsatzChoice::parse("direct"));
  const BerryPhaseResult r = run_loop(*cost, {});
  for (const TrackState& s : r.trace) EXPECT_NEAR(s.energy, cost->energy(s.t, {s.theta, s.c}), 1e-10);
}

TEST(RunLoopTest, PiRunMovesParametersByAtLeastTwo) {
  const BerryPhaseResult r = run_builtin("qubit-ci");
  ASSERT_EQ(r.outcome, Outcome::Pi);
  EXPECT_GE(r.param_distance_l1 + r.rotation_l1, 2.0 - 2.0 * (1.0 - std::abs(r.omega)) - 1e-9);
}

double max_tracking_error(int n_steps) {
  const LoopSpec loop = builtin_loop("effective-ci");
  const auto cost = make_cost_model(loop, AnsatzChoice::parse("direct"));
  TrackerConfig cfg;
  cfg.n_steps = n_steps;
  const BerryPhaseResult r = run_loop(*cost, cfg);
  double err = 0.0;
  for (const TrackState& s : r.trace) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(analytic_hamiltonian(loop, s.t), Eigen::EigenvaluesOnly);
    err = std::max(err, s.energy - es.eigenvalues()(0));
  }
  return err;
}

TEST(RunLoopTest, TrackingErrorShrinksWithFinerGrid) { EXPECT_LT(max_tracking_error(50), max_tracking_error(25)); }

TEST(RunLoopTest, NegativeCurvatureFailsWithoutRegularization) {
  // Curvature 1 - 4t turns negative halfway around the loop.
  const ToyCost cost(
      vec({0.0}), [](double t, const Eigen::VectorXd& x) { return 0.5 * (1 - 4 * t) * x(0) * x(0) + t * x(0); },
      [](double t, const Eigen::VectorXd& x) { return vec({(1 - 4 * t) * x(0) + t}); },
      [](double t, const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, 1 - 4 * t); });
  TrackerConfig cfg;
  cfg.n_steps = 10;
  const BerryPhaseResult r = run_loop(cost, cfg);
  EXPECT_EQ(r.outcome, Outcome::Fail);
  EXPECT_EQ(r.reason, FailReason::NonConvexHessian);
  EXPECT_EQ(r.trace.size(), 3u);  // start plus the steps to t = 0.1, 0.2
}

TEST(RunLoopTest, RegularizationRecordsShiftedSteps) {
  TrackerConfig cfg;
  cfg.n_steps = 4;
  cfg.reg = true;
  cfg.backtrack = true;
  const BerryPhaseResult r = run_builtin("qubit-ci", cfg);
  EXPECT_NE(r.outcome, Outcome::Zero);
  int shifted = 0;
  for (const TrackState& s : r.trace) shifted += s.regularized ? 1 : 0;
  EXPECT_EQ(shifted, r.n_regularized);
}

TEST(RunLoopTest, LowFidelityIsReported) {
  const ToyCost cost = quadratic_cost(Eigen::MatrixXd::Identity(1, 1), vec({0.0}), vec({0.0}));
  const ToyCost shifted(
      vec({0.0}), [](double t, const Eigen::VectorXd& x) { return 0.5 * std::pow(x(0) - 1.2 * t, 2); },
      [](double t, const Eigen::VectorXd& x) { return vec({x(0) - 1.2 * t}); },
      [](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); });
  (void)cost;
  const BerryPhaseResult r = run_loop(shifted, {});
  EXPECT_EQ(r.outcome, Outcome::Fail);
  EXPECT_EQ(r.reason, FailReason::LowFidelity);
  EXPECT_NEAR(r.omega, std::cos(1.2), 1e-12);
}

TEST(RunLoopTest, NoisyRunsAreDeterministicPerSeed) {
  TrackerConfig cfg;
  cfg.sigma2_grad = cfg.sigma2_hess = 1e-4;
  cfg.seed = 42;
  const auto a = to_json(run_builtin("effective-ci", cfg), false).dump();
  const auto b = to_json(run_builtin("effective-ci", cfg), false).dump();
  EXPECT_EQ(a, b);
  cfg.seed = 43;
  EXPECT_NE(to_json(run_builtin("effective-ci", cfg), false).dump(), a);
}

TEST(RunLoopTest, ZeroNoiseMatchesNoiseless) {
  TrackerConfig cfg;
  cfg.seed = 9;
  EXPECT_EQ(to_json(run_builtin("qubit-ci", cfg), false)["theta_final"],
            to_json(run_builtin("qubit-ci"), false)["theta_final"]);
}

TEST(RunLoopTest, ResultJsonSchema) {
  const auto j = to_json(run_builtin("qubit-trivial"));
  for (const char* key : {"outcome", "omega", "n_steps", "config", "trace", "theta_initial", "theta_final", "seed",
                          "wall_time_s"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["outcome"], "zero");
  EXPECT_FALSE(to_json(run_builtin("qubit-trivial"), false).contains("wall_time_s"));
}

TEST(TrackerConfigTest, RejectsInvalidValues) {
  TrackerConfig cfg;
  cfg.n_steps = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.beta = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.fidelity = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace berry
