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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berry/cost.hpp"
#include "json.hpp"

namespace berry {

struct TrackerConfig {
  int n_steps = 25;
  double m_thr = 1e-4;
  bool reg = false;
  bool backtrack = false;
  double alpha = 1e-4;
  double beta = 0.5;
  double mu = 1e-4;
  double rho = 2.0;
  double fidelity = 0.5;
  double sigma2_grad = 0.0;
  double sigma2_hess = 0.0;
  bool symmetrize_noise = true;
  std::uint64_t seed = 0;
  int max_backtrack = 50;

  void validate() const;
};

enum class Outcome { Zero, Pi, Fail };
enum class FailReason { None, NonConvexHessian, LowFidelity, BacktrackExhausted, RealLogFailure };

std::string to_string(Outcome outcome);
std::string to_string(FailReason reason);

struct TrackState {
  double t = 0.0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd c;
  double energy = 0.0;   // exact cost at (t, theta, C)
  double lambda0 = 0.0;  // lowest eigenvalue of the Hessian used for the step
  double step_norm = 0.0;
  bool regularized = false;
  int backtracks = 0;
};

struct BerryPhaseResult {
  Outcome outcome = Outcome::Fail;
  FailReason reason = FailReason::None;
  double omega = 0.0;
  std::string message;
  std::vector<TrackState> trace;  // trace[0] is the optimized start
  TrackerConfig config;
  std::size_t n_params = 0;
  Eigen::VectorXd theta_initial;
  Eigen::VectorXd theta_final;
  double param_distance_l1 = 0.0;
  double rotation_l1 = 0.0;
  double block_residual = 0.0;
  int n_regularized = 0;
  double wall_time_s = 0.0;
};

/// Timing is left out when `include_timing` is false so that equal runs
/// serialize identically.
nlohmann::json to_json(const TrackerConfig& config);
nlohmann::json to_json(const BerryPhaseResult& result, bool include_timing = true);

/// -hess^{-1} grad by a symmetric factorization. Throws std::runtime_error
/// when hess is singular.
Eigen::VectorXd newton_step(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess);
double lowest_eigenvalue(const Eigen::MatrixXd& hess);

struct StepResult {
  Eigen::VectorXd step;
  bool ok = true;
  FailReason reason = FailReason::None;
  bool regularized = false;
  int backtracks = 0;
  double lambda0 = 0.0;
};

/// Energy after moving by a step, at the fixed t of the update.
using StepEnergy = std::function<double(const Eigen::VectorXd& step)>;

/// Shifted-Hessian solve when lambda0 < m_thr, then (if cfg.backtrack)
/// Armijo backtracking against `energy_after` from `energy_now`.
StepResult regularized_step(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess, const StepEnergy& energy_after,
                            double energy_now, const TrackerConfig& cfg);

/// Armijo damping of `step`; returns the number of halvings or -1 when
/// max_backtrack is exhausted (step is then left at its last value).
int backtrack(Eigen::VectorXd& step, const Eigen::VectorXd& grad, const StepEnergy& energy_after, double energy_now,
              const TrackerConfig& cfg);

struct OptimizeOptions {
  double grad_tol = 1e-8;
  double curvature_tol = 1e-8;
  int max_iter = 200;
};

struct OptimizeResult {
  Variables v;
  double energy = 0.0;
  double lambda0 = 0.0;
  double grad_norm = 0.0;  // infinity norm
  int iterations = 0;
};

/// Regularized Newton with backtracking and negative-curvature escape.
/// Throws std::runtime_error if not converged within max_iter.
OptimizeResult full_optimize(const CostModel& cost, double t, const Variables& guess, const OptimizeOptions& options = {});

BerryPhaseResult run_loop(const CostModel& cost, const TrackerConfig& cfg);

}  // namespace berry
