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

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "berry/noise.hpp"

namespace berry {

void TrackerConfig::validate() const {
  if (n_steps < 2) throw std::invalid_argument("n_steps must be at least 2");
  if (!(m_thr > 0.0)) throw std::invalid_argument("m_thr must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(mu > 0.0) || !(rho > 0.0)) throw std::invalid_argument("mu and rho must be positive");
  if (!(fidelity > 0.0 && fidelity < 1.0)) throw std::invalid_argument("fidelity must lie in (0, 1)");
  if (!(sigma2_grad >= 0.0) || !(sigma2_hess >= 0.0)) throw std::invalid_argument("noise variances must be >= 0");
  if (max_backtrack < 0) throw std::invalid_argument("max_backtrack must be >= 0");
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Zero: return "zero";
    case Outcome::Pi: return "pi";
    case Outcome::Fail: return "fail";
  }
  return "fail";
}

std::string to_string(FailReason reason) {
  switch (reason) {
    case FailReason::None: return "none";
    case FailReason::NonConvexHessian: return "non_convex_hessian";
    case FailReason::LowFidelity: return "low_fidelity";
    case FailReason::BacktrackExhausted: return "backtrack_exhausted";
    case FailReason::RealLogFailure: return "real_log_failure";
  }
  return "none";
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::json to_json(const TrackerConfig& c) {
  return {{"n_steps", c.n_steps},   {"m_thr", c.m_thr},
          {"reg", c.reg},           {"backtrack", c.backtrack},
          {"alpha", c.alpha},       {"beta", c.beta},
          {"mu", c.mu},             {"rho", c.rho},
          {"fidelity", c.fidelity}, {"sigma2_grad", c.sigma2_grad},
          {"sigma2_hess", c.sigma2_hess}, {"symmetrize_noise", c.symmetrize_noise},
          {"seed", c.seed},         {"max_backtrack", c.max_backtrack}};
}

nlohmann::json to_json(const BerryPhaseResult& r, bool include_timing) {
  nlohmann::json trace = nlohmann::json::array();
  for (const TrackState& s : r.trace)
    trace.push_back({{"t", s.t},
                     {"energy", s.energy},
                     {"lambda0", s.lambda0},
                     {"step_norm", s.step_norm},
                     {"regularized", s.regularized},
                     {"backtracks", s.backtracks}});
  nlohmann::json out = {{"outcome", to_string(r.outcome)},
                        {"fail_reason", to_string(r.reason)},
                        {"omega", r.omega},
                        {"message", r.message},
                        {"n_steps", r.config.n_steps},
                        {"n_params", r.n_params},
                        {"config", to_json(r.config)},
                        {"seed", r.config.seed},
                        {"trace", std::move(trace)},
                        {"theta_initial", to_vector(r.theta_initial)},
                        {"theta_final", to_vector(r.theta_final)},
                        {"param_distance_l1", r.param_distance_l1},
                        {"rotation_l1", r.rotation_l1},
                        {"block_residual", r.block_residual},
                        {"n_regularized", r.n_regularized}};
  if (include_timing) out["wall_time_s"] = r.wall_time_s;
  return out;
}

Eigen::VectorXd newton_step(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess) {
  if (hess.rows() != grad.size() || hess.cols() != grad.size()) throw std::invalid_argument("newton_step: shape mismatch");
  if (grad.size() == 0) return grad;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
  const Eigen::VectorXd d = ldlt.vectorD();
  const double scale = std::max(d.cwiseAbs().maxCoeff(), 1e-300);
  if (ldlt.info() != Eigen::Success || d.cwiseAbs().minCoeff() <= 1e-14 * scale)
    throw std::runtime_error("newton_step: singular Hessian");
  return -ldlt.solve(grad);
}

double lowest_eigenvalue(const Eigen::MatrixXd& hess) {
  if (hess.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hess, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

int backtrack(Eigen::VectorXd& step, const Eigen::VectorXd& grad, const StepEnergy& energy_after, double energy_now,
              const TrackerConfig& cfg) {
  for (int k = 0;; ++k) {
    if (energy_after(step) <= energy_now + cfg.alpha * grad.dot(step)) return k;
    if (k == cfg.max_backtrack) return -1;
    step *= cfg.beta;
  }
}

StepResult regularized_step(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess, const StepEnergy& energy_after,
                            double energy_now, const TrackerConfig& cfg) {
  StepResult out;
  out.lambda0 = lowest_eigenvalue(hess);
  Eigen::MatrixXd b = hess;
  if (out.lambda0 < cfg.m_thr) {
    b.diagonal().array() += cfg.rho * std::abs(out.lambda0) + cfg.mu;
    out.regularized = true;
  }
  out.step = newton_step(grad, b);
  if (cfg.backtrack) {
    out.backtracks = backtrack(out.step, grad, energy_after, energy_now, cfg);
    if (out.backtracks < 0) {
      out.ok = false;
      out.reason = FailReason::BacktrackExhausted;
      out.backtracks = cfg.max_backtrack;
    }
  }
  return out;
}

OptimizeResult full_optimize(const CostModel& cost, double t, const Variables& guess, const OptimizeOptions& options) {
  OptimizeResult out;
  out.v = guess;
  const TrackerConfig line;  // default Armijo constants
  for (int it = 0; it <= options.max_iter; ++it) {
    const CostDerivatives d = cost.derivatives(t, out.v, true);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.hess);
    out.energy = d.energy;
    out.iterations = it;
    out.grad_norm = d.grad.size() ? d.grad.lpNorm<Eigen::Infinity>() : 0.0;
    out.lambda0 = d.hess.size() ? es.eigenvalues()(0) : 0.0;
    if (out.grad_norm <= options.grad_tol && out.lambda0 > -options.curvature_tol) return out;
    if (it == options.max_iter) break;

    Eigen::MatrixXd b = d.hess;
    if (out.lambda0 < line.m_thr) b.diagonal().array() += line.rho * std::abs(out.lambda0) + line.mu;
    Eigen::VectorXd step = newton_step(d.grad, b);
    if (out.lambda0 < -options.curvature_tol) {
      // Leave the saddle along the most negative curvature direction.
      const Eigen::VectorXd e = es.eigenvectors().col(0);
      step += (d.grad.dot(e) <= 0.0 ? 1.0 : -1.0) * e;
    }
    const StepEnergy after = [&](const Eigen::VectorXd& s) { return cost.energy(t, cost.retract(out.v, s)); };
    // Round-off slack so that steps at the noise floor are still accepted.
    const double slack = 1e-13 * std::max(1.0, std::abs(d.energy));
    int k = 0;
    while (after(step) > d.energy + line.alpha * d.grad.dot(step) + slack && k < 60) {
      step *= line.beta;
      ++k;
    }
    out.v = cost.retract(out.v, step);
  }
  throw std::runtime_error("full optimization did not converge in " + std::to_string(options.max_iter) +
                           " iterations (gradient inf-norm " + std::to_string(out.grad_norm) + ", lowest Hessian eigenvalue " +
                           std::to_string(out.lambda0) + ")");
}

BerryPhaseResult run_loop(const CostModel& cost, const TrackerConfig& cfg) {
  cfg.validate();
  cost.check_steps(cfg.n_steps);
  const auto start = std::chrono::steady_clock::now();
  BerryPhaseResult r;
  r.config = cfg;
  r.n_params = cost.n_params();

  const OptimizeResult opt = full_optimize(cost, 0.0, cost.initial_guess());
  const Variables v0 = opt.v;
  r.theta_initial = v0.theta;
  r.trace.push_back({0.0, v0.theta, v0.c, opt.energy, opt.lambda0, 0.0, false, 0});

  NoiseSource noise({cfg.sigma2_grad, cfg.sigma2_hess, cfg.seed, cfg.symmetrize_noise});
  Variables v = v0;
  auto finish = [&]() {
    r.theta_final = v.theta;
    r.param_distance_l1 = (v.theta - v0.theta).lpNorm<1>();
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  auto fail = [&](FailReason reason, std::string message) {
    r.outcome = Outcome::Fail;
    r.reason = reason;
    r.message = std::move(message);
    return finish();
  };

  const double dt = 1.0 / cfg.n_steps;
  for (int k = 0; k < cfg.n_steps; ++k) {
    const double t_next = k + 1 == cfg.n_steps ? 1.0 : (k + 1) * dt;
    const CostDerivatives exact = cost.derivatives(t_next, v, true);
    auto [grad, hess] = noise.perturb(exact.grad, exact.hess);
    const StepEnergy after = [&](const Eigen::VectorXd& s) { return cost.energy(t_next, cost.retract(v, s)); };

    StepResult step;
    if (cfg.reg) {
      step = regularized_step(grad, hess, after, exact.energy, cfg);
    } else {
      step.lambda0 = lowest_eigenvalue(hess);
      if (step.lambda0 < cfg.m_thr)
        return fail(FailReason::NonConvexHessian, "lowest Hessian eigenvalue " + std::to_string(step.lambda0) +
                                                      " below m_thr at t = " + std::to_string(t_next));
      step.step = newton_step(grad, hess);
      if (cfg.backtrack) {
        step.backtracks = backtrack(step.step, grad, after, exact.energy, cfg);
        if (step.backtracks < 0) step.ok = false, step.reason = FailReason::BacktrackExhausted;
      }
    }
    if (!step.ok)
      return fail(step.reason, "backtracking exhausted after " + std::to_string(cfg.max_backtrack) +
                                   " halvings at t = " + std::to_string(t_next));
    v = cost.retract(v, step.step);
    r.n_regularized += step.regularized ? 1 : 0;
    r.trace.push_back({t_next, v.theta, v.c, cost.energy(t_next, v), step.lambda0, step.step.norm(), step.regularized,
                       std::max(step.backtracks, 0)});
  }

  const OverlapResult overlap = cost.final_overlap(v0, v);
  r.block_residual = overlap.block_residual;
  r.rotation_l1 = overlap.rotation_l1;
  if (!overlap.ok) return fail(FailReason::RealLogFailure, overlap.message);
  r.omega = overlap.omega;
  if (r.omega == 0.0 || r.omega * r.omega < cfg.fidelity)
    return fail(FailReason::LowFidelity, "final overlap " + std::to_string(r.omega) + " below the fidelity threshold");
  r.outcome = r.omega > 0.0 ? Outcome::Zero : Outcome::Pi;
  return finish();
}

}  // namespace berry
