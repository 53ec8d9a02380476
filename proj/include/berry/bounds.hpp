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

#include <utility>

#include <Eigen/Dense>

#include "json.hpp"

namespace berry {

/// Inputs to the convergence and sampling bounds. All energies in hartree.
struct ProblemConstants {
  double m = 1.0;          // convexity lower bound
  double L = 1.0;          // Hessian Lipschitz constant
  double gdot_max = 1.0;   // max norm of the t-derivative of the gradient
  double n_p = 1.0;        // parameter count
  double H_norm = 1.0;
  double Hdot_norm = 1.0;
  double gap = 1.0;
  double M_H = 1.0;        // shots per Hessian element per unit variance
  double grad_norm = 1.0;  // gradient norm entering the Hessian budget

  void validate() const;
};

struct DerivativeBounds {
  double G_max = 0.0;
  double L_bound = 0.0;
  double Gdot_bound = 0.0;
};

struct ShotBounds {
  double tight = 0.0;
  double loose = 0.0;
};

/// Sufficient-condition bounds; not practical prescriptions.
struct BoundsReport {
  ProblemConstants constants;
  double radius = 0.0;
  double dt_max = 0.0;
  double sigma_theta_max = 0.0;
  double sigma2_grad_max = 0.0;
  double sigma2_hess_max = 0.0;
  ShotBounds m_tot;
  DerivativeBounds derivative_bounds;
  // Both sides of the approximation gdot_max * dt ~ sqrt(n_p) * |H| used to
  // pass from the tight to the loose shot count.
  double gdot_dt = 0.0;
  double sqrt_np_H = 0.0;
};

double convergence_radius(double m, double L);
/// (dt_max, sigma_theta_max)
std::pair<double, double> step_and_noise_budget(double m, double L, double gdot_max);
/// (sigma2_grad_max, sigma2_hess_max)
std::pair<double, double> variance_budgets(double m, double L, double n_p, double grad_norm);
ShotBounds total_shots_bound(const ProblemConstants& c);
DerivativeBounds derivative_norm_bounds(double n_p, double H_norm, double Hdot_norm);
/// 1 - |theta_a - theta_b|_1, valid for unit-norm generators.
double param_overlap_bound(const Eigen::VectorXd& theta_a, const Eigen::VectorXd& theta_b);
/// n_p (sigma2_grad + sigma2_hess |dtheta|^2) / m^2
double newton_variance_bound(double m, double n_p, double sigma2_grad, double sigma2_hess, double dtheta_norm);

BoundsReport bounds_report(const ProblemConstants& c);
nlohmann::json to_json(const BoundsReport& report);

}  // namespace berry
