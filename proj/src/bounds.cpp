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

#include "berry/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace berry {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive and finite");
}

// (3 - 2 sqrt 2) / 32, the half-budget factor shared by both variances.
const double kBudget = (3.0 - 2.0 * std::sqrt(2.0)) / 32.0;

}  // namespace

void ProblemConstants::validate() const {
  require_positive(m, "m");
  require_positive(L, "L");
  require_positive(gdot_max, "gdot_max");
  require_positive(n_p, "n_p");
  require_positive(H_norm, "H_norm");
  require_positive(Hdot_norm, "Hdot_norm");
  require_positive(gap, "gap");
  require_positive(M_H, "M_H");
  require_positive(grad_norm, "grad_norm");
}

double convergence_radius(double m, double L) {
  require_positive(m, "m");
  require_positive(L, "L");
  return m / (4.0 * L);
}

std::pair<double, double> step_and_noise_budget(double m, double L, double gdot_max) {
  require_positive(m, "m");
  require_positive(L, "L");
  require_positive(gdot_max, "gdot_max");
  return {m * m / (8.0 * L * gdot_max), (std::sqrt(2.0) - 1.0) / 4.0 * m / L};
}

std::pair<double, double> variance_budgets(double m, double L, double n_p, double grad_norm) {
  require_positive(m, "m");
  require_positive(L, "L");
  require_positive(n_p, "n_p");
  require_positive(grad_norm, "grad_norm");
  const double base = kBudget * std::pow(m, 4) / (n_p * L * L);
  return {base, base * m * m / (grad_norm * grad_norm)};
}

ShotBounds total_shots_bound(const ProblemConstants& c) {
  c.validate();
  const double gap_factor = std::pow(c.gap, -8.0) * c.M_H;
  ShotBounds out;
  out.tight = 1e3 * c.n_p * std::pow(c.L, 3) * c.grad_norm * c.grad_norm * c.gdot_max * gap_factor;
  out.loose = 1e3 * std::pow(c.n_p, 4) * std::pow(c.H_norm, 7) * c.Hdot_norm * gap_factor;
  return out;
}

DerivativeBounds derivative_norm_bounds(double n_p, double H_norm, double Hdot_norm) {
  const double s = std::sqrt(n_p);
  return {2.0 * s * H_norm, 8.0 * n_p * s * H_norm, 2.0 * s * Hdot_norm};
}

double param_overlap_bound(const Eigen::VectorXd& theta_a, const Eigen::VectorXd& theta_b) {
  if (theta_a.size() != theta_b.size()) throw std::invalid_argument("parameter vectors differ in length");
  return 1.0 - (theta_a - theta_b).lpNorm<1>();
}

double newton_variance_bound(double m, double n_p, double sigma2_grad, double sigma2_hess, double dtheta_norm) {
  require_positive(m, "m");
  return n_p * (sigma2_grad + sigma2_hess * dtheta_norm * dtheta_norm) / (m * m);
}

BoundsReport bounds_report(const ProblemConstants& c) {
  c.validate();
  BoundsReport r;
  r.constants = c;
  r.radius = convergence_radius(c.m, c.L);
  std::tie(r.dt_max, r.sigma_theta_max) = step_and_noise_budget(c.m, c.L, c.gdot_max);
  std::tie(r.sigma2_grad_max, r.sigma2_hess_max) = variance_budgets(c.m, c.L, c.n_p, c.grad_norm);
  r.m_tot = total_shots_bound(c);
  r.derivative_bounds = derivative_norm_bounds(c.n_p, c.H_norm, c.Hdot_norm);
  r.gdot_dt = c.gdot_max * r.dt_max;
  r.sqrt_np_H = std::sqrt(c.n_p) * c.H_norm;
  return r;
}

nlohmann::json to_json(const BoundsReport& r) {
  const auto& c = r.constants;
  return {
      {"kind", "sufficient-condition bounds"},
      {"constants",
       {{"m", c.m},
        {"L", c.L},
        {"gdot_max", c.gdot_max},
        {"n_params", c.n_p},
        {"h_norm", c.H_norm},
        {"hdot_norm", c.Hdot_norm},
        {"gap", c.gap},
        {"m_h", c.M_H},
        {"grad_norm", c.grad_norm}}},
      {"radius", r.radius},
      {"dt_max", r.dt_max},
      {"sigma_theta_max", r.sigma_theta_max},
      {"sigma2_grad_max", r.sigma2_grad_max},
      {"sigma2_hess_max", r.sigma2_hess_max},
      {"m_tot", {{"tight", r.m_tot.tight}, {"loose", r.m_tot.loose}}},
      {"derivative_bounds",
       {{"G_max", r.derivative_bounds.G_max},
        {"L_bound", r.derivative_bounds.L_bound},
        {"Gdot_bound", r.derivative_bounds.Gdot_bound}}},
      {"step_substitution", {{"gdot_max_dt", r.gdot_dt}, {"sqrt_np_h_norm", r.sqrt_np_H}}},
  };
}

}  // namespace berry
