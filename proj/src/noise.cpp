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

#include "berry/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace berry {

void NoiseModel::validate() const {
  if (!(sigma2_grad >= 0.0) || !(sigma2_hess >= 0.0)) throw std::invalid_argument("noise variances must be >= 0");
}

NoiseSource::NoiseSource(const NoiseModel& model) : model_(model), rng_(model.seed) { model_.validate(); }

std::pair<Eigen::VectorXd, Eigen::MatrixXd> NoiseSource::perturb(const Eigen::VectorXd& grad,
                                                                 const Eigen::MatrixXd& hess) {
  Eigen::VectorXd g = grad;
  Eigen::MatrixXd h = hess;
  if (model_.sigma2_grad > 0.0) {
    const double s = std::sqrt(model_.sigma2_grad);
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += s * normal_(rng_);
  }
  if (model_.sigma2_hess > 0.0) {
    const double s = std::sqrt(model_.sigma2_hess);
    if (model_.symmetrize) {
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i) {
          h(i, j) += s * normal_(rng_);
          h(j, i) = h(i, j);
        }
    } else {
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, j) += s * normal_(rng_);
    }
  }
  return {std::move(g), std::move(h)};
}

double simulate_hadamard_test(double omega, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("Hadamard test needs at least one shot");
  if (!(omega >= -1.0 - 1e-12 && omega <= 1.0 + 1e-12)) throw std::invalid_argument("overlap outside [-1, 1]");
  const double p = std::clamp(0.5 * (1.0 + omega), 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::uint64_t> draw(shots, p);
  const double hits = static_cast<double>(draw(rng));
  return 2.0 * hits / static_cast<double>(shots) - 1.0;
}

double integral_one_norm(const ActiveHamiltonian& ham) {
  double norm = ham.h_eff.cwiseAbs().sum();
  for (double v : ham.g_act.data()) norm += std::abs(0.5 * v);
  return norm;
}

ShotEstimate shots_for_norm(double one_norm, double target_sigma) {
  if (!(target_sigma > 0.0)) throw std::invalid_argument("target sigma must be positive");
  if (!(one_norm >= 0.0)) throw std::invalid_argument("one-norm must be non-negative");
  const double shots = std::ceil(one_norm * one_norm / (target_sigma * target_sigma));
  return {one_norm, target_sigma, static_cast<std::uint64_t>(shots)};
}

ShotEstimate estimate_shots(const ActiveHamiltonian& ham, double target_sigma) {
  return shots_for_norm(integral_one_norm(ham), target_sigma);
}

double empirical_noise_norm(int n, double sigma2, int samples, std::uint64_t seed) {
  NoiseSource source({0.0, sigma2, seed, true});
  double total = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Eigen::MatrixXd m = source.perturb(Eigen::VectorXd::Zero(0), Eigen::MatrixXd::Zero(n, n)).second;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    total += es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return total / samples;
}

}  // namespace berry
