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
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "berry/hamiltonian.hpp"

namespace berry {

/// Gaussian proxy for sampling noise on gradients and Hessians.
struct NoiseModel {
  double sigma2_grad = 0.0;
  double sigma2_hess = 0.0;
  std::uint64_t seed = 0;
  bool symmetrize = true;

  void validate() const;
  bool active() const noexcept { return sigma2_grad > 0.0 || sigma2_hess > 0.0; }
};

/// Owns one RNG stream; not to be shared between concurrent runs.
class NoiseSource {
 public:
  explicit NoiseSource(const NoiseModel& model);

  /// Adds N(0, sigma2_grad) to every gradient entry and N(0, sigma2_hess) to
  /// every Hessian entry (upper triangle mirrored when symmetrizing).
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> perturb(const Eigen::VectorXd& grad, const Eigen::MatrixXd& hess);

  const NoiseModel& model() const noexcept { return model_; }

 private:
  NoiseModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Binomial estimate 2 p - 1 of a Hadamard-test overlap with P(+1) = (1 + omega) / 2.
double simulate_hadamard_test(double omega, std::uint64_t shots, std::uint64_t seed);

struct ShotEstimate {
  double one_norm = 0.0;
  double target_sigma = 0.0;
  std::uint64_t n_shots = 0;
};

/// sum |h_eff_pq| + sum |g_pqrs / 2| over every index tuple of the active
/// Hamiltonian; the constant is excluded.
double integral_one_norm(const ActiveHamiltonian& ham);
ShotEstimate shots_for_norm(double one_norm, double target_sigma);
ShotEstimate estimate_shots(const ActiveHamiltonian& ham, double target_sigma);

/// Mean spectral norm of symmetric Gaussian noise matrices (n x n, variance
/// sigma2 per unique element) over `samples` draws.
double empirical_noise_norm(int n, double sigma2, int samples, std::uint64_t seed);

}  // namespace berry
