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

#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "berry/hamiltonian.hpp"
#include "berry/orbital.hpp"
#include "berry/statevec.hpp"

namespace berry {

/// Point in the composite parameter space: circuit angles plus MO
/// coefficients (empty for fixed-basis problems).
struct Variables {
  Eigen::VectorXd theta;
  Eigen::MatrixXd c;
};

struct CostDerivatives {
  double energy = 0.0;
  Eigen::VectorXd grad;  // [theta; kappa]
  Eigen::MatrixXd hess;
};

struct OverlapResult {
  double omega = 0.0;
  bool ok = true;
  std::string message;
  double block_residual = 0.0;
  double rotation_l1 = 0.0;  // |log-rotation angles|_1 of the transfer
};

/// E(t, theta, C) and its exact derivatives along a closed loop.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual Variables initial_guess() const = 0;
  virtual std::size_t n_theta() const = 0;
  /// theta plus kappa
  virtual std::size_t n_params() const = 0;
  virtual double energy(double t, const Variables& v) const = 0;
  virtual CostDerivatives derivatives(double t, const Variables& v, bool with_hessian = true) const = 0;
  /// Moves by `step` in the local [theta; kappa] chart.
  virtual Variables retract(const Variables& v, const Eigen::VectorXd& step) const = 0;
  /// Re<psi(v0)| G |psi(v1)>, G the orbital transfer when orbitals are optimized.
  virtual OverlapResult final_overlap(const Variables& v0, const Variables& v1) const = 0;
  virtual void check_steps(int n_steps) const = 0;
  virtual const AnsatzCircuit& ansatz() const = 0;
};

/// Analytic loops: H(t) given as a dense matrix on the qubit register.
class FixedBasisCost final : public CostModel {
 public:
  FixedBasisCost(LoopSpec loop, AnsatzCircuit ansatz);

  Variables initial_guess() const override;
  std::size_t n_theta() const override { return ansatz_.n_params(); }
  std::size_t n_params() const override { return ansatz_.n_params(); }
  double energy(double t, const Variables& v) const override;
  CostDerivatives derivatives(double t, const Variables& v, bool with_hessian) const override;
  Variables retract(const Variables& v, const Eigen::VectorXd& step) const override;
  OverlapResult final_overlap(const Variables& v0, const Variables& v1) const override;
  void check_steps(int n_steps) const override { loop_.check_steps(n_steps); }
  const AnsatzCircuit& ansatz() const override { return ansatz_; }

 private:
  Eigen::SparseMatrix<double> hamiltonian(double t) const;

  LoopSpec loop_;
  AnsatzCircuit ansatz_;
};

/// Bundle loops: circuit angles and active-space orbitals optimized jointly.
class OrbitalOptimizedCost final : public CostModel {
 public:
  OrbitalOptimizedCost(LoopSpec loop, AnsatzCircuit ansatz, KappaIndex kappa, Eigen::MatrixXd c_start,
                       double block_tol = 1e-3);

  Variables initial_guess() const override;
  std::size_t n_theta() const override { return ansatz_.n_params(); }
  std::size_t n_params() const override { return ansatz_.n_params() + kappa_.size(); }
  double energy(double t, const Variables& v) const override;
  CostDerivatives derivatives(double t, const Variables& v, bool with_hessian) const override;
  Variables retract(const Variables& v, const Eigen::VectorXd& step) const override;
  OverlapResult final_overlap(const Variables& v0, const Variables& v1) const override;
  void check_steps(int n_steps) const override { loop_.check_steps(n_steps); }
  const AnsatzCircuit& ansatz() const override { return ansatz_; }

  const ActiveSpaceSpec& active() const noexcept { return active_; }
  const KappaIndex& kappa() const noexcept { return kappa_; }

 private:
  LoopSpec loop_;
  ActiveSpaceSpec active_;
  AnsatzCircuit ansatz_;
  KappaIndex kappa_;
  Eigen::MatrixXd c_start_;
  double block_tol_;
};

/// "direct", "uccd" or "npf:<layers>".
struct AnsatzChoice {
  enum class Kind { Direct, Uccd, Npf } kind = Kind::Direct;
  int layers = 1;

  static AnsatzChoice parse(const std::string& text);
  std::string to_string() const;
};

/// Cost model for a loop: fixed basis for analytic loops, orbital-optimized
/// for bundle loops. Active-active rotations are included for UCCD only, as
/// the fabric already rotates active orbitals among themselves.
std::unique_ptr<CostModel> make_cost_model(const LoopSpec& loop, const AnsatzChoice& choice, double block_tol = 1e-3);

}  // namespace berry
