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

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "berry/hamiltonian.hpp"
#include "berry/statevec.hpp"
#include "berry/types.hpp"

namespace berry {

/// Symmetric S^{-1/2} by eigendecomposition. Throws for eigenvalues below 1e-10.
Eigen::MatrixXd lowdin_inverse_sqrt(const Eigen::MatrixXd& s);
Eigen::MatrixXd lowdin_sqrt(const Eigen::MatrixXd& s);

/// Maximum elementwise deviation of C^T C from the identity.
double orthogonality_defect(const Eigen::MatrixXd& c);

/// Non-redundant orbital rotation pairs (p, q), p < q, p in core+active,
/// q in active+virtual. Active-active pairs are optional.
class KappaIndex {
 public:
  KappaIndex() = default;
  KappaIndex(const ActiveSpaceSpec& active, bool include_active_active);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }
  int n_orb() const noexcept { return n_orb_; }

  /// Antisymmetric K with K_pq = kappa, K_qp = -kappa.
  Eigen::MatrixXd to_matrix(const Eigen::VectorXd& kappa) const;

 private:
  int n_orb_ = 0;
  std::vector<std::pair<int, int>> pairs_;
};

/// C exp(-K(kappa)).
Eigen::MatrixXd apply_kappa(const Eigen::MatrixXd& c, const KappaIndex& index, const Eigen::VectorXd& kappa);

/// Full-space RDMs restricted to the occupied (core + active) orbitals; every
/// element with a virtual index vanishes. With `derivative` set the constant
/// core contributions are dropped, which maps theta-derivatives of active RDMs
/// to theta-derivatives of the full-space RDMs.
RDMPair expand_rdms(const RDMPair& active_rdms, const ActiveSpaceSpec& active, bool derivative = false);

/// F_pq = sum_m gamma_pm h_qm + sum_mnk Gamma_pmnk g_qmnk over the full MO
/// basis; `occ` RDMs cover the leading orbitals only.
Eigen::MatrixXd generalized_fock(const RDMPair& occ, const MOIntegrals& mo);

Eigen::VectorXd orbital_gradient(const RDMPair& occ, const MOIntegrals& mo, const KappaIndex& index);
Eigen::MatrixXd orbital_hessian(const RDMPair& occ, const MOIntegrals& mo, const KappaIndex& index);
/// Rows follow the kappa index, columns the circuit parameters.
Eigen::MatrixXd mixed_hessian(const std::vector<RDMPair>& occ_derivs, const MOIntegrals& mo, const KappaIndex& index);

struct OrbitalTransfer {
  Eigen::MatrixXd c01;
  double block_residual = 0.0;
  Eigen::MatrixXd generator;  // N_A x N_A, antisymmetric
  bool aligned = false;       // block_residual <= block_tol
  bool real_log_ok = false;   // active block has a real logarithm
  std::string message;
};

OrbitalTransfer transfer_and_generator(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1,
                                       const ActiveSpaceSpec& active, double block_tol = 1e-3);

/// exp(sum_pq G_pq E_pq) applied to an active-space state.
Statevector apply_orbital_rotation_to_state(const Statevector& state, const Eigen::MatrixXd& generator,
                                            const ActiveSpaceSpec& active);

/// exp(A) v for a sparse real operator by scaled Taylor series.
Eigen::VectorXcd expm_multiply(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXcd& v);

}  // namespace berry
