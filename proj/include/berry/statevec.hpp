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
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "berry/types.hpp"

namespace berry {

/// Dense statevector over n qubits. Qubit q is bit q of the basis index.
///
/// Amplitudes are stored as complex numbers; states produced by real ansaetze
/// stay real, which max_imag() lets callers check.
class Statevector {
 public:
  /// |0...0> on n qubits.
  explicit Statevector(int n_qubits);
  Statevector(int n_qubits, Eigen::VectorXcd amplitudes);

  static Statevector basis_state(int n_qubits, Basis index);
  /// Occupation string in qubit order, e.g. "1100" sets qubits 0 and 1.
  static Statevector from_occupations(std::string_view bits);

  int n_qubits() const noexcept { return n_qubits_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() noexcept { return amplitudes_; }
  Complex operator[](Basis index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

  double norm() const { return amplitudes_.norm(); }
  double max_imag() const;
  /// <this|ket>
  Complex inner(const Statevector& ket) const;

 private:
  int n_qubits_;
  Eigen::VectorXcd amplitudes_;
};

/// A 2-d rotation plane of a generator: A|from> = sign|to>, A|to> = -sign|from>.
struct RotationPlane {
  Basis from;
  Basis to;
  double sign;
};

/// weight * (tau - tau^dagger) for one fermionic excitation tau. Planes of a
/// component are disjoint, so the component satisfies A^3 = -weight^2 A.
struct GeneratorComponent {
  double weight = 1.0;
  std::vector<RotationPlane> planes;
};

/// Real antisymmetric generator A stored as a sum of mutually commuting
/// components. exp(theta A) is the product of per-component plane rotations,
/// which is exact.
class RealGenerator {
 public:
  RealGenerator(int n_qubits, std::vector<GeneratorComponent> components, std::string label);

  /// tau - tau^dagger with tau = a+_{c0} a+_{c1} ... a_{a_last} ... a_{a0}:
  /// annihilates `annihilate` (in listed order, first entry acts first) and
  /// then creates `create` (last entry acts first).
  static RealGenerator excitation(int n_qubits, const std::vector<int>& create, const std::vector<int>& annihilate,
                                  std::string label);
  /// |to><from| - |from><to|
  static RealGenerator plane(int n_qubits, Basis from, Basis to, std::string label);
  /// Sum of commuting generators; caller guarantees commutation.
  static RealGenerator sum(const std::vector<RealGenerator>& parts, std::string label);

  /// Rescaled copy with spectral norm 1. Throws for the zero generator.
  RealGenerator normalized() const;

  int n_qubits() const noexcept { return n_qubits_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<GeneratorComponent>& components() const noexcept { return components_; }

  /// Exact spectral norm, computed over the connected blocks of the planes.
  double spectral_norm() const;

  /// out = A * in
  Eigen::VectorXcd apply(const Eigen::VectorXcd& in) const;
  /// v <- exp(theta A) v
  void rotate(Eigen::VectorXcd& v, double theta) const;

  Eigen::MatrixXd dense() const;

 private:
  int n_qubits_;
  std::vector<GeneratorComponent> components_;
  std::string label_;
};

/// Ordered list of real rotations applied to a fixed initial determinant.
/// Generator 0 acts first.
struct AnsatzCircuit {
  std::vector<RealGenerator> generators;
  Statevector initial_state{0};

  std::size_t n_params() const noexcept { return generators.size(); }
  int n_qubits() const noexcept { return initial_state.n_qubits(); }
};

/// Hartree-Fock reference of the active space: lowest eta/2 spatial orbitals doubly occupied.
Statevector hartree_fock_state(const ActiveSpaceSpec& active);

Statevector apply_real_rotation(Statevector state, const RealGenerator& gen, double theta);
Statevector prepare_ansatz(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta);

/// Paired double excitations (i up, i down) -> (a up, a down) for each occupied
/// i and virtual a of the active space, acting on the Hartree-Fock determinant.
AnsatzCircuit build_uccd_ansatz(const ActiveSpaceSpec& active);

/// Number-preserving fabric: brick layers of two-orbital blocks, each an
/// orbital rotation followed by a pair exchange. Leading blocks that act
/// trivially on the reference determinant are dropped.
AnsatzCircuit build_npf_ansatz(const ActiveSpaceSpec& active, int layers);

/// Hyperspherical chain on n qubits: plane rotations (0, k) for k = 1..2^n-1
/// applied to |0>. Covers every real normalized state.
AnsatzCircuit build_direct_ansatz(int n_qubits);

/// Spin-adapted orbital rotation E_pq - E_qp (normalized).
RealGenerator orbital_rotation_generator(int n_qubits, int p, int q);
/// Pair exchange (q up, q down) -> (p up, p down) minus h.c.
RealGenerator pair_double_generator(int n_qubits, int p, int q);

/// Spin-traced one- and two-particle reduced density matrices.
struct RDMPair {
  Eigen::MatrixXd gamma;  // gamma_pq = <E_pq>
  Tensor4 Gamma;          // Gamma_pqrs = <e_pqrs>, chemists' order

  int dim() const noexcept { return static_cast<int>(gamma.rows()); }
};

RDMPair compute_rdms(const Statevector& state, int n_active);

/// |d psi / d theta_j> for all j, by inserting the generator after gate j.
std::vector<Eigen::VectorXcd> state_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta);

/// d gamma / d theta_j and d Gamma / d theta_j for each parameter j.
std::vector<RDMPair> rdm_theta_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta, int n_active);

struct EnergyDerivatives {
  double energy = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// Energy <psi|H|psi>, gradient and (optionally) Hessian with respect to the
/// circuit angles, computed exactly from the statevector.
EnergyDerivatives ansatz_energy_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta,
                                            const Eigen::SparseMatrix<double>& hamiltonian, bool with_hessian = true);

double expectation(const Statevector& state, const Eigen::SparseMatrix<double>& op);
Eigen::VectorXcd apply_real_operator(const Eigen::SparseMatrix<double>& op, const Eigen::VectorXcd& v);

}  // namespace berry
