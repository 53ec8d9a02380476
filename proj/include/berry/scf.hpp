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

#include <Eigen/Dense>

#include "berry/hamiltonian.hpp"

namespace berry {

struct ScfOptions {
  int max_iter = 200;
  double energy_tol = 1e-10;
  double commutator_tol = 1e-8;
  int diis_size = 8;
};

struct ScfResult {
  Eigen::MatrixXd c;  // orbitals over the Loewdin basis, ascending energy
  Eigen::VectorXd orbital_energies;
  double energy = 0.0;
  int iterations = 0;
};

/// Closed-shell Hartree-Fock with DIIS. Throws std::runtime_error when not
/// converged within max_iter.
ScfResult restricted_hartree_fock(const IntegralBundle& bundle, int n_electrons, const ScfOptions& options = {});

/// Loop start orbitals: the loop's C0 when given, else RHF at t = 0.
Eigen::MatrixXd initial_orbitals(const LoopSpec& loop);

}  // namespace berry
