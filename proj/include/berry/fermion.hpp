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

// Jordan-Wigner fermion algebra on computational-basis indices.
//
// Qubit q is bit q of the basis index and holds spin orbital q; spin orbitals
// are interleaved as (0 up, 0 down, 1 up, 1 down, ...). A creation operator on
// mode j picks up the parity of all occupied modes below j.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "berry/types.hpp"

namespace berry {

struct Ladder {
  int mode;
  bool create;
};

struct BasisImage {
  Basis index;
  double sign;
};

/// Applies the operator product ops[0] ops[1] ... ops[k-1] to |x>; the last
/// entry acts first. Returns nullopt when the product annihilates |x>.
std::optional<BasisImage> apply_ladders(std::span<const Ladder> ops, Basis x);

inline int popcount(Basis x) noexcept { return __builtin_popcountll(x); }

/// Spin-resolved electron counts of a basis index with interleaved ordering.
std::pair<int, int> spin_counts(Basis x);

/// Sparse JW matrix of sum_pq h_pq E_pq + 1/2 sum_pqrs g_pqrs e_pqrs over
/// 2 * h.rows() qubits, e_pqrs = sum_{st} a+_ps a+_rt a_st a_qs.
Eigen::SparseMatrix<double> fermion_hamiltonian_operator(const Eigen::MatrixXd& h, const Tensor4& g);

/// Sparse JW matrix of sum_pq k_pq E_pq (spin-summed one-body operator).
Eigen::SparseMatrix<double> one_body_operator(const Eigen::MatrixXd& k);

/// Diagonal of the total number operator.
Eigen::VectorXd number_operator_diagonal(int n_qubits);

/// Sparse JW matrix of the total spin S^2 over n_spatial orbitals.
Eigen::SparseMatrix<double> spin_squared_operator(int n_spatial);

}  // namespace berry
