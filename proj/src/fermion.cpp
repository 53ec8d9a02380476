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

#include "berry/fermion.hpp"

#include <array>

namespace berry {

namespace {

// Parity of occupied modes strictly below `mode`.
double jw_sign(Basis x, int mode) {
  const Basis below = (Basis{1} << mode) - 1;
  return (popcount(x & below) & 1) ? -1.0 : 1.0;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

Eigen::SparseMatrix<double> assemble(Eigen::Index dim, Triplets& triplets) {
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  m.makeCompressed();
  return m;
}

}  // namespace

std::optional<BasisImage> apply_ladders(std::span<const Ladder> ops, Basis x) {
  double sign = 1.0;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    const Basis bit = Basis{1} << it->mode;
    const bool occupied = (x & bit) != 0;
    if (occupied == it->create) return std::nullopt;
    sign *= jw_sign(x, it->mode);
    x ^= bit;
  }
  return BasisImage{x, sign};
}

std::pair<int, int> spin_counts(Basis x) {
  constexpr Basis kEven = 0x5555555555555555ULL;
  return {popcount(x & kEven), popcount(x & ~kEven)};
}

Eigen::SparseMatrix<double> fermion_hamiltonian_operator(const Eigen::MatrixXd& h, const Tensor4& g) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n || g.dim() != n) throw StructuralError("fermion_hamiltonian_operator: shape mismatch");
  const int n_modes = 2 * n;
  const Eigen::Index dim = Eigen::Index{1} << n_modes;
  Triplets triplets;

  for (Basis x = 0; x < static_cast<Basis>(dim); ++x) {
    for (int q = 0; q < n; ++q) {
      for (int sigma = 0; sigma < 2; ++sigma) {
        const int qs = spin_orbital(q, sigma);
        if (!(x & (Basis{1} << qs))) continue;
        for (int p = 0; p < n; ++p) {
          if (h(p, q) == 0.0) continue;
          const std::array<Ladder, 2> ops{{{spin_orbital(p, sigma), true}, {qs, false}}};
          if (auto img = apply_ladders(ops, x)) {
            triplets.emplace_back(static_cast<Eigen::Index>(img->index), static_cast<Eigen::Index>(x),
                                  h(p, q) * img->sign);
          }
        }
      }
    }
    // e_pqrs = a+_{p s} a+_{r t} a_{s' t} a_{q s}; annihilate q first, then s.
    for (int q = 0; q < n; ++q) {
      for (int sigma = 0; sigma < 2; ++sigma) {
        const int qs = spin_orbital(q, sigma);
        if (!(x & (Basis{1} << qs))) continue;
        for (int s = 0; s < n; ++s) {
          for (int tau = 0; tau < 2; ++tau) {
            const int st = spin_orbital(s, tau);
            if (st == qs || !(x & (Basis{1} << st))) continue;
            for (int r = 0; r < n; ++r) {
              for (int p = 0; p < n; ++p) {
                const double v = g(p, q, r, s);
                if (v == 0.0) continue;
                const std::array<Ladder, 4> ops{
                    {{spin_orbital(p, sigma), true}, {spin_orbital(r, tau), true}, {st, false}, {qs, false}}};
                if (auto img = apply_ladders(ops, x)) {
                  triplets.emplace_back(static_cast<Eigen::Index>(img->index), static_cast<Eigen::Index>(x),
                                        0.5 * v * img->sign);
                }
              }
            }
          }
        }
      }
    }
  }
  return assemble(dim, triplets);
}

Eigen::SparseMatrix<double> one_body_operator(const Eigen::MatrixXd& k) {
  const int n = static_cast<int>(k.rows());
  if (k.cols() != n) throw StructuralError("one_body_operator: matrix must be square");
  const Eigen::Index dim = Eigen::Index{1} << (2 * n);
  Triplets triplets;
  for (Basis x = 0; x < static_cast<Basis>(dim); ++x) {
    for (int q = 0; q < n; ++q) {
      for (int sigma = 0; sigma < 2; ++sigma) {
        for (int p = 0; p < n; ++p) {
          if (k(p, q) == 0.0) continue;
          const std::array<Ladder, 2> ops{{{spin_orbital(p, sigma), true}, {spin_orbital(q, sigma), false}}};
          if (auto img = apply_ladders(ops, x)) {
            triplets.emplace_back(static_cast<Eigen::Index>(img->index), static_cast<Eigen::Index>(x),
                                  k(p, q) * img->sign);
          }
        }
      }
    }
  }
  return assemble(dim, triplets);
}

Eigen::VectorXd number_operator_diagonal(int n_qubits) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  Eigen::VectorXd d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = popcount(static_cast<Basis>(i));
  return d;
}

Eigen::SparseMatrix<double> spin_squared_operator(int n_spatial) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * n_spatial);
  Triplets triplets;
  for (Basis x = 0; x < static_cast<Basis>(dim); ++x) {
    const auto [n_up, n_down] = spin_counts(x);
    const double sz = 0.5 * (n_up - n_down);
    triplets.emplace_back(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x), sz * sz + sz);
    // S- S+ = sum_pq a+_{p dn} a_{p up} a+_{q up} a_{q dn}
    for (int q = 0; q < n_spatial; ++q) {
      for (int p = 0; p < n_spatial; ++p) {
        const std::array<Ladder, 4> ops{{{spin_orbital(p, 1), true},
                                         {spin_orbital(p, 0), false},
                                         {spin_orbital(q, 0), true},
                                         {spin_orbital(q, 1), false}}};
        if (auto img = apply_ladders(ops, x)) {
          triplets.emplace_back(static_cast<Eigen::Index>(img->index), static_cast<Eigen::Index>(x), img->sign);
        }
      }
    }
  }
  return assemble(dim, triplets);
}

}  // namespace berry
