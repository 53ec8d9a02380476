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

#include "berry/scf.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "berry/orbital.hpp"

namespace berry {

namespace {

Eigen::MatrixXd fock_matrix(const MOIntegrals& oao, const Eigen::MatrixXd& density) {
  const int n = oao.n_orb();
  Eigen::MatrixXd f = oao.h;
  for (int m = 0; m < n; ++m)
    for (int v = 0; v <= m; ++v) {
      double s = 0.0;
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) s += density(l, k) * (2.0 * oao.g(m, v, l, k) - oao.g(m, l, k, v));
      f(m, v) += s;
      f(v, m) = f(m, v);
    }
  return f;
}

Eigen::MatrixXd diis_extrapolate(const std::deque<Eigen::MatrixXd>& focks, const std::deque<Eigen::MatrixXd>& errors) {
  const int n = static_cast<int>(focks.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Constant(n + 1, n + 1, -1.0);
  b(n, n) = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = (errors[i].array() * errors[j].array()).sum();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = -1.0;
  const Eigen::VectorXd w = b.completeOrthogonalDecomposition().solve(rhs);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(focks.front().rows(), focks.front().cols());
  for (int i = 0; i < n; ++i) f += w(i) * focks[i];
  return f;
}

}  // namespace

ScfResult restricted_hartree_fock(const IntegralBundle& bundle, int n_electrons, const ScfOptions& options) {
  if (n_electrons <= 0 || n_electrons % 2 != 0) throw std::invalid_argument("RHF needs a positive even electron count");
  const int n = bundle.n_orb;
  const int n_occ = n_electrons / 2;
  if (n_occ > n) throw std::invalid_argument("RHF: more electron pairs than orbitals");
  const MOIntegrals oao = transform_integrals(bundle, Eigen::MatrixXd::Identity(n, n));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oao.h);
  Eigen::MatrixXd c = es.eigenvectors();
  Eigen::MatrixXd density = c.leftCols(n_occ) * c.leftCols(n_occ).transpose();
  std::deque<Eigen::MatrixXd> focks, errors;
  double energy = 0.0;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Eigen::MatrixXd f = fock_matrix(oao, density);
    const double e_new = oao.e_nuc + (density.array() * (oao.h + f).array()).sum();
    const Eigen::MatrixXd err = f * density - density * f;
    const double comm = err.cwiseAbs().maxCoeff();
    if (it > 1 && std::abs(e_new - energy) < options.energy_tol && comm < options.commutator_tol) {
      es.compute(f);
      return {es.eigenvectors(), es.eigenvalues(), e_new, it};
    }
    energy = e_new;
    focks.push_back(f);
    errors.push_back(err);
    if (static_cast<int>(focks.size()) > options.diis_size) {
      focks.pop_front();
      errors.pop_front();
    }
    es.compute(focks.size() > 1 ? diis_extrapolate(focks, errors) : f);
    c = es.eigenvectors();
    density = c.leftCols(n_occ) * c.leftCols(n_occ).transpose();
  }
  throw std::runtime_error("RHF did not converge in " + std::to_string(options.max_iter) + " iterations");
}

Eigen::MatrixXd initial_orbitals(const LoopSpec& loop) {
  if (loop.kind != LoopKind::BundleList || !loop.active) throw std::invalid_argument("initial_orbitals: not a bundle loop");
  if (loop.c0) return *loop.c0;
  return restricted_hartree_fock(*loop_bundle(loop, 0.0), loop.active->n_electrons()).c;
}

}  // namespace berry
