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

#include "berry/orbital.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "berry/fermion.hpp"

namespace berry {

namespace {

Eigen::MatrixXd spectral_power(const Eigen::MatrixXd& s, double power) {
  if (s.rows() != s.cols()) throw StructuralError("overlap matrix must be square");
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("overlap matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.eigenvalues().minCoeff() < 1e-10)
    throw std::invalid_argument("overlap matrix is near linearly dependent (smallest eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()) + ")");
  const Eigen::VectorXd d = es.eigenvalues().array().pow(power);
  Eigen::MatrixXd out = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

int block_of(int p, const ActiveSpaceSpec& a) {
  if (p < a.n_core) return 0;
  return p < a.n_core + a.n_active ? 1 : 2;
}

}  // namespace

Eigen::MatrixXd lowdin_inverse_sqrt(const Eigen::MatrixXd& s) { return spectral_power(s, -0.5); }
Eigen::MatrixXd lowdin_sqrt(const Eigen::MatrixXd& s) { return spectral_power(s, 0.5); }

double orthogonality_defect(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) return INFINITY;
  return (c.transpose() * c - Eigen::MatrixXd::Identity(c.rows(), c.cols())).cwiseAbs().maxCoeff();
}

// ------------------------------------------------------------------- kappa

KappaIndex::KappaIndex(const ActiveSpaceSpec& active, bool include_active_active) : n_orb_(active.n_orb()) {
  active.validate();
  const int occ_end = active.n_core + active.n_active;
  for (int p = 0; p < occ_end; ++p)
    for (int q = std::max(p + 1, active.n_core); q < n_orb_; ++q) {
      const bool both_active = p >= active.n_core && q < occ_end;
      if (both_active && !include_active_active) continue;
      pairs_.emplace_back(p, q);
    }
}

Eigen::MatrixXd KappaIndex::to_matrix(const Eigen::VectorXd& kappa) const {
  if (static_cast<std::size_t>(kappa.size()) != pairs_.size()) throw StructuralError("kappa length mismatch");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n_orb_, n_orb_);
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto [p, q] = pairs_[i];
    k(p, q) = kappa(static_cast<Eigen::Index>(i));
    k(q, p) = -kappa(static_cast<Eigen::Index>(i));
  }
  return k;
}

Eigen::MatrixXd apply_kappa(const Eigen::MatrixXd& c, const KappaIndex& index, const Eigen::VectorXd& kappa) {
  if (c.cols() != index.n_orb()) throw StructuralError("apply_kappa: C does not match the kappa index");
  if (kappa.size() == 0 || kappa.cwiseAbs().maxCoeff() == 0.0) return c;
  const Eigen::MatrixXd k = index.to_matrix(kappa);
  return c * Eigen::MatrixXd((-k).exp());
}

// -------------------------------------------------------- full-space RDMs

RDMPair expand_rdms(const RDMPair& act, const ActiveSpaceSpec& a, bool derivative) {
  const int nc = a.n_core, na = a.n_active, n = nc + na;
  if (act.dim() != na) throw StructuralError("expand_rdms: active RDM size mismatch");
  RDMPair out{Eigen::MatrixXd::Zero(n, n), Tensor4(n)};
  out.gamma.block(nc, nc, na, na) = act.gamma;
  for (int t = 0; t < na; ++t)
    for (int u = 0; u < na; ++u)
      for (int v = 0; v < na; ++v)
        for (int w = 0; w < na; ++w) out.Gamma(nc + t, nc + u, nc + v, nc + w) = act.Gamma(t, u, v, w);

  for (int i = 0; i < nc; ++i) {
    for (int t = 0; t < na; ++t)
      for (int u = 0; u < na; ++u) {
        const double g = act.gamma(t, u);
        out.Gamma(i, i, nc + t, nc + u) = 2.0 * g;
        out.Gamma(nc + t, nc + u, i, i) = 2.0 * g;
        out.Gamma(i, nc + t, nc + u, i) = -g;
        out.Gamma(nc + t, i, i, nc + u) = -g;
      }
  }
  if (!derivative) {
    for (int i = 0; i < nc; ++i) {
      out.gamma(i, i) = 2.0;
      for (int j = 0; j < nc; ++j) {
        out.Gamma(i, i, j, j) += 4.0;
        out.Gamma(i, j, j, i) -= 2.0;
      }
    }
  }
  return out;
}

// ------------------------------------------------------ orbital derivatives

Eigen::MatrixXd generalized_fock(const RDMPair& occ, const MOIntegrals& mo) {
  const int n = mo.n_orb(), no = occ.dim();
  if (no > n || occ.Gamma.dim() != no) throw StructuralError("generalized_fock: RDM/integral size mismatch");
  const Eigen::Index no3 = Eigen::Index{no} * no * no;
  // Gamma_{p,(mnk)} and g_{q,(mnk)} with m, n, k occupied.
  Eigen::MatrixXd gam(no, no3), gq(n, no3);
  for (int p = 0; p < no; ++p)
    for (int m = 0; m < no; ++m)
      for (int x = 0; x < no; ++x)
        for (int k = 0; k < no; ++k) gam(p, (m * no + x) * no + k) = occ.Gamma(p, m, x, k);
  for (int q = 0; q < n; ++q)
    for (int m = 0; m < no; ++m)
      for (int x = 0; x < no; ++x)
        for (int k = 0; k < no; ++k) gq(q, (m * no + x) * no + k) = mo.g(q, m, x, k);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, n);
  f.topRows(no) = occ.gamma * mo.h.leftCols(no).transpose() + gam * gq.transpose();
  return f;
}

Eigen::VectorXd orbital_gradient(const RDMPair& occ, const MOIntegrals& mo, const KappaIndex& index) {
  if (index.n_orb() != mo.n_orb()) throw StructuralError("orbital_gradient: kappa index size mismatch");
  const Eigen::MatrixXd f = generalized_fock(occ, mo);
  Eigen::VectorXd grad(static_cast<Eigen::Index>(index.size()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto [p, q] = index.pairs()[i];
    grad(static_cast<Eigen::Index>(i)) = 2.0 * (f(p, q) - f(q, p));
  }
  return grad;
}

Eigen::MatrixXd orbital_hessian(const RDMPair& occ, const MOIntegrals& mo, const KappaIndex& index) {
  if (index.n_orb() != mo.n_orb()) throw StructuralError("orbital_hessian: kappa index size mismatch");
  const int no = occ.dim();
  const Eigen::MatrixXd f = generalized_fock(occ, mo);
  const auto& G = occ.Gamma;
  const auto& g = mo.g;

  // Y_abcd = sum_mn (G_amcn + G_amnc) g_bmnd + G_acmn g_bdmn, zero unless a, c occupied.
  auto y = [&](int a, int b, int c, int d) {
    if (a >= no || c >= no) return 0.0;
    double acc = 0.0;
    for (int m = 0; m < no; ++m)
      for (int x = 0; x < no; ++x) acc += (G(a, m, c, x) + G(a, m, x, c)) * g(b, m, x, d) + G(a, c, m, x) * g(b, d, m, x);
    return acc;
  };
  auto term = [&](int a, int b, int c, int d) {
    double v = 2.0 * y(a, b, c, d);
    if (a < no && c < no) v += 2.0 * occ.gamma(a, c) * mo.h(b, d);
    if (b == d) v -= f(a, c) + f(c, a);
    return v;
  };

  const auto n = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [p, q] = index.pairs()[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto [r, s] = index.pairs()[static_cast<std::size_t>(k)];
      x(i, k) = term(p, q, r, s) - term(q, p, r, s) - term(p, q, s, r) + term(q, p, s, r);
    }
  }
  return 0.5 * (x + x.transpose());
}

Eigen::MatrixXd mixed_hessian(const std::vector<RDMPair>& occ_derivs, const MOIntegrals& mo, const KappaIndex& index) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(occ_derivs.size()));
  for (std::size_t j = 0; j < occ_derivs.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = orbital_gradient(occ_derivs[j], mo, index);
  return out;
}

// ---------------------------------------------------------------- transfer

OrbitalTransfer transfer_and_generator(const Eigen::MatrixXd& c0, const Eigen::MatrixXd& c1,
                                       const ActiveSpaceSpec& active, double block_tol) {
  if (c0.rows() != c1.rows() || c0.cols() != c1.cols() || c0.cols() != active.n_orb())
    throw StructuralError("transfer_and_generator: shape mismatch");
  OrbitalTransfer out;
  out.c01 = c0.transpose() * c1;
  const int n = active.n_orb();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (block_of(p, active) != block_of(q, active))
        out.block_residual = std::max(out.block_residual, std::abs(out.c01(p, q)));
  out.aligned = out.block_residual <= block_tol;
  const int nc = active.n_core, na = active.n_active;
  out.generator = Eigen::MatrixXd::Zero(na, na);
  if (!out.aligned) {
    out.message = "active spaces of C0 and C1 are not aligned (cross-block residual " +
                  std::to_string(out.block_residual) + ")";
    return out;
  }
  if (na == 0) {
    out.real_log_ok = true;
    return out;
  }
  // Nearest orthogonal matrix to the active block.
  const Eigen::MatrixXd block = out.c01.block(nc, nc, na, na);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd u = svd.matrixU() * svd.matrixV().transpose();
  if (u.determinant() < 0.0) {
    out.message = "active block is a reflection (determinant -1); no real logarithm";
    return out;
  }
  const Eigen::MatrixXcd log = u.cast<Complex>().log();
  const Eigen::MatrixXd l = log.real();
  out.generator = 0.5 * (l - l.transpose());
  out.real_log_ok = true;
  return out;
}

Eigen::VectorXcd expm_multiply(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXcd& v) {
  if (a.rows() != a.cols() || a.cols() != v.size()) throw StructuralError("expm_multiply: dimension mismatch");
  double norm1 = 0.0;
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) col += std::abs(it.value());
    norm1 = std::max(norm1, col);
  }
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  Eigen::VectorXcd out = v;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd term = out, sum = out;
    for (int k = 1; k < 60; ++k) {
      term = apply_real_operator(a, term) / (static_cast<double>(steps) * k);
      sum += term;
      if (term.norm() <= 1e-17 * sum.norm()) break;
    }
    out = sum;
  }
  return out;
}

Statevector apply_orbital_rotation_to_state(const Statevector& state, const Eigen::MatrixXd& generator,
                                            const ActiveSpaceSpec& active) {
  const int na = active.n_active;
  if (generator.rows() != na || generator.cols() != na || state.n_qubits() != 2 * na)
    throw StructuralError("apply_orbital_rotation_to_state: shape mismatch");
  if ((generator + generator.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("orbital rotation generator is not antisymmetric");
  if (na == 0 || generator.cwiseAbs().maxCoeff() == 0.0) return state;
  return Statevector(state.n_qubits(), expm_multiply(one_body_operator(generator), state.amplitudes()));
}

}  // namespace berry
