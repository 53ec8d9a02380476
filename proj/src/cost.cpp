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

#include "berry/cost.hpp"

#include <cmath>
#include <stdexcept>

#include "berry/scf.hpp"

namespace berry {

namespace {

Eigen::SparseMatrix<double> to_sparse(const Eigen::MatrixXd& m) { return m.sparseView(0.0, 0.0); }

CostDerivatives assemble(const EnergyDerivatives& ed, double e_const) {
  return {ed.energy + e_const, ed.grad, ed.hess};
}

}  // namespace

FixedBasisCost::FixedBasisCost(LoopSpec loop, AnsatzCircuit ansatz) : loop_(std::move(loop)), ansatz_(std::move(ansatz)) {
  if (loop_.kind == LoopKind::BundleList) throw std::invalid_argument("FixedBasisCost needs an analytic loop");
  if (ansatz_.n_qubits() != loop_.n_qubits())
    throw std::invalid_argument("ansatz acts on " + std::to_string(ansatz_.n_qubits()) + " qubits, loop on " +
                                std::to_string(loop_.n_qubits()));
}

Eigen::SparseMatrix<double> FixedBasisCost::hamiltonian(double t) const { return to_sparse(analytic_hamiltonian(loop_, t)); }

Variables FixedBasisCost::initial_guess() const {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz_.n_params())), Eigen::MatrixXd()};
}

double FixedBasisCost::energy(double t, const Variables& v) const {
  return expectation(prepare_ansatz(ansatz_, v.theta), hamiltonian(t));
}

CostDerivatives FixedBasisCost::derivatives(double t, const Variables& v, bool with_hessian) const {
  return assemble(ansatz_energy_derivatives(ansatz_, v.theta, hamiltonian(t), with_hessian), 0.0);
}

Variables FixedBasisCost::retract(const Variables& v, const Eigen::VectorXd& step) const {
  if (step.size() != v.theta.size()) throw std::invalid_argument("retract: step size mismatch");
  return {v.theta + step, v.c};
}

OverlapResult FixedBasisCost::final_overlap(const Variables& v0, const Variables& v1) const {
  OverlapResult out;
  out.omega = prepare_ansatz(ansatz_, v0.theta).inner(prepare_ansatz(ansatz_, v1.theta)).real();
  return out;
}

OrbitalOptimizedCost::OrbitalOptimizedCost(LoopSpec loop, AnsatzCircuit ansatz, KappaIndex kappa, Eigen::MatrixXd c_start,
                                           double block_tol)
    : loop_(std::move(loop)),
      ansatz_(std::move(ansatz)),
      kappa_(std::move(kappa)),
      c_start_(std::move(c_start)),
      block_tol_(block_tol) {
  if (loop_.kind != LoopKind::BundleList || !loop_.active)
    throw std::invalid_argument("OrbitalOptimizedCost needs a bundle loop with an active space");
  if (!(block_tol_ > 0.0)) throw std::invalid_argument("block_tol must be positive");
  active_ = *loop_.active;
  if (ansatz_.n_qubits() != active_.n_qubits()) throw std::invalid_argument("ansatz does not match the active space");
  if (!kappa_.empty() && kappa_.n_orb() != active_.n_orb()) throw std::invalid_argument("kappa index does not match");
  if (c_start_.rows() != active_.n_orb() || c_start_.cols() != active_.n_orb())
    throw std::invalid_argument("starting orbitals must be square over all orbitals");
}

Variables OrbitalOptimizedCost::initial_guess() const {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ansatz_.n_params())), c_start_};
}

double OrbitalOptimizedCost::energy(double t, const Variables& v) const {
  const ActiveHamiltonian ham = build_active_hamiltonian(*loop_bundle(loop_, t), v.c, active_);
  return ham.e_const + expectation(prepare_ansatz(ansatz_, v.theta), ham.op);
}

CostDerivatives OrbitalOptimizedCost::derivatives(double t, const Variables& v, bool with_hessian) const {
  const MOIntegrals mo = transform_integrals(*loop_bundle(loop_, t), v.c);
  const ActiveHamiltonian ham = fold_active_hamiltonian(mo, active_);
  const EnergyDerivatives ed = ansatz_energy_derivatives(ansatz_, v.theta, ham.op, with_hessian);
  if (kappa_.empty()) return assemble(ed, ham.e_const);

  const auto nt = static_cast<Eigen::Index>(ansatz_.n_params());
  const auto nk = static_cast<Eigen::Index>(kappa_.size());
  CostDerivatives out;
  out.energy = ed.energy + ham.e_const;
  const RDMPair occ = expand_rdms(compute_rdms(prepare_ansatz(ansatz_, v.theta), active_.n_active), active_);
  out.grad.resize(nt + nk);
  out.grad << ed.grad, orbital_gradient(occ, mo, kappa_);
  if (!with_hessian) return out;

  std::vector<RDMPair> d_occ;
  for (const RDMPair& d : rdm_theta_derivatives(ansatz_, v.theta, active_.n_active))
    d_occ.push_back(expand_rdms(d, active_, true));
  const Eigen::MatrixXd mixed = mixed_hessian(d_occ, mo, kappa_);
  out.hess.resize(nt + nk, nt + nk);
  out.hess.topLeftCorner(nt, nt) = ed.hess;
  out.hess.bottomRightCorner(nk, nk) = orbital_hessian(occ, mo, kappa_);
  out.hess.bottomLeftCorner(nk, nt) = mixed;
  out.hess.topRightCorner(nt, nk) = mixed.transpose();
  return out;
}

Variables OrbitalOptimizedCost::retract(const Variables& v, const Eigen::VectorXd& step) const {
  const auto nt = static_cast<Eigen::Index>(ansatz_.n_params());
  if (step.size() != static_cast<Eigen::Index>(n_params())) throw std::invalid_argument("retract: step size mismatch");
  Variables out{v.theta + step.head(nt), v.c};
  if (!kappa_.empty()) out.c = apply_kappa(v.c, kappa_, step.tail(step.size() - nt));
  return out;
}

OverlapResult OrbitalOptimizedCost::final_overlap(const Variables& v0, const Variables& v1) const {
  OverlapResult out;
  const OrbitalTransfer transfer = transfer_and_generator(v0.c, v1.c, active_, block_tol_);
  out.block_residual = transfer.block_residual;
  if (!transfer.aligned || !transfer.real_log_ok) {
    out.ok = false;
    out.message = transfer.message;
    return out;
  }
  for (Eigen::Index q = 0; q < transfer.generator.cols(); ++q)
    for (Eigen::Index p = 0; p < q; ++p) out.rotation_l1 += std::abs(transfer.generator(p, q));
  const Statevector psi1 = apply_orbital_rotation_to_state(prepare_ansatz(ansatz_, v1.theta), transfer.generator, active_);
  out.omega = prepare_ansatz(ansatz_, v0.theta).inner(psi1).real();
  return out;
}

AnsatzChoice AnsatzChoice::parse(const std::string& text) {
  AnsatzChoice c;
  if (text == "direct") return c;
  if (text == "uccd") {
    c.kind = Kind::Uccd;
    return c;
  }
  if (text.rfind("npf:", 0) == 0) {
    c.kind = Kind::Npf;
    try {
      std::size_t used = 0;
      c.layers = std::stoi(text.substr(4), &used);
      if (used != text.size() - 4) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad ansatz '" + text + "': expected npf:<layers>");
    }
    if (c.layers < 1) throw std::invalid_argument("npf needs at least one layer");
    return c;
  }
  throw std::invalid_argument("unknown ansatz '" + text + "' (expected direct, uccd or npf:<layers>)");
}

std::string AnsatzChoice::to_string() const {
  switch (kind) {
    case Kind::Direct: return "direct";
    case Kind::Uccd: return "uccd";
    case Kind::Npf: return "npf:" + std::to_string(layers);
  }
  return "direct";
}

std::unique_ptr<CostModel> make_cost_model(const LoopSpec& loop, const AnsatzChoice& choice, double block_tol) {
  if (loop.kind != LoopKind::BundleList) {
    if (choice.kind != AnsatzChoice::Kind::Direct)
      throw std::invalid_argument("analytic loops take the direct ansatz only");
    return std::make_unique<FixedBasisCost>(loop, build_direct_ansatz(loop.n_qubits()));
  }
  if (!loop.active) throw std::invalid_argument("bundle loop '" + loop.name + "' has no active space");
  if (choice.kind == AnsatzChoice::Kind::Direct)
    throw std::invalid_argument("the direct ansatz does not conserve particle number; use uccd or npf:<layers>");
  const ActiveSpaceSpec& active = *loop.active;
  const bool uccd = choice.kind == AnsatzChoice::Kind::Uccd;
  AnsatzCircuit ansatz = uccd ? build_uccd_ansatz(active) : build_npf_ansatz(active, choice.layers);
  return std::make_unique<OrbitalOptimizedCost>(loop, std::move(ansatz), KappaIndex(active, uccd),
                                                initial_orbitals(loop), block_tol);
}

}  // namespace berry
