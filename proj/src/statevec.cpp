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

#include "berry/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "berry/fermion.hpp"

namespace berry {

namespace {

void check_qubits(int n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw StructuralError("qubit count out of range: " + std::to_string(n_qubits));
}

Eigen::Index dim_of(int n_qubits) { return Eigen::Index{1} << n_qubits; }

// Union-find over basis indices touched by a generator.
class Blocks {
 public:
  Basis find(Basis x) {
    auto it = parent_.find(x);
    if (it == parent_.end()) {
      parent_.emplace(x, x);
      return x;
    }
    if (it->second == x) return x;
    const Basis root = find(it->second);
    parent_[x] = root;
    return root;
  }
  void unite(Basis a, Basis b) {
    const Basis ra = find(a), rb = find(b);
    if (ra != rb) parent_[ra] = rb;
  }
  std::unordered_map<Basis, std::vector<Basis>> groups() {
    std::unordered_map<Basis, std::vector<Basis>> out;
    std::vector<Basis> keys;
    keys.reserve(parent_.size());
    for (const auto& kv : parent_) keys.push_back(kv.first);
    for (Basis k : keys) out[find(k)].push_back(k);
    return out;
  }

 private:
  std::unordered_map<Basis, Basis> parent_;
};

// Columns: annihilation images a_i psi for every spin orbital i.
Eigen::MatrixXcd single_annihilations(const Eigen::VectorXcd& psi, int n_modes) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(psi.size(), n_modes);
  for (Eigen::Index x = 0; x < psi.size(); ++x) {
    if (psi(x) == Complex{}) continue;
    for (int i = 0; i < n_modes; ++i) {
      const Ladder op{i, false};
      if (auto img = apply_ladders(std::span<const Ladder>(&op, 1), static_cast<Basis>(x))) {
        u(static_cast<Eigen::Index>(img->index), i) += img->sign * psi(x);
      }
    }
  }
  return u;
}

// Column i * n_modes + j holds a_j a_i psi.
Eigen::MatrixXcd pair_annihilations(const Eigen::VectorXcd& psi, int n_modes) {
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(psi.size(), n_modes * n_modes);
  for (Eigen::Index x = 0; x < psi.size(); ++x) {
    if (psi(x) == Complex{}) continue;
    for (int i = 0; i < n_modes; ++i) {
      for (int j = 0; j < n_modes; ++j) {
        if (i == j) continue;
        const Ladder ops[2] = {{j, false}, {i, false}};
        if (auto img = apply_ladders(ops, static_cast<Basis>(x))) {
          v(static_cast<Eigen::Index>(img->index), i * n_modes + j) += img->sign * psi(x);
        }
      }
    }
  }
  return v;
}

RDMPair contract_rdms(const Eigen::MatrixXcd& one_gram, const Eigen::MatrixXcd& two_gram, int n) {
  const int n_modes = 2 * n;
  RDMPair out{Eigen::MatrixXd::Zero(n, n), Tensor4(n)};
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int sigma = 0; sigma < 2; ++sigma)
        out.gamma(p, q) += one_gram(spin_orbital(p, sigma), spin_orbital(q, sigma)).real();

  auto col = [n_modes](int i, int j) { return i * n_modes + j; };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double acc = 0.0;
          for (int sigma = 0; sigma < 2; ++sigma)
            for (int tau = 0; tau < 2; ++tau)
              acc += two_gram(col(spin_orbital(p, sigma), spin_orbital(r, tau)),
                              col(spin_orbital(q, sigma), spin_orbital(s, tau)))
                         .real();
          out.Gamma(p, q, r, s) = acc;
        }
  return out;
}

// Orbitals touched by a generator built from spatial orbitals.
struct Block {
  int p;
  int q;
};

}  // namespace

// ---------------------------------------------------------------- Statevector

Statevector::Statevector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubits(n_qubits);
  amplitudes_ = Eigen::VectorXcd::Zero(dim_of(n_qubits));
  amplitudes_(0) = 1.0;
}

Statevector::Statevector(int n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubits(n_qubits);
  if (amplitudes_.size() != dim_of(n_qubits)) throw StructuralError("Statevector: amplitude length is not 2^n");
}

Statevector Statevector::basis_state(int n_qubits, Basis index) {
  Statevector s(n_qubits);
  if (index >= static_cast<Basis>(s.dim())) throw StructuralError("basis index out of range");
  s.amplitudes_(0) = 0.0;
  s.amplitudes_(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

Statevector Statevector::from_occupations(std::string_view bits) {
  Basis index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= Basis{1} << q;
    } else if (bits[q] != '0') {
      throw StructuralError("occupation string must contain only 0 and 1");
    }
  }
  return basis_state(static_cast<int>(bits.size()), index);
}

double Statevector::max_imag() const {
  return amplitudes_.size() ? amplitudes_.imag().cwiseAbs().maxCoeff() : 0.0;
}

Complex Statevector::inner(const Statevector& ket) const {
  if (ket.dim() != dim()) throw StructuralError("inner: dimension mismatch");
  return amplitudes_.dot(ket.amplitudes_);
}

// -------------------------------------------------------------- RealGenerator

RealGenerator::RealGenerator(int n_qubits, std::vector<GeneratorComponent> components, std::string label)
    : n_qubits_(n_qubits), components_(std::move(components)), label_(std::move(label)) {
  check_qubits(n_qubits);
  const Basis dim = static_cast<Basis>(dim_of(n_qubits));
  for (const auto& c : components_)
    for (const auto& pl : c.planes)
      if (pl.from >= dim || pl.to >= dim || pl.from == pl.to)
        throw StructuralError("RealGenerator: invalid rotation plane in " + label_);
}

RealGenerator RealGenerator::excitation(int n_qubits, const std::vector<int>& create,
                                        const std::vector<int>& annihilate, std::string label) {
  std::set<int> modes(create.begin(), create.end());
  for (int a : annihilate)
    if (!modes.insert(a).second) throw StructuralError("excitation: creation and annihilation modes overlap");
  if (modes.size() != create.size() + annihilate.size()) throw StructuralError("excitation: repeated mode");
  for (int m : modes)
    if (m < 0 || m >= n_qubits) throw StructuralError("excitation: mode out of range");

  std::vector<Ladder> ops;
  for (int c : create) ops.push_back({c, true});
  for (auto it = annihilate.rbegin(); it != annihilate.rend(); ++it) ops.push_back({*it, false});

  GeneratorComponent comp;
  for (Basis x = 0; x < static_cast<Basis>(dim_of(n_qubits)); ++x) {
    if (auto img = apply_ladders(ops, x)) comp.planes.push_back({x, img->index, img->sign});
  }
  return RealGenerator(n_qubits, {std::move(comp)}, std::move(label));
}

RealGenerator RealGenerator::plane(int n_qubits, Basis from, Basis to, std::string label) {
  return RealGenerator(n_qubits, {GeneratorComponent{1.0, {{from, to, 1.0}}}}, std::move(label));
}

RealGenerator RealGenerator::sum(const std::vector<RealGenerator>& parts, std::string label) {
  if (parts.empty()) throw StructuralError("RealGenerator::sum: no parts");
  std::vector<GeneratorComponent> comps;
  for (const auto& g : parts) {
    if (g.n_qubits() != parts.front().n_qubits()) throw StructuralError("RealGenerator::sum: qubit mismatch");
    comps.insert(comps.end(), g.components().begin(), g.components().end());
  }
  return RealGenerator(parts.front().n_qubits(), std::move(comps), std::move(label));
}

RealGenerator RealGenerator::normalized() const {
  const double norm = spectral_norm();
  if (norm == 0.0) throw StructuralError("cannot normalize zero generator " + label_);
  auto comps = components_;
  for (auto& c : comps) c.weight /= norm;
  return RealGenerator(n_qubits_, std::move(comps), label_);
}

double RealGenerator::spectral_norm() const {
  Blocks blocks;
  for (const auto& c : components_)
    for (const auto& pl : c.planes) blocks.unite(pl.from, pl.to);

  double best = 0.0;
  for (auto& [root, members] : blocks.groups()) {
    std::sort(members.begin(), members.end());
    const auto n = static_cast<Eigen::Index>(members.size());
    std::unordered_map<Basis, Eigen::Index> pos;
    for (Eigen::Index i = 0; i < n; ++i) pos.emplace(members[static_cast<std::size_t>(i)], i);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& c : components_) {
      for (const auto& pl : c.planes) {
        auto it = pos.find(pl.from);
        if (it == pos.end()) continue;
        const Eigen::Index i = it->second, j = pos.at(pl.to);
        a(j, i) += c.weight * pl.sign;
        a(i, j) -= c.weight * pl.sign;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.transpose() * a, Eigen::EigenvaluesOnly);
    best = std::max(best, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
  }
  return best;
}

Eigen::VectorXcd RealGenerator::apply(const Eigen::VectorXcd& in) const {
  if (in.size() != dim_of(n_qubits_)) throw StructuralError("RealGenerator::apply: dimension mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (const auto& c : components_) {
    for (const auto& pl : c.planes) {
      const auto i = static_cast<Eigen::Index>(pl.from), j = static_cast<Eigen::Index>(pl.to);
      const double w = c.weight * pl.sign;
      out(j) += w * in(i);
      out(i) -= w * in(j);
    }
  }
  return out;
}

void RealGenerator::rotate(Eigen::VectorXcd& v, double theta) const {
  if (v.size() != dim_of(n_qubits_)) throw StructuralError("RealGenerator::rotate: dimension mismatch");
  for (const auto& c : components_) {
    const double angle = theta * c.weight;
    const double cs = std::cos(angle), sn = std::sin(angle);
    for (const auto& pl : c.planes) {
      const auto i = static_cast<Eigen::Index>(pl.from), j = static_cast<Eigen::Index>(pl.to);
      const Complex a = v(i), b = v(j);
      v(i) = cs * a - pl.sign * sn * b;
      v(j) = cs * b + pl.sign * sn * a;
    }
  }
}

Eigen::MatrixXd RealGenerator::dense() const {
  const Eigen::Index d = dim_of(n_qubits_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (const auto& c : components_) {
    for (const auto& pl : c.planes) {
      const auto i = static_cast<Eigen::Index>(pl.from), j = static_cast<Eigen::Index>(pl.to);
      a(j, i) += c.weight * pl.sign;
      a(i, j) -= c.weight * pl.sign;
    }
  }
  return a;
}

// ------------------------------------------------------------------ ansaetze

Statevector hartree_fock_state(const ActiveSpaceSpec& active) {
  active.validate();
  Basis index = 0;
  for (int m = 0; m < active.n_active_electrons; ++m) index |= Basis{1} << m;
  return Statevector::basis_state(active.n_qubits(), index);
}

Statevector apply_real_rotation(Statevector state, const RealGenerator& gen, double theta) {
  if (gen.n_qubits() != state.n_qubits()) throw StructuralError("apply_real_rotation: qubit count mismatch");
  if (!std::isfinite(theta)) throw StructuralError("apply_real_rotation: non-finite angle");
  gen.rotate(state.amplitudes(), theta);
  return state;
}

Statevector prepare_ansatz(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != ansatz.n_params())
    throw StructuralError("prepare_ansatz: expected " + std::to_string(ansatz.n_params()) + " angles, got " +
                          std::to_string(theta.size()));
  Statevector state = ansatz.initial_state;
  for (std::size_t j = 0; j < ansatz.n_params(); ++j)
    ansatz.generators[j].rotate(state.amplitudes(), theta(static_cast<Eigen::Index>(j)));
  return state;
}

RealGenerator orbital_rotation_generator(int n_qubits, int p, int q) {
  std::vector<RealGenerator> parts;
  for (int sigma = 0; sigma < 2; ++sigma)
    parts.push_back(RealGenerator::excitation(n_qubits, {spin_orbital(p, sigma)}, {spin_orbital(q, sigma)}, ""));
  return RealGenerator::sum(parts, "OR(" + std::to_string(q) + "->" + std::to_string(p) + ")").normalized();
}

RealGenerator pair_double_generator(int n_qubits, int p, int q) {
  return RealGenerator::excitation(n_qubits, {spin_orbital(p, 0), spin_orbital(p, 1)},
                                   {spin_orbital(q, 0), spin_orbital(q, 1)},
                                   "PX(" + std::to_string(q) + "->" + std::to_string(p) + ")")
      .normalized();
}

AnsatzCircuit build_uccd_ansatz(const ActiveSpaceSpec& active) {
  active.validate();
  if (active.n_active_electrons % 2 != 0)
    throw std::invalid_argument("UCCD ansatz requires an even active electron count (spin-restricted)");
  if (active.n_active < 2) throw std::invalid_argument("UCCD ansatz requires at least two active orbitals");
  const int n_occ = active.n_active_electrons / 2;
  AnsatzCircuit ansatz;
  ansatz.initial_state = hartree_fock_state(active);
  for (int i = 0; i < n_occ; ++i)
    for (int a = n_occ; a < active.n_active; ++a)
      ansatz.generators.push_back(pair_double_generator(active.n_qubits(), a, i));
  return ansatz;
}

AnsatzCircuit build_npf_ansatz(const ActiveSpaceSpec& active, int layers) {
  active.validate();
  if (active.n_active < 2) throw std::invalid_argument("NPF ansatz requires at least two active orbitals");
  if (layers < 0) throw std::invalid_argument("NPF ansatz: negative layer count");
  const int nq = active.n_qubits();
  AnsatzCircuit ansatz;
  ansatz.initial_state = hartree_fock_state(active);

  std::vector<Block> kept;
  auto touches_kept = [&kept](const Block& b) {
    return std::any_of(kept.begin(), kept.end(),
                       [&b](const Block& k) { return k.p == b.p || k.p == b.q || k.q == b.p || k.q == b.q; });
  };
  const Eigen::VectorXcd& ref = ansatz.initial_state.amplitudes();

  for (int layer = 0; layer < layers; ++layer) {
    for (int offset = 0; offset < 2; ++offset) {
      for (int p = offset; p + 1 < active.n_active; p += 2) {
        const Block block{p, p + 1};
        RealGenerator rot = orbital_rotation_generator(nq, p + 1, p);
        RealGenerator pair = pair_double_generator(nq, p + 1, p);
        // A block commuting with everything before it and annihilating the
        // reference contributes nothing.
        const bool trivial = !touches_kept(block) && rot.apply(ref).norm() < 1e-14 && pair.apply(ref).norm() < 1e-14;
        if (trivial) continue;
        kept.push_back(block);
        ansatz.generators.push_back(std::move(rot));
        ansatz.generators.push_back(std::move(pair));
      }
    }
  }
  return ansatz;
}

AnsatzCircuit build_direct_ansatz(int n_qubits) {
  check_qubits(n_qubits);
  AnsatzCircuit ansatz;
  ansatz.initial_state = Statevector(n_qubits);
  for (Basis k = 1; k < static_cast<Basis>(dim_of(n_qubits)); ++k)
    ansatz.generators.push_back(RealGenerator::plane(n_qubits, 0, k, "R(0," + std::to_string(k) + ")"));
  return ansatz;
}

// ---------------------------------------------------------------------- RDMs

RDMPair compute_rdms(const Statevector& state, int n_active) {
  if (state.n_qubits() != 2 * n_active) throw StructuralError("compute_rdms: state must live on 2 * n_active qubits");
  const int n_modes = 2 * n_active;
  const Eigen::MatrixXcd u = single_annihilations(state.amplitudes(), n_modes);
  const Eigen::MatrixXcd v = pair_annihilations(state.amplitudes(), n_modes);
  return contract_rdms(u.adjoint() * u, v.adjoint() * v, n_active);
}

std::vector<Eigen::VectorXcd> state_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta) {
  const std::size_t np = ansatz.n_params();
  if (static_cast<std::size_t>(theta.size()) != np) throw StructuralError("state_derivatives: angle count mismatch");
  std::vector<Eigen::VectorXcd> out;
  out.reserve(np);
  Eigen::VectorXcd partial = ansatz.initial_state.amplitudes();
  for (std::size_t j = 0; j < np; ++j) {
    ansatz.generators[j].rotate(partial, theta(static_cast<Eigen::Index>(j)));
    Eigen::VectorXcd d = ansatz.generators[j].apply(partial);
    for (std::size_t k = j + 1; k < np; ++k) ansatz.generators[k].rotate(d, theta(static_cast<Eigen::Index>(k)));
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<RDMPair> rdm_theta_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta, int n_active) {
  if (ansatz.n_qubits() != 2 * n_active) throw StructuralError("rdm_theta_derivatives: qubit count mismatch");
  const int n_modes = 2 * n_active;
  const Statevector psi = prepare_ansatz(ansatz, theta);
  const Eigen::MatrixXcd u = single_annihilations(psi.amplitudes(), n_modes);
  const Eigen::MatrixXcd v = pair_annihilations(psi.amplitudes(), n_modes);

  std::vector<RDMPair> out;
  for (const auto& dpsi : state_derivatives(ansatz, theta)) {
    const Eigen::MatrixXcd du = single_annihilations(dpsi, n_modes);
    const Eigen::MatrixXcd dv = pair_annihilations(dpsi, n_modes);
    const Eigen::MatrixXcd one = du.adjoint() * u + u.adjoint() * du;
    const Eigen::MatrixXcd two = dv.adjoint() * v + v.adjoint() * dv;
    out.push_back(contract_rdms(one, two, n_active));
  }
  return out;
}

// ------------------------------------------------------------ energy helpers

Eigen::VectorXcd apply_real_operator(const Eigen::SparseMatrix<double>& op, const Eigen::VectorXcd& v) {
  if (op.cols() != v.size()) throw StructuralError("apply_real_operator: dimension mismatch");
  const Eigen::VectorXd re = op * v.real();
  const Eigen::VectorXd im = op * v.imag();
  Eigen::VectorXcd out(v.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

double expectation(const Statevector& state, const Eigen::SparseMatrix<double>& op) {
  return state.amplitudes().dot(apply_real_operator(op, state.amplitudes())).real();
}

EnergyDerivatives ansatz_energy_derivatives(const AnsatzCircuit& ansatz, const Eigen::VectorXd& theta,
                                            const Eigen::SparseMatrix<double>& hamiltonian, bool with_hessian) {
  const auto np = static_cast<Eigen::Index>(ansatz.n_params());
  const Statevector psi = prepare_ansatz(ansatz, theta);
  const Eigen::VectorXcd hpsi = apply_real_operator(hamiltonian, psi.amplitudes());
  const auto dpsi = state_derivatives(ansatz, theta);

  EnergyDerivatives out;
  out.energy = psi.amplitudes().dot(hpsi).real();
  out.grad.resize(np);
  for (Eigen::Index j = 0; j < np; ++j) out.grad(j) = 2.0 * hpsi.dot(dpsi[static_cast<std::size_t>(j)]).real();
  if (!with_hessian) return out;

  // <d_j psi| H |d_k psi>
  std::vector<Eigen::VectorXcd> hd;
  hd.reserve(dpsi.size());
  for (const auto& d : dpsi) hd.push_back(apply_real_operator(hamiltonian, d));
  out.hess = Eigen::MatrixXd::Zero(np, np);
  for (Eigen::Index j = 0; j < np; ++j)
    for (Eigen::Index k = j; k < np; ++k)
      out.hess(j, k) = 2.0 * dpsi[static_cast<std::size_t>(j)].dot(hd[static_cast<std::size_t>(k)]).real();

  // <H psi| d_j d_k psi>, j <= k in circuit order. lambda_k = U_{>k}^T H psi.
  std::vector<Eigen::VectorXcd> lambda(static_cast<std::size_t>(np));
  {
    Eigen::VectorXcd back = hpsi;
    for (Eigen::Index k = np - 1; k >= 0; --k) {
      lambda[static_cast<std::size_t>(k)] = back;
      ansatz.generators[static_cast<std::size_t>(k)].rotate(back, -theta(k));
    }
  }
  Eigen::VectorXcd partial = ansatz.initial_state.amplitudes();
  for (Eigen::Index j = 0; j < np; ++j) {
    const auto& gj = ansatz.generators[static_cast<std::size_t>(j)];
    gj.rotate(partial, theta(j));
    Eigen::VectorXcd chi = gj.apply(partial);
    for (Eigen::Index k = j; k < np; ++k) {
      const auto& gk = ansatz.generators[static_cast<std::size_t>(k)];
      if (k > j) gk.rotate(chi, theta(k));
      out.hess(j, k) += 2.0 * lambda[static_cast<std::size_t>(k)].dot(gk.apply(chi)).real();
    }
  }
  for (Eigen::Index j = 0; j < np; ++j)
    for (Eigen::Index k = 0; k < j; ++k) out.hess(j, k) = out.hess(k, j);
  return out;
}

}  // namespace berry
