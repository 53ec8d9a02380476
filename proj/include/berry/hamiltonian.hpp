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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "berry/statevec.hpp"
#include "berry/types.hpp"

namespace berry {

/// Two-state model near a conical intersection:
/// H(R) = hx (R - Rx)_x sigma_x + hz (R - Rx)_z sigma_z, traversed on the
/// circle R(t) = center + radius (cos 2 pi t, sin 2 pi t).
struct EffectiveCIParams {
  double hx = 1.0;
  double hz = 1.0;
  Eigen::Vector2d r_cross = Eigen::Vector2d::Zero();
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;

  void validate() const;
  Eigen::Vector2d point(double t) const;
};

Eigen::Matrix2d effective_ci_hamiltonian(const EffectiveCIParams& p, const Eigen::Vector2d& r);

/// Electronic integrals at one loop geometry, in the AO basis.
struct IntegralBundle {
  int n_orb = 0;
  double e_nuc_core = 0.0;
  Eigen::MatrixXd h;
  Tensor4 g;
  std::optional<Eigen::MatrixXd> S;
  std::map<std::string, double> geometry;
  double t = 0.0;

  /// Throws BundleError naming the failed check.
  void validate() const;
  Eigen::MatrixXd overlap() const;
};

class BundleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts plain JSON or gzip-compressed JSON (detected by magic bytes).
IntegralBundle load_bundle(const std::filesystem::path& path);
/// Writes gzip when the path ends in ".gz".
void save_bundle(const IntegralBundle& bundle, const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);

/// Integrals over an orthonormal orbital set.
struct MOIntegrals {
  double e_nuc = 0.0;
  Eigen::MatrixXd h;
  Tensor4 g;

  int n_orb() const noexcept { return static_cast<int>(h.rows()); }
};

/// Transforms AO integrals to the orbitals phi = chi S^{-1/2} C, where C
/// holds (a subset of) orbital columns expressed over the Loewdin basis.
MOIntegrals transform_integrals(const IntegralBundle& bundle, const Eigen::MatrixXd& c);
/// Same for explicit AO-basis coefficients.
MOIntegrals transform_ao_integrals(const Eigen::MatrixXd& h, const Tensor4& g, double e_nuc, const Eigen::MatrixXd& c_ao);

struct ActiveHamiltonian {
  ActiveSpaceSpec active;
  double e_const = 0.0;
  Eigen::MatrixXd h_eff;
  Tensor4 g_act;
  Eigen::SparseMatrix<double> op;  // without e_const

  int n_qubits() const noexcept { return active.n_qubits(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(op); }
};

/// Folds the core orbitals of `mo` into the active space; `mo` must span core
/// and active orbitals (extra virtual columns are ignored).
ActiveHamiltonian fold_active_hamiltonian(const MOIntegrals& mo, const ActiveSpaceSpec& active, bool build_operator = true);
/// Full chain: AO -> OAO -> MO by C (orthogonal over the OAO basis) -> active.
ActiveHamiltonian build_active_hamiltonian(const IntegralBundle& bundle, const Eigen::MatrixXd& c,
                                           const ActiveSpaceSpec& active, bool build_operator = true);

double energy_from_rdms(const ActiveHamiltonian& ham, const RDMPair& rdms);
/// sum h_pq gamma_pq + 1/2 sum g_pqrs Gamma_pqrs (no constant).
double contract_rdms(const Eigen::MatrixXd& h, const Tensor4& g, const RDMPair& rdms);

enum class LoopKind { AnalyticQubit, EffectiveCI, BundleList };

std::string to_string(LoopKind kind);

/// Closed real-matrix loop H(t) = A0 + sum_k [A_k cos(2 pi k t) + B_k sin(2 pi k t)].
struct AnalyticLoop {
  int n_qubits = 1;
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> cos_terms;  // k = 1, 2, ...
  std::vector<Eigen::MatrixXd> sin_terms;

  Eigen::MatrixXd at(double t) const;
  void validate() const;
};

/// Thread-safe small cache of bundles keyed by grid index.
class BundleCache {
 public:
  explicit BundleCache(std::size_t capacity = 4) : capacity_(capacity) {}
  std::shared_ptr<const IntegralBundle> get(std::size_t index, const std::filesystem::path& path) const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::vector<std::pair<std::size_t, std::shared_ptr<const IntegralBundle>>> entries_;
};

struct LoopSpec {
  LoopKind kind = LoopKind::AnalyticQubit;
  std::string name;
  AnalyticLoop analytic;
  EffectiveCIParams effective_ci;

  // bundle-list: grid t_k = k / bundle_paths.size(), point k at bundle_paths[k].
  std::vector<std::filesystem::path> bundle_paths;
  std::optional<ActiveSpaceSpec> active;
  std::optional<Eigen::MatrixXd> c0;  // initial MOs over the Loewdin basis
  std::shared_ptr<BundleCache> cache = std::make_shared<BundleCache>();

  /// 0 for analytic kinds, which accept any t.
  std::size_t n_grid() const noexcept { return kind == LoopKind::BundleList ? bundle_paths.size() : 0; }
  /// Grid index of t (t = 1 maps to 0). Throws for off-grid t.
  std::size_t grid_index(double t) const;
  /// Throws unless an N-step discretization lands on the grid.
  void check_steps(int n_steps) const;
  int n_qubits() const;
};

/// Dense real symmetric Hamiltonian of an analytic loop at t.
Eigen::MatrixXd analytic_hamiltonian(const LoopSpec& loop, double t);
/// Bundle of a bundle-list loop at grid value t.
std::shared_ptr<const IntegralBundle> loop_bundle(const LoopSpec& loop, double t);

/// "qubit-ci", "qubit-trivial" and "effective-ci".
LoopSpec builtin_loop(const std::string& name);
/// Accepts "builtin:<name>" or a path to a loop JSON file.
LoopSpec load_loop(const std::string& source);
LoopSpec parse_loop_json(const std::string& text, const std::filesystem::path& base_dir);

}  // namespace berry
