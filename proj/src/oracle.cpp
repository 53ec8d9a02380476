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

#include "berry/oracle.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "berry/fermion.hpp"
#include "berry/scf.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace berry {

namespace {

using nlohmann::json;

std::vector<Basis> sector_basis(const ActiveSpaceSpec& active) {
  const int n_up = (active.n_active_electrons + 1) / 2;
  const int n_down = active.n_active_electrons / 2;
  std::vector<Basis> out;
  for (Basis x = 0; x < (Basis{1} << active.n_qubits()); ++x)
    if (spin_counts(x) == std::pair<int, int>{n_up, n_down}) out.push_back(x);
  return out;
}

Eigen::MatrixXd casci_sector_matrix(const IntegralBundle& bundle, const Eigen::MatrixXd& c, const ActiveSpaceSpec& active,
                                    double spin_penalty) {
  const ActiveHamiltonian ham = build_active_hamiltonian(bundle, c, active);
  const Eigen::MatrixXd full = ham.dense() + spin_penalty * Eigen::MatrixXd(spin_squared_operator(active.n_active));
  const std::vector<Basis> basis = sector_basis(active);
  const auto d = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd out(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      out(i, j) = full(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)]),
                       static_cast<Eigen::Index>(basis[static_cast<std::size_t>(j)]));
  out.diagonal().array() += ham.e_const;
  return out;
}

double spectral_gap(const Eigen::MatrixXd& h) {
  if (h.rows() < 2) throw std::invalid_argument("gap needs at least two states");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

std::vector<double> axis_values(const json& j, std::string& name, const char* fallback) {
  name = j.value("name", std::string(fallback));
  if (j.contains("values")) return j.at("values").get<std::vector<double>>();
  const double start = j.at("start").get<double>(), stop = j.at("stop").get<double>();
  const int n = j.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("gap grid: axis needs n >= 1");
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(n == 1 ? start : start + (stop - start) * k / (n - 1));
  return v;
}

}  // namespace

Eigen::MatrixXd oracle_hamiltonian(const LoopSpec& loop, double t, const Eigen::MatrixXd& c_fixed, double spin_penalty) {
  if (loop.kind != LoopKind::BundleList) return analytic_hamiltonian(loop, t);
  return casci_sector_matrix(*loop_bundle(loop, t), c_fixed, *loop.active, spin_penalty);
}

GaugeFixedPath exact_ground_path(const LoopSpec& loop, const OracleOptions& options) {
  const bool bundles = loop.kind == LoopKind::BundleList;
  const int n = bundles ? static_cast<int>(loop.n_grid()) : options.n_dense;
  if (n < 2) throw std::invalid_argument("oracle needs at least two loop points");
  const Eigen::MatrixXd c_fixed = bundles ? initial_orbitals(loop) : Eigen::MatrixXd();

  GaugeFixedPath path;
  for (int k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / n;
    const Eigen::MatrixXd h = oracle_hamiltonian(loop, t, c_fixed, options.spin_penalty);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (h.rows() < 2) throw std::invalid_argument("oracle needs at least two states");
    const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    if (gap < options.degeneracy_tol) {
      std::ostringstream msg;
      msg << "degeneracy on the loop at t = " << t << " (gap " << gap << " hartree)";
      throw OracleError(OracleError::Kind::Degeneracy, t, msg.str());
    }
    Eigen::VectorXd chi = es.eigenvectors().col(0);
    if (k > 0) {
      double ov = path.states.back().dot(chi);
      if (ov < 0.0) {
        chi = -chi;
        ov = -ov;
      }
      if (ov < options.min_step_overlap) {
        std::ostringstream msg;
        msg << "path under-resolved at t = " << t << " (consecutive overlap " << ov << "); increase the point count";
        throw OracleError(OracleError::Kind::UnderResolved, t, msg.str());
      }
      path.overlaps.push_back(ov);
    }
    path.t_grid.push_back(t);
    path.gaps.push_back(gap);
    path.states.push_back(std::move(chi));
  }
  path.closing_overlap = path.states.back().dot(path.states.front());
  return path;
}

std::string to_string(Phase phase) { return phase == Phase::Zero ? "zero" : "pi"; }

Phase discrete_berry_phase(const GaugeFixedPath& path, double min_closing_overlap) {
  if (path.states.empty()) throw std::invalid_argument("empty path");
  if (std::abs(path.closing_overlap) < min_closing_overlap) {
    std::ostringstream msg;
    msg << "closing overlap " << path.closing_overlap << " is too small to fix the sign";
    throw OracleError(OracleError::Kind::Inconclusive, 1.0, msg.str());
  }
  return path.closing_overlap > 0.0 ? Phase::Zero : Phase::Pi;
}

GapPoint GapSurface::minimum() const {
  if (points.empty()) throw std::invalid_argument("empty gap surface");
  GapPoint best = points.front();
  for (const GapPoint& p : points)
    if (p.gap < best.gap) best = p;
  return best;
}

std::string GapSurface::to_csv() const {
  std::ostringstream out;
  out.precision(12);
  out << "param1,param2,gap_hartree\n";
  for (const GapPoint& p : points) out << p.param1 << ',' << p.param2 << ',' << p.gap << '\n';
  return out.str();
}

GapSurface gap_scan(const std::string& grid_json, const std::filesystem::path& base_dir, const OracleOptions& options) {
  json j;
  try {
    j = json::parse(grid_json);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("gap grid: invalid JSON: ") + e.what());
  }
  GapSurface surface;
  try {
    const std::string family = j.at("family").get<std::string>();
    if (family == "bundle-grid") {
      const json& a = j.at("active_space");
      const ActiveSpaceSpec active{a.at("n_core").get<int>(), a.at("n_active").get<int>(), a.at("n_virtual").get<int>(),
                                   a.at("n_active_electrons").get<int>()};
      active.validate();
      std::optional<Eigen::MatrixXd> c0;
      if (j.contains("C0")) c0 = detail::matrix_from_json(j.at("C0"), "C0");
      surface.param1_name = j.value("param1_name", surface.param1_name);
      surface.param2_name = j.value("param2_name", surface.param2_name);
      for (const json& p : j.at("points")) {
        const IntegralBundle b = load_bundle(base_dir / p.at("path").get<std::string>());
        const Eigen::MatrixXd c = c0 ? *c0 : restricted_hartree_fock(b, active.n_electrons()).c;
        surface.points.push_back({p.at("param1").get<double>(), p.at("param2").get<double>(),
                                  spectral_gap(casci_sector_matrix(b, c, active, options.spin_penalty))});
      }
      return surface;
    }
    const std::vector<double> v1 = axis_values(j.at("param1"), surface.param1_name, "param1");
    const std::vector<double> v2 = axis_values(j.at("param2"), surface.param2_name, "param2");
    std::function<Eigen::MatrixXd(double, double)> h;
    if (family == "effective-ci") {
      EffectiveCIParams p;
      p.hx = j.at("hx").get<double>();
      p.hz = j.at("hz").get<double>();
      p.r_cross = detail::vec2(j.at("r_cross"), "r_cross");
      h = [p](double x, double z) { return Eigen::MatrixXd(effective_ci_hamiltonian(p, {x, z})); };
    } else if (family == "linear-matrix") {
      const Eigen::MatrixXd a0 = detail::matrix_from_json(j.at("constant"), "constant");
      const Eigen::MatrixXd a1 = detail::matrix_from_json(j.at("param1_matrix"), "param1_matrix");
      const Eigen::MatrixXd a2 = detail::matrix_from_json(j.at("param2_matrix"), "param2_matrix");
      if (a0.rows() != a0.cols() || a1.rows() != a0.rows() || a1.cols() != a0.cols() || a2.rows() != a0.rows() ||
          a2.cols() != a0.cols())
        throw std::invalid_argument("gap grid: matrices must be square and of equal size");
      h = [a0, a1, a2](double x, double y) { return Eigen::MatrixXd(a0 + x * a1 + y * a2); };
    } else {
      throw std::invalid_argument("gap grid: unknown family '" + family + "'");
    }
    for (double x : v1)
      for (double y : v2) surface.points.push_back({x, y, spectral_gap(h(x, y))});
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("gap grid: ") + e.what());
  }
  return surface;
}

GapSurface gap_scan_file(const std::filesystem::path& path, const OracleOptions& options) {
  return gap_scan(read_text_file(path), path.parent_path(), options);
}

}  // namespace berry
