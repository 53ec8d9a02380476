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

#include "berry/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "berry/fermion.hpp"
#include "berry/orbital.hpp"
#include "json.hpp"
#include "json_util.hpp"

namespace berry {

namespace {

using detail::matrix_from_json;
using detail::vec2;

using nlohmann::json;
using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Transforms the leading index of a (d0, d1, d2, d3) tensor by c and rotates
// it to the back: the result has shape (d1, d2, d3, m).
std::vector<double> transform_and_rotate(const std::vector<double>& in, std::array<Eigen::Index, 4>& dims,
                                         const Eigen::MatrixXd& c) {
  const Eigen::Index rest = dims[1] * dims[2] * dims[3];
  Eigen::Map<const RowMajor> x(in.data(), dims[0], rest);
  const RowMajor y = c.transpose() * x;  // m x rest
  std::vector<double> out(static_cast<std::size_t>(rest * c.cols()));
  Eigen::Map<RowMajor>(out.data(), rest, c.cols()) = y.transpose();
  dims = {dims[1], dims[2], dims[3], c.cols()};
  return out;
}

double bundle_distance(const IntegralBundle& a, const IntegralBundle& b) {
  if (a.n_orb != b.n_orb) return INFINITY;
  double d = std::max(std::abs(a.e_nuc_core - b.e_nuc_core), (a.h - b.h).cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < a.g.size(); ++i) d = std::max(d, std::abs(a.g.data()[i] - b.g.data()[i]));
  d = std::max(d, (a.overlap() - b.overlap()).cwiseAbs().maxCoeff());
  return d;
}

}  // namespace

// ------------------------------------------------------------- effective CI

void EffectiveCIParams::validate() const {
  if (hx == 0.0 || hz == 0.0) throw std::invalid_argument("effective-ci: hx and hz must be nonzero");
  if (!(radius > 0.0)) throw std::invalid_argument("effective-ci: radius must be positive");
}

Eigen::Vector2d EffectiveCIParams::point(double t) const {
  return center + radius * Eigen::Vector2d(std::cos(kTwoPi * t), std::sin(kTwoPi * t));
}

Eigen::Matrix2d effective_ci_hamiltonian(const EffectiveCIParams& p, const Eigen::Vector2d& r) {
  const Eigen::Vector2d d = r - p.r_cross;
  Eigen::Matrix2d m;
  m << p.hz * d.y(), p.hx * d.x(), p.hx * d.x(), -p.hz * d.y();
  return m;
}

// ---------------------------------------------------------- MO transforms

MOIntegrals transform_ao_integrals(const Eigen::MatrixXd& h, const Tensor4& g, double e_nuc,
                                   const Eigen::MatrixXd& c_ao) {
  const Eigen::Index n = h.rows();
  if (c_ao.rows() != n || g.dim() != n) throw StructuralError("transform_integrals: shape mismatch");
  MOIntegrals mo;
  mo.e_nuc = e_nuc;
  mo.h = c_ao.transpose() * h * c_ao;
  std::array<Eigen::Index, 4> dims{n, n, n, n};
  std::vector<double> t = g.data();
  for (int round = 0; round < 4; ++round) t = transform_and_rotate(t, dims, c_ao);
  mo.g = Tensor4(static_cast<int>(c_ao.cols()), std::move(t));
  return mo;
}

MOIntegrals transform_integrals(const IntegralBundle& bundle, const Eigen::MatrixXd& c) {
  if (c.rows() != bundle.n_orb) throw StructuralError("transform_integrals: C has wrong row count");
  const Eigen::MatrixXd c_ao = bundle.S ? Eigen::MatrixXd(lowdin_inverse_sqrt(*bundle.S) * c) : c;
  return transform_ao_integrals(bundle.h, bundle.g, bundle.e_nuc_core, c_ao);
}

// ------------------------------------------------------- active Hamiltonian

ActiveHamiltonian fold_active_hamiltonian(const MOIntegrals& mo, const ActiveSpaceSpec& active, bool build_operator) {
  active.validate();
  const int nc = active.n_core, na = active.n_active;
  if (mo.n_orb() < nc + na) throw StructuralError("fold_active_hamiltonian: integrals do not cover the active space");
  ActiveHamiltonian out;
  out.active = active;
  out.e_const = mo.e_nuc;
  for (int i = 0; i < nc; ++i) {
    out.e_const += 2.0 * mo.h(i, i);
    for (int j = 0; j < nc; ++j) out.e_const += 2.0 * mo.g(i, i, j, j) - mo.g(i, j, j, i);
  }
  out.h_eff.resize(na, na);
  for (int p = 0; p < na; ++p)
    for (int q = 0; q < na; ++q) {
      double v = mo.h(nc + p, nc + q);
      for (int i = 0; i < nc; ++i) v += 2.0 * mo.g(nc + p, nc + q, i, i) - mo.g(nc + p, i, i, nc + q);
      out.h_eff(p, q) = v;
    }
  out.g_act = Tensor4(na);
  for (int p = 0; p < na; ++p)
    for (int q = 0; q < na; ++q)
      for (int r = 0; r < na; ++r)
        for (int s = 0; s < na; ++s) out.g_act(p, q, r, s) = mo.g(nc + p, nc + q, nc + r, nc + s);
  if (build_operator) out.op = fermion_hamiltonian_operator(out.h_eff, out.g_act);
  return out;
}

ActiveHamiltonian build_active_hamiltonian(const IntegralBundle& bundle, const Eigen::MatrixXd& c,
                                           const ActiveSpaceSpec& active, bool build_operator) {
  active.validate_for(bundle.n_orb);
  if (c.rows() != bundle.n_orb || c.cols() != bundle.n_orb)
    throw StructuralError("build_active_hamiltonian: C must be n_orb x n_orb");
  if (orthogonality_defect(c) > 1e-8) throw std::invalid_argument("build_active_hamiltonian: C is not orthogonal");
  const MOIntegrals mo = transform_integrals(bundle, c.leftCols(active.n_core + active.n_active));
  return fold_active_hamiltonian(mo, active, build_operator);
}

double contract_rdms(const Eigen::MatrixXd& h, const Tensor4& g, const RDMPair& rdms) {
  if (rdms.dim() != h.rows() || rdms.Gamma.dim() != g.dim()) throw StructuralError("contract_rdms: shape mismatch");
  double e = (h.array() * rdms.gamma.array()).sum();
  double two = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) two += g.data()[i] * rdms.Gamma.data()[i];
  return e + 0.5 * two;
}

double energy_from_rdms(const ActiveHamiltonian& ham, const RDMPair& rdms) {
  return ham.e_const + contract_rdms(ham.h_eff, ham.g_act, rdms);
}

// ------------------------------------------------------------------- loops

std::string to_string(LoopKind kind) {
  switch (kind) {
    case LoopKind::AnalyticQubit: return "analytic-qubit";
    case LoopKind::EffectiveCI: return "effective-ci";
    case LoopKind::BundleList: return "bundle-list";
  }
  return "unknown";
}

Eigen::MatrixXd AnalyticLoop::at(double t) const {
  Eigen::MatrixXd m = constant;
  for (std::size_t k = 0; k < cos_terms.size(); ++k) m += std::cos(kTwoPi * double(k + 1) * t) * cos_terms[k];
  for (std::size_t k = 0; k < sin_terms.size(); ++k) m += std::sin(kTwoPi * double(k + 1) * t) * sin_terms[k];
  return m;
}

void AnalyticLoop::validate() const {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  auto check = [d](const Eigen::MatrixXd& m) {
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("analytic loop: matrix must be 2^n x 2^n");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("analytic loop: matrices must be real symmetric");
  };
  if (n_qubits < 1 || n_qubits > 12) throw std::invalid_argument("analytic loop: n_qubits out of range");
  check(constant);
  for (const auto& m : cos_terms) check(m);
  for (const auto& m : sin_terms) check(m);
}

std::shared_ptr<const IntegralBundle> BundleCache::get(std::size_t index, const std::filesystem::path& path) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [k, b] : entries_)
      if (k == index) return b;
  }
  auto loaded = std::make_shared<const IntegralBundle>(load_bundle(path));
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.emplace_back(index, loaded);
  if (entries_.size() > capacity_) entries_.erase(entries_.begin());
  return loaded;
}

std::size_t LoopSpec::grid_index(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("loop parameter t outside [0, 1]");
  const std::size_t n = n_grid();
  if (n == 0) return 0;
  const double scaled = t * static_cast<double>(n);
  const double k = std::round(scaled);
  if (std::abs(scaled - k) > 1e-9)
    throw std::invalid_argument("t = " + std::to_string(t) + " is off the loop grid (interpolation is unsupported)");
  return static_cast<std::size_t>(k) % n;
}

void LoopSpec::check_steps(int n_steps) const {
  if (n_steps < 2) throw std::invalid_argument("n_steps must be at least 2");
  const std::size_t n = n_grid();
  if (n != 0 && n % static_cast<std::size_t>(n_steps) != 0)
    throw std::invalid_argument("loop grid of " + std::to_string(n) + " points does not contain a " +
                                std::to_string(n_steps) + "-step discretization");
}

int LoopSpec::n_qubits() const {
  switch (kind) {
    case LoopKind::AnalyticQubit: return analytic.n_qubits;
    case LoopKind::EffectiveCI: return 1;
    case LoopKind::BundleList: return active ? active->n_qubits() : 0;
  }
  return 0;
}

Eigen::MatrixXd analytic_hamiltonian(const LoopSpec& loop, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("loop parameter t outside [0, 1]");
  switch (loop.kind) {
    case LoopKind::AnalyticQubit: return loop.analytic.at(t);
    case LoopKind::EffectiveCI: return effective_ci_hamiltonian(loop.effective_ci, loop.effective_ci.point(t));
    case LoopKind::BundleList: break;
  }
  throw std::invalid_argument("analytic_hamiltonian: loop '" + loop.name + "' is a bundle list");
}

std::shared_ptr<const IntegralBundle> loop_bundle(const LoopSpec& loop, double t) {
  if (loop.kind != LoopKind::BundleList) throw std::invalid_argument("loop_bundle: not a bundle-list loop");
  const std::size_t k = loop.grid_index(t);
  return loop.cache->get(k, loop.bundle_paths[k]);
}

LoopSpec builtin_loop(const std::string& name) {
  LoopSpec loop;
  loop.name = name;
  Eigen::Matrix2d z, x;
  z << 1, 0, 0, -1;
  x << 0, 1, 1, 0;
  if (name == "qubit-ci" || name == "qubit-trivial") {
    loop.kind = LoopKind::AnalyticQubit;
    loop.analytic.n_qubits = 1;
    loop.analytic.constant = name == "qubit-ci" ? Eigen::Matrix2d::Zero().eval() : (2.0 * z).eval();
    loop.analytic.cos_terms = {z};
    loop.analytic.sin_terms = {x};
    return loop;
  }
  if (name == "effective-ci") {
    loop.kind = LoopKind::EffectiveCI;
    loop.effective_ci.hx = 0.8;
    loop.effective_ci.hz = 1.3;
    loop.effective_ci.r_cross = {0.2, -0.1};
    loop.effective_ci.center = {0.0, 0.0};
    loop.effective_ci.radius = 0.5;
    return loop;
  }
  throw std::invalid_argument("unknown builtin loop '" + name + "' (qubit-ci, qubit-trivial, effective-ci)");
}

LoopSpec parse_loop_json(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("loop file: invalid JSON: ") + e.what());
  }
  LoopSpec loop;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    loop.name = j.value("name", kind);
    if (j.contains("active_space")) {
      const json& a = j.at("active_space");
      loop.active = ActiveSpaceSpec{a.at("n_core").get<int>(), a.at("n_active").get<int>(),
                                    a.at("n_virtual").get<int>(), a.at("n_active_electrons").get<int>()};
      loop.active->validate();
    }
    if (j.contains("C0")) loop.c0 = matrix_from_json(j.at("C0"), "C0");

    if (kind == "analytic-qubit") {
      loop.kind = LoopKind::AnalyticQubit;
      loop.analytic.n_qubits = j.at("n_qubits").get<int>();
      loop.analytic.constant = matrix_from_json(j.at("constant"), "constant");
      for (const auto& m : j.value("cos", json::array())) loop.analytic.cos_terms.push_back(matrix_from_json(m, "cos"));
      for (const auto& m : j.value("sin", json::array())) loop.analytic.sin_terms.push_back(matrix_from_json(m, "sin"));
      loop.analytic.validate();
    } else if (kind == "effective-ci") {
      loop.kind = LoopKind::EffectiveCI;
      auto& p = loop.effective_ci;
      p.hx = j.at("hx").get<double>();
      p.hz = j.at("hz").get<double>();
      p.r_cross = vec2(j.at("r_cross"), "r_cross");
      p.center = vec2(j.at("center"), "center");
      p.radius = j.at("radius").get<double>();
      p.validate();
    } else if (kind == "bundle-list") {
      loop.kind = LoopKind::BundleList;
      if (!loop.active) throw std::invalid_argument("loop file: bundle-list needs 'active_space'");
      std::vector<std::pair<double, std::filesystem::path>> points;
      for (const auto& p : j.at("points"))
        points.emplace_back(p.at("t").get<double>(), base_dir / p.at("path").get<std::string>());
      if (j.contains("n_points") && j.at("n_points").get<std::size_t>() != points.size())
        throw std::invalid_argument("loop file: n_points does not match the number of points");
      std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      std::optional<std::filesystem::path> closing;
      if (!points.empty() && std::abs(points.back().first - 1.0) < 1e-12) {
        closing = points.back().second;
        points.pop_back();
      }
      if (points.size() < 2) throw std::invalid_argument("loop file: need at least two distinct grid points");
      const double n = static_cast<double>(points.size());
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (std::abs(points[k].first - static_cast<double>(k) / n) > 1e-9)
          throw std::invalid_argument("loop file: points must lie on the uniform grid t = k/" +
                                      std::to_string(points.size()));
        loop.bundle_paths.push_back(points[k].second);
      }
      if (closing) {
        const IntegralBundle first = load_bundle(loop.bundle_paths.front());
        const IntegralBundle last = load_bundle(*closing);
        if (bundle_distance(first, last) > 1e-8)
          throw std::invalid_argument("loop closure check failed: H(0) and H(1) differ by more than 1e-8");
      }
    } else {
      throw std::invalid_argument("loop file: unknown kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("loop file: ") + e.what());
  }
  if (loop.c0) {
    if (!loop.active) throw std::invalid_argument("loop file: 'C0' needs 'active_space'");
    if (orthogonality_defect(*loop.c0) > 1e-8) throw std::invalid_argument("loop file: 'C0' is not orthogonal");
  }
  return loop;
}

LoopSpec load_loop(const std::string& source) {
  constexpr std::string_view prefix = "builtin:";
  if (source.rfind(prefix, 0) == 0) return builtin_loop(source.substr(prefix.size()));
  const std::filesystem::path path(source);
  return parse_loop_json(read_text_file(path), path.parent_path());
}

}  // namespace berry
