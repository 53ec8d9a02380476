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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berry/hamiltonian.hpp"

namespace berry {

struct OracleOptions {
  int n_dense = 400;  // analytic loops; bundle loops use their grid
  double degeneracy_tol = 1e-9;
  double min_step_overlap = 0.5;
  double min_closing_overlap = 0.9;
  double spin_penalty = 1.0;  // hartree, weight of S^2 in bundle sectors
};

class OracleError : public std::runtime_error {
 public:
  enum class Kind { Degeneracy, UnderResolved, Inconclusive };
  OracleError(Kind kind, double t, const std::string& what) : std::runtime_error(what), kind_(kind), t_(t) {}
  Kind kind() const noexcept { return kind_; }
  double t() const noexcept { return t_; }

 private:
  Kind kind_;
  double t_;
};

/// Real ground states along a closed loop with signs propagated so that
/// consecutive overlaps are positive.
struct GaugeFixedPath {
  std::vector<double> t_grid;  // t_k = k / n, k < n
  std::vector<Eigen::VectorXd> states;
  std::vector<double> gaps;
  std::vector<double> overlaps;  // <chi_k|chi_k+1> for k + 1 < n
  double closing_overlap = 0.0;  // <chi_{n-1}|chi_0>
};

/// Dense real symmetric Hamiltonian the oracle diagonalizes at t. Bundle loops
/// give the CASCI matrix over the fixed loop-start orbitals, restricted to the
/// Sz = 0 sector of the active electron count, plus spin_penalty * S^2.
Eigen::MatrixXd oracle_hamiltonian(const LoopSpec& loop, double t, const Eigen::MatrixXd& c_fixed,
                                   double spin_penalty);

GaugeFixedPath exact_ground_path(const LoopSpec& loop, const OracleOptions& options = {});

enum class Phase { Zero, Pi };
std::string to_string(Phase phase);

/// Sign of the closing overlap; throws OracleError (Inconclusive) when its
/// magnitude is below min_closing_overlap.
Phase discrete_berry_phase(const GaugeFixedPath& path, double min_closing_overlap = 0.9);

struct GapPoint {
  double param1 = 0.0;
  double param2 = 0.0;
  double gap = 0.0;
};

struct GapSurface {
  std::string param1_name = "param1";
  std::string param2_name = "param2";
  std::vector<GapPoint> points;

  GapPoint minimum() const;
  /// Header `param1,param2,gap_hartree`.
  std::string to_csv() const;
};

/// Grid families: "effective-ci" (hx, hz, r_cross), "linear-matrix"
/// (H = constant + p1 * param1_matrix + p2 * param2_matrix) and
/// "bundle-grid" (points with param1, param2, path; active_space; optional C0,
/// otherwise RHF orbitals per point). Axes for the first two are given as
/// {"values": [...]} or {"start", "stop", "n"}.
GapSurface gap_scan(const std::string& grid_json, const std::filesystem::path& base_dir,
                    const OracleOptions& options = {});
GapSurface gap_scan_file(const std::filesystem::path& path, const OracleOptions& options = {});

}  // namespace berry
