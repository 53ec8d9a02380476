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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace berry {

using Complex = std::complex<double>;
using Basis = std::uint64_t;

/// Raised for shape/length mismatches between collaborating objects.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense rank-4 real tensor, row-major: element (p,q,r,s) lives at
/// p*n^3 + q*n^2 + r*n + s. Two-electron quantities use chemists' order.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  Tensor4(int n, std::vector<double> data);

  int dim() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int p, int q, int r, int s) noexcept { return data_[offset(p, q, r, s)]; }
  double operator()(int p, int q, int r, int s) const noexcept { return data_[offset(p, q, r, s)]; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  void set_zero();
  double max_abs() const;
  /// max |T(p,q,r,s) - T(q,p,r,s)|, |T - T(p,q,s,r)|, |T - T(r,s,p,q)|
  double eightfold_asymmetry() const;

 private:
  std::size_t offset(int p, int q, int r, int s) const noexcept {
    const auto n = static_cast<std::size_t>(n_);
    return ((static_cast<std::size_t>(p) * n + q) * n + r) * n + s;
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// Orbital partition into core (doubly occupied), active and virtual sets.
struct ActiveSpaceSpec {
  int n_core = 0;
  int n_active = 0;
  int n_virtual = 0;
  int n_active_electrons = 0;

  int n_orb() const noexcept { return n_core + n_active + n_virtual; }
  int n_qubits() const noexcept { return 2 * n_active; }
  int n_electrons() const noexcept { return 2 * n_core + n_active_electrons; }
  /// Throws std::invalid_argument on negative counts or electron count out of range.
  void validate() const;
  void validate_for(int n_orb) const;
};

/// Spin orbitals are interleaved: (0 up, 0 down, 1 up, 1 down, ...).
constexpr int spin_orbital(int spatial, int spin) noexcept { return 2 * spatial + spin; }

}  // namespace berry
