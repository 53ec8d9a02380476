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

#include "berry/types.hpp"

#include <algorithm>
#include <cmath>

namespace berry {

Tensor4::Tensor4(int n, std::vector<double> data) : n_(n), data_(std::move(data)) {
  if (n < 0 || data_.size() != static_cast<std::size_t>(n) * n * n * n)
    throw StructuralError("Tensor4: expected n^4 = " + std::to_string(static_cast<long long>(n) * n * n * n) +
                          " entries, got " + std::to_string(data_.size()));
}

void Tensor4::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor4::eightfold_asymmetry() const {
  double worst = 0.0;
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q)
      for (int r = 0; r < n_; ++r)
        for (int s = 0; s < n_; ++s) {
          const double v = (*this)(p, q, r, s);
          worst = std::max({worst, std::abs(v - (*this)(q, p, r, s)), std::abs(v - (*this)(p, q, s, r)),
                            std::abs(v - (*this)(r, s, p, q))});
        }
  return worst;
}

void ActiveSpaceSpec::validate() const {
  if (n_core < 0 || n_active < 0 || n_virtual < 0 || n_active_electrons < 0)
    throw std::invalid_argument("active space: negative count");
  if (n_active_electrons > 2 * n_active)
    throw std::invalid_argument("active space: " + std::to_string(n_active_electrons) + " electrons do not fit in " +
                                std::to_string(n_active) + " active orbitals");
  if (n_qubits() > 30) throw std::invalid_argument("active space: too many active orbitals for a statevector");
}

void ActiveSpaceSpec::validate_for(int n_orb_total) const {
  validate();
  if (n_orb() != n_orb_total)
    throw std::invalid_argument("active space: core + active + virtual = " + std::to_string(n_orb()) +
                                " but the basis has " + std::to_string(n_orb_total) + " orbitals");
}

}  // namespace berry
