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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "json.hpp"

namespace berry::detail {

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(std::string("loop: '") + what + "' must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols)
      throw std::invalid_argument(std::string("loop: ragged matrix '") + what + "'");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

inline Eigen::Vector2d vec2(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument(std::string("loop: '") + what + "' needs 2 entries");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace berry::detail
