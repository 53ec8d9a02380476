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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "simulations.hpp"

namespace berry {
namespace {

TEST(ExactGroundPathTest, QubitCiIsSmoothAtDefaultDensity) {
  const GaugeFixedPath path = exact_ground_path(builtin_loop("qubit-ci"));
  ASSERT_EQ(path.states.size(), 400u);
  for (double ov : path.overlaps) EXPECT_GT(ov, 0.999);
  for (double gap : path.gaps) EXPECT_NEAR(gap, 2.0, 1e-12);
}

TEST(ExactGroundPathTest, ConstantLoopKeepsOneState) {
  LoopSpec loop;
  loop.analytic.n_qubits = 2;
  loop.analytic.constant = Eigen::Vector4d(0.3, -1.0, 0.5, 2.0).asDiagonal();
  const GaugeFixedPath path = exact_ground_path(loop, {50});
  for (const auto& s : path.states) EXPECT_LT((s - path.states.front()).norm(), 1e-14);
  EXPECT_EQ(discrete_berry_phase(path), Phase::Zero);
}

TEST(ExactGroundPathTest, DegeneracyOnPathIsReported) {
  LoopSpec loop = builtin_loop("effective-ci");
  loop.effective_ci.r_cross = Eigen::Vector2d(0.5, 0.0);
  loop.effective_ci.center = Eigen::Vector2d::Zero();
  loop.effective_ci.radius = 0.5;  // passes through the crossing at t = 0
  try {
    exact_ground_path(loop);
    FAIL() << "expected a degeneracy error";
  } catch (const OracleError& e) {
    EXPECT_EQ(e.kind(), OracleError::Kind::Degeneracy);
    EXPECT_EQ(e.t(), 0.0);
  }
}

TEST(ExactGroundPathTest, CoarseGridIsUnderResolved) {
  // Seventh harmonic: the ground state turns by pi/2 between 14 grid points.
  LoopSpec loop;
  loop.analytic.n_qubits = 1;
  loop.analytic.constant = Eigen::Matrix2d::Zero();
  loop.analytic.cos_terms.assign(7, Eigen::Matrix2d::Zero());
  loop.analytic.sin_terms.assign(7, Eigen::Matrix2d::Zero());
  loop.analytic.cos_terms[6] << 1, 0, 0, -1;
  loop.analytic.sin_terms[6] << 0, 1, 1, 0;
  try {
    exact_ground_path(loop, {14});
    FAIL() << "expected an under-resolution error";
  } catch (const OracleError& e) {
    EXPECT_EQ(e.kind(), OracleError::Kind::UnderResolved);
  }
  EXPECT_EQ(discrete_berry_phase(exact_ground_path(loop, {400})), Phase::Pi);
}

TEST(DiscreteBerryPhaseTest, Builtins) {
  EXPECT_EQ(discrete_berry_phase(exact_ground_path(builtin_loop("qubit-ci"))), Phase::Pi);
  EXPECT_EQ(discrete_berry_phase(exact_ground_path(builtin_loop("qubit-trivial"))), Phase::Zero);
  EXPECT_EQ(discrete_berry_phase(exact_ground_path(builtin_loop("effective-ci"))), Phase::Pi);
  LoopSpec outside = builtin_loop("effective-ci");
  outside.effective_ci.center = Eigen::Vector2d(2.0, 0.0);
  EXPECT_EQ(discrete_berry_phase(exact_ground_path(outside)), Phase::Zero);
}

TEST(DiscreteBerryPhaseTest, SmallClosingOverlapIsInconclusive) {
  GaugeFixedPath path;
  path.states = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0.6, 0.8)};
  path.closing_overlap = 0.6;
  EXPECT_THROW(discrete_berry_phase(path), OracleError);
}

TEST(DiscreteBerryPhaseTest, InvariantUnderGridDoubling) {
  std::mt19937_64 rng(21);
  for (const char* name : {"qubit-ci", "qubit-trivial", "effective-ci"}) {
    const LoopSpec loop = builtin_loop(name);
    EXPECT_EQ(discrete_berry_phase(exact_ground_path(loop, {400})), discrete_berry_phase(exact_ground_path(loop, {800})));
  }
  for (int k = 0; k < 5; ++k) {
    const LoopSpec loop = testing::random_real_loop(2, 2, 0.05, rng);
    EXPECT_EQ(discrete_berry_phase(exact_ground_path(loop, {400})), discrete_berry_phase(exact_ground_path(loop, {800})));
  }
}

// A real 2x2 loop a Z + b X + c I picks up pi exactly when (a, b) winds an odd
// number of times around the origin.
TEST(DiscreteBerryPhaseTest, TwoLevelLoopsFollowWindingParity) {
  std::mt19937_64 rng(5);
  int pis = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const LoopSpec loop = testing::random_real_loop(1, 2, 0.05, rng);
    double winding = 0.0, prev = NAN;
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
      const Eigen::MatrixXd h = loop.analytic.at(static_cast<double>(k % n) / n);
      const double angle = std::atan2(h(0, 1), 0.5 * (h(0, 0) - h(1, 1)));
      if (k > 0) winding += std::remainder(angle - prev, 2 * std::numbers::pi);
      prev = angle;
    }
    const long turns = std::lround(winding / (2 * std::numbers::pi));
    const Phase expected = turns % 2 ? Phase::Pi : Phase::Zero;
    EXPECT_EQ(discrete_berry_phase(exact_ground_path(loop)), expected) << "trial " << trial;
    pis += expected == Phase::Pi ? 1 : 0;
  }
  EXPECT_GT(pis, 0);
  EXPECT_LT(pis, 40);
}

TEST(GapScanTest, EffectiveCiConeMatchesAnalyticEigenvalues) {
  const std::string grid = R"({"family": "effective-ci", "hx": 0.8, "hz": 1.3, "r_cross": [0.2, -0.1],
    "param1": {"name": "x", "start": -0.3, "stop": 0.7, "n": 11},
    "param2": {"name": "z", "start": -0.6, "stop": 0.4, "n": 11}})";
  const GapSurface s = gap_scan(grid, ".");
  ASSERT_EQ(s.points.size(), 121u);
  for (const GapPoint& p : s.points)
    EXPECT_NEAR(p.gap, 2 * std::hypot(0.8 * (p.param1 - 0.2), 1.3 * (p.param2 + 0.1)), 1e-12);
  const GapPoint min = s.minimum();
  EXPECT_NEAR(min.param1, 0.2, 1e-12);
  EXPECT_NEAR(min.param2, -0.1, 1e-12);
  EXPECT_NEAR(min.gap, 0.0, 1e-12);
  EXPECT_EQ(s.param1_name, "x");
}

TEST(GapScanTest, ConstantFamilyIsFlat) {
  const std::string grid = R"({"family": "linear-matrix", "constant": [[1, 0.2], [0.2, -1]],
    "param1_matrix": [[0, 0], [0, 0]], "param2_matrix": [[0, 0], [0, 0]],
    "param1": {"values": [0, 1, 2]}, "param2": {"values": [-1, 1]}})";
  const GapSurface s = gap_scan(grid, ".");
  ASSERT_EQ(s.points.size(), 6u);
  for (const GapPoint& p : s.points) EXPECT_NEAR(p.gap, s.points.front().gap, 1e-14);
}

TEST(GapScanTest, CsvHeaderAndRows) {
  GapSurface s;
  s.points = {{0.0, 1.0, 0.5}, {1.0, 2.0, 0.25}};
  const std::string csv = s.to_csv();
  EXPECT_EQ(csv.rfind("param1,param2,gap_hartree\n", 0), 0u);
  EXPECT_NE(csv.find("1,2,0.25"), std::string::npos);
}

TEST(GapScanTest, UnknownFamilyRejected) {
  EXPECT_THROW(gap_scan(R"({"family": "nope", "param1": {"values": [0]}, "param2": {"values": [0]}})", "."),
               std::invalid_argument);
}

}  // namespace
}  // namespace berry
