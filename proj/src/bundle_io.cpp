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

#include <zlib.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "berry/hamiltonian.hpp"

namespace berry {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw BundleError(std::string("bundle schema: missing key '") + key + "'");
  return j.at(key);
}

Eigen::MatrixXd square_matrix(const json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw BundleError(std::string("bundle schema: '") + what + "' must have " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw BundleError(std::string("bundle schema: row ") + std::to_string(i) + " of '" + what + "' must have " +
                        std::to_string(n) + " entries");
    for (int k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw BundleError("cannot open " + path.string());
  std::string out;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw BundleError("read error in " + path.string());
  return out;
}

void IntegralBundle::validate() const {
  if (n_orb <= 0) throw BundleError("bundle shape: n_orb must be positive");
  if (h.rows() != n_orb || h.cols() != n_orb) throw BundleError("bundle shape: h must be n_orb x n_orb");
  if (g.dim() != n_orb) throw BundleError("bundle shape: g must have n_orb^4 entries");
  if (!std::isfinite(e_nuc_core) || !h.allFinite()) throw BundleError("bundle values: non-finite entry");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8)
    throw BundleError("one-electron symmetry violated: h != h^T");
  if (g.eightfold_asymmetry() > 1e-8) throw BundleError("two-electron symmetry violated: (pq|rs) 8-fold");
  if (S) {
    if (S->rows() != n_orb || S->cols() != n_orb) throw BundleError("bundle shape: S must be n_orb x n_orb");
    if ((*S - S->transpose()).cwiseAbs().maxCoeff() > 1e-8) throw BundleError("overlap symmetry violated");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*S, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-10) throw BundleError("overlap not positive definite");
  }
}

Eigen::MatrixXd IntegralBundle::overlap() const { return S ? *S : Eigen::MatrixXd::Identity(n_orb, n_orb); }

static IntegralBundle parse_bundle_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw BundleError(std::string("bundle schema: invalid JSON: ") + e.what());
  }
  IntegralBundle b;
  try {
    b.n_orb = require(j, "n_orb").get<int>();
    if (b.n_orb <= 0 || b.n_orb > 200) throw BundleError("bundle schema: n_orb out of range");
    b.e_nuc_core = require(j, "e_nuc_core").get<double>();
    b.h = square_matrix(require(j, "h"), b.n_orb, "h");
    const json& g = require(j, "g");
    const std::size_t n4 = static_cast<std::size_t>(b.n_orb) * b.n_orb * b.n_orb * b.n_orb;
    if (!g.is_array() || g.size() != n4)
      throw BundleError("bundle schema: 'g' must be a flat array of n_orb^4 = " + std::to_string(n4) + " numbers");
    std::vector<double> flat;
    flat.reserve(n4);
    for (const auto& v : g) flat.push_back(v.get<double>());
    b.g = Tensor4(b.n_orb, std::move(flat));
    if (j.contains("S") && !j.at("S").is_null()) b.S = square_matrix(j.at("S"), b.n_orb, "S");
    if (j.contains("geometry"))
      for (const auto& [k, v] : j.at("geometry").items()) b.geometry[k] = v.get<double>();
    if (j.contains("t")) b.t = j.at("t").get<double>();
  } catch (const json::exception& e) {
    throw BundleError(std::string("bundle schema: ") + e.what());
  }
  b.validate();
  return b;
}

IntegralBundle load_bundle(const std::filesystem::path& path) {
  try {
    return parse_bundle_json(read_text_file(path));
  } catch (const BundleError& e) {
    throw BundleError(path.string() + ": " + e.what());
  }
}

void save_bundle(const IntegralBundle& b, const std::filesystem::path& path) {
  b.validate();
  json j;
  j["n_orb"] = b.n_orb;
  j["e_nuc_core"] = b.e_nuc_core;
  j["h"] = matrix_json(b.h);
  j["g"] = b.g.data();
  if (b.S) j["S"] = matrix_json(*b.S);
  j["geometry"] = b.geometry;
  j["t"] = b.t;
  const std::string text = j.dump();
  if (path.extension() == ".gz") {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw BundleError("cannot write " + path.string());
    const int written = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
    if (written != static_cast<int>(text.size())) throw BundleError("short write to " + path.string());
    return;
  }
  std::ofstream out(path);
  if (!out) throw BundleError("cannot write " + path.string());
  out << text;
}

}  // namespace berry
