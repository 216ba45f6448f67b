// Copyright 2026 The qre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qre/measures.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "qre/sdp.hpp"

namespace qre {

std::string to_string(Measure m) {
  switch (m) {
    case Measure::kL1Coherence: return "l1_coherence";
    case Measure::kRelEntCoherence: return "rel_ent_coherence";
    case Measure::kGeomCoherence: return "geom_coherence";
    case Measure::kGeomEntanglement: return "geom_entanglement";
  }
  throw ParamOutOfRange("unknown measure");
}

Measure measure_from_string(const std::string& name) {
  if (name == "l1_coherence") return Measure::kL1Coherence;
  if (name == "rel_ent_coherence") return Measure::kRelEntCoherence;
  if (name == "geom_coherence") return Measure::kGeomCoherence;
  if (name == "geom_entanglement") return Measure::kGeomEntanglement;
  throw SchemaMismatch("unknown measure '" + name + "'");
}

std::string to_string(LabelMethod m) {
  switch (m) {
    case LabelMethod::kAnalytic: return "analytic";
    case LabelMethod::kSdp: return "sdp";
    case LabelMethod::kPureOracle: return "pure_oracle";
  }
  throw ParamOutOfRange("unknown label method");
}

LabelMethod label_method_from_string(const std::string& name) {
  if (name == "analytic") return LabelMethod::kAnalytic;
  if (name == "sdp") return LabelMethod::kSdp;
  if (name == "pure_oracle") return LabelMethod::kPureOracle;
  throw SchemaMismatch("unknown label method '" + name + "'");
}

void to_json(nlohmann::json& j, const MeasureLabel& l) {
  j = nlohmann::json{{"measure", to_string(l.measure)},
                     {"value", l.value},
                     {"method", to_string(l.method)},
                     {"tolerance", l.tolerance}};
}

void from_json(const nlohmann::json& j, MeasureLabel& l) {
  l.measure = measure_from_string(j.at("measure").get<std::string>());
  l.value = j.at("value").get<double>();
  l.method = label_method_from_string(j.at("method").get<std::string>());
  l.tolerance = j.at("tolerance").get<double>();
}

double c_l1(const DensityMatrix& rho) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rho.mat().rows(); ++i)
    for (Eigen::Index j = 0; j < rho.mat().cols(); ++j)
      if (i != j) acc += std::abs(rho.mat()(i, j));
  return acc;
}

double c_rel_ent(const DensityMatrix& rho) {
  double diag_entropy = 0.0;
  for (Eigen::Index i = 0; i < rho.mat().rows(); ++i) {
    const double p = rho.mat()(i, i).real();
    if (p > 0.0) diag_entropy -= p * std::log2(p);
  }
  return std::max(diag_entropy - vn_entropy(rho), 0.0);
}

double c_geometric(const DensityMatrix& rho, double tol) {
  const double f = max_fidelity_incoherent(rho, tol).value;
  return std::clamp(1.0 - f * f, 0.0, 1.0);
}

double cg_pure_oracle(const PureState& psi) {
  double pmax = 0.0;
  for (Eigen::Index i = 0; i < psi.amps().size(); ++i)
    pmax = std::max(pmax, std::norm(psi.amps()[i]));
  return 1.0 - pmax;
}

double eg_lower(const DensityMatrix& rho, const std::vector<std::vector<int>>& bipartitions,
                double tol) {
  const double f = max_fidelity_ppt(rho, bipartitions, tol);
  return std::clamp(1.0 - f * f, 0.0, 1.0);
}

std::vector<std::vector<int>> all_bipartitions(int num_subsystems) {
  if (num_subsystems < 2) throw NotBipartite("bipartitions need >= 2 subsystems");
  std::vector<std::vector<int>> out;
  // Every nonempty subset of {0, ..., n-2}; leaving out the last subsystem
  // picks one representative per complementary pair.
  for (unsigned mask = 1; mask < (1u << (num_subsystems - 1)); ++mask) {
    std::vector<int> part;
    for (int s = 0; s < num_subsystems - 1; ++s)
      if (mask & (1u << s)) part.push_back(s);
    out.push_back(std::move(part));
  }
  return out;
}

double eg_pure_oracle(const PureState& psi) {
  if (psi.dims().size() != 2) throw NotBipartite("Schmidt oracle needs exactly 2 subsystems");
  const int da = psi.dims()[0], db = psi.dims()[1];
  CMat amp(da, db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j) amp(i, j) = psi.amps()[i * db + j];
  Eigen::JacobiSVD<CMat> svd(amp);
  const double smax = svd.singularValues()[0];
  return std::clamp(1.0 - smax * smax, 0.0, 1.0);
}

double eg_werner_analytic(double f) {
  if (f < -1.0 || f > 0.0)
    throw ParamOutOfRange("Werner analytic form is valid for f in [-1, 0]");
  return 0.5 * (1.0 - std::sqrt(1.0 - f * f));
}

double eg_isotropic_analytic(int d, double F) {
  if (d < 2) throw ParamOutOfRange("isotropic analytic form needs d >= 2");
  if (F < 1.0 / d || F > 1.0)
    throw ParamOutOfRange("isotropic analytic form is valid for F in [1/d, 1]");
  const double root = std::sqrt(F) + std::sqrt((1.0 - F) * (d - 1.0));
  return std::clamp(1.0 - root * root / d, 0.0, 1.0);
}

}  // namespace qre
