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

#ifndef QRE_MEASURES_HPP
#define QRE_MEASURES_HPP

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qre/qcore.hpp"

namespace qre {

enum class Measure { kL1Coherence, kRelEntCoherence, kGeomCoherence, kGeomEntanglement };
enum class LabelMethod { kAnalytic, kSdp, kPureOracle };

std::string to_string(Measure m);
Measure measure_from_string(const std::string& name);
std::string to_string(LabelMethod m);
LabelMethod label_method_from_string(const std::string& name);

// A ground-truth value attached to a dataset record: which measure, how it
// was computed, and the numeric tolerance the producer certifies.
struct MeasureLabel {
  Measure measure = Measure::kL1Coherence;
  double value = 0.0;
  LabelMethod method = LabelMethod::kAnalytic;
  double tolerance = 0.0;
};

void to_json(nlohmann::json& j, const MeasureLabel& l);
void from_json(const nlohmann::json& j, MeasureLabel& l);

// --- Coherence ---------------------------------------------------------------

// l1-norm of coherence: sum of |rho_ij| over i != j.
double c_l1(const DensityMatrix& rho);

// Relative entropy of coherence in bits: S(rho_diag) - S(rho) with
// rho_diag the fully dephased state.
double c_rel_ent(const DensityMatrix& rho);

// Geometric coherence 1 - (max_{sigma incoherent} F(rho, sigma))^2,
// computed by semidefinite programming over the incoherent simplex.
double c_geometric(const DensityMatrix& rho, double tol = 1e-7);

// Independent pure-state value: for |psi>, the optimal incoherent sigma is
// the basis state with the largest overlap, so C_g = 1 - max_i |<i|psi>|^2.
double cg_pure_oracle(const PureState& psi);

// --- Entanglement ------------------------------------------------------------

// Lower bound on the geometric measure of entanglement,
// 1 - (max F(rho, sigma))^2 over sigma PSD with unit trace whose partial
// transposes across every listed bipartition stay PSD. Since the PPT set
// contains the (bi)separable set, the result never exceeds the true measure.
double eg_lower(const DensityMatrix& rho, const std::vector<std::vector<int>>& bipartitions,
                double tol = 1e-7);

// All inequivalent bipartitions of n subsystems (subsets not containing the
// last subsystem, which dedupes complements): 2^(n-1) - 1 of them.
std::vector<std::vector<int>> all_bipartitions(int num_subsystems);

// Exact value for bipartite pure states: 1 - (largest Schmidt coefficient)^2.
double eg_pure_oracle(const PureState& psi);

// Closed forms on the two standard families:
//   Werner (f <= 0):      E_G = (1 - sqrt(1 - f^2)) / 2
//   isotropic (F >= 1/d): E_G = 1 - (sqrt(F) + sqrt((1-F)(d-1)))^2 / d
double eg_werner_analytic(double f);
double eg_isotropic_analytic(int d, double F);

}  // namespace qre

#endif  // QRE_MEASURES_HPP
