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

#ifndef QRE_FEATURES_HPP
#define QRE_FEATURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qre/qcore.hpp"

namespace qre {

enum class FeatureKind { kCoherenceZPatterns, kEntanglementDiagMoments };

// How each entry may legally range, used when clipping perturbed values.
enum class FeatureRange { kZPattern, kProjector, kMoment };

// An ordered list of named features for one supported system.
//
// Coherence schemas (n-qubit): every sigma_z subset pattern of Hamming
// weight 1 through min(3, n) - ascending weight, lexicographic slot order -
// followed by Tr rho^2 and Tr rho^3. Lengths 5 / 9 / 16 / 27 for n = 2..5.
//
// Entanglement schemas (two-qutrit, 4x4, four-qubit): all diagonal
// projector expectations in computational-basis order, the two global
// moments, then Tr rho_S^2, Tr rho_S^3 per subsystem in order. Lengths
// 15 / 22 / 26.
struct FeatureSchema {
  FeatureKind kind = FeatureKind::kCoherenceZPatterns;
  std::vector<int> dims;
  std::string id;
  std::vector<std::string> names;
  std::vector<FeatureRange> ranges;

  int size() const { return static_cast<int>(names.size()); }
};

// Schema factories; throw UnsupportedSystem outside the tabulated systems.
const FeatureSchema& coherence_schema(int n_qubits);
const FeatureSchema& entanglement_schema(const std::vector<int>& dims);
const FeatureSchema& schema_by_id(const std::string& id);

struct FeatureVector {
  std::string schema_id;
  RVec values;
};

// Feature extraction per the schemas above. The z-pattern expectations are
// parity-weighted sums of the diagonal of rho, so the whole coherence
// vector is a function of diag(rho) and the spectrum only.
FeatureVector coherence_features(const DensityMatrix& rho);
FeatureVector entanglement_features(const DensityMatrix& rho);

// Multiplies every entry by (1 + u), u uniform in [-level, level] drawn
// independently per entry, then clips each entry back to its legal range.
FeatureVector perturb_features(const FeatureVector& fv, double level, std::uint64_t seed);

}  // namespace qre

#endif  // QRE_FEATURES_HPP
