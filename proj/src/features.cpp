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

#include "qre/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qre/states.hpp"

namespace qre {
namespace {

std::string moment_names_suffix(int subsystem) {
  const char letter = static_cast<char>('a' + subsystem);
  return std::string(1, letter);
}

// sigma_z subset patterns: ascending Hamming weight, lexicographic slot
// order within a weight (e.g. n=3: Z.., .Z., ..Z, ZZ., Z.Z, .ZZ, weight-3).
std::vector<std::vector<int>> z_patterns(int n) {
  std::vector<std::vector<int>> out;
  const int max_weight = std::min(3, n);
  for (int w = 1; w <= max_weight; ++w) {
    std::vector<int> idx(w);
    for (int i = 0; i < w; ++i) idx[i] = i;
    while (true) {
      out.push_back(idx);
      int k = w - 1;
      while (k >= 0 && idx[k] == n - w + k) --k;
      if (k < 0) break;
      ++idx[k];
      for (int i = k + 1; i < w; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

FeatureSchema build_coherence_schema(int n) {
  FeatureSchema s;
  s.kind = FeatureKind::kCoherenceZPatterns;
  s.dims = std::vector<int>(n, 2);
  s.id = "coherence_z_n" + std::to_string(n);
  for (const auto& pattern : z_patterns(n)) {
    std::string name(static_cast<size_t>(n), 'i');
    for (int pos : pattern) name[static_cast<size_t>(pos)] = 'z';
    s.names.push_back(name);
    s.ranges.push_back(FeatureRange::kZPattern);
  }
  s.names.push_back("tr_rho2");
  s.ranges.push_back(FeatureRange::kMoment);
  s.names.push_back("tr_rho3");
  s.ranges.push_back(FeatureRange::kMoment);
  return s;
}

FeatureSchema build_entanglement_schema(const std::vector<int>& dims) {
  FeatureSchema s;
  s.kind = FeatureKind::kEntanglementDiagMoments;
  s.dims = dims;
  s.id = "entanglement_diag";
  for (int d : dims) s.id += "_" + std::to_string(d);
  long total = 1;
  for (int d : dims) total *= d;
  for (long k = 0; k < total; ++k) {
    std::string name = "p";
    long rem = k;
    std::vector<int> digits(dims.size());
    for (int sidx = static_cast<int>(dims.size()) - 1; sidx >= 0; --sidx) {
      digits[static_cast<size_t>(sidx)] = static_cast<int>(rem % dims[static_cast<size_t>(sidx)]);
      rem /= dims[static_cast<size_t>(sidx)];
    }
    for (int dgt : digits) name += std::to_string(dgt);
    s.names.push_back(name);
    s.ranges.push_back(FeatureRange::kProjector);
  }
  s.names.push_back("tr_rho2");
  s.ranges.push_back(FeatureRange::kMoment);
  s.names.push_back("tr_rho3");
  s.ranges.push_back(FeatureRange::kMoment);
  for (size_t sub = 0; sub < dims.size(); ++sub) {
    for (int m : {2, 3}) {
      s.names.push_back("tr_" + moment_names_suffix(static_cast<int>(sub)) + std::to_string(m));
      s.ranges.push_back(FeatureRange::kMoment);
    }
  }
  return s;
}

const std::map<std::string, FeatureSchema>& schema_registry() {
  static const std::map<std::string, FeatureSchema>* registry = [] {
    auto* r = new std::map<std::string, FeatureSchema>();
    for (int n = 2; n <= 5; ++n) {
      FeatureSchema s = build_coherence_schema(n);
      r->emplace(s.id, std::move(s));
    }
    for (const std::vector<int>& dims :
         {std::vector<int>{3, 3}, std::vector<int>{4, 4}, std::vector<int>{2, 2, 2, 2}}) {
      FeatureSchema s = build_entanglement_schema(dims);
      r->emplace(s.id, std::move(s));
    }
    return r;
  }();
  return *registry;
}

}  // namespace

const FeatureSchema& coherence_schema(int n_qubits) {
  if (n_qubits < 2 || n_qubits > 5)
    throw UnsupportedSystem("coherence features cover 2..5 qubits");
  return schema_by_id("coherence_z_n" + std::to_string(n_qubits));
}

const FeatureSchema& entanglement_schema(const std::vector<int>& dims) {
  std::string id = "entanglement_diag";
  for (int d : dims) id += "_" + std::to_string(d);
  auto it = schema_registry().find(id);
  if (it == schema_registry().end())
    throw UnsupportedSystem("entanglement features cover 3x3, 4x4 and 2x2x2x2 systems");
  return it->second;
}

const FeatureSchema& schema_by_id(const std::string& id) {
  auto it = schema_registry().find(id);
  if (it == schema_registry().end()) throw SchemaMismatch("unknown feature schema '" + id + "'");
  return it->second;
}

FeatureVector coherence_features(const DensityMatrix& rho) {
  for (int d : rho.dims())
    if (d != 2) throw WrongSystem("coherence features require qubit subsystems");
  const int n = rho.num_subsystems();
  if (n < 2 || n > 5) throw WrongSystem("coherence features cover 2..5 qubits");
  const FeatureSchema& schema = coherence_schema(n);

  FeatureVector fv;
  fv.schema_id = schema.id;
  fv.values = RVec(schema.size());
  int out = 0;
  for (const auto& pattern : z_patterns(n)) {
    double acc = 0.0;
    for (long k = 0; k < rho.dim(); ++k) {
      int parity = 0;
      for (int pos : pattern) parity ^= static_cast<int>((k >> (n - 1 - pos)) & 1);
      const double p = rho.mat()(k, k).real();
      acc += parity ? -p : p;
    }
    fv.values[out++] = acc;
  }
  fv.values[out++] = trace_power(rho, 2);
  fv.values[out++] = trace_power(rho, 3);
  return fv;
}

FeatureVector entanglement_features(const DensityMatrix& rho) {
  const FeatureSchema* schema = nullptr;
  try {
    schema = &entanglement_schema(rho.dims());
  } catch (const UnsupportedSystem&) {
    throw WrongSystem("entanglement features cover 3x3, 4x4 and 2x2x2x2 systems");
  }

  FeatureVector fv;
  fv.schema_id = schema->id;
  fv.values = RVec(schema->size());
  int out = 0;
  for (long k = 0; k < rho.dim(); ++k) fv.values[out++] = rho.mat()(k, k).real();
  fv.values[out++] = trace_power(rho, 2);
  fv.values[out++] = trace_power(rho, 3);
  for (int sub = 0; sub < rho.num_subsystems(); ++sub) {
    DensityMatrix red = partial_trace(rho, {sub});
    fv.values[out++] = trace_power(red, 2);
    fv.values[out++] = trace_power(red, 3);
  }
  return fv;
}

FeatureVector perturb_features(const FeatureVector& fv, double level, std::uint64_t seed) {
  if (level < 0.0) throw ParamOutOfRange("perturbation level must be >= 0");
  const FeatureSchema& schema = schema_by_id(fv.schema_id);
  if (fv.values.size() != schema.size())
    throw SchemaMismatch("feature vector length does not match its schema");
  FeatureVector out = fv;
  if (level == 0.0) return out;
  Rng rng(seed);
  for (int i = 0; i < out.values.size(); ++i) {
    const double u = (2.0 * rng.uniform() - 1.0) * level;
    double v = out.values[i] * (1.0 + u);
    switch (schema.ranges[static_cast<size_t>(i)]) {
      case FeatureRange::kZPattern:
        v = std::clamp(v, -1.0, 1.0);
        break;
      case FeatureRange::kProjector:
        v = std::clamp(v, 0.0, 1.0);
        break;
      case FeatureRange::kMoment:
        v = std::clamp(v, 1e-12, 1.0);
        break;
    }
    out.values[i] = v;
  }
  return out;
}

}  // namespace qre
