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

#ifndef QRE_STATES_HPP
#define QRE_STATES_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qre/qcore.hpp"

namespace qre {

// Deterministic random stream. All sampling in this library goes through
// this wrapper so that a (seed, draw-order) pair fully specifies the output:
// uniform and Gaussian variates are generated by explicit algorithms rather
// than the implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Derives an independent stream from a master seed, for fanning a job out
  // over workers or records without overlapping sequences.
  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_id);
  static std::uint64_t mix(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double gauss();    // standard normal, Box-Muller

 private:
  std::mt19937_64 engine_;
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

// --- Elementary samplers ---------------------------------------------------

// Haar-distributed unit vector: normalized complex standard-normal entries.
PureState random_pure(const std::vector<int>& dims, Rng& rng);
PureState random_pure(int d, std::uint64_t seed);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R
// diagonal's phases folded into Q.
CMat haar_unitary(int d, Rng& rng);

// Uniform point on the probability simplex (Dirichlet(1,...,1)), via
// normalized exponential variates.
RVec simplex_uniform(int k, Rng& rng);

// Convex combination of k Haar pure states with simplex-uniform weights.
DensityMatrix random_mixed(const std::vector<int>& dims, int k, Rng& rng);
DensityMatrix random_mixed(int d, int k, std::uint64_t seed);

// Diagonal (incoherent) state with simplex-uniform probabilities.
DensityMatrix random_diagonal(const std::vector<int>& dims, Rng& rng);
DensityMatrix random_diagonal(int d, std::uint64_t seed);

// lambda |psi><psi| + (1 - lambda) sigma_diag, lambda uniform in [0, 1].
DensityMatrix pure_diag_mix(const std::vector<int>& dims, Rng& rng);
DensityMatrix pure_diag_mix(int d, std::uint64_t seed);

// --- Parametric families ---------------------------------------------------

// Werner state on d (x) d:
//   rho_w = (d^2 - f d)/(d^4 - d^2) I + (f d^2 - d)/(d^4 - d^2) SWAP,
// with Tr(rho_w SWAP) = f, f in [-1, 1].
DensityMatrix werner(int d, double f);

// Isotropic state on d (x) d:
//   rho_I = (1-F)/(d^2-1) (I - P+) + F P+,
// where P+ projects on the normalized maximally entangled state, F in [0, 1].
DensityMatrix isotropic(int d, double F);

// Two-qutrit family p|phi><phi| + (1-p)/9 I_9.
// kind 1: |phi_1> = sum_{i<j} b_ij (|ij> + |ji>) + sum_i b_i |ii>, with b
//         packed as (b01, b02, b12, b0, b1, b2);
// kind 2: |phi_2> = sum_i b_i |ii>, with b = (b0, b1, b2).
// b is renormalized; all-zero b is rejected.
DensityMatrix phi_family(int kind, const std::vector<double>& b, double p);

// p |psi><psi| + (1-p)/D I_D for a Haar pure |psi> on `dims` (white noise).
DensityMatrix pure_noisy(const std::vector<int>& dims, double p, Rng& rng);

// (U_1 (x) ... (x) U_n) rho (.)^dagger with independent Haar U_k.
DensityMatrix apply_local_unitaries(const DensityMatrix& rho, Rng& rng);

// Fully separable state: sum_i w_i (x)_s |psi_i^(s)><psi_i^(s)| with
// simplex-uniform w over k product terms.
DensityMatrix random_separable(const std::vector<int>& dims, int k, Rng& rng);

// lambda |psi><psi| + (1-lambda) sigma_sep with Haar |psi| on the full
// system, sigma_sep = random_separable(dims, k), lambda uniform in [0, 1].
DensityMatrix separable_mix(const std::vector<int>& dims, int k, Rng& rng);

// --- Channels ----------------------------------------------------------------

// A completely positive trace-preserving map in Kraus form. The constructor
// rejects operator sets whose completeness defect exceeds 1e-10.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMat> operators);
  const std::vector<CMat>& operators() const { return operators_; }
  CMat apply(const CMat& rho) const;

 private:
  std::vector<CMat> operators_;
};

// Single-qutrit amplitude damping toward |0>:
//   E0 = |0><0| + sqrt(1-r)|1><1| + sqrt(1-r)|2><2|,
//   E1 = sqrt(r)|0><1|,  E2 = sqrt(r)|0><2|.
KrausChannel amplitude_damping_qutrit(double r);

// Applies the qutrit damping channel to one (subsystem 0) or independently
// to both subsystems of a two-qutrit state. r in [0, 1].
DensityMatrix amplitude_damp_qutrit(const DensityMatrix& rho, double r, bool both_subsystems);

// --- Recipes -----------------------------------------------------------------

enum class StateFamily {
  kHaarPure,
  kConvexMixture,
  kDiagonal,
  kPureDiagMix,
  kWerner,
  kIsotropic,
  kPhi1Noisy,
  kPhi2Noisy,
  kPureNoisy,
  kSeparableMix,
  kLocalUnitaryOrbit,
  kAmplitudeDamped,
};

std::string to_string(StateFamily family);
StateFamily state_family_from_string(const std::string& name);

// A serializable description of one state draw: family, subsystem layout,
// named parameters, and the seed that makes the draw reproducible.
// kLocalUnitaryOrbit and kAmplitudeDamped wrap a base recipe; the wrapper's
// own seed drives the unitaries (the base keeps its own seed).
//
// Parameter conventions per family (everything omitted is drawn from seed):
//   kConvexMixture: k (component count)
//   kWerner: f;  kIsotropic: F
//   kPhi1Noisy/kPhi2Noisy: p plus either alpha (the symmetric section
//     b_ij = cos(alpha)/sqrt(6), b_i = sin(alpha)/sqrt(3) for kind 1 and
//     b0 = b1 = sin(alpha)/sqrt(2), b2 = cos(alpha) for kind 2) or explicit
//     b01.., b0..; with neither, b is a seed-drawn random unit vector
//   kPureNoisy: p (omitted: uniform in [0,1])
//   kSeparableMix: k (product terms in the separable part, default 10)
//   kAmplitudeDamped: r, both (0 or 1, default 1)
struct StateRecipe {
  StateFamily family = StateFamily::kHaarPure;
  std::vector<int> dims;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::shared_ptr<StateRecipe> base;  // for wrapper families only

  DensityMatrix realize() const;
};

void to_json(nlohmann::json& j, const StateRecipe& r);
void from_json(const nlohmann::json& j, StateRecipe& r);

}  // namespace qre

#endif  // QRE_STATES_HPP
