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

#include "qre/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

namespace qre {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

long total_dim(const std::vector<int>& dims) {
  long d = 1;
  for (int x : dims) {
    if (x < 1) throw InvalidSubsystem("subsystem dimension must be >= 1");
    d *= x;
  }
  return d;
}

CVec gauss_cvec(long n, Rng& rng) {
  CVec v(n);
  for (long i = 0; i < n; ++i) v[i] = Complex(rng.gauss(), rng.gauss());
  return v;
}

DensityMatrix make_density(CMat m, std::vector<int> dims) {
  m = (m + m.adjoint()).eval() / 2.0;
  m /= m.trace().real();
  return DensityMatrix(std::move(m), std::move(dims));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  // Expand the seed through splitmix64 so nearby seeds give unrelated
  // engine states (the classic fix for mt19937's weak seeding).
  std::uint64_t s = seed;
  std::seed_seq seq{static_cast<unsigned>(splitmix64(s) >> 32), static_cast<unsigned>(splitmix64(s)),
                    static_cast<unsigned>(splitmix64(s) >> 32), static_cast<unsigned>(splitmix64(s))};
  engine_.seed(seq);
}

std::uint64_t Rng::mix(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t s = master_seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  return splitmix64(s);
}

Rng Rng::stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return Rng(mix(master_seed, stream_id));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() {
  // 53-bit mantissa in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (has_cached_gauss_) {
    has_cached_gauss_ = false;
    return cached_gauss_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_gauss_ = radius * std::sin(angle);
  has_cached_gauss_ = true;
  return radius * std::cos(angle);
}

PureState random_pure(const std::vector<int>& dims, Rng& rng) {
  const long d = total_dim(dims);
  if (d < 2) throw ParamOutOfRange("random_pure requires dimension >= 2");
  CVec amps = gauss_cvec(d, rng);
  amps /= amps.norm();
  return PureState(std::move(amps), dims);
}

PureState random_pure(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_pure(std::vector<int>{d}, rng);
}

CMat haar_unitary(int d, Rng& rng) {
  if (d < 1) throw ParamOutOfRange("haar_unitary requires dimension >= 1");
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.gauss(), rng.gauss());
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge: fold the phases of R's diagonal into Q so the
  // distribution is exactly Haar rather than QR-convention dependent.
  for (int j = 0; j < d; ++j) {
    Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    q.col(j) *= (mag > 0.0) ? rjj / mag : Complex(1.0, 0.0);
  }
  return q;
}

RVec simplex_uniform(int k, Rng& rng) {
  if (k < 1) throw ParamOutOfRange("simplex_uniform requires k >= 1");
  RVec w(k);
  for (int i = 0; i < k; ++i) {
    double u = 0.0;
    do {
      u = rng.uniform();
    } while (u <= 0.0);
    w[i] = -std::log(u);
  }
  w /= w.sum();
  return w;
}

DensityMatrix random_mixed(const std::vector<int>& dims, int k, Rng& rng) {
  if (k < 1) throw ParamOutOfRange("random_mixed requires k >= 1");
  const long d = total_dim(dims);
  const RVec w = simplex_uniform(k, rng);
  CMat rho = CMat::Zero(d, d);
  for (int i = 0; i < k; ++i) {
    const CVec psi = random_pure(dims, rng).amps();
    rho += w[i] * (psi * psi.adjoint());
  }
  return make_density(std::move(rho), dims);
}

DensityMatrix random_mixed(int d, int k, std::uint64_t seed) {
  Rng rng(seed);
  return random_mixed(std::vector<int>{d}, k, rng);
}

DensityMatrix random_diagonal(const std::vector<int>& dims, Rng& rng) {
  const long d = total_dim(dims);
  const RVec p = simplex_uniform(static_cast<int>(d), rng);
  CMat rho = CMat::Zero(d, d);
  for (long i = 0; i < d; ++i) rho(i, i) = p[i];
  return DensityMatrix(std::move(rho), dims);
}

DensityMatrix random_diagonal(int d, std::uint64_t seed) {
  Rng rng(seed);
  return random_diagonal(std::vector<int>{d}, rng);
}

DensityMatrix pure_diag_mix(const std::vector<int>& dims, Rng& rng) {
  const CVec psi = random_pure(dims, rng).amps();
  const DensityMatrix diag = random_diagonal(dims, rng);
  const double lambda = rng.uniform();
  CMat rho = lambda * (psi * psi.adjoint()) + (1.0 - lambda) * diag.mat();
  return make_density(std::move(rho), dims);
}

DensityMatrix pure_diag_mix(int d, std::uint64_t seed) {
  Rng rng(seed);
  return pure_diag_mix(std::vector<int>{d}, rng);
}

DensityMatrix werner(int d, double f) {
  if (d < 2) throw ParamOutOfRange("werner requires local dimension >= 2");
  if (f < -1.0 || f > 1.0) throw ParamOutOfRange("werner requires f in [-1, 1]");
  const double dd = static_cast<double>(d);
  const double a = (dd * dd - f * dd) / (dd * dd * dd * dd - dd * dd);
  const double b = (f * dd * dd - dd) / (dd * dd * dd * dd - dd * dd);
  CMat rho = a * CMat::Identity(d * d, d * d);
  // SWAP = sum_ij |ij><ji|.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rho(i * d + j, j * d + i) += b;
  return DensityMatrix(std::move(rho), {d, d});
}

DensityMatrix isotropic(int d, double F) {
  if (d < 2) throw ParamOutOfRange("isotropic requires local dimension >= 2");
  if (F < 0.0 || F > 1.0) throw ParamOutOfRange("isotropic requires F in [0, 1]");
  CVec psi = CVec::Zero(d * d);
  for (int i = 0; i < d; ++i) psi[i * d + i] = 1.0 / std::sqrt(static_cast<double>(d));
  const CMat proj = psi * psi.adjoint();
  CMat rho = ((1.0 - F) / (d * d - 1.0)) * (CMat::Identity(d * d, d * d) - proj) + F * proj;
  return make_density(std::move(rho), {d, d});
}

DensityMatrix phi_family(int kind, const std::vector<double>& b, double p) {
  if (kind != 1 && kind != 2) throw ParamOutOfRange("phi_family kind must be 1 or 2");
  if (p < 0.0 || p > 1.0) throw ParamOutOfRange("phi_family requires p in [0, 1]");
  CVec phi = CVec::Zero(9);
  if (kind == 1) {
    if (b.size() != 6) throw ParamOutOfRange("phi_family kind 1 takes (b01,b02,b12,b0,b1,b2)");
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int k = 0; k < 3; ++k) {
      phi[pairs[k][0] * 3 + pairs[k][1]] += b[k];
      phi[pairs[k][1] * 3 + pairs[k][0]] += b[k];
    }
    for (int i = 0; i < 3; ++i) phi[i * 3 + i] = b[3 + i];
  } else {
    if (b.size() != 3) throw ParamOutOfRange("phi_family kind 2 takes (b0,b1,b2)");
    for (int i = 0; i < 3; ++i) phi[i * 3 + i] = b[i];
  }
  const double norm = phi.norm();
  if (norm < 1e-12) throw ParamOutOfRange("phi_family coefficients are all zero");
  phi /= norm;
  CMat rho = p * (phi * phi.adjoint()) + ((1.0 - p) / 9.0) * CMat::Identity(9, 9);
  return make_density(std::move(rho), {3, 3});
}

DensityMatrix pure_noisy(const std::vector<int>& dims, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw ParamOutOfRange("pure_noisy requires p in [0, 1]");
  const long d = total_dim(dims);
  const CVec psi = random_pure(dims, rng).amps();
  CMat rho = p * (psi * psi.adjoint()) +
             ((1.0 - p) / static_cast<double>(d)) * CMat::Identity(d, d);
  return make_density(std::move(rho), dims);
}

DensityMatrix apply_local_unitaries(const DensityMatrix& rho, Rng& rng) {
  if (rho.num_subsystems() < 2)
    throw InvalidSubsystem("apply_local_unitaries requires >= 2 subsystems");
  CMat u = haar_unitary(rho.dims()[0], rng);
  for (size_t s = 1; s < rho.dims().size(); ++s)
    u = tensor(u, haar_unitary(rho.dims()[s], rng)).eval();
  CMat out = u * rho.mat() * u.adjoint();
  return make_density(std::move(out), rho.dims());
}

DensityMatrix random_separable(const std::vector<int>& dims, int k, Rng& rng) {
  if (k < 1) throw ParamOutOfRange("random_separable requires k >= 1");
  if (dims.size() < 2) throw InvalidSubsystem("random_separable requires >= 2 subsystems");
  const long d = total_dim(dims);
  const RVec w = simplex_uniform(k, rng);
  CMat rho = CMat::Zero(d, d);
  for (int i = 0; i < k; ++i) {
    CVec prod = random_pure({dims[0]}, rng).amps();
    for (size_t s = 1; s < dims.size(); ++s)
      prod = tensor(prod, random_pure({dims[s]}, rng).amps()).eval();
    rho += w[i] * (prod * prod.adjoint());
  }
  return make_density(std::move(rho), dims);
}

DensityMatrix separable_mix(const std::vector<int>& dims, int k, Rng& rng) {
  const CVec psi = random_pure(dims, rng).amps();
  const DensityMatrix sep = random_separable(dims, k, rng);
  const double lambda = rng.uniform();
  CMat rho = lambda * (psi * psi.adjoint()) + (1.0 - lambda) * sep.mat();
  return make_density(std::move(rho), dims);
}

KrausChannel::KrausChannel(std::vector<CMat> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) throw ParamOutOfRange("Kraus channel needs >= 1 operator");
  const Eigen::Index rows = operators_[0].rows();
  const Eigen::Index cols = operators_[0].cols();
  CMat acc = CMat::Zero(cols, cols);
  for (const CMat& e : operators_) {
    if (e.rows() != rows || e.cols() != cols)
      throw DimensionMismatch("Kraus operators must share one shape");
    acc += e.adjoint() * e;
  }
  const double defect = (acc - CMat::Identity(cols, cols)).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw ParamOutOfRange("Kraus completeness defect " + std::to_string(defect));
}

CMat KrausChannel::apply(const CMat& rho) const {
  CMat out = CMat::Zero(operators_[0].rows(), operators_[0].rows());
  for (const CMat& e : operators_) out += e * rho * e.adjoint();
  return out;
}

KrausChannel amplitude_damping_qutrit(double r) {
  if (r < 0.0 || r > 1.0) throw ParamOutOfRange("damping rate must lie in [0, 1]");
  CMat e0 = CMat::Zero(3, 3), e1 = CMat::Zero(3, 3), e2 = CMat::Zero(3, 3);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - r);
  e0(2, 2) = std::sqrt(1.0 - r);
  e1(0, 1) = std::sqrt(r);
  e2(0, 2) = std::sqrt(r);
  return KrausChannel({e0, e1, e2});
}

DensityMatrix amplitude_damp_qutrit(const DensityMatrix& rho, double r, bool both_subsystems) {
  for (int d : rho.dims())
    if (d != 3) throw InvalidSubsystem("qutrit damping requires all-qutrit subsystems");
  const KrausChannel chan = amplitude_damping_qutrit(r);
  std::vector<CMat> ops;
  if (rho.num_subsystems() == 1) {
    ops = chan.operators();
  } else if (rho.num_subsystems() == 2) {
    const CMat eye = CMat::Identity(3, 3);
    for (const CMat& a : chan.operators()) {
      if (both_subsystems) {
        // Independent damping on each side: the product channel's Kraus set
        // is every pairwise tensor product.
        for (const CMat& b : chan.operators()) ops.push_back(tensor(a, b));
      } else {
        ops.push_back(tensor(a, eye));
      }
    }
  } else {
    throw InvalidSubsystem("qutrit damping supports one or two subsystems");
  }
  CMat out = KrausChannel(ops).apply(rho.mat());
  return make_density(std::move(out), rho.dims());
}

std::string to_string(StateFamily family) {
  switch (family) {
    case StateFamily::kHaarPure: return "haar_pure";
    case StateFamily::kConvexMixture: return "convex_mixture";
    case StateFamily::kDiagonal: return "diagonal";
    case StateFamily::kPureDiagMix: return "pure_diag_mix";
    case StateFamily::kWerner: return "werner";
    case StateFamily::kIsotropic: return "isotropic";
    case StateFamily::kPhi1Noisy: return "phi1_noisy";
    case StateFamily::kPhi2Noisy: return "phi2_noisy";
    case StateFamily::kPureNoisy: return "pure_noisy";
    case StateFamily::kSeparableMix: return "separable_mix";
    case StateFamily::kLocalUnitaryOrbit: return "local_unitary_orbit";
    case StateFamily::kAmplitudeDamped: return "amplitude_damped";
  }
  throw ParamOutOfRange("unknown state family");
}

StateFamily state_family_from_string(const std::string& name) {
  static const std::map<std::string, StateFamily> table = {
      {"haar_pure", StateFamily::kHaarPure},
      {"convex_mixture", StateFamily::kConvexMixture},
      {"diagonal", StateFamily::kDiagonal},
      {"pure_diag_mix", StateFamily::kPureDiagMix},
      {"werner", StateFamily::kWerner},
      {"isotropic", StateFamily::kIsotropic},
      {"phi1_noisy", StateFamily::kPhi1Noisy},
      {"phi2_noisy", StateFamily::kPhi2Noisy},
      {"pure_noisy", StateFamily::kPureNoisy},
      {"separable_mix", StateFamily::kSeparableMix},
      {"local_unitary_orbit", StateFamily::kLocalUnitaryOrbit},
      {"amplitude_damped", StateFamily::kAmplitudeDamped},
  };
  auto it = table.find(name);
  if (it == table.end()) throw SchemaMismatch("unknown state family '" + name + "'");
  return it->second;
}

namespace {

double param_or(const StateRecipe& r, const std::string& key, double fallback) {
  auto it = r.params.find(key);
  return it == r.params.end() ? fallback : it->second;
}

bool has_param(const StateRecipe& r, const std::string& key) {
  return r.params.count(key) != 0;
}

std::vector<double> phi_coeffs(const StateRecipe& r, int kind, Rng& rng) {
  const size_t n = (kind == 1) ? 6 : 3;
  if (has_param(r, "alpha")) {
    const double alpha = r.params.at("alpha");
    if (kind == 1) {
      const double bij = std::cos(alpha) / std::sqrt(6.0);
      const double bi = std::sin(alpha) / std::sqrt(3.0);
      return {bij, bij, bij, bi, bi, bi};
    }
    const double side = std::sin(alpha) * std::sqrt(2.0) / 2.0;
    return {side, side, std::cos(alpha)};
  }
  const std::vector<std::string> keys1 = {"b01", "b02", "b12", "b0", "b1", "b2"};
  const std::vector<std::string> keys2 = {"b0", "b1", "b2"};
  const auto& keys = (kind == 1) ? keys1 : keys2;
  if (has_param(r, keys[0])) {
    std::vector<double> b(n);
    for (size_t i = 0; i < n; ++i) b[i] = r.params.at(keys[i]);
    return b;
  }
  // Unspecified section: random direction on the coefficient sphere.
  std::vector<double> b(n);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      b[i] = rng.gauss();
      norm2 += b[i] * b[i];
    }
  } while (norm2 < 1e-12);
  return b;
}

}  // namespace

DensityMatrix StateRecipe::realize() const {
  Rng rng(seed);
  switch (family) {
    case StateFamily::kHaarPure:
      return random_pure(dims, rng).to_density();
    case StateFamily::kConvexMixture:
      return random_mixed(dims, static_cast<int>(param_or(*this, "k", 1)), rng);
    case StateFamily::kDiagonal:
      return random_diagonal(dims, rng);
    case StateFamily::kPureDiagMix:
      return pure_diag_mix(dims, rng);
    case StateFamily::kWerner: {
      if (dims.size() != 2 || dims[0] != dims[1])
        throw NotBipartite("werner recipe requires dims {d, d}");
      return werner(dims[0], param_or(*this, "f", 0.0));
    }
    case StateFamily::kIsotropic: {
      if (dims.size() != 2 || dims[0] != dims[1])
        throw NotBipartite("isotropic recipe requires dims {d, d}");
      return isotropic(dims[0], param_or(*this, "F", 0.0));
    }
    case StateFamily::kPhi1Noisy:
    case StateFamily::kPhi2Noisy: {
      const int kind = (family == StateFamily::kPhi1Noisy) ? 1 : 2;
      const double p = has_param(*this, "p") ? params.at("p") : rng.uniform();
      return phi_family(kind, phi_coeffs(*this, kind, rng), p);
    }
    case StateFamily::kPureNoisy: {
      const double p = has_param(*this, "p") ? params.at("p") : rng.uniform();
      return pure_noisy(dims, p, rng);
    }
    case StateFamily::kSeparableMix:
      return separable_mix(dims, static_cast<int>(param_or(*this, "k", 10)), rng);
    case StateFamily::kLocalUnitaryOrbit: {
      if (!base) throw SchemaMismatch("local_unitary_orbit recipe needs a base recipe");
      return apply_local_unitaries(base->realize(), rng);
    }
    case StateFamily::kAmplitudeDamped: {
      if (!base) throw SchemaMismatch("amplitude_damped recipe needs a base recipe");
      return amplitude_damp_qutrit(base->realize(), param_or(*this, "r", 0.0),
                                   param_or(*this, "both", 1.0) != 0.0);
    }
  }
  throw ParamOutOfRange("unknown state family");
}

void to_json(nlohmann::json& j, const StateRecipe& r) {
  j = nlohmann::json{{"family", to_string(r.family)},
                     {"dims", r.dims},
                     {"params", r.params},
                     {"seed", r.seed}};
  if (r.base) j["base"] = *r.base;
}

void from_json(const nlohmann::json& j, StateRecipe& r) {
  r.family = state_family_from_string(j.at("family").get<std::string>());
  r.dims = j.at("dims").get<std::vector<int>>();
  r.params = j.value("params", std::map<std::string, double>{});
  r.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("base")) {
    r.base = std::make_shared<StateRecipe>();
    from_json(j.at("base"), *r.base);
  }
}

}  // namespace qre
