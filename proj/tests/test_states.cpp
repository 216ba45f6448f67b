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

#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "qre/qcore.hpp"

using namespace qre;

TEST_SUITE("states") {

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  bool any_diff = false;
  Rng a2(42);
  for (int i = 0; i < 16; ++i) any_diff |= (a2.next_u64() != c.next_u64());
  CHECK(any_diff);

  Rng s0 = Rng::stream(7, 0);
  Rng s1 = Rng::stream(7, 1);
  CHECK(s0.next_u64() != s1.next_u64());

  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    double x = u.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("random_pure is normalized, deterministic, Haar on average") {
  PureState s1 = random_pure(2, 99);
  PureState s2 = random_pure(2, 99);
  CHECK((s1.amps() - s2.amps()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(s1.amps().squaredNorm() - 1.0) <= 1e-12);

  // Haar moment: E|<0|psi>|^2 = 1/2 for d = 2.
  Rng rng(123);
  double acc = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) acc += std::norm(random_pure({2}, rng).amps()[0]);
  CHECK(std::abs(acc / n - 0.5) < 0.02);
}

TEST_CASE("haar_unitary is unitary and deterministic") {
  Rng rng(5);
  CMat u = haar_unitary(4, rng);
  CHECK((u.adjoint() * u - CMat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  Rng rng2(5);
  CMat v = haar_unitary(4, rng2);
  CHECK((u - v).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simplex_uniform lies on the simplex") {
  Rng rng(6);
  for (int k : {1, 2, 8}) {
    RVec w = simplex_uniform(k, rng);
    CHECK(w.minCoeff() >= 0.0);
    CHECK(std::abs(w.sum() - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(simplex_uniform(0, rng), ParamOutOfRange);
}

TEST_CASE("random_mixed spans purity between pure and maximally mixed") {
  DensityMatrix pure = random_mixed(4, 1, 7);
  CHECK(trace_power(pure, 2) == doctest::Approx(1.0).epsilon(1e-10));

  Rng rng(8);
  DensityMatrix rho = random_mixed({4}, 8, rng);
  HermEig eig = herm_eig(rho.mat());
  CHECK(eig.eigenvalues.minCoeff() >= -1e-12);

  double mean_purity = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) mean_purity += trace_power(random_mixed({4}, 8, rng), 2);
  mean_purity /= n;
  CHECK(mean_purity > 0.25);
  CHECK(mean_purity < 1.0);
}

TEST_CASE("random_diagonal is incoherent") {
  DensityMatrix rho = random_diagonal(6, 9);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) CHECK(std::abs(rho.mat()(i, j)) == 0.0);
}

TEST_CASE("pure_diag_mix produces valid states across seeds") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    DensityMatrix rho = pure_diag_mix(4, seed);
    CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-12);
    double purity = trace_power(rho, 2);
    CHECK(purity > 0.0);
    CHECK(purity <= 1.0 + 1e-12);
  }
}

TEST_CASE("werner states have the advertised swap expectation") {
  for (int d : {2, 3}) {
    for (double f : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
      DensityMatrix rho = werner(d, f);
      CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-12);
      CMat swap = CMat::Zero(d * d, d * d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0;
      CHECK(std::abs((rho.mat() * swap).trace().real() - f) < 1e-12);
    }
  }
  // d=2, f=1 is the symmetric projector over 3.
  HermEig eig = herm_eig(werner(2, 1.0).mat());
  CHECK(eig.eigenvalues[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(eig.eigenvalues[3] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(werner(3, 1.5), ParamOutOfRange);
}

TEST_CASE("isotropic states have fidelity F with the maximally entangled state") {
  DensityMatrix flat = isotropic(3, 1.0 / 9.0);
  CHECK((flat.mat() - CMat::Identity(9, 9) / 9.0).cwiseAbs().maxCoeff() < 1e-14);

  DensityMatrix pure = isotropic(3, 1.0);
  CHECK(trace_power(pure, 2) == doctest::Approx(1.0).epsilon(1e-12));

  CVec psi = CVec::Zero(9);
  for (int i = 0; i < 3; ++i) psi[i * 3 + i] = 1.0 / std::sqrt(3.0);
  DensityMatrix mid = isotropic(3, 0.6);
  CHECK(std::abs((psi.adjoint() * mid.mat() * psi)(0, 0).real() - 0.6) < 1e-12);
  CHECK_THROWS_AS(isotropic(3, -0.1), ParamOutOfRange);
}

TEST_CASE("phi families hit their product-state endpoints") {
  DensityMatrix p00 = phi_family(2, {1, 0, 0}, 1.0);
  CMat expect = CMat::Zero(9, 9);
  expect(0, 0) = 1.0;
  CHECK((p00.mat() - expect).cwiseAbs().maxCoeff() < 1e-14);

  // alpha = 0 in the symmetric section of kind 2: |22>.
  const double alpha = 0.0;
  DensityMatrix p22 = phi_family(
      2, {std::sin(alpha) * std::sqrt(2.0) / 2.0, std::sin(alpha) * std::sqrt(2.0) / 2.0,
          std::cos(alpha)},
      1.0);
  CHECK(std::abs(p22.mat()(8, 8).real() - 1.0) < 1e-14);

  DensityMatrix noise = phi_family(1, {1, 1, 1, 1, 1, 1}, 0.0);
  CHECK((noise.mat() - CMat::Identity(9, 9) / 9.0).cwiseAbs().maxCoeff() < 1e-14);

  // Fig-style symmetric coefficients normalize exactly.
  const double a = 0.7;
  const double bij = std::cos(a) / std::sqrt(6.0), bi = std::sin(a) / std::sqrt(3.0);
  DensityMatrix sym = phi_family(1, {bij, bij, bij, bi, bi, bi}, 1.0);
  CHECK(trace_power(sym, 2) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(phi_family(2, {0, 0, 0}, 1.0), ParamOutOfRange);
  CHECK_THROWS_AS(phi_family(3, {1, 0, 0}, 1.0), ParamOutOfRange);
}

TEST_CASE("local unitary orbits preserve spectra and reduced purity") {
  Rng rng(17);
  DensityMatrix rho = random_mixed({3, 3}, 4, rng);
  DensityMatrix orbit = apply_local_unitaries(rho, rng);
  HermEig before = herm_eig(rho.mat());
  HermEig after = herm_eig(orbit.mat());
  CHECK((before.eigenvalues - after.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  double pa = trace_power(partial_trace(rho, {0}), 2);
  double pb = trace_power(partial_trace(orbit, {0}), 2);
  CHECK(std::abs(pa - pb) < 1e-10);
}

TEST_CASE("qutrit amplitude damping endpoints") {
  Rng rng(18);
  DensityMatrix rho = random_mixed({3, 3}, 3, rng);
  DensityMatrix same = amplitude_damp_qutrit(rho, 0.0, true);
  CHECK((same.mat() - rho.mat()).cwiseAbs().maxCoeff() < 1e-12);

  CVec me = CVec::Zero(9);
  for (int i = 0; i < 3; ++i) me[i * 3 + i] = 1.0 / std::sqrt(3.0);
  DensityMatrix psi_plus = PureState(me, {3, 3}).to_density();
  DensityMatrix damped = amplitude_damp_qutrit(psi_plus, 1.0, true);
  CMat expect = CMat::Zero(9, 9);
  expect(0, 0) = 1.0;
  CHECK((damped.mat() - expect).cwiseAbs().maxCoeff() < 1e-12);

  // One-sided full damping empties populations outside |0> on side A only.
  DensityMatrix one_side = amplitude_damp_qutrit(psi_plus, 1.0, false);
  DensityMatrix red_a = partial_trace(one_side, {0});
  CHECK(std::abs(red_a.mat()(0, 0).real() - 1.0) < 1e-12);

  CHECK_THROWS_AS(amplitude_damp_qutrit(rho, 1.5, true), ParamOutOfRange);
  DensityMatrix qubit(CMat::Identity(4, 4) / 4.0, {2, 2});
  CHECK_THROWS_AS(amplitude_damp_qutrit(qubit, 0.5, true), InvalidSubsystem);
}

TEST_CASE("printed damping operators without the correction are rejected") {
  // E0 keeping |2><2| at weight 1 while E2 adds sqrt(r)|0><2| breaks
  // sum E^dag E = I for r > 0; the channel constructor must notice.
  const double r = 0.3;
  CMat e0 = CMat::Zero(3, 3), e1 = CMat::Zero(3, 3), e2 = CMat::Zero(3, 3);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(1.0 - r);
  e0(2, 2) = 1.0;
  e1(0, 1) = std::sqrt(r);
  e2(0, 2) = std::sqrt(r);
  CHECK_THROWS_AS(KrausChannel({e0, e1, e2}), ParamOutOfRange);
}

TEST_CASE("separable construction is PPT and factorizes at k = 1") {
  Rng rng(19);
  DensityMatrix prod = random_separable({3, 3}, 1, rng);
  CHECK(trace_power(prod, 2) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(trace_power(partial_trace(prod, {0}), 2) == doctest::Approx(1.0).epsilon(1e-10));

  for (int rep = 0; rep < 10; ++rep) {
    DensityMatrix sep = random_separable({3, 3}, 10, rng);
    HermEig eig = herm_eig(partial_transpose(sep, {1}));
    CHECK(eig.eigenvalues.minCoeff() >= -1e-12);
  }

  DensityMatrix mix = separable_mix({3, 3}, 10, rng);
  CHECK(std::abs(mix.mat().trace().real() - 1.0) < 1e-12);
}

TEST_CASE("recipes reproduce bit-for-bit and round-trip through JSON") {
  StateRecipe recipe;
  recipe.family = StateFamily::kConvexMixture;
  recipe.dims = {2, 2};
  recipe.params = {{"k", 8}};
  recipe.seed = 20260213;

  DensityMatrix a = recipe.realize();
  DensityMatrix b = recipe.realize();
  CHECK((a.mat() - b.mat()).cwiseAbs().maxCoeff() == 0.0);

  nlohmann::json j = recipe;
  StateRecipe back = j.get<StateRecipe>();
  DensityMatrix c = back.realize();
  CHECK((a.mat() - c.mat()).cwiseAbs().maxCoeff() == 0.0);

  // Wrapper recipe with a base.
  StateRecipe orbit;
  orbit.family = StateFamily::kLocalUnitaryOrbit;
  orbit.dims = {3, 3};
  orbit.seed = 5;
  orbit.base = std::make_shared<StateRecipe>();
  orbit.base->family = StateFamily::kWerner;
  orbit.base->dims = {3, 3};
  orbit.base->params = {{"f", -0.5}};

  DensityMatrix o1 = orbit.realize();
  nlohmann::json jo = orbit;
  DensityMatrix o2 = jo.get<StateRecipe>().realize();
  CHECK((o1.mat() - o2.mat()).cwiseAbs().maxCoeff() == 0.0);
  HermEig spec_orbit = herm_eig(o1.mat());
  HermEig spec_base = herm_eig(werner(3, -0.5).mat());
  CHECK((spec_orbit.eigenvalues - spec_base.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("every recipe family yields a valid density matrix") {
  auto base = std::make_shared<StateRecipe>();
  base->family = StateFamily::kIsotropic;
  base->dims = {3, 3};
  base->params = {{"F", 0.8}};

  std::vector<StateRecipe> recipes;
  for (StateFamily fam :
       {StateFamily::kHaarPure, StateFamily::kConvexMixture, StateFamily::kDiagonal,
        StateFamily::kPureDiagMix, StateFamily::kPhi1Noisy, StateFamily::kPhi2Noisy,
        StateFamily::kPureNoisy, StateFamily::kSeparableMix}) {
    StateRecipe r;
    r.family = fam;
    r.dims = {3, 3};
    r.params = {{"k", 4}};
    r.seed = 100 + static_cast<std::uint64_t>(fam);
    recipes.push_back(r);
  }
  StateRecipe wrapped;
  wrapped.family = StateFamily::kAmplitudeDamped;
  wrapped.dims = {3, 3};
  wrapped.params = {{"r", 0.4}, {"both", 1}};
  wrapped.seed = 3;
  wrapped.base = base;
  recipes.push_back(wrapped);

  for (const StateRecipe& r : recipes) {
    DensityMatrix rho = r.realize();  // constructor enforces the invariants
    CHECK(rho.dims() == std::vector<int>{3, 3});
    CHECK(std::abs(rho.mat().trace().real() - 1.0) < 1e-12);
  }
}

}  // TEST_SUITE
