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

#include "qre/sdp.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "qre/states.hpp"
#include "test_util.hpp"

using namespace qre;

namespace {

// Every Optimal solve must come back with certified residuals and PSD
// iterates; tests funnel solutions through here.
void check_optimal(const SdpSolution& sol, double tol = 1e-7) {
  REQUIRE(sol.status == SdpStatus::kOptimal);
  CHECK(sol.gap <= tol);
  CHECK(sol.primal_residual <= tol);
  CHECK(sol.dual_residual <= tol);
  for (const RMat& x : sol.primal) {
    Eigen::SelfAdjointEigenSolver<RMat> es(x, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -tol);
  }
  for (const RMat& z : sol.dual_slack) {
    Eigen::SelfAdjointEigenSolver<RMat> es(z, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -tol);
  }
}

}  // namespace

TEST_SUITE("sdp") {

TEST_CASE("realify embeds Hermitian matrices faithfully") {
  // Real symmetric input: two diagonal copies.
  CMat s(2, 2);
  s << 1, 2, 2, -1;
  RMat r = realify(s);
  CHECK(r.rows() == 4);
  CHECK((r.topLeftCorner(2, 2) - s.real()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.bottomRightCorner(2, 2) - s.real()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.topRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);

  // Skew part: eigenvalues match the complex original, doubled.
  CMat h(2, 2);
  h << 2.0, Complex(0, -1), Complex(0, 1), 0.5;
  RMat rh = realify(h);
  CHECK((rh - rh.transpose()).cwiseAbs().maxCoeff() == 0.0);
  Eigen::SelfAdjointEigenSolver<RMat> es(rh, Eigen::EigenvaluesOnly);
  HermEig ce = herm_eig(h);
  CHECK(es.eigenvalues()[0] == doctest::Approx(ce.eigenvalues[1]).epsilon(1e-12));
  CHECK(es.eigenvalues()[1] == doctest::Approx(ce.eigenvalues[1]).epsilon(1e-12));
  CHECK(es.eigenvalues()[2] == doctest::Approx(ce.eigenvalues[0]).epsilon(1e-12));
  CHECK(es.eigenvalues()[3] == doctest::Approx(ce.eigenvalues[0]).epsilon(1e-12));
  CHECK(rh.trace() == doctest::Approx(2.0 * h.trace().real()).epsilon(1e-14));

  CMat nh(2, 2);
  nh << 0, 1, 0, 0;
  CHECK_THROWS_AS(realify(nh), NotHermitian);

  // Round trip through the J-invariant average.
  std::mt19937_64 rng(31);
  CMat rand_h = testutil::random_hermitian(5, rng);
  CHECK((unrealify(realify(rand_h)) - rand_h).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("realified half functionals reproduce complex traces") {
  std::mt19937_64 rng(32);
  CMat h = testutil::random_hermitian(4, rng);
  CMat g = testutil::random_hermitian(4, rng);
  std::vector<std::tuple<int, int, Complex>> entries;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (std::abs(h(i, j)) > 0) entries.emplace_back(i, j, h(i, j));
  std::vector<BlockEntry> real_entries;
  append_realified_half(real_entries, 0, 4, entries);
  RMat rg = realify(g);
  double acc = 0.0;
  for (const BlockEntry& e : real_entries) acc += e.value * rg(e.row, e.col);
  CHECK(acc == doctest::Approx((h * g).trace().real()).epsilon(1e-12));
}

TEST_CASE("analytic one-block program: min Tr X with X11 pinned") {
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {RMat::Identity(2, 2)};
  SdpConstraint c;
  c.entries = {{0, 0, 0, 1.0}};
  c.b = 1.0;
  p.constraints.push_back(c);

  SdpSolution sol = solve_sdp(p);
  check_optimal(sol);
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal[0](0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(sol.primal[0](1, 1)) < 1e-5);
  CHECK(sol.y[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("analytic two-block program couples traces across blocks") {
  // min Tr(X1) s.t. Tr(X1) + Tr(X2) = 2, Tr(X2) = 1 -> optimum 1.
  SdpProblem p;
  p.block_dims = {2, 3};
  p.objective = {RMat::Identity(2, 2), RMat::Zero(3, 3)};
  SdpConstraint both;
  for (int i = 0; i < 2; ++i) both.entries.push_back({0, i, i, 1.0});
  for (int i = 0; i < 3; ++i) both.entries.push_back({1, i, i, 1.0});
  both.b = 2.0;
  SdpConstraint second;
  for (int i = 0; i < 3; ++i) second.entries.push_back({1, i, i, 1.0});
  second.b = 1.0;
  p.constraints = {both, second};

  SdpSolution sol = solve_sdp(p);
  check_optimal(sol);
  CHECK(sol.primal_objective == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.primal[0].trace() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(sol.primal[1].trace() == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("solver output is deterministic") {
  SdpProblem p;
  p.block_dims = {3};
  p.objective = {RMat::Identity(3, 3)};
  SdpConstraint c;
  c.entries = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
  c.b = 1.0;
  p.constraints.push_back(c);
  SdpSolution a = solve_sdp(p);
  SdpSolution b = solve_sdp(p);
  CHECK((a.primal[0] - b.primal[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_objective == b.primal_objective);
}

TEST_CASE("problem validation rejects malformed input") {
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {RMat::Identity(2, 2)};
  SdpConstraint c;
  c.entries = {{0, 0, 1, 1.0}};  // asymmetric: (0,1) without (1,0)
  c.b = 0.0;
  p.constraints.push_back(c);
  CHECK_THROWS_AS(solve_sdp(p), ParamOutOfRange);

  p.constraints[0].entries = {{0, 0, 5, 1.0}};
  CHECK_THROWS_AS(solve_sdp(p), DimensionMismatch);

  p.constraints[0].entries = {{0, 0, 0, 1.0}};
  p.objective = {RMat::Identity(3, 3)};
  CHECK_THROWS_AS(solve_sdp(p), DimensionMismatch);
}

TEST_CASE("fidelity program matches the Uhlmann oracle on random pairs") {
  std::mt19937_64 rng(33);
  for (int d : {2, 3, 4}) {
    for (int rep = 0; rep < 8; ++rep) {
      // Mix full-rank and rank-deficient operands; singular states exercise
      // the support reduction.
      const int ra = (rep % 2 == 0) ? d : std::max(1, d / 2);
      const int rb = (rep % 3 == 0) ? 1 : d;
      DensityMatrix rho = testutil::random_density({d}, ra, rng);
      DensityMatrix sigma = testutil::random_density({d}, rb, rng);
      const double sdp_val = max_fidelity_fixed(rho, sigma);
      const double oracle = fidelity_exact(rho, sigma);
      CHECK(std::abs(sdp_val - oracle) <= 1e-5);
    }
  }
}

TEST_CASE("fidelity program endpoints and symmetry") {
  std::mt19937_64 rng(34);
  DensityMatrix rho = testutil::random_density({4}, 4, rng);
  CHECK(max_fidelity_fixed(rho, rho) == doctest::Approx(1.0).epsilon(1e-6));

  CVec e0 = CVec::Zero(3), e1 = CVec::Zero(3);
  e0[0] = 1.0;
  e1[1] = 1.0;
  DensityMatrix r0 = PureState(e0).to_density();
  DensityMatrix r1 = PureState(e1).to_density();
  CHECK(max_fidelity_fixed(r0, r1) <= 1e-6);

  DensityMatrix sigma = testutil::random_density({4}, 2, rng);
  const double fwd = max_fidelity_fixed(rho, sigma);
  const double rev = max_fidelity_fixed(sigma, rho);
  CHECK(std::abs(fwd - rev) <= 2e-7);

  DensityMatrix other = testutil::random_density({3}, 3, rng);
  CHECK_THROWS_AS(max_fidelity_fixed(rho, other), DimensionMismatch);
}

TEST_CASE("incoherent fidelity: diagonal states are their own optimum") {
  Rng rng(35);
  DensityMatrix diag = random_diagonal({4}, rng);
  IncoherentFidelity res = max_fidelity_incoherent(diag);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-6));
  for (int i = 0; i < 4; ++i)
    CHECK(res.q[i] == doctest::Approx(diag.mat()(i, i).real()).epsilon(1e-4));
}

TEST_CASE("incoherent fidelity: plus state and random pure states") {
  // |+>: max_sigma F^2 = 1/2.
  CVec plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  IncoherentFidelity res = max_fidelity_incoherent(PureState(plus).to_density());
  CHECK(res.value * res.value == doctest::Approx(0.5).epsilon(1e-5));

  // Pure-state oracle: max_i |<i|psi>|^2.
  std::mt19937_64 rng(36);
  for (int rep = 0; rep < 6; ++rep) {
    PureState psi = testutil::random_pure({4}, rng);
    IncoherentFidelity r = max_fidelity_incoherent(psi.to_density());
    double want = 0.0;
    for (int i = 0; i < 4; ++i) want = std::max(want, std::norm(psi.amps()[i]));
    CHECK(std::abs(r.value * r.value - want) <= 1e-5);
  }
}

TEST_CASE("incoherent fidelity dominates the diagonal-sigma lower bound") {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 6; ++rep) {
    DensityMatrix rho = testutil::random_density({4}, (rep % 2) ? 4 : 2, rng);
    IncoherentFidelity res = max_fidelity_incoherent(rho);
    CHECK(res.q.minCoeff() >= 0.0);
    CHECK(res.q.sum() == doctest::Approx(1.0).epsilon(1e-12));

    CVec diag = rho.mat().diagonal();
    CMat sig = CMat::Zero(4, 4);
    for (int i = 0; i < 4; ++i) sig(i, i) = diag[i].real();
    DensityMatrix sigma(sig, {4});
    CHECK(res.value >= fidelity_exact(rho, sigma) - 1e-6);
  }
}

TEST_CASE("ppt fidelity: separable states sit at the boundary") {
  Rng rng(38);
  for (int rep = 0; rep < 3; ++rep) {
    DensityMatrix sep = random_separable({3, 3}, 8, rng);
    const double val = max_fidelity_ppt(sep, {{0}});
    CHECK(val >= 1.0 - 1e-4);
  }
  // The F = 1/d isotropic state is separable.
  const double iso = max_fidelity_ppt(isotropic(3, 1.0 / 3.0), {{0}});
  CHECK(iso >= 1.0 - 1e-4);
}

TEST_CASE("ppt fidelity reproduces the analytic Werner value") {
  // At f = -1 the two-qutrit Werner state has geometric entanglement 1/2,
  // and its PPT relaxation is known to be tight on this family.
  const double val = max_fidelity_ppt(werner(3, -1.0), {{0}});
  CHECK(std::abs((1.0 - val * val) - 0.5) <= 5e-3);
}

TEST_CASE("ppt fidelity decreases monotonically as bipartitions accumulate") {
  Rng rng(39);
  DensityMatrix rho = random_mixed({2, 2, 2}, 3, rng);
  const double one = max_fidelity_ppt(rho, {{0}});
  const double two = max_fidelity_ppt(rho, {{0}, {1}});
  const double three = max_fidelity_ppt(rho, {{0}, {1}, {2}});
  CHECK(two <= one + 1e-6);
  CHECK(three <= two + 1e-6);
  CHECK_THROWS_AS(max_fidelity_ppt(rho, {}), ParamOutOfRange);
  DensityMatrix single(CMat::Identity(4, 4) / 4.0, {4});
  CHECK_THROWS_AS(max_fidelity_ppt(single, {{0}}), NotBipartite);
}

TEST_CASE("debug dump emits a parseable problem description") {
  SdpProblem p;
  p.block_dims = {2};
  p.objective = {RMat::Identity(2, 2)};
  SdpConstraint c;
  c.entries = {{0, 0, 0, 1.0}};
  c.b = 1.0;
  p.constraints.push_back(c);

  nlohmann::json j = nlohmann::json::parse(dump_json(p));
  CHECK(j["blocks"] == std::vector<int>{2});
  CHECK(j["constraints"].size() == 1);
  CHECK(j["constraints"][0]["b"] == 1.0);
  CHECK(j["objective"][0].size() == 4);
}

}  // TEST_SUITE
