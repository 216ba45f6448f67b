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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "doctest.h"
#include "qre/errors.hpp"
#include "qre/svm.hpp"

namespace qre {
namespace {

// Independent dense-QP oracle: accelerated projected gradient on the same
// dual program min 0.5 theta'Q theta + p'theta over the box intersected
// with the balance hyperplane. Projection onto that set is computed exactly
// by bisection on the hyperplane multiplier.
RVec project_box_plane(const RVec& z, const RVec& ub, const RVec& s) {
  auto clipped = [&](double nu) {
    RVec t(z.size());
    for (int i = 0; i < z.size(); ++i)
      t[i] = std::clamp(z[i] - nu * s[i], 0.0, ub[i]);
    return t;
  };
  double lo = -(z.cwiseAbs().maxCoeff() + ub.maxCoeff() + 1.0);
  double hi = -lo;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (s.dot(clipped(mid)) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return clipped(0.5 * (lo + hi));
}

double qp_oracle_objective(const RMat& k, const RVec& y, double eps, double up_a,
                           double up_as) {
  const int n = static_cast<int>(y.size());
  RMat q(2 * n, 2 * n);
  q.topLeftCorner(n, n) = k;
  q.topRightCorner(n, n) = -k;
  q.bottomLeftCorner(n, n) = -k;
  q.bottomRightCorner(n, n) = k;
  RVec p(2 * n);
  p.head(n) = RVec::Constant(n, eps) - y;
  p.tail(n) = RVec::Constant(n, eps) + y;
  RVec ub(2 * n);
  ub.head(n).setConstant(up_a);
  ub.tail(n).setConstant(up_as);
  RVec s(2 * n);
  s.head(n).setConstant(1.0);
  s.tail(n).setConstant(-1.0);

  Eigen::SelfAdjointEigenSolver<RMat> es(q);
  const double step = 1.0 / (es.eigenvalues().maxCoeff() * 1.02 + 1e-12);
  auto objective = [&](const RVec& t) { return 0.5 * t.dot(q * t) + p.dot(t); };

  RVec theta = RVec::Zero(2 * n), v = theta;
  double t_mom = 1.0;
  double last = objective(theta);
  double window_best = last;
  for (long iter = 0; iter < 400000; ++iter) {
    RVec next = project_box_plane(v - step * (q * v + p), ub, s);
    const double obj = objective(next);
    if (obj > last) { // adaptive restart of the momentum sequence
      v = theta;
      t_mom = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    v = next + ((t_mom - 1.0) / t_next) * (next - theta);
    theta = next;
    t_mom = t_next;
    last = obj;
    if (iter % 2000 == 1999) {
      if (window_best - obj < 1e-14 * (1.0 + std::abs(obj))) break;
      window_best = obj;
    }
  }
  return objective(theta);
}

RMat random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gauss(gen);
  return m;
}

TEST_SUITE("svm") {

TEST_CASE("scaler round trip and zero-variance handling") {
  std::mt19937_64 gen(1);
  RMat x = random_matrix(40, 5, gen);
  x.col(3).setConstant(2.5); // zero variance
  Scaler sc = Scaler::fit(x);
  CHECK(sc.stddev[3] == 1.0);
  for (int r = 0; r < 6; ++r) {
    RVec v = x.row(r);
    CHECK((sc.inverse(sc.transform(v)) - v).cwiseAbs().maxCoeff() <= 1e-12);
  }
  RMat xs = sc.transform(x);
  for (int j = 0; j < 5; ++j) {
    CHECK(std::abs(xs.col(j).mean()) <= 1e-12);
    if (j != 3) CHECK(std::abs(xs.col(j).squaredNorm() / 40.0 - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(sc.transform(RVec(RVec::Zero(4))), SchemaMismatch);
}

TEST_CASE("constant labels give an all-bias svr model") {
  std::mt19937_64 gen(2);
  RMat x = random_matrix(30, 3, gen);
  RVec y = RVec::Constant(30, 0.7);
  TrainConfig cfg;
  cfg.c = 1000.0;
  cfg.epsilon = 0.05;
  SvrModel m = train_svr(x, y, cfg);
  CHECK(m.beta.size() == 0);
  CHECK(m.bias == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(predict(m, RVec(x.row(4))) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("three collinear points fit with a linear kernel") {
  RMat x(3, 1);
  x << 0.0, 1.0, 2.0;
  RVec y(3);
  y << 0.0, 1.0, 2.0;
  TrainConfig cfg;
  cfg.c = 1e3;
  cfg.epsilon = 1e-3;
  cfg.kernel.kind = KernelSpec::Kind::kLinear;
  cfg.tol = 1e-6;
  SvrModel m = train_svr(x, y, cfg);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(predict(m, RVec(x.row(i))) - y[i]) <= 2e-3);
}

TEST_CASE("smo matches the dense projected-gradient oracle") {
  struct Case {
    ModelKind kind;
    int n, d;
    double c, eps, delta;
    KernelSpec kernel;
  };
  std::vector<Case> cases;
  KernelSpec rbf1{KernelSpec::Kind::kRbf, 1.0, 2, 1.0};
  KernelSpec rbf07{KernelSpec::Kind::kRbf, 0.7, 2, 1.0};
  KernelSpec rbf13{KernelSpec::Kind::kRbf, 1.3, 2, 1.0};
  KernelSpec lin{KernelSpec::Kind::kLinear, 1.0, 2, 1.0};
  cases.push_back({ModelKind::kSvr, 12, 2, 2.0, 0.05, 0.5, lin});
  cases.push_back({ModelKind::kSvr, 30, 3, 5.0, 0.01, 0.5, rbf1});
  cases.push_back({ModelKind::kSvr, 40, 4, 1.0, 0.1, 0.5, rbf07});
  cases.push_back({ModelKind::kSvqr, 25, 2, 2.0, 0.0, 0.5, rbf1});
  cases.push_back({ModelKind::kSvqr, 40, 3, 5.0, 0.0, 0.02, rbf13});
  cases.push_back({ModelKind::kSvqr, 16, 2, 1.0, 0.0, 0.9, lin});

  std::mt19937_64 gen(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const auto& tc : cases) {
    CAPTURE(tc.n);
    RMat x = random_matrix(tc.n, tc.d, gen);
    RVec y(tc.n);
    for (int i = 0; i < tc.n; ++i) y[i] = std::sin(x.row(i).sum()) + 0.1 * gauss(gen);

    TrainConfig cfg;
    cfg.c = tc.c;
    cfg.epsilon = tc.eps;
    cfg.delta = tc.delta;
    cfg.kernel = tc.kernel;
    cfg.tol = 1e-8;
    SvrModel m = tc.kind == ModelKind::kSvr ? train_svr(x, y, cfg) : train_svqr(x, y, cfg);
    REQUIRE(m.converged);

    Scaler sc = Scaler::fit(x);
    RMat xs = sc.transform(x);
    RMat k(tc.n, tc.n);
    for (int i = 0; i < tc.n; ++i)
      for (int j = 0; j < tc.n; ++j)
        k(i, j) = kernel_value(tc.kernel, xs.row(i), xs.row(j));
    const double eps = tc.kind == ModelKind::kSvr ? tc.eps : 0.0;
    const double up_a = tc.kind == ModelKind::kSvr ? tc.c : tc.c * tc.delta;
    const double up_as = tc.kind == ModelKind::kSvr ? tc.c : tc.c * (1.0 - tc.delta);
    const double oracle = qp_oracle_objective(k, y, eps, up_a, up_as);
    CHECK(std::abs(m.dual_objective - oracle) <= 1e-6 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("trained svr satisfies the epsilon-kkt conditions") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 200;
  RMat x(n, 1);
  RVec y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 2.0 * M_PI * i / n;
    y[i] = std::sin(x(i, 0)) + 0.1 * gauss(gen);
  }
  TrainConfig cfg;
  cfg.c = 10.0;
  cfg.epsilon = 0.05;
  cfg.kernel.tau = 0.5;
  cfg.tol = 1e-4;
  SvrModel m = train_svr(x, y, cfg);
  REQUIRE(m.converged);

  // Dual feasibility invariants.
  CHECK(std::abs(m.beta.sum()) <= 1e-6 * cfg.c);
  CHECK(m.beta.cwiseAbs().maxCoeff() <= cfg.c + 1e-9);

  // Track beta per original sample index (zeros were dropped from the model).
  RVec f = predict(m, x);
  const double slack = 10.0 * cfg.tol;
  int sv = 0;
  for (int i = 0; i < n; ++i) {
    // Recover this sample's beta by matching against the stored (scaled) rows.
    RVec xs = m.scaler.transform(RVec(x.row(i)));
    double beta = 0.0;
    for (int j = 0; j < m.support_x.rows(); ++j)
      if ((m.support_x.row(j).transpose() - xs).cwiseAbs().maxCoeff() == 0.0) {
        beta = m.beta[j];
        ++sv;
        break;
      }
    const double r = f[i] - y[i];
    if (beta == 0.0) {
      CHECK(std::abs(r) <= cfg.epsilon + slack);
    } else if (std::abs(beta) < cfg.c - 1e-9) {
      CHECK(std::abs(std::abs(r) - cfg.epsilon) <= slack);
    } else {
      CHECK(std::abs(r) >= cfg.epsilon - slack);
    }
  }
  CHECK(sv == m.beta.size());

  // Train MSE is bounded by twice the injected noise variance.
  const double mse = (f - y).squaredNorm() / n;
  CHECK(mse <= 2.0 * 0.01);

  // Training is deterministic.
  SvrModel m2 = train_svr(x, y, cfg);
  CHECK(m2.bias == m.bias);
  CHECK(m2.beta.size() == m.beta.size());
  CHECK((m2.beta - m.beta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("svqr at the median is antisymmetric and exact on constants") {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = 80;
  RMat x = random_matrix(n, 2, gen);
  RVec y(n);
  for (int i = 0; i < n; ++i) y[i] = std::cos(x.row(i).sum()) + 0.2 * gauss(gen);

  TrainConfig cfg;
  cfg.c = 5.0;
  cfg.delta = 0.5;
  cfg.kernel.tau = 1.0;
  cfg.tol = 1e-8;
  SvrModel plus = train_svqr(x, y, cfg);
  SvrModel minus = train_svqr(x, RVec(-y), cfg);
  RMat probe = random_matrix(20, 2, gen);
  for (int i = 0; i < 20; ++i) {
    RVec v = probe.row(i);
    CHECK(std::abs(predict(plus, v) + predict(minus, v)) <= 1e-7);
  }

  // SVQR box bounds are asymmetric in general.
  TrainConfig small = cfg;
  small.delta = 0.02;
  SvrModel conservative = train_svqr(x, y, small);
  CHECK(conservative.beta.maxCoeff() <= small.c * small.delta + 1e-9);
  CHECK(conservative.beta.minCoeff() >= -small.c * (1.0 - small.delta) - 1e-9);

  RVec yc = RVec::Constant(n, 0.3);
  SvrModel flat = train_svqr(x, yc, cfg);
  CHECK(flat.bias == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(flat.beta.size() == 0);
}

TEST_CASE("svqr with small delta stays conservative and below the median fit") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 500;
  RMat x(n, 1);
  RVec y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = 4.0 * i / n;
    y[i] = x(i, 0) + unif(gen);
  }
  TrainConfig cfg;
  cfg.c = 10.0;
  cfg.delta = 0.02;
  cfg.kernel.tau = 1.0;
  SvrModel low = train_svqr(x, y, cfg);
  RVec f = predict(low, x);
  int over = 0;
  for (int i = 0; i < n; ++i)
    if (f[i] > y[i]) ++over;
  CHECK(static_cast<double>(over) / n <= 0.06);

  TrainConfig med = cfg;
  med.delta = 0.5;
  SvrModel mid = train_svqr(x, y, med);
  RVec fm = predict(mid, x);
  CHECK((f - fm).maxCoeff() <= 0.02); // quantile ordering on the benchmark
}

TEST_CASE("predict validates schema and maps over batches") {
  std::mt19937_64 gen(8);
  RMat x = random_matrix(25, 3, gen);
  RVec y = x.col(0);
  TrainConfig cfg;
  cfg.kernel.tau = 1.5;
  SvrModel m = train_svr(x, y, cfg);
  CHECK_THROWS_AS(predict(m, RVec(RVec::Zero(2))), SchemaMismatch);
  RVec batch = predict(m, x);
  for (int i = 0; i < x.rows(); ++i) CHECK(batch[i] == predict(m, RVec(x.row(i))));
}

TEST_CASE("grid search picks the data-generating bandwidth") {
  const int n = 60;
  RMat x(n, 1);
  RVec y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = -2.0 + 4.0 * i / (n - 1);
    y[i] = std::exp(-x(i, 0) * x(i, 0) / (2.0 * 0.25));
  }
  SearchGrid grid;
  grid.cs = {10.0};
  grid.epsilons = {0.01};
  grid.taus = {0.5, 5.0};
  GridSearchResult res = grid_search(ModelKind::kSvr, x, y, grid, 3, 11);
  REQUIRE(res.table.size() == 2);
  CHECK(res.table[0].config.kernel.tau == 0.5);
  CHECK(res.table[0].cv_mse <= res.table[1].cv_mse);
  CHECK(res.best.kernel.tau == 0.5);

  GridSearchResult again = grid_search(ModelKind::kSvr, x, y, grid, 3, 11);
  for (size_t i = 0; i < res.table.size(); ++i)
    CHECK(again.table[i].cv_mse == res.table[i].cv_mse);

  SearchGrid single;
  single.cs = {3.0};
  single.epsilons = {0.02};
  single.taus = {1.25};
  GridSearchResult one = grid_search(ModelKind::kSvr, x, y, single, 2, 1);
  CHECK(one.best.c == 3.0);
  CHECK(one.best.epsilon == 0.02);
  CHECK(one.best.kernel.tau == 1.25);

  CHECK_THROWS_AS(grid_search(ModelKind::kSvr, x, y, grid, 1, 0), ParamOutOfRange);
}

TEST_CASE("evaluation metrics reproduce hand-computed values") {
  RVec y1(3), p1(3);
  y1 << 0.2, 0.5, 0.9;
  p1 = y1;
  EvalReport perfect = evaluate(y1, p1);
  CHECK(perfect.mse == 0.0);
  REQUIRE(perfect.mape.has_value());
  CHECK(*perfect.mape == 0.0);
  CHECK(perfect.r2 == 1.0);
  CHECK(perfect.p_over == 0.0);

  RVec y2(2), p2(2);
  y2 << 1.0, 3.0;
  p2 << 2.0, 2.0;
  EvalReport r2 = evaluate(y2, p2);
  CHECK(r2.mse == doctest::Approx(1.0));
  CHECK(r2.r2 == doctest::Approx(0.0));
  CHECK(r2.p_over == doctest::Approx(0.5));

  RVec y3(1), p3(1);
  y3 << 2.0;
  p3 << 1.0;
  REQUIRE(evaluate(y3, p3).mape.has_value());
  CHECK(*evaluate(y3, p3).mape == doctest::Approx(0.5));

  RVec y4(2), p4(2);
  y4 << 0.0, 1.0;
  p4 << 0.1, 0.9;
  CHECK_FALSE(evaluate(y4, p4).mape.has_value());

  CHECK_THROWS_AS(evaluate(y1, p2), DimensionMismatch);
}

TEST_CASE("model json round trip is bit exact") {
  std::mt19937_64 gen(12);
  RMat x = random_matrix(40, 4, gen);
  RVec y(40);
  for (int i = 0; i < 40; ++i) y[i] = std::tanh(x.row(i).sum());
  TrainConfig cfg;
  cfg.c = 7.0;
  cfg.epsilon = 0.02;
  cfg.kernel.tau = 1.1;
  SvrModel m = train_svr(x, y, cfg);
  m.schema_id = "coherence_z_n2";
  m.train_hash = "deadbeef";

  const std::string path = (std::filesystem::temp_directory_path() / "qre_model.json").string();
  save_model(m, path);
  SvrModel loaded = load_model(path);
  CHECK(nlohmann::json(m).dump() == nlohmann::json(loaded).dump());
  RMat probe = random_matrix(10, 4, gen);
  for (int i = 0; i < 10; ++i) {
    RVec v = probe.row(i);
    CHECK(predict(m, v) == predict(loaded, v));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), MissingArtifacts);
}

TEST_CASE("iteration cap returns a flagged model instead of throwing") {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RMat x = random_matrix(100, 3, gen);
  RVec y(100);
  for (int i = 0; i < 100; ++i) y[i] = std::sin(2.0 * x.row(i).sum()) + 0.3 * gauss(gen);
  TrainConfig cfg;
  cfg.c = 100.0;
  cfg.epsilon = 0.001;
  cfg.max_passes = 3;
  SvrModel m = train_svr(x, y, cfg);
  CHECK_FALSE(m.converged);
  CHECK(m.iterations == 3);
  (void)predict(m, RVec(x.row(0))); // still usable
}

TEST_CASE("configuration validation") {
  TrainConfig cfg;
  cfg.c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
  cfg.c = 1.0;
  cfg.epsilon = -0.2;
  CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
  cfg.epsilon = 0.1;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
  cfg.delta = 0.02;
  cfg.kernel.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
  cfg.kernel.tau = 1.0;
  cfg.kernel.kind = KernelSpec::Kind::kPolynomial;
  cfg.kernel.degree = 0;
  CHECK_THROWS_AS(cfg.validate(), ParamOutOfRange);
  cfg.kernel.degree = 3;
  CHECK_NOTHROW(cfg.validate());

  RMat x(1, 1);
  RVec y(1);
  CHECK_THROWS_AS(train_svr(x, y, TrainConfig{}), ParamOutOfRange);
  RMat x2(3, 1);
  RVec y3(2);
  CHECK_THROWS_AS(train_svr(x2, y3, TrainConfig{}), DimensionMismatch);
}

}  // TEST_SUITE

}  // namespace
}  // namespace qre
