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

#ifndef QRE_SVM_HPP
#define QRE_SVM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qre/qcore.hpp"

namespace qre {

// Kernel family. The RBF kernel is exp(-|x - x'|^2 / (2 tau^2)).
struct KernelSpec {
  enum class Kind { kRbf, kLinear, kPolynomial };

  Kind kind = Kind::kRbf;
  double tau = 1.0;    // RBF bandwidth, > 0
  int degree = 2;      // polynomial degree, >= 1
  double offset = 1.0; // polynomial additive offset

  void validate() const;
};

double kernel_value(const KernelSpec& k, const RVec& a, const RVec& b);

// Hyperparameters shared by both trainers. SVR uses (c, epsilon); SVQR uses
// (c, delta) with an implicit epsilon of zero. tol is the KKT-violation
// stopping threshold of the dual solver, max_passes its iteration cap.
struct TrainConfig {
  double c = 1.0;
  double epsilon = 0.1;
  double delta = 0.02;
  KernelSpec kernel;
  double tol = 1e-3;
  long max_passes = 20'000'000;

  void validate() const;
};

// Per-feature affine standardization fitted on training data. Features with
// zero variance keep a standard deviation of 1 so they pass through shifted
// but unscaled.
struct Scaler {
  RVec mean;
  RVec stddev;

  static Scaler fit(const RMat& x);
  RVec transform(const RVec& x) const;
  RMat transform(const RMat& x) const;
  RVec inverse(const RVec& x) const;
};

enum class ModelKind { kSvr, kSvqr };

// A trained kernel regressor f(x) = sum_i beta_i K(sv_i, s(x)) + b where s
// is the stored scaler and sv_i are the retained (already standardized)
// support vectors. beta_i = alpha_i - alpha_i^* from the dual.
struct SvrModel {
  ModelKind kind = ModelKind::kSvr;
  KernelSpec kernel;
  Scaler scaler;
  RMat support_x; // one standardized support vector per row
  RVec beta;
  double bias = 0.0;
  TrainConfig config;
  bool converged = true;
  long iterations = 0;
  double dual_objective = 0.0;
  std::string schema_id;  // set by the pipeline when features have a schema
  std::string train_hash; // hash of the dataset the model was fitted on

  int num_features() const { return static_cast<int>(scaler.mean.size()); }
};

// Dual solvers (two-coordinate ascent with maximal-violating-pair working
// set selection). On hitting max_passes the best iterate is returned with
// converged = false rather than throwing, so long runs stay inspectable.
SvrModel train_svr(const RMat& x, const RVec& y, const TrainConfig& cfg);
SvrModel train_svqr(const RMat& x, const RVec& y, const TrainConfig& cfg);

double predict(const SvrModel& model, const RVec& x);
RVec predict(const SvrModel& model, const RMat& x);

// Exhaustive grid over (c, epsilon, tau) for SVR or (c, tau) for SVQR with
// delta held fixed. Combinations are visited with c ascending, epsilon
// descending and tau ascending so that the strict arg-min tie-breaks toward
// smaller c, then larger epsilon.
struct SearchGrid {
  std::vector<double> cs{0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<double> epsilons{0.001, 0.01, 0.05, 0.1};
  std::vector<double> taus{0.1, 0.5, 1.0, 2.0, 5.0};
  double delta = 0.02;
};

struct GridPoint {
  TrainConfig config;
  double cv_mse = 0.0;
};

struct GridSearchResult {
  TrainConfig best;
  std::vector<GridPoint> table;
};

GridSearchResult grid_search(ModelKind kind, const RMat& x, const RVec& y,
                             const SearchGrid& grid, int folds, std::uint64_t seed);

// MSE, MAPE, coefficient of determination and overestimation fraction.
// MAPE is absent whenever any true label is exactly zero.
struct EvalReport {
  double mse = 0.0;
  std::optional<double> mape;
  double r2 = 0.0;
  double p_over = 0.0;
  long n = 0;
};

EvalReport evaluate(const RVec& y_true, const RVec& y_pred);

void to_json(nlohmann::json& j, const KernelSpec& k);
void from_json(const nlohmann::json& j, KernelSpec& k);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const Scaler& s);
void from_json(const nlohmann::json& j, Scaler& s);
void to_json(nlohmann::json& j, const SvrModel& m);
void from_json(const nlohmann::json& j, SvrModel& m);
void to_json(nlohmann::json& j, const EvalReport& r);
void from_json(const nlohmann::json& j, EvalReport& r);

void save_model(const SvrModel& model, const std::string& path);
SvrModel load_model(const std::string& path);

}  // namespace qre

#endif  // QRE_SVM_HPP
