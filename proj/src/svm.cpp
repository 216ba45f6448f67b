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

#include "qre/svm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <list>
#include <unordered_map>

#include "qre/errors.hpp"
#include "qre/states.hpp"

namespace qre {
namespace {

// Caches kernel matrix rows (least-recently-used) so the dual solver only
// recomputes a row after eviction. The budget comfortably holds the full
// matrix for every dataset size used in this project.
class KernelCache {
 public:
  KernelCache(const RMat& xs, const KernelSpec& kernel, std::size_t budget_bytes)
      : xs_(xs), kernel_(kernel) {
    const std::size_t row_bytes = static_cast<std::size_t>(xs.rows()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, budget_bytes / std::max<std::size_t>(1, row_bytes));
    if (kernel_.kind == KernelSpec::Kind::kRbf) sq_ = xs_.rowwise().squaredNorm();
  }

  const RVec& row(int r) {
    auto it = map_.find(r);
    if (it != map_.end()) {
      order_.splice(order_.begin(), order_, it->second.slot);
      return it->second.values;
    }
    if (map_.size() >= capacity_) {
      map_.erase(order_.back());
      order_.pop_back();
    }
    RVec v = compute(r);
    order_.push_front(r);
    auto [ins, unused] = map_.emplace(r, Entry{std::move(v), order_.begin()});
    (void)unused;
    return ins->second.values;
  }

 private:
  RVec compute(int r) const {
    RVec t = xs_ * xs_.row(r).transpose();
    switch (kernel_.kind) {
      case KernelSpec::Kind::kLinear:
        return t;
      case KernelSpec::Kind::kPolynomial: {
        RVec out(t.size());
        for (int i = 0; i < t.size(); ++i)
          out[i] = std::pow(t[i] + kernel_.offset, kernel_.degree);
        return out;
      }
      case KernelSpec::Kind::kRbf:
      default: {
        const double inv = 1.0 / (2.0 * kernel_.tau * kernel_.tau);
        return ((-(sq_.array() + sq_[r] - 2.0 * t.array())) * inv).exp().matrix();
      }
    }
  }

  struct Entry {
    RVec values;
    std::list<int>::iterator slot;
  };

  const RMat& xs_;
  KernelSpec kernel_;
  RVec sq_;
  std::size_t capacity_;
  std::list<int> order_;
  std::unordered_map<int, Entry> map_;
};

struct DualResult {
  RVec beta;
  double bias = 0.0;
  double dual_objective = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Minimizes 0.5 theta' Q theta + p' theta over 0 <= theta_t <= U_t with
// sum_t s_t theta_t = 0, where theta = (alpha; alpha*), s = (+1; -1) and
// Q = [[K, -K], [-K, K]]. This is the shared dual of the epsilon-tube and
// pinball-loss programs; they differ only in p and in the box bounds.
DualResult solve_dual(const RMat& xs, const RVec& y, double eps, double up_a, double up_as,
                      const KernelSpec& kernel, double tol, long max_iter) {
  const int n = static_cast<int>(xs.rows());
  RVec theta = RVec::Zero(2 * n);
  RVec p(2 * n);
  p.head(n) = RVec::Constant(n, eps) - y;
  p.tail(n) = RVec::Constant(n, eps) + y;
  RVec grad = p;
  KernelCache cache(xs, kernel, std::size_t{1} << 30);

  auto upper = [&](int t) { return t < n ? up_a : up_as; };
  const double inf = std::numeric_limits<double>::infinity();

  DualResult res;
  long it = 0;
  double m = 0.0, big_m = 0.0;
  int ti = -1, tj = -1;
  auto select = [&]() {
    m = -inf;
    big_m = inf;
    ti = tj = -1;
    for (int t = 0; t < 2 * n; ++t) {
      const bool first = t < n;
      const double v = first ? -grad[t] : grad[t]; // -s_t * grad_t
      const bool at_zero = theta[t] <= 0.0;
      const bool at_up = theta[t] >= upper(t);
      const bool in_up = first ? !at_up : !at_zero;
      const bool in_low = first ? !at_zero : !at_up;
      if (in_up && v > m) {
        m = v;
        ti = t;
      }
      if (in_low && v < big_m) {
        big_m = v;
        tj = t;
      }
    }
  };

  for (; it < max_iter; ++it) {
    select();
    if (ti < 0 || tj < 0 || m - big_m <= tol) {
      res.converged = true;
      break;
    }
    const int i = ti % n, j = tj % n;
    const double si = ti < n ? 1.0 : -1.0;
    const double sj = tj < n ? 1.0 : -1.0;
    const RVec& ki = cache.row(i);
    const RVec& kj = cache.row(j);
    // Curvature along the feasible direction; the block signs square out.
    double eta = ki[i] + kj[j] - 2.0 * ki[j];
    if (eta < 1e-12) eta = 1e-12;
    const double cap_i = si > 0 ? upper(ti) - theta[ti] : theta[ti];
    const double cap_j = sj > 0 ? theta[tj] : upper(tj) - theta[tj];
    const double lambda = std::min({(m - big_m) / eta, cap_i, cap_j});
    // Snap onto the box exactly when a cap binds, so a coordinate never
    // lingers one rounding error away from its bound.
    if (lambda >= cap_i)
      theta[ti] = si > 0 ? upper(ti) : 0.0;
    else
      theta[ti] = std::clamp(theta[ti] + si * lambda, 0.0, upper(ti));
    if (lambda >= cap_j)
      theta[tj] = sj > 0 ? 0.0 : upper(tj);
    else
      theta[tj] = std::clamp(theta[tj] - sj * lambda, 0.0, upper(tj));
    grad.head(n) += lambda * (ki - kj);
    grad.tail(n) -= lambda * (ki - kj);
  }
  res.iterations = it;

  // Bias: average the per-sample optimal bias over interior coordinates;
  // with none available fall back to the midpoint of the feasible interval.
  select();
  double bsum = 0.0;
  int bcount = 0;
  for (int t = 0; t < 2 * n; ++t) {
    if (theta[t] > 0.0 && theta[t] < upper(t)) {
      bsum += t < n ? -grad[t] : grad[t];
      ++bcount;
    }
  }
  if (bcount > 0) {
    res.bias = bsum / bcount;
  } else {
    const double lo = tj >= 0 ? big_m : 0.0;
    const double hi = ti >= 0 ? m : 0.0;
    res.bias = 0.5 * (lo + hi);
  }
  res.beta = theta.head(n) - theta.tail(n);
  res.dual_objective = 0.5 * theta.dot(grad + p);
  return res;
}

SvrModel finish_model(ModelKind kind, const RMat& x, const TrainConfig& cfg, DualResult dr) {
  SvrModel model;
  model.kind = kind;
  model.kernel = cfg.kernel;
  model.config = cfg;
  model.scaler = Scaler::fit(x);
  model.bias = dr.bias;
  model.converged = dr.converged;
  model.iterations = dr.iterations;
  model.dual_objective = dr.dual_objective;

  const double lo = kind == ModelKind::kSvr ? -cfg.c : -cfg.c * (1.0 - cfg.delta);
  const double hi = kind == ModelKind::kSvr ? cfg.c : cfg.c * cfg.delta;
  double sum = 0.0;
  std::vector<int> keep;
  for (int i = 0; i < dr.beta.size(); ++i) {
    sum += dr.beta[i];
    if (dr.beta[i] < lo - 1e-9 || dr.beta[i] > hi + 1e-9)
      throw SolverFailure("dual coefficient escaped its box");
    if (dr.beta[i] != 0.0) keep.push_back(i);
  }
  if (std::abs(sum) > 1e-6 * std::max(1.0, cfg.c))
    throw SolverFailure("dual equality constraint violated after training");

  RMat xs = model.scaler.transform(x);
  model.support_x = RMat(keep.size(), x.cols());
  model.beta = RVec(keep.size());
  for (size_t k = 0; k < keep.size(); ++k) {
    model.support_x.row(static_cast<int>(k)) = xs.row(keep[k]);
    model.beta[static_cast<int>(k)] = dr.beta[keep[k]];
  }
  return model;
}

void check_training_inputs(const RMat& x, const RVec& y) {
  if (x.rows() != y.size()) throw DimensionMismatch("feature rows must match label count");
  if (x.rows() < 2) throw ParamOutOfRange("training needs at least two samples");
  if (!x.allFinite() || !y.allFinite()) throw ParamOutOfRange("training data must be finite");
}

std::string kernel_kind_name(KernelSpec::Kind k) {
  switch (k) {
    case KernelSpec::Kind::kRbf:
      return "rbf";
    case KernelSpec::Kind::kLinear:
      return "linear";
    case KernelSpec::Kind::kPolynomial:
      return "polynomial";
  }
  return "rbf";
}

KernelSpec::Kind kernel_kind_from(const std::string& s) {
  if (s == "rbf") return KernelSpec::Kind::kRbf;
  if (s == "linear") return KernelSpec::Kind::kLinear;
  if (s == "polynomial") return KernelSpec::Kind::kPolynomial;
  throw SchemaMismatch("unknown kernel kind '" + s + "'");
}

nlohmann::json vec_to_json(const RVec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

RVec vec_from_json(const nlohmann::json& a) {
  RVec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v[static_cast<int>(i)] = a[i].get<double>();
  return v;
}

}  // namespace

void KernelSpec::validate() const {
  if (kind == Kind::kRbf && !(tau > 0.0)) throw ParamOutOfRange("RBF bandwidth must be > 0");
  if (kind == Kind::kPolynomial && degree < 1)
    throw ParamOutOfRange("polynomial degree must be >= 1");
}

double kernel_value(const KernelSpec& k, const RVec& a, const RVec& b) {
  switch (k.kind) {
    case KernelSpec::Kind::kLinear:
      return a.dot(b);
    case KernelSpec::Kind::kPolynomial:
      return std::pow(a.dot(b) + k.offset, k.degree);
    case KernelSpec::Kind::kRbf:
    default:
      return std::exp(-(a - b).squaredNorm() / (2.0 * k.tau * k.tau));
  }
}

void TrainConfig::validate() const {
  if (!(c > 0.0)) throw ParamOutOfRange("penalty c must be > 0");
  if (epsilon < 0.0) throw ParamOutOfRange("epsilon must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) throw ParamOutOfRange("delta must lie in (0, 1)");
  if (!(tol > 0.0)) throw ParamOutOfRange("tol must be > 0");
  if (max_passes < 1) throw ParamOutOfRange("max_passes must be >= 1");
  kernel.validate();
}

Scaler Scaler::fit(const RMat& x) {
  Scaler s;
  s.mean = x.colwise().mean();
  s.stddev = RVec(x.cols());
  for (int j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean[j]).square().sum() / x.rows();
    s.stddev[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

RVec Scaler::transform(const RVec& x) const {
  if (x.size() != mean.size()) throw SchemaMismatch("input length does not match the scaler");
  return (x - mean).cwiseQuotient(stddev);
}

RMat Scaler::transform(const RMat& x) const {
  if (x.cols() != mean.size()) throw SchemaMismatch("input width does not match the scaler");
  return ((x.rowwise() - mean.transpose()).array().rowwise() /
          stddev.transpose().array())
      .matrix();
}

RVec Scaler::inverse(const RVec& x) const {
  if (x.size() != mean.size()) throw SchemaMismatch("input length does not match the scaler");
  return x.cwiseProduct(stddev) + mean;
}

SvrModel train_svr(const RMat& x, const RVec& y, const TrainConfig& cfg) {
  cfg.validate();
  check_training_inputs(x, y);
  Scaler sc = Scaler::fit(x);
  RMat xs = sc.transform(x);
  DualResult dr =
      solve_dual(xs, y, cfg.epsilon, cfg.c, cfg.c, cfg.kernel, cfg.tol, cfg.max_passes);
  return finish_model(ModelKind::kSvr, x, cfg, std::move(dr));
}

SvrModel train_svqr(const RMat& x, const RVec& y, const TrainConfig& cfg) {
  cfg.validate();
  check_training_inputs(x, y);
  Scaler sc = Scaler::fit(x);
  RMat xs = sc.transform(x);
  DualResult dr = solve_dual(xs, y, 0.0, cfg.c * cfg.delta, cfg.c * (1.0 - cfg.delta),
                             cfg.kernel, cfg.tol, cfg.max_passes);
  return finish_model(ModelKind::kSvqr, x, cfg, std::move(dr));
}

double predict(const SvrModel& model, const RVec& x) {
  RVec xs = model.scaler.transform(x);
  double acc = model.bias;
  for (int i = 0; i < model.beta.size(); ++i)
    acc += model.beta[i] * kernel_value(model.kernel, model.support_x.row(i), xs);
  return acc;
}

RVec predict(const SvrModel& model, const RMat& x) {
  RVec out(x.rows());
  for (int r = 0; r < x.rows(); ++r) out[r] = predict(model, RVec(x.row(r)));
  return out;
}

GridSearchResult grid_search(ModelKind kind, const RMat& x, const RVec& y,
                             const SearchGrid& grid, int folds, std::uint64_t seed) {
  if (folds < 2) throw ParamOutOfRange("cross-validation needs at least 2 folds");
  check_training_inputs(x, y);
  if (grid.cs.empty() || grid.taus.empty() || (kind == ModelKind::kSvr && grid.epsilons.empty()))
    throw ParamOutOfRange("hyperparameter grid must be nonempty");
  const int n = static_cast<int>(x.rows());
  if (folds > n) throw ParamOutOfRange("more folds than samples");

  // Deterministic fold assignment: Fisher-Yates with the project RNG, then
  // round-robin over the shuffled order.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> fold_of(n);
  for (int i = 0; i < n; ++i) fold_of[perm[i]] = i % folds;

  std::vector<double> cs = grid.cs;
  std::sort(cs.begin(), cs.end());
  std::vector<double> eps = kind == ModelKind::kSvr ? grid.epsilons : std::vector<double>{0.0};
  std::sort(eps.rbegin(), eps.rend());
  std::vector<double> taus = grid.taus;
  std::sort(taus.begin(), taus.end());

  GridSearchResult result;
  double best_mse = std::numeric_limits<double>::infinity();
  for (double c : cs) {
    for (double e : eps) {
      for (double tau : taus) {
        TrainConfig cfg;
        cfg.c = c;
        cfg.epsilon = e;
        cfg.delta = grid.delta;
        cfg.kernel.kind = KernelSpec::Kind::kRbf;
        cfg.kernel.tau = tau;
        double sq_sum = 0.0;
        for (int f = 0; f < folds; ++f) {
          std::vector<int> tr, te;
          for (int i = 0; i < n; ++i) (fold_of[i] == f ? te : tr).push_back(i);
          RMat xtr(tr.size(), x.cols());
          RVec ytr(tr.size());
          for (size_t i = 0; i < tr.size(); ++i) {
            xtr.row(static_cast<int>(i)) = x.row(tr[i]);
            ytr[static_cast<int>(i)] = y[tr[i]];
          }
          SvrModel model =
              kind == ModelKind::kSvr ? train_svr(xtr, ytr, cfg) : train_svqr(xtr, ytr, cfg);
          for (int i : te) {
            const double d = predict(model, RVec(x.row(i))) - y[i];
            sq_sum += d * d;
          }
        }
        const double cv_mse = sq_sum / n;
        result.table.push_back({cfg, cv_mse});
        if (cv_mse < best_mse) {
          best_mse = cv_mse;
          result.best = cfg;
        }
      }
    }
  }
  return result;
}

EvalReport evaluate(const RVec& y_true, const RVec& y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionMismatch("prediction/label length mismatch");
  if (y_true.size() < 1) throw ParamOutOfRange("evaluation needs at least one sample");
  const long n = y_true.size();
  EvalReport r;
  r.n = n;
  const double mean = y_true.mean();
  double ss_res = 0.0, ss_tot = 0.0, ape = 0.0;
  bool mape_ok = true;
  long over = 0;
  for (long i = 0; i < n; ++i) {
    const double d = y_pred[i] - y_true[i];
    ss_res += d * d;
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
    if (y_true[i] == 0.0)
      mape_ok = false;
    else
      ape += std::abs(d) / std::abs(y_true[i]);
    if (y_pred[i] > y_true[i]) ++over;
  }
  r.mse = ss_res / n;
  if (mape_ok) r.mape = ape / n;
  r.p_over = static_cast<double>(over) / n;
  // A constant-label set leaves R^2 ill-defined; report 1 only for a
  // perfect fit in that case.
  r.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return r;
}

void to_json(nlohmann::json& j, const KernelSpec& k) {
  j = nlohmann::json{{"kind", kernel_kind_name(k.kind)},
                     {"tau", k.tau},
                     {"degree", k.degree},
                     {"offset", k.offset}};
}

void from_json(const nlohmann::json& j, KernelSpec& k) {
  k.kind = kernel_kind_from(j.at("kind").get<std::string>());
  k.tau = j.at("tau").get<double>();
  k.degree = j.at("degree").get<int>();
  k.offset = j.at("offset").get<double>();
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"c", c.c},           {"epsilon", c.epsilon}, {"delta", c.delta},
                     {"kernel", c.kernel}, {"tol", c.tol},         {"max_passes", c.max_passes}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  c.c = j.at("c").get<double>();
  c.epsilon = j.at("epsilon").get<double>();
  c.delta = j.at("delta").get<double>();
  c.kernel = j.at("kernel").get<KernelSpec>();
  c.tol = j.at("tol").get<double>();
  c.max_passes = j.at("max_passes").get<long>();
}

void to_json(nlohmann::json& j, const Scaler& s) {
  j = nlohmann::json{{"mean", vec_to_json(s.mean)}, {"std", vec_to_json(s.stddev)}};
}

void from_json(const nlohmann::json& j, Scaler& s) {
  s.mean = vec_from_json(j.at("mean"));
  s.stddev = vec_from_json(j.at("std"));
}

void to_json(nlohmann::json& j, const SvrModel& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.support_x.rows(); ++r)
    for (int c = 0; c < m.support_x.cols(); ++c) rows.push_back(m.support_x(r, c));
  j = nlohmann::json{{"kind", m.kind == ModelKind::kSvr ? "svr" : "svqr"},
                     {"kernel", m.kernel},
                     {"scaler", m.scaler},
                     {"n_support", m.support_x.rows()},
                     {"n_features", m.support_x.cols()},
                     {"support_x", std::move(rows)},
                     {"beta", vec_to_json(m.beta)},
                     {"bias", m.bias},
                     {"config", m.config},
                     {"converged", m.converged},
                     {"iterations", m.iterations},
                     {"dual_objective", m.dual_objective},
                     {"schema_id", m.schema_id},
                     {"train_hash", m.train_hash}};
}

void from_json(const nlohmann::json& j, SvrModel& m) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind != "svr" && kind != "svqr") throw SchemaMismatch("unknown model kind '" + kind + "'");
  m.kind = kind == "svr" ? ModelKind::kSvr : ModelKind::kSvqr;
  m.kernel = j.at("kernel").get<KernelSpec>();
  m.scaler = j.at("scaler").get<Scaler>();
  const long rows = j.at("n_support").get<long>();
  const long cols = j.at("n_features").get<long>();
  const auto& flat = j.at("support_x");
  if (static_cast<long>(flat.size()) != rows * cols)
    throw SchemaMismatch("support vector payload has the wrong length");
  m.support_x = RMat(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      m.support_x(r, c) = flat[static_cast<size_t>(r * cols + c)].get<double>();
  m.beta = vec_from_json(j.at("beta"));
  if (m.beta.size() != rows) throw SchemaMismatch("beta length does not match support count");
  m.bias = j.at("bias").get<double>();
  m.config = j.at("config").get<TrainConfig>();
  m.converged = j.at("converged").get<bool>();
  m.iterations = j.at("iterations").get<long>();
  m.dual_objective = j.at("dual_objective").get<double>();
  m.schema_id = j.at("schema_id").get<std::string>();
  m.train_hash = j.at("train_hash").get<std::string>();
}

void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"mse", r.mse},
                     {"mape", r.mape ? nlohmann::json(*r.mape) : nlohmann::json(nullptr)},
                     {"r2", r.r2},
                     {"p_over", r.p_over},
                     {"n", r.n}};
}

void from_json(const nlohmann::json& j, EvalReport& r) {
  r.mse = j.at("mse").get<double>();
  r.mape = j.at("mape").is_null() ? std::nullopt
                                  : std::optional<double>(j.at("mape").get<double>());
  r.r2 = j.at("r2").get<double>();
  r.p_over = j.at("p_over").get<double>();
  r.n = j.at("n").get<long>();
}

void save_model(const SvrModel& model, const std::string& path) {
  nlohmann::json j = model;
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << j.dump(1) << '\n';
    if (!out) throw Error("failed writing '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

SvrModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifacts("model file '" + path + "' not found");
  nlohmann::json j;
  in >> j;
  return j.get<SvrModel>();
}

}  // namespace qre
