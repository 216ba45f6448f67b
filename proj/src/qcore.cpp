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

#include "qre/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qre {
namespace {

// Row-major strides for a subsystem layout: subsystem 0 is the
// most-significant digit of a flattened index.
std::vector<long> strides_for(const std::vector<int>& dims) {
  std::vector<long> strides(dims.size());
  long s = 1;
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    strides[static_cast<size_t>(i)] = s;
    s *= dims[static_cast<size_t>(i)];
  }
  return strides;
}

void check_dims(const CMat& mat, const std::vector<int>& dims) {
  if (mat.rows() != mat.cols()) throw DimensionMismatch("matrix is not square");
  if (dims.empty()) throw InvalidSubsystem("subsystem list is empty");
  long prod = 1;
  for (int d : dims) {
    if (d < 1) throw InvalidSubsystem("subsystem dimension must be >= 1");
    prod *= d;
  }
  if (prod != mat.rows())
    throw DimensionMismatch("product of subsystem dimensions does not match matrix size");
}

void check_subsystem_set(const std::vector<int>& set, int n, bool allow_empty) {
  if (set.empty() && !allow_empty) throw InvalidSubsystem("subsystem set is empty");
  for (size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= n) throw InvalidSubsystem("subsystem index out of range");
    if (i > 0 && set[i] <= set[i - 1])
      throw InvalidSubsystem("subsystem indices must be strictly increasing");
  }
}

}  // namespace

DensityMatrix::DensityMatrix(CMat mat, std::vector<int> dims)
    : mat_(std::move(mat)), dims_(std::move(dims)) {
  if (dims_.empty()) dims_ = {static_cast<int>(mat_.rows())};
  check_dims(mat_, dims_);
  const double herm_err = (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > kHermTol)
    throw InvalidDensityMatrix("density matrix is not Hermitian (deviation " +
                               std::to_string(herm_err) + ")");
  const double trace_err = std::abs(mat_.trace() - Complex(1.0, 0.0));
  if (trace_err > kTraceTol)
    throw InvalidDensityMatrix("density matrix trace deviates from 1 by " +
                               std::to_string(trace_err));
  Eigen::SelfAdjointEigenSolver<CMat> es((mat_ + mat_.adjoint()) / 2.0);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kPsdTol)
    throw InvalidDensityMatrix("density matrix has eigenvalue " + std::to_string(min_eig));
  if (min_eig < 0.0) {
    // Clip roundoff negatives and renormalize the spectrum; leave matrices
    // that are already PSD untouched so exact inputs pass through bit-for-bit.
    RVec vals = es.eigenvalues().cwiseMax(0.0);
    vals /= vals.sum();
    mat_ = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
    mat_ = (mat_ + mat_.adjoint()).eval() / 2.0;
  }
}

DensityMatrix::DensityMatrix(CMat mat)
    : DensityMatrix(std::move(mat), std::vector<int>{}) {}

PureState::PureState(CVec amps, std::vector<int> dims)
    : amps_(std::move(amps)), dims_(std::move(dims)) {
  if (dims_.empty()) dims_ = {static_cast<int>(amps_.size())};
  long prod = 1;
  for (int d : dims_) {
    if (d < 1) throw InvalidSubsystem("subsystem dimension must be >= 1");
    prod *= d;
  }
  if (prod != amps_.size())
    throw DimensionMismatch("product of subsystem dimensions does not match vector size");
  const double norm2 = amps_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-8)
    throw ParamOutOfRange("state vector is not normalized (|psi|^2 = " +
                          std::to_string(norm2) + ")");
  amps_ /= std::sqrt(norm2);
}

PureState::PureState(CVec amps) : PureState(std::move(amps), {}) {}

DensityMatrix PureState::to_density() const {
  CMat rho = amps_ * amps_.adjoint();
  rho = (rho + rho.adjoint()).eval() / 2.0;
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho), dims_);
}

CMat tensor(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec tensor(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const auto& dims = rho.dims();
  const int n = rho.num_subsystems();
  check_subsystem_set(keep, n, /*allow_empty=*/false);

  std::vector<int> traced;
  for (int s = 0; s < n; ++s)
    if (std::find(keep.begin(), keep.end(), s) == keep.end()) traced.push_back(s);
  if (traced.empty()) return rho;

  const auto strides = strides_for(dims);
  long keep_dim = 1, traced_dim = 1;
  std::vector<int> keep_dims;
  for (int s : keep) {
    keep_dims.push_back(dims[static_cast<size_t>(s)]);
    keep_dim *= dims[static_cast<size_t>(s)];
  }
  for (int s : traced) traced_dim *= dims[static_cast<size_t>(s)];

  // Flattened offsets of each kept multi-index and each traced multi-index
  // inside the full index space.
  auto offsets = [&](const std::vector<int>& subs, long count) {
    std::vector<long> off(static_cast<size_t>(count), 0);
    long rep = 1;
    for (int k = static_cast<int>(subs.size()) - 1; k >= 0; --k) {
      const int s = subs[static_cast<size_t>(k)];
      const int d = dims[static_cast<size_t>(s)];
      for (long idx = 0; idx < count; ++idx)
        off[static_cast<size_t>(idx)] += ((idx / rep) % d) * strides[static_cast<size_t>(s)];
      rep *= d;
    }
    return off;
  };
  const auto keep_off = offsets(keep, keep_dim);
  const auto traced_off = offsets(traced, traced_dim);

  CMat out = CMat::Zero(keep_dim, keep_dim);
  for (long i = 0; i < keep_dim; ++i)
    for (long j = 0; j < keep_dim; ++j) {
      Complex acc(0.0, 0.0);
      for (long t = 0; t < traced_dim; ++t)
        acc += rho.mat()(keep_off[static_cast<size_t>(i)] + traced_off[static_cast<size_t>(t)],
                         keep_off[static_cast<size_t>(j)] + traced_off[static_cast<size_t>(t)]);
      out(i, j) = acc;
    }
  out = (out + out.adjoint()).eval() / 2.0;
  return DensityMatrix(std::move(out), keep_dims);
}

CMat partial_transpose(const CMat& m, const std::vector<int>& dims,
                       const std::vector<int>& subsystems) {
  check_dims(m, dims);
  check_subsystem_set(subsystems, static_cast<int>(dims.size()), /*allow_empty=*/true);
  const auto strides = strides_for(dims);
  const long d = m.rows();

  // For each flattened index, precompute the part that the transposed
  // subsystems contribute; swapping those parts between row and column
  // implements the transpose.
  std::vector<long> sub_part(static_cast<size_t>(d), 0);
  for (long idx = 0; idx < d; ++idx) {
    for (int s : subsystems) {
      const long digit =
          (idx / strides[static_cast<size_t>(s)]) % dims[static_cast<size_t>(s)];
      sub_part[static_cast<size_t>(idx)] += digit * strides[static_cast<size_t>(s)];
    }
  }
  CMat out(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) {
      const long ip = i - sub_part[static_cast<size_t>(i)] + sub_part[static_cast<size_t>(j)];
      const long jp = j - sub_part[static_cast<size_t>(j)] + sub_part[static_cast<size_t>(i)];
      out(ip, jp) = m(i, j);
    }
  return out;
}

CMat partial_transpose(const DensityMatrix& rho, const std::vector<int>& subsystems) {
  return partial_transpose(rho.mat(), rho.dims(), subsystems);
}

HermEig herm_eig(const CMat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
  const double herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm_err > 1e-8)
    throw NotHermitian("matrix is not Hermitian (deviation " + std::to_string(herm_err) + ")");
  Eigen::SelfAdjointEigenSolver<CMat> es((m + m.adjoint()) / 2.0);
  const Eigen::Index d = m.rows();
  HermEig out;
  out.eigenvalues = es.eigenvalues().reverse();
  out.eigenvectors = CMat(d, d);
  for (Eigen::Index k = 0; k < d; ++k) out.eigenvectors.col(k) = es.eigenvectors().col(d - 1 - k);
  return out;
}

CMat sqrt_psd(const CMat& m) {
  HermEig eig = herm_eig(m);
  RVec roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  CMat out = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
  return (out + out.adjoint()).eval() / 2.0;
}

double trace_power(const DensityMatrix& rho, int m) {
  if (m < 1) throw ParamOutOfRange("trace power exponent must be >= 1");
  if (m == 1) return 1.0;
  HermEig eig = herm_eig(rho.mat());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
    acc += std::pow(std::max(eig.eigenvalues[i], 0.0), m);
  return acc;
}

double vn_entropy(const DensityMatrix& rho) {
  HermEig eig = herm_eig(rho.mat());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double p = eig.eigenvalues[i];
    if (p > 0.0) acc -= p * std::log2(p);
  }
  return std::max(acc, 0.0);
}

double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("fidelity requires states of equal dimension");
  const CMat root = sqrt_psd(rho.mat());
  const CMat inner = root * sigma.mat() * root;
  Eigen::SelfAdjointEigenSolver<CMat> es((inner + inner.adjoint()) / 2.0);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qre
