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

#ifndef QRE_QCORE_HPP
#define QRE_QCORE_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qre/errors.hpp"

namespace qre {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Tolerances used when validating density-matrix invariants. Eigenvalues in
// [-kPsdTol, 0) are treated as roundoff and clipped to zero; anything more
// negative is a real violation.
inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

class PureState;

// A mixed state on a tensor product of finite-dimensional subsystems.
// Invariants (checked on construction): the matrix is square with side
// equal to the product of `dims`, Hermitian within kHermTol, has unit trace
// within kTraceTol, and is PSD up to eigenvalues no more negative than
// -kPsdTol. Slightly negative eigenvalues are clipped and the spectrum is
// renormalized so downstream consumers can rely on exact positivity.
class DensityMatrix {
 public:
  DensityMatrix(CMat mat, std::vector<int> dims);
  explicit DensityMatrix(CMat mat);  // single subsystem of full dimension

  const CMat& mat() const { return mat_; }
  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  int num_subsystems() const { return static_cast<int>(dims_.size()); }

 private:
  CMat mat_;
  std::vector<int> dims_;
};

// A normalized state vector on a tensor product of subsystems. The squared
// norm must be 1 within 1e-8 on input; the constructor renormalizes so the
// stored amplitudes satisfy |<psi|psi> - 1| <= 1e-12 exactly.
class PureState {
 public:
  PureState(CVec amps, std::vector<int> dims);
  explicit PureState(CVec amps);

  const CVec& amps() const { return amps_; }
  const std::vector<int>& dims() const { return dims_; }
  int dim() const { return static_cast<int>(amps_.size()); }

  DensityMatrix to_density() const;

 private:
  CVec amps_;
  std::vector<int> dims_;
};

// Kronecker product, left factor on the most-significant index block:
// (a (x) b)[i_a*rows(b)+i_b, j_a*cols(b)+j_b] = a[i_a,j_a]*b[i_b,j_b].
CMat tensor(const CMat& a, const CMat& b);
CVec tensor(const CVec& a, const CVec& b);

// Reduced state on the subsystems listed in `keep` (strictly increasing
// indices into rho.dims()), tracing out everything else. Subsystem order is
// preserved. Throws InvalidSubsystem for out-of-range, duplicate, unsorted,
// or empty keep-sets; keeping every subsystem returns a copy.
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Transpose of the given subsystems only. The result is Hermitian with unit
// trace but in general not PSD, so it is returned as a raw matrix. The
// matrix overload exists for non-state operands (e.g. solver variables).
CMat partial_transpose(const DensityMatrix& rho, const std::vector<int>& subsystems);
CMat partial_transpose(const CMat& m, const std::vector<int>& dims,
                       const std::vector<int>& subsystems);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending,
// eigenvectors[:, k] the unit eigenvector for eigenvalues[k].
struct HermEig {
  RVec eigenvalues;
  CMat eigenvectors;
};
HermEig herm_eig(const CMat& m);

// Principal square root of a PSD Hermitian matrix (negative roundoff
// eigenvalues clipped to zero).
CMat sqrt_psd(const CMat& m);

// Tr(rho^m) for integer m >= 1, computed from the spectrum.
double trace_power(const DensityMatrix& rho, int m);

// Von Neumann entropy in bits: -sum_i lambda_i log2 lambda_i with 0log0 = 0.
double vn_entropy(const DensityMatrix& rho);

// Uhlmann fidelity F(rho, sigma) = Tr sqrt(sqrt(rho) sigma sqrt(rho)),
// clamped to [0, 1]. This is the square-root ("sqrt-F") convention: F = 1
// iff rho == sigma, and F(|a><a|, |b><b|) = |<a|b>|.
double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace qre

#endif  // QRE_QCORE_HPP
