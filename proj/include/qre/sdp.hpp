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

#ifndef QRE_SDP_HPP
#define QRE_SDP_HPP

#include <string>
#include <tuple>
#include <vector>

#include "qre/qcore.hpp"

namespace qre {

// --- Problem description -----------------------------------------------------
//
// Standard-form pair over block-diagonal symmetric matrices:
//   primal:  min <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   dual:    max  b.y     s.t.  C - sum_i y_i A_i = Z >= 0
// The fidelity programs are maximizations; their builders negate the
// objective and read the optimum off the dual bound (see max_fidelity_*).

// One nonzero of a constraint matrix. Entry lists enumerate every nonzero
// (both triangles), which keeps the Schur-complement assembly a pure
// entry-pair sum with no triangle bookkeeping.
struct BlockEntry {
  int block;
  int row;
  int col;
  double value;
};

struct SdpConstraint {
  std::vector<BlockEntry> entries;
  double b = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<RMat> objective;  // C, one dense symmetric matrix per block
  std::vector<SdpConstraint> constraints;

  // Shape, symmetry (within 1e-12) and finiteness checks. Linear
  // independence of the constraints is verified by the first Schur
  // factorization inside solve_sdp, which is exactly their Gram matrix at
  // the identity starting point.
  void validate() const;
};

enum class SdpStatus { kOptimal, kMaxIter, kInfeasible };

struct SdpSolution {
  std::vector<RMat> primal;      // X blocks
  std::vector<RMat> dual_slack;  // Z blocks
  RVec y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;               // |p - d| / (1 + |p|)
  double primal_residual = 0.0;   // ||A(X) - b||_inf
  double dual_residual = 0.0;     // max block-entry residual of C - A^T(y) - Z
  SdpStatus status = SdpStatus::kMaxIter;
  int iterations = 0;
};

// Primal-dual path-following interior-point method (HKM direction with a
// Mehrotra predictor-corrector), dense Cholesky on the Schur complement.
// Returns kOptimal once gap and both feasibility residuals are <= tol;
// kMaxIter surfaces the best iterate seen. Deterministic in its inputs.
SdpSolution solve_sdp(const SdpProblem& p, double tol = 1e-7, int max_iter = 200);

// --- Hermitian-to-real embedding -----------------------------------------------

// [[A, -B], [B, A]] for h = A + iB. Symmetric, with h's eigenvalues doubled
// in multiplicity; traces double accordingly.
RMat realify(const CMat& h);

// Appends the entries of realify(H)/2 for a sparse Hermitian H given by its
// nonzero entries (both triangles listed). The half compensates the doubled
// trace of the embedding: <realify(H)/2, realify(G)> = Tr(H G) for
// Hermitian G, so real constraint rows act exactly like complex ones.
// `n` is the complex dimension of the block; `offset` shifts row/col (for
// placing H inside a larger block).
void append_realified_half(std::vector<BlockEntry>& out, int block, int n,
                           const std::vector<std::tuple<int, int, Complex>>& entries,
                           int offset = 0);

// Recovers the Hermitian matrix from (the J-invariant average of) a 2n x 2n
// realified block: A = (X11 + X22)/2, B = (X21 - X12)/2.
CMat unrealify(const RMat& x);

// --- Fidelity programs ---------------------------------------------------------

// max (1/2)Tr(Z) + (1/2)Tr(Z^dag)  s.t.  [[rho, Z], [Z^dag, sigma]] >= 0.
// Equals the Uhlmann fidelity; solved after restricting to the supports of
// rho and sigma so the interior-point method always has a strictly feasible
// start. Result clamped to [0, 1].
double max_fidelity_fixed(const DensityMatrix& rho, const DensityMatrix& sigma,
                          double tol = 1e-7);

struct IncoherentFidelity {
  double value = 0.0;  // max_{sigma incoherent} F(rho, sigma)
  RVec q;              // attaining diagonal weights, a simplex vector
};

// max F(rho, sigma) over sigma = sum_i q_i |i><i|, sum q_i = 1, q_i >= 0.
IncoherentFidelity max_fidelity_incoherent(const DensityMatrix& rho, double tol = 1e-7);

// max F(rho, sigma) over sigma >= 0, Tr sigma = 1, sigma^{T_B} >= 0 for each
// listed bipartition B (a set of transposed subsystems). The square of the
// value upper-bounds the squared fidelity with separable states, so
// 1 - value^2 lower-bounds the geometric entanglement.
double max_fidelity_ppt(const DensityMatrix& rho,
                        const std::vector<std::vector<int>>& bipartitions,
                        double tol = 1e-7);

// Debug dump for cross-checking against external solvers.
std::string dump_json(const SdpProblem& p);

}  // namespace qre

#endif  // QRE_SDP_HPP
