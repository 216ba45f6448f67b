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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

namespace qre {
namespace {

using BlockMats = std::vector<RMat>;

BlockMats zero_blocks(const std::vector<int>& dims) {
  BlockMats out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(RMat::Zero(d, d));
  return out;
}

BlockMats identity_blocks(const std::vector<int>& dims, double scale) {
  BlockMats out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(scale * RMat::Identity(d, d));
  return out;
}

double block_dot(const BlockMats& a, const BlockMats& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += (a[i].array() * b[i].array()).sum();
  return acc;
}

// <A_i, V> for every constraint.
RVec apply_A(const SdpProblem& p, const BlockMats& v) {
  RVec out(static_cast<Eigen::Index>(p.constraints.size()));
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    double acc = 0.0;
    for (const BlockEntry& e : p.constraints[i].entries) acc += e.value * v[e.block](e.row, e.col);
    out[static_cast<Eigen::Index>(i)] = acc;
  }
  return out;
}

// out += sum_i y_i A_i.
void add_At(const SdpProblem& p, const RVec& y, BlockMats& out) {
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    if (yi == 0.0) continue;
    for (const BlockEntry& e : p.constraints[i].entries) out[e.block](e.row, e.col) += yi * e.value;
  }
}

// Largest step alpha so that s + alpha*ds stays PSD; +inf when ds >= 0.
double max_step(const BlockMats& s, const BlockMats& ds) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < s.size(); ++b) {
    Eigen::LLT<RMat> llt(s[b]);
    if (llt.info() != Eigen::Success) return 0.0;  // should not happen; bail safely
    RMat w = ds[b];
    llt.matrixL().solveInPlace(w);                         // L^-1 ds
    RMat wt = w.transpose();
    llt.matrixL().solveInPlace(wt);                        // L^-1 ds L^-T (transposed)
    Eigen::SelfAdjointEigenSolver<RMat> es((wt + wt.transpose()) / 2.0,
                                           Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin < -1e-14) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct Factorized {
  Eigen::LLT<RMat> llt;
  double shift = 0.0;
};

// Cholesky of the Schur complement with escalating diagonal shifts. A
// failure even at the largest shift means the constraints are linearly
// dependent (the matrix is a Gram matrix of the A_i under a positive map).
Factorized factor_schur(RMat& m) {
  const double base = m.diagonal().maxCoeff();
  for (double shift : {0.0, 1e-13, 1e-11, 1e-9, 1e-7}) {
    RMat shifted = m;
    if (shift > 0.0) shifted.diagonal().array() += shift * (1.0 + base);
    Factorized f{Eigen::LLT<RMat>(shifted), shift};
    if (f.llt.info() == Eigen::Success) return f;
  }
  throw SolverFailure("Schur complement not positive definite; constraints likely dependent");
}

}  // namespace

void SdpProblem::validate() const {
  if (block_dims.empty()) throw ParamOutOfRange("SDP needs at least one block");
  if (objective.size() != block_dims.size())
    throw DimensionMismatch("objective must have one matrix per block");
  for (size_t b = 0; b < block_dims.size(); ++b) {
    if (block_dims[b] < 1) throw ParamOutOfRange("block dimension must be >= 1");
    if (objective[b].rows() != block_dims[b] || objective[b].cols() != block_dims[b])
      throw DimensionMismatch("objective block shape mismatch");
    if ((objective[b] - objective[b].transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw ParamOutOfRange("objective block not symmetric");
  }
  for (const SdpConstraint& c : constraints) {
    if (!std::isfinite(c.b)) throw ParamOutOfRange("constraint rhs not finite");
    if (c.entries.empty()) throw ParamOutOfRange("constraint with no entries");
    std::map<std::tuple<int, int, int>, double> acc;
    for (const BlockEntry& e : c.entries) {
      if (e.block < 0 || e.block >= static_cast<int>(block_dims.size()))
        throw DimensionMismatch("constraint entry block out of range");
      if (e.row < 0 || e.row >= block_dims[e.block] || e.col < 0 || e.col >= block_dims[e.block])
        throw DimensionMismatch("constraint entry index out of range");
      if (!std::isfinite(e.value)) throw ParamOutOfRange("constraint entry not finite");
      acc[{e.block, e.row, e.col}] += e.value;
    }
    for (const auto& [key, val] : acc) {
      const auto& [blk, r, cidx] = key;
      auto it = acc.find({blk, cidx, r});
      const double mirror = (it == acc.end()) ? 0.0 : it->second;
      if (std::abs(val - mirror) > 1e-12)
        throw ParamOutOfRange("constraint matrix not symmetric");
    }
  }
}

SdpSolution solve_sdp(const SdpProblem& p, double tol, int max_iter) {
  p.validate();
  const int m = static_cast<int>(p.constraints.size());
  long n_total = 0;
  for (int d : p.block_dims) n_total += d;

  RVec b(m);
  for (int i = 0; i < m; ++i) b[i] = p.constraints[i].b;

  double c_scale = 1.0;
  for (const RMat& cb : p.objective)
    if (cb.size() > 0) c_scale = std::max(c_scale, cb.cwiseAbs().maxCoeff());
  const double b_scale = (m > 0) ? std::max(1.0, b.cwiseAbs().maxCoeff()) : 1.0;

  BlockMats X = identity_blocks(p.block_dims, b_scale);
  BlockMats Z = identity_blocks(p.block_dims, c_scale);
  RVec y = RVec::Zero(m);

  SdpSolution best;
  double best_score = std::numeric_limits<double>::infinity();

  auto record = [&](SdpStatus status, int iter, double pobj, double dobj, double gap,
                    double pres, double dres) {
    SdpSolution s;
    s.primal = X;
    s.dual_slack = Z;
    s.y = y;
    s.primal_objective = pobj;
    s.dual_objective = dobj;
    s.gap = gap;
    s.primal_residual = pres;
    s.dual_residual = dres;
    s.status = status;
    s.iterations = iter;
    return s;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    // Residuals and objective values at the current iterate.
    const double pobj = block_dot(p.objective, X);
    const double dobj = b.dot(y);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
    const RVec rp = b - apply_A(p, X);
    BlockMats Rd = zero_blocks(p.block_dims);
    for (size_t bidx = 0; bidx < Rd.size(); ++bidx) Rd[bidx] = p.objective[bidx] - Z[bidx];
    {
      RVec neg_y = -y;
      add_At(p, neg_y, Rd);
    }
    const double pres = (m > 0) ? rp.cwiseAbs().maxCoeff() : 0.0;
    double dres = 0.0;
    for (const RMat& r : Rd) dres = std::max(dres, r.cwiseAbs().maxCoeff());

    const double score = std::max({gap, pres, dres});
    if (score < best_score) {
      best_score = score;
      best = record(SdpStatus::kMaxIter, iter, pobj, dobj, gap, pres, dres);
    }
    if (gap <= tol && pres <= tol && dres <= tol)
      return record(SdpStatus::kOptimal, iter, pobj, dobj, gap, pres, dres);
    if (y.size() > 0 && y.cwiseAbs().maxCoeff() > 1e12) {
      best.status = SdpStatus::kInfeasible;
      return best;
    }

    // Inverses of Z per block.
    BlockMats Zinv(Z.size());
    for (size_t bidx = 0; bidx < Z.size(); ++bidx) {
      Eigen::LLT<RMat> llt(Z[bidx]);
      if (llt.info() != Eigen::Success)
        throw SolverFailure("dual slack lost positive definiteness");
      Zinv[bidx] = llt.solve(RMat::Identity(Z[bidx].rows(), Z[bidx].cols()));
    }

    const double mu = block_dot(X, Z) / static_cast<double>(n_total);

    // Schur complement M_ij = Tr(A_i X A_j Z^-1), assembled from the sparse
    // entry lists: each pair of entries (a,c,v) in A_i and (e,f,w) in A_j
    // contributes v*w*X(c,e)*Zinv(f,a) when they live on the same block.
    RMat M = RMat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double acc = 0.0;
        for (const BlockEntry& ei : p.constraints[i].entries) {
          const RMat& Xb = X[ei.block];
          const RMat& Zb = Zinv[ei.block];
          for (const BlockEntry& ej : p.constraints[j].entries) {
            if (ej.block != ei.block) continue;
            acc += ei.value * ej.value * Xb(ei.col, ej.row) * Zb(ej.col, ei.row);
          }
        }
        M(i, j) = acc;
        M(j, i) = acc;
      }
    }
    Factorized schur = factor_schur(M);

    // A(X Rd Z^-1) is shared by predictor and corrector right-hand sides.
    BlockMats XRdZinv(Z.size());
    for (size_t bidx = 0; bidx < Z.size(); ++bidx)
      XRdZinv[bidx] = X[bidx] * Rd[bidx] * Zinv[bidx];
    const RVec a_xrd = apply_A(p, XRdZinv);

    auto direction = [&](const BlockMats& Rc, RVec& dy, BlockMats& dX, BlockMats& dZ) {
      BlockMats RcZinv(Z.size());
      for (size_t bidx = 0; bidx < Z.size(); ++bidx) RcZinv[bidx] = Rc[bidx] * Zinv[bidx];
      RVec rhs = rp - apply_A(p, RcZinv) + a_xrd;
      dy = schur.llt.solve(rhs);
      dZ = Rd;
      {
        RVec neg_dy = -dy;
        add_At(p, neg_dy, dZ);
      }
      dX = zero_blocks(p.block_dims);
      for (size_t bidx = 0; bidx < Z.size(); ++bidx) {
        RMat raw = (Rc[bidx] - X[bidx] * dZ[bidx]) * Zinv[bidx];
        dX[bidx] = (raw + raw.transpose()) / 2.0;
      }
    };

    // Predictor: pure Newton step toward complementarity zero.
    BlockMats Rc(Z.size());
    for (size_t bidx = 0; bidx < Z.size(); ++bidx) Rc[bidx] = -X[bidx] * Z[bidx];
    RVec dy_aff;
    BlockMats dX_aff, dZ_aff;
    direction(Rc, dy_aff, dX_aff, dZ_aff);

    const double ap_aff = std::min(1.0, 0.99 * max_step(X, dX_aff));
    const double ad_aff = std::min(1.0, 0.99 * max_step(Z, dZ_aff));
    double mu_aff = 0.0;
    for (size_t bidx = 0; bidx < Z.size(); ++bidx)
      mu_aff += ((X[bidx] + ap_aff * dX_aff[bidx]).array() *
                 (Z[bidx] + ad_aff * dZ_aff[bidx]).array())
                    .sum();
    mu_aff /= static_cast<double>(n_total);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector: recenter and compensate the second-order term.
    for (size_t bidx = 0; bidx < Z.size(); ++bidx) {
      Rc[bidx] = sigma * mu * RMat::Identity(p.block_dims[bidx], p.block_dims[bidx]) -
                 X[bidx] * Z[bidx] - dX_aff[bidx] * dZ_aff[bidx];
    }
    RVec dy;
    BlockMats dX, dZ;
    direction(Rc, dy, dX, dZ);

    const double tau = 0.98;
    const double ap = std::min(1.0, tau * max_step(X, dX));
    const double ad = std::min(1.0, tau * max_step(Z, dZ));
    for (size_t bidx = 0; bidx < Z.size(); ++bidx) {
      X[bidx] += ap * dX[bidx];
      Z[bidx] += ad * dZ[bidx];
    }
    y += ad * dy;
  }

  return best;  // status kMaxIter with the best iterate seen
}

RMat realify(const CMat& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("realify needs a square matrix");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NotHermitian("realify needs a Hermitian matrix");
  const Eigen::Index n = h.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.bottomRightCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  return out;
}

void append_realified_half(std::vector<BlockEntry>& out, int block, int n,
                           const std::vector<std::tuple<int, int, Complex>>& entries,
                           int offset) {
  for (const auto& [i, j, v] : entries) {
    const int r = i + offset, c = j + offset;
    const double re = v.real() / 2.0, im = v.imag() / 2.0;
    if (re != 0.0) {
      out.push_back({block, r, c, re});
      out.push_back({block, r + n, c + n, re});
    }
    if (im != 0.0) {
      out.push_back({block, r, c + n, -im});
      out.push_back({block, r + n, c, im});
    }
  }
}

CMat unrealify(const RMat& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0)
    throw DimensionMismatch("unrealify needs an even square matrix");
  const Eigen::Index n = x.rows() / 2;
  CMat out(n, n);
  out.real() = (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n)) / 2.0;
  out.imag() = (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n)) / 2.0;
  return out;
}

namespace {

struct Support {
  CMat basis;   // d x r, orthonormal columns spanning the support
  RVec evals;   // the r eigenvalues, descending
};

// Eigenvalues below the cut carry at most ~1e-10 total mass, perturbing any
// fidelity by well under 1e-6; in exchange the reduced problem is strictly
// feasible, which the interior-point solver requires.
Support support_of(const DensityMatrix& rho, double cut = 1e-11) {
  HermEig eig = herm_eig(rho.mat());
  int r = 0;
  while (r < eig.eigenvalues.size() && eig.eigenvalues[r] > cut) ++r;
  r = std::max(r, 1);
  return {eig.eigenvectors.leftCols(r), eig.eigenvalues.head(r)};
}

// Entries (both triangles) of the Hermitian functionals pinning an
// n-dimensional diagonal block to diag(evals), as constraints on `block`
// starting at complex offset `off` in a block of complex dimension `cdim`.
void append_diagonal_pins(SdpProblem& p, int block, int cdim, int off, const RVec& evals) {
  const int r = static_cast<int>(evals.size());
  for (int a = 0; a < r; ++a) {
    SdpConstraint c;
    append_realified_half(c.entries, block, cdim, {{a, a, Complex(1, 0)}}, off);
    c.b = evals[a];
    p.constraints.push_back(std::move(c));
  }
  for (int a = 0; a < r; ++a) {
    for (int bidx = a + 1; bidx < r; ++bidx) {
      SdpConstraint re;
      append_realified_half(re.entries, block, cdim,
                            {{a, bidx, Complex(0.5, 0)}, {bidx, a, Complex(0.5, 0)}}, off);
      re.b = 0.0;
      p.constraints.push_back(std::move(re));
      SdpConstraint im;
      append_realified_half(im.entries, block, cdim,
                            {{a, bidx, Complex(0, 0.5)}, {bidx, a, Complex(0, -0.5)}}, off);
      im.b = 0.0;
      p.constraints.push_back(std::move(im));
    }
  }
}

// Objective -realify(K)/2 for K = (1/2)[[0, W^dag],[W, 0]] with W mapping
// the first (r-dim) corner to the second (s-dim) corner; maximizing
// Tr(K G) = Re Tr(W G_12) is encoded as minimizing its negation.
RMat fidelity_objective(const CMat& w, int r, int s) {
  const int n = r + s;
  CMat k = CMat::Zero(n, n);
  k.block(0, r, r, s) = w.adjoint() / 2.0;
  k.block(r, 0, s, r) = w / 2.0;
  return -realify(k) / 2.0;
}

double certified_value(const SdpSolution& sol, double tol, const char* what) {
  const double worst = std::max({sol.gap, sol.primal_residual, sol.dual_residual});
  if (sol.status == SdpStatus::kInfeasible || worst > 50.0 * tol)
    throw SolverFailure(std::string(what) + ": solver stalled (residual " +
                        std::to_string(worst) + ")");
  // The dual bound cannot under-report the maximum, so measures derived as
  // 1 - value^2 stay true lower bounds (up to the dual residual).
  return std::clamp(-sol.dual_objective, 0.0, 1.0);
}

}  // namespace

double max_fidelity_fixed(const DensityMatrix& rho, const DensityMatrix& sigma, double tol) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("fidelity SDP requires equal dimensions");
  const Support sr = support_of(rho);
  const Support ss = support_of(sigma);
  const int r = static_cast<int>(sr.evals.size());
  const int s = static_cast<int>(ss.evals.size());
  const int n = r + s;

  SdpProblem p;
  p.block_dims = {2 * n};
  p.objective = {fidelity_objective(ss.basis.adjoint() * sr.basis, r, s)};
  append_diagonal_pins(p, 0, n, 0, sr.evals);
  append_diagonal_pins(p, 0, n, r, ss.evals);

  return certified_value(solve_sdp(p, tol), tol, "max_fidelity_fixed");
}

IncoherentFidelity max_fidelity_incoherent(const DensityMatrix& rho, double tol) {
  const Support sr = support_of(rho);
  const int r = static_cast<int>(sr.evals.size());
  const int d = rho.dim();
  const int n = r + d;

  SdpProblem p;
  p.block_dims = {2 * n};
  p.objective = {fidelity_objective(sr.basis, r, d)};
  append_diagonal_pins(p, 0, n, 0, sr.evals);

  // sigma must be diagonal in the incoherent basis...
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      SdpConstraint re;
      append_realified_half(re.entries, 0, n,
                            {{i, j, Complex(0.5, 0)}, {j, i, Complex(0.5, 0)}}, r);
      re.b = 0.0;
      p.constraints.push_back(std::move(re));
      SdpConstraint im;
      append_realified_half(im.entries, 0, n,
                            {{i, j, Complex(0, 0.5)}, {j, i, Complex(0, -0.5)}}, r);
      im.b = 0.0;
      p.constraints.push_back(std::move(im));
    }
  }
  // ...with unit trace; positivity of its diagonal comes with G >= 0.
  {
    SdpConstraint trace;
    std::vector<std::tuple<int, int, Complex>> eye;
    for (int i = 0; i < d; ++i) eye.emplace_back(i, i, Complex(1, 0));
    append_realified_half(trace.entries, 0, n, eye, r);
    trace.b = 1.0;
    p.constraints.push_back(std::move(trace));
  }

  SdpSolution sol = solve_sdp(p, tol);
  IncoherentFidelity out;
  out.value = certified_value(sol, tol, "max_fidelity_incoherent");
  const CMat g = unrealify(sol.primal[0]);
  out.q = RVec(d);
  for (int i = 0; i < d; ++i) out.q[i] = std::max(g(r + i, r + i).real(), 0.0);
  out.q /= out.q.sum();
  return out;
}

double max_fidelity_ppt(const DensityMatrix& rho,
                        const std::vector<std::vector<int>>& bipartitions, double tol) {
  if (rho.num_subsystems() < 2)
    throw NotBipartite("PPT fidelity requires a multipartite state");
  if (bipartitions.empty()) throw ParamOutOfRange("PPT fidelity needs >= 1 bipartition");
  const int d = rho.dim();
  const int nsub = rho.num_subsystems();
  std::vector<long> strides(static_cast<size_t>(nsub));
  {
    long s = 1;
    for (int i = nsub - 1; i >= 0; --i) {
      strides[static_cast<size_t>(i)] = s;
      s *= rho.dims()[static_cast<size_t>(i)];
    }
  }

  const Support sr = support_of(rho);
  const int r = static_cast<int>(sr.evals.size());
  const int n0 = r + d;

  SdpProblem p;
  p.block_dims = {2 * n0};
  p.objective = {fidelity_objective(sr.basis, r, d)};
  append_diagonal_pins(p, 0, n0, 0, sr.evals);
  {
    SdpConstraint trace;
    std::vector<std::tuple<int, int, Complex>> eye;
    for (int i = 0; i < d; ++i) eye.emplace_back(i, i, Complex(1, 0));
    append_realified_half(trace.entries, 0, n0, eye, r);
    trace.b = 1.0;
    p.constraints.push_back(std::move(trace));
  }

  for (const std::vector<int>& part : bipartitions) {
    if (part.empty()) throw ParamOutOfRange("empty bipartition");
    for (size_t i = 0; i < part.size(); ++i) {
      if (part[i] < 0 || part[i] >= nsub) throw InvalidSubsystem("bipartition index out of range");
      if (i > 0 && part[i] <= part[i - 1])
        throw InvalidSubsystem("bipartition indices must be strictly increasing");
    }
    const int blk = static_cast<int>(p.block_dims.size());
    p.block_dims.push_back(2 * d);
    p.objective.push_back(RMat::Zero(2 * d, 2 * d));

    // The digits of an index belonging to the transposed subsystems.
    auto part_digits = [&](long idx) {
      long acc = 0;
      for (int s : part)
        acc += ((idx / strides[static_cast<size_t>(s)]) %
                rho.dims()[static_cast<size_t>(s)]) *
               strides[static_cast<size_t>(s)];
      return acc;
    };

    // Link S = sigma^{T_part} entrywise: S[i,j] = sigma[i', j'] where the
    // part-digits of i and j are exchanged.
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        const long di = part_digits(i), dj = part_digits(j);
        const int ip = static_cast<int>(i - di + dj);
        const int jp = static_cast<int>(j - dj + di);
        SdpConstraint re;
        if (i == j) {
          append_realified_half(re.entries, blk, d, {{i, i, Complex(1, 0)}});
          append_realified_half(re.entries, 0, n0, {{ip, ip, Complex(-1, 0)}}, r);
        } else {
          append_realified_half(re.entries, blk, d,
                                {{i, j, Complex(0.5, 0)}, {j, i, Complex(0.5, 0)}});
          append_realified_half(re.entries, 0, n0,
                                {{ip, jp, Complex(-0.5, 0)}, {jp, ip, Complex(-0.5, 0)}}, r);
          SdpConstraint im;
          append_realified_half(im.entries, blk, d,
                                {{i, j, Complex(0, 0.5)}, {j, i, Complex(0, -0.5)}});
          append_realified_half(im.entries, 0, n0,
                                {{ip, jp, Complex(0, -0.5)}, {jp, ip, Complex(0, 0.5)}}, r);
          im.b = 0.0;
          p.constraints.push_back(std::move(im));
        }
        re.b = 0.0;
        p.constraints.push_back(std::move(re));
      }
    }
  }

  return certified_value(solve_sdp(p, tol), tol, "max_fidelity_ppt");
}

std::string dump_json(const SdpProblem& p) {
  nlohmann::json j;
  j["blocks"] = p.block_dims;
  j["objective"] = nlohmann::json::array();
  for (const RMat& c : p.objective) {
    std::vector<double> flat(c.data(), c.data() + c.size());
    j["objective"].push_back(flat);
  }
  j["constraints"] = nlohmann::json::array();
  for (const SdpConstraint& c : p.constraints) {
    nlohmann::json jc;
    jc["b"] = c.b;
    jc["entries"] = nlohmann::json::array();
    for (const BlockEntry& e : c.entries)
      jc["entries"].push_back({e.block, e.row, e.col, e.value});
    j["constraints"].push_back(std::move(jc));
  }
  return j.dump();
}

}  // namespace qre
