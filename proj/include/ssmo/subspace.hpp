// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_SUBSPACE_HPP
#define SSMO_SUBSPACE_HPP

#include <string>
#include <vector>
#include "ssmo/core.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

// Slow spectral subspace identified from snapshot data.
struct SlowSubspace
{
  Matrix basis;             // Q, p x d real basis built from the slow DMD modes
  Matrix orthonormal;       // Q_tilde, orthonormalization of Q
  CVector eigenvalues;      // continuous-time estimates of the retained modes
  CVector all_eigenvalues;  // every DMD eigenvalue, slowest first
  Index svd_rank = 0;
  std::vector<std::string> diagnostics;

  Index dim() const { return basis.cols(); }
};

struct DmdOptions
{
  // Singular values below rank_tol * sigma_1 are truncated. The retained rank is at least d.
  double rank_tol = 1e-10;
  // Hard cap on the SVD rank (0: no cap beyond rank_tol).
  Index max_rank = 0;
};

// DMD on the snapshot pair: compact SVD V1 = U S W^T, reduced operator
// A_r = U^T V2 W S^{-1}, eigenpairs of A_r, continuous eigenvalues log(mu) / dt. The d
// slowest modes (largest |mu|) give Q = U V_r, with conjugate pairs turned into their real
// and imaginary parts.
SlowSubspace dmd_slow_subspace(const SnapshotPair &pair, Index d, double dt,
                               const DmdOptions &opts = {});

}  // namespace ssmo

#endif  // SSMO_SUBSPACE_HPP
