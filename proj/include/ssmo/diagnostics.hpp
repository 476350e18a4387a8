// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_DIAGNOSTICS_HPP
#define SSMO_DIAGNOSTICS_HPP

#include <string>
#include <vector>
#include "ssmo/core.hpp"
#include "ssmo/projection.hpp"

namespace ssmo
{

struct NearResonance
{
  Index j = 0;             // eigenvalue index in the report ordering
  std::vector<int> m;      // multi-index over the same ordering
  double defect = 0.0;     // |lambda_j - sum_k m_k lambda_k|
};

struct SpectrumReport
{
  CVector eigenvalues;  // sorted by |Re|, then |Im|
  bool nonresonant = true;
  int max_order = 0;
  double tol = 0.0;
  std::vector<NearResonance> near_resonances;
  std::vector<std::string> warnings;
};

// Enumerates every multi-index m with 2 <= |m| <= max_order and flags
// |lambda_j - sum m_k lambda_k| < tol |lambda_j|.
SpectrumReport check_nonresonance(const Matrix &A, int max_order = 7, double tol = 1e-6);

// Projector onto the span of the d slowest eigenvectors along the remaining ones, built
// from right eigenvectors V and the biorthogonal left eigenvectors (rows of V^{-1}).
ObliqueProjector spectral_projector(const Matrix &A, Index d);

// Principal angles between span(S1) and span(S2), ascending, in [0, pi/2].
std::vector<double> principal_angles(const Matrix &S1, const Matrix &S2);

}  // namespace ssmo

#endif  // SSMO_DIAGNOSTICS_HPP
