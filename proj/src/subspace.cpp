// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/SVD>
#include <fmt/format.h>
#include "ssmo/linalg.hpp"

namespace ssmo
{

SlowSubspace dmd_slow_subspace(const SnapshotPair &pair, Index d, double dt,
                               const DmdOptions &opts)
{
  const Matrix &V1 = pair.v1, &V2 = pair.v2;
  if (V1.rows() != V2.rows() || V1.cols() != V2.cols())
  {
    throw Error("snapshot matrices differ in shape");
  }
  if (d < 1 || d > V1.rows())
  {
    throw Error(fmt::format("subspace dimension d = {} out of range for p = {}", d, V1.rows()));
  }
  if (V1.cols() < d + 1)
  {
    throw Error(fmt::format("DMD needs at least d + 1 = {} snapshot columns", d + 1));
  }
  if (!(dt > 0.0))
  {
    throw Error("DMD needs a positive sampling step");
  }

  Eigen::BDCSVD<Matrix> svd(V1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector &s = svd.singularValues();
  if (!(s(d - 1) > 1e-10 * s(0)))
  {
    throw Error(fmt::format(
        "rank deficiency: singular value {} of the snapshot matrix is {:.3e} of the first", d,
        s(d - 1) / s(0)));
  }
  Index r = d;
  while (r < s.size() && s(r) > opts.rank_tol * s(0))
  {
    r++;
  }
  if (opts.max_rank > 0)
  {
    r = std::max(d, std::min(r, opts.max_rank));
  }

  const Matrix U = svd.matrixU().leftCols(r);
  const Matrix W = svd.matrixV().leftCols(r);
  const Vector sinv = s.head(r).cwiseInverse();
  const Matrix Ar = U.transpose() * V2 * W * sinv.asDiagonal();
  const EigenPairs eig = eigen_decompose(Ar);

  CVector lambda(r);
  for (Index j = 0; j < r; j++)
  {
    lambda(j) = std::log(eig.values(j)) / dt;
  }
  std::vector<Index> order = slowest_first(lambda);

  SlowSubspace out;
  out.svd_rank = r;

  // Near-ties in decay rate across the split are resolved by ranking the lower frequency as
  // slower.
  if (d < r)
  {
    auto decay = [&](Index k) { return std::abs(lambda(order[k]).real()); };
    const double split = decay(d - 1);
    Index lo = d - 1, hi = d;
    while (lo > 0 && std::abs(decay(lo - 1) - split) <= 0.01 * split)
    {
      lo--;
    }
    while (hi < r && std::abs(decay(hi) - split) <= 0.01 * split)
    {
      hi++;
    }
    if (hi > d)
    {
      std::stable_sort(order.begin() + lo, order.begin() + hi,
                       [&](Index a, Index b)
                       {
                         const double fa = std::abs(lambda(a).imag());
                         const double fb = std::abs(lambda(b).imag());
                         if (fa != fb)
                         {
                           return fa < fb;
                         }
                         return lambda(a).imag() > lambda(b).imag();
                       });
      out.diagnostics.push_back(
          "near-equal decay rates at the slow/fast split; ties broken by lower frequency");
    }
    const Complex last = lambda(order[d - 1]), first_out = lambda(order[d]);
    if (std::abs(last.imag()) > 1e-12 &&
        std::abs(first_out - std::conj(last)) <= 1e-8 * std::abs(last))
    {
      throw Error(fmt::format("d = {} splits a complex-conjugate eigenvalue pair", d));
    }
  }

  out.all_eigenvalues.resize(r);
  for (Index k = 0; k < r; k++)
  {
    out.all_eigenvalues(k) = lambda(order[k]);
  }
  CVector mu_kept(d), lam_kept(d);
  CMatrix modes(V1.rows(), d);
  for (Index k = 0; k < d; k++)
  {
    const Index j = order[k];
    mu_kept(k) = eig.values(j);
    lam_kept(k) = lambda(j);
    if (std::abs(mu_kept(k)) >= 1.0)
    {
      throw Error(fmt::format("identified mode not decaying (|mu| = {:.6f}); regime likely "
                              "not linear or d too large",
                              std::abs(mu_kept(k))));
    }
    modes.col(k) = U.cast<Complex>() * eig.vectors.col(j);
  }
  out.eigenvalues = lam_kept;
  out.basis = real_mode_basis(mu_kept, modes);
  if (numerical_rank(out.basis, 1e-10) < d)
  {
    throw Error("identified slow modes are linearly dependent");
  }
  out.orthonormal = orthonormalize(out.basis);
  return out;
}

}  // namespace ssmo
