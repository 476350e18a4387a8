// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <Eigen/SVD>
#include <fmt/format.h>
#include "ssmo/linalg.hpp"

namespace ssmo
{

namespace
{

// Calls visit(m) for every multi-index of length n and total degree exactly deg.
template <typename F>
void for_each_multi_index(Index n, int deg, std::vector<int> &m, Index pos, F &&visit)
{
  if (pos == n - 1)
  {
    m[pos] = deg;
    visit(m);
    return;
  }
  for (int e = deg; e >= 0; e--)
  {
    m[pos] = e;
    for_each_multi_index(n, deg - e, m, pos + 1, visit);
  }
}

}  // namespace

SpectrumReport check_nonresonance(const Matrix &A, int max_order, double tol)
{
  if (A.rows() != A.cols() || A.rows() < 1)
  {
    throw Error("nonresonance check needs a nonempty square matrix");
  }
  const EigenPairs eig = eigen_decompose(A);
  const auto order = slowest_first(eig.values);
  const Index n = A.rows();
  SpectrumReport rep;
  rep.max_order = max_order;
  rep.tol = tol;
  rep.eigenvalues.resize(n);
  CMatrix V(n, n);
  for (Index k = 0; k < n; k++)
  {
    rep.eigenvalues(k) = eig.values(order[k]);
    V.col(k) = eig.vectors.col(order[k]);
  }
  Eigen::JacobiSVD<CMatrix> svd(V);
  const auto &s = svd.singularValues();
  if (!(s(n - 1) > 1e-8 * s(0)))
  {
    rep.warnings.push_back(fmt::format(
        "matrix appears non-semisimple (eigenvector condition number {:.3e})",
        s(n - 1) > 0.0 ? s(0) / s(n - 1) : std::numeric_limits<double>::infinity()));
  }
  std::vector<int> m(n, 0);
  for (int deg = 2; deg <= max_order; deg++)
  {
    for_each_multi_index(n, deg, m, 0,
                         [&](const std::vector<int> &mi)
                         {
                           Complex comb = 0.0;
                           for (Index k = 0; k < n; k++)
                           {
                             comb += double(mi[k]) * rep.eigenvalues(k);
                           }
                           for (Index j = 0; j < n; j++)
                           {
                             const double defect = std::abs(rep.eigenvalues(j) - comb);
                             if (defect < tol * std::abs(rep.eigenvalues(j)))
                             {
                               rep.nonresonant = false;
                               rep.near_resonances.push_back({j, mi, defect});
                             }
                           }
                         });
  }
  return rep;
}

ObliqueProjector spectral_projector(const Matrix &A, Index d)
{
  const Index n = A.rows();
  if (A.cols() != n || d < 1 || d > n)
  {
    throw Error(fmt::format("spectral projector needs a square matrix and 1 <= d <= n "
                            "(d = {}, n = {})",
                            d, n));
  }
  const EigenPairs eig = eigen_decompose(A);
  const auto order = slowest_first(eig.values);
  if (d < n)
  {
    const double r_in = std::abs(eig.values(order[d - 1]).real());
    const double r_out = std::abs(eig.values(order[d]).real());
    if (std::abs(r_out - r_in) <= 1e-9 * std::max(r_in, 1e-300))
    {
      throw Error("tie at the slow/fast split: decay rates of modes d and d + 1 coincide");
    }
  }
  CMatrix V(n, n);
  CVector lam(n);
  for (Index k = 0; k < n; k++)
  {
    V.col(k) = eig.vectors.col(order[k]);
    lam(k) = eig.values(order[k]);
  }
  const CMatrix W = V.inverse();  // rows are left eigenvectors, W V = I
  const CVector lamE = lam.head(d);
  const Matrix Q = real_mode_basis(lamE, V.leftCols(d));
  const Matrix B = real_mode_basis(lamE, W.topRows(d).transpose());
  return ObliqueProjector(Q, B);
}

std::vector<double> principal_angles(const Matrix &S1, const Matrix &S2)
{
  if (S1.rows() != S2.rows() || S1.cols() != S2.cols() || S1.cols() < 1)
  {
    throw Error("principal angles need two p x k bases of equal shape");
  }
  const Index k = S1.cols();
  if (numerical_rank(S1, 1e-12) < k || numerical_rank(S2, 1e-12) < k)
  {
    throw Error("principal angles: rank-deficient basis");
  }
  const Matrix Q1 = orthonormalize(S1), Q2 = orthonormalize(S2);
  const Vector c = Eigen::JacobiSVD<Matrix>(Q1.transpose() * Q2).singularValues();
  const Vector s =
      Eigen::JacobiSVD<Matrix>(Q2 - Q1 * (Q1.transpose() * Q2)).singularValues();
  std::vector<double> out(k);
  for (Index i = 0; i < k; i++)
  {
    const double from_cos = std::acos(std::clamp(c(i), 0.0, 1.0));
    const double from_sin = std::asin(std::clamp(s(k - 1 - i), 0.0, 1.0));
    out[i] = from_sin < std::numbers::pi / 4 ? from_sin : from_cos;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ssmo
