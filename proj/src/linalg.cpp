// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ssmo
{

Matrix orthonormalize(const Matrix &A)
{
  if (A.cols() == 0)
  {
    return Matrix(A.rows(), 0);
  }
  if (A.cols() > A.rows())
  {
    throw Error("orthonormalize: more columns than rows");
  }
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
  const Matrix R = qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < A.cols(); j++)
  {
    if (R(j, j) < 0.0)
    {
      Q.col(j) *= -1.0;
    }
  }
  return Q;
}

Matrix orthogonal_complement(const Matrix &Q)
{
  const Index p = Q.rows(), k = Q.cols();
  if (k >= p)
  {
    return Matrix(p, 0);
  }
  Eigen::HouseholderQR<Matrix> qr(Q);
  Matrix full = qr.householderQ() * Matrix::Identity(p, p);
  return full.rightCols(p - k);
}

Index numerical_rank(const Matrix &A, double rel_tol)
{
  if (A.size() == 0)
  {
    return 0;
  }
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto &s = svd.singularValues();
  if (s(0) == 0.0)
  {
    return 0;
  }
  Index r = 0;
  while (r < s.size() && s(r) > rel_tol * s(0))
  {
    r++;
  }
  return r;
}

double condition_number(const Matrix &A)
{
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto &s = svd.singularValues();
  if (s.size() == 0)
  {
    return 1.0;
  }
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / smin;
}

EigenPairs eigen_decompose(const Matrix &A)
{
  Eigen::EigenSolver<Matrix> es(A, true);
  if (es.info() != Eigen::Success)
  {
    throw Error("eigendecomposition failed to converge");
  }
  EigenPairs out{es.eigenvalues(), es.eigenvectors()};
  for (Index j = 0; j < out.vectors.cols(); j++)
  {
    out.vectors.col(j).normalize();
  }
  return out;
}

Matrix real_mode_basis(const CVector &values, const CMatrix &vectors, double imag_tol)
{
  const Index n = values.size();
  std::vector<bool> used(n, false);
  std::vector<Vector> cols;
  for (Index j = 0; j < n; j++)
  {
    if (used[j])
    {
      continue;
    }
    used[j] = true;
    const Complex lam = values(j);
    if (std::abs(lam.imag()) <= imag_tol * std::max(1.0, std::abs(lam)))
    {
      cols.push_back(vectors.col(j).real());
      continue;
    }
    // Locate the conjugate partner.
    Index partner = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < n; k++)
    {
      if (!used[k])
      {
        const double dist = std::abs(values(k) - std::conj(lam));
        if (dist < best)
        {
          best = dist;
          partner = k;
        }
      }
    }
    if (partner < 0 || best > 1e-8 * std::max(1.0, std::abs(lam)))
    {
      throw Error("mode set is not closed under complex conjugation");
    }
    used[partner] = true;
    const CVector v = lam.imag() > 0.0 ? CVector(vectors.col(j))
                                       : CVector(vectors.col(j).conjugate());
    cols.push_back(v.real());
    cols.push_back(v.imag());
  }
  Matrix basis(vectors.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); j++)
  {
    basis.col(static_cast<Index>(j)) = cols[j];
  }
  return basis;
}

std::vector<Index> slowest_first(const CVector &values)
{
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b)
                   {
                     const Complex la = values(a), lb = values(b);
                     const double ra = std::abs(la.real()), rb = std::abs(lb.real());
                     if (ra != rb)
                     {
                       return ra < rb;
                     }
                     const double ia = std::abs(la.imag()), ib = std::abs(lb.imag());
                     if (ia != ib)
                     {
                       return ia < ib;
                     }
                     return la.imag() > lb.imag();
                   });
  return order;
}

}  // namespace ssmo
