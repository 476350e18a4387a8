// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_LINALG_HPP
#define SSMO_LINALG_HPP

#include <vector>
#include "ssmo/core.hpp"

namespace ssmo
{

// Orthonormal basis of span(A) from a thin Householder QR. Column signs are fixed so that
// the triangular factor has a nonnegative diagonal, which makes the result deterministic.
Matrix orthonormalize(const Matrix &A);

// Orthonormal basis (p x (p - k)) of the orthogonal complement of span(Q), Q being p x k
// with orthonormal columns.
Matrix orthogonal_complement(const Matrix &Q);

// Numerical rank by singular values relative to the largest.
Index numerical_rank(const Matrix &A, double rel_tol);

// Spectral condition number via SVD.
double condition_number(const Matrix &A);

// Eigen-decomposition of a general real matrix.
struct EigenPairs
{
  CVector values;
  CMatrix vectors;  // columns, unit 2-norm
};
EigenPairs eigen_decompose(const Matrix &A);

// Converts a set of complex modes (closed under conjugation) into a real basis: a real
// eigenvalue contributes the real part of its vector, a conjugate pair contributes the real
// and imaginary parts of the member with positive imaginary part. The column order follows
// the input order with each pair collapsed into two adjacent columns.
Matrix real_mode_basis(const CVector &values, const CMatrix &vectors, double imag_tol = 1e-12);

// Permutation indices that order eigenvalues from slowest to fastest decay, i.e. by
// ascending |Re lambda|; conjugate partners are kept adjacent (positive imaginary first).
std::vector<Index> slowest_first(const CVector &values);

}  // namespace ssmo

#endif  // SSMO_LINALG_HPP
