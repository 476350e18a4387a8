// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_TESTS_ORACLES_HPP
#define SSMO_TESTS_ORACLES_HPP

// Independent reference computations used by the tests. Nothing here calls into the
// library beyond its plain data types.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle
{

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// exp(A) by scaling and squaring with a degree-20 Taylor polynomial.
inline Matrix expm(const Matrix &A)
{
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (norm > 0.5)
  {
    s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Matrix As = A / std::pow(2.0, s);
  Matrix term = Matrix::Identity(A.rows(), A.cols());
  Matrix sum = term;
  for (int k = 1; k <= 20; k++)
  {
    term = term * As / double(k);
    sum += term;
  }
  for (int k = 0; k < s; k++)
  {
    sum = sum * sum;
  }
  return sum;
}

// Linear flow x(t) = exp(A t) x0 at the given instants, one column per instant.
inline Matrix linear_flow(const Matrix &A, const Vector &x0, const Vector &times)
{
  Matrix out(x0.size(), times.size());
  for (Eigen::Index k = 0; k < times.size(); k++)
  {
    out.col(k) = expm(A * times(k)) * x0;
  }
  return out;
}

// Steady response of dx/dt = A x + g cos(W t): x = Re(X e^{iWt}), X = (iW I - A)^{-1} g.
inline CVector transfer_response(const Matrix &A, const Vector &g, double W)
{
  const Eigen::Index n = A.rows();
  CMatrix M = Complex(0.0, W) * CMatrix::Identity(n, n) - A.cast<Complex>();
  return M.partialPivLu().solve(g.cast<Complex>());
}

// Lorentzian steady amplitude of rho' = a0 rho + f cos psi, theta' = b0.
inline double lorentzian(double a0, double b0, double f, double W)
{
  return f / std::sqrt(a0 * a0 + (b0 - W) * (b0 - W));
}

// Samples of e^{-z w t} cos(w_d t) (w_d = w sqrt(1 - z^2)) at t = 0, dt, ...
inline std::vector<double> damped_cosine(double w, double zeta, double dt, int n)
{
  const double wd = w * std::sqrt(1.0 - zeta * zeta);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; k++)
  {
    const double t = k * dt;
    out[static_cast<std::size_t>(k)] = std::exp(-zeta * w * t) * std::cos(wd * t);
  }
  return out;
}

// Real 2x2 block of a complex pair: [[s, -w], [w, s]].
inline Matrix rotation_block(double s, double w)
{
  Matrix B(2, 2);
  B << s, -w, w, s;
  return B;
}

// Oblique projector onto span(V_E) along span(V_F), from the full eigenvector basis
// [V_E V_F] (real columns): P = V diag(I, 0) V^{-1}.
inline Matrix projector_along(const Matrix &VE, const Matrix &VF)
{
  Matrix V(VE.rows(), VE.cols() + VF.cols());
  V << VE, VF;
  Matrix D = Matrix::Zero(V.cols(), V.cols());
  D.topLeftCorner(VE.cols(), VE.cols()).setIdentity();
  return V * D * V.inverse();
}

// Cosines of the principal angles between two subspaces: singular values of Q1^T Q2.
inline Vector principal_cosines(const Matrix &S1, const Matrix &S2)
{
  const Matrix Q1 = Eigen::HouseholderQR<Matrix>(S1).householderQ() *
                    Matrix::Identity(S1.rows(), S1.cols());
  const Matrix Q2 = Eigen::HouseholderQR<Matrix>(S2).householderQ() *
                    Matrix::Identity(S2.rows(), S2.cols());
  return Eigen::JacobiSVD<Matrix>(Q1.transpose() * Q2).singularValues();
}

// Linear-regime cut by brute force: for every cut k (points sorted by descending amplitude,
// remainder = points k+1..), the first k whose removal changes the remainder mean by less
// than threshold relative; returns the number of surviving points.
inline std::size_t regime_scan(const std::vector<double> &freqs_desc_amplitude, double threshold)
{
  const std::size_t n = freqs_desc_amplitude.size();
  auto mean = [&](std::size_t from)
  {
    double s = 0.0;
    for (std::size_t j = from; j < n; j++)
    {
      s += freqs_desc_amplitude[j];
    }
    return s / double(n - from);
  };
  for (std::size_t k = 0; k + 3 <= n; k++)
  {
    const double before = mean(k), after = mean(k + 1);
    if (std::abs(after - before) / before < threshold)
    {
      return n - k;
    }
  }
  return 3;
}

inline Matrix random_matrix(std::mt19937_64 &rng, Eigen::Index r, Eigen::Index c)
{
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix M(r, c);
  for (Eigen::Index i = 0; i < r; i++)
  {
    for (Eigen::Index j = 0; j < c; j++)
    {
      M(i, j) = normal(rng);
    }
  }
  return M;
}

}  // namespace oracle

#endif  // SSMO_TESTS_ORACLES_HPP
