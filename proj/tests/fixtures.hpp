// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_TESTS_FIXTURES_HPP
#define SSMO_TESTS_FIXTURES_HPP

// Synthetic models built from library types.

#include <vector>
#include <Eigen/QR>
#include "ssmo/polynomial.hpp"

namespace fixture
{

using ssmo::Index;
using ssmo::Matrix;
using ssmo::PolynomialMap;
using ssmo::Vector;

// Normal-form field w' = sum_j (a_j + i b_j) |w|^(2j) w in Cartesian coordinates.
inline PolynomialMap normal_form(const std::vector<double> &a, const std::vector<double> &b)
{
  const int order = 2 * int(a.size()) - 1;
  PolynomialMap m(2, 2, order);
  Matrix C = Matrix::Zero(2, m.monomial_count());
  for (std::size_t j = 0; j < a.size(); j++)
  {
    // |w|^(2j) = sum_i C(j, i) x^(2i) y^(2(j-i))
    double binom = 1.0;
    for (int i = 0; i <= int(j); i++)
    {
      const int ex = 2 * i, ey = 2 * (int(j) - i);
      C(0, m.monomial_index({ex + 1, ey})) += binom * a[j];
      C(0, m.monomial_index({ex, ey + 1})) -= binom * b[j];
      C(1, m.monomial_index({ex + 1, ey})) += binom * b[j];
      C(1, m.monomial_index({ex, ey + 1})) += binom * a[j];
      binom = binom * double(int(j) - i) / double(i + 1);
    }
  }
  m.set_coefficients(C);
  return m;
}

// Field conjugated by a linear change of coordinates xi = S u.
inline PolynomialMap conjugate(const PolynomialMap &m, const Matrix &S, const Matrix &samples)
{
  const Matrix Sinv = S.inverse();
  Matrix target(2, samples.cols());
  for (Index k = 0; k < samples.cols(); k++)
  {
    target.col(k) = S * m.evaluate(Vector(Sinv * samples.col(k)));
  }
  PolynomialMap out(2, 2, m.order());
  const Matrix Phi = out.features(samples);
  out.set_coefficients(Phi.transpose().colPivHouseholderQr().solve(target.transpose()).transpose());
  return out;
}

}  // namespace fixture

#endif  // SSMO_TESTS_FIXTURES_HPP
