// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_POLYNOMIAL_HPP
#define SSMO_POLYNOMIAL_HPP

#include <vector>
#include "ssmo/core.hpp"

namespace ssmo
{

// Exponents of all monomials in d variables with total degree 1..order, graded
// lexicographic: by degree, then lexicographically descending in the exponent vector
// (x1^2, x1 x2, x2^2 for d = 2).
std::vector<std::vector<int>> monomial_exponents(Index d, int order);

//
// Vector-valued polynomial y = C phi(x) without constant term; phi is the monomial feature
// vector in monomial_exponents order.
//
class PolynomialMap
{
public:
  PolynomialMap(Index input_dim, Index output_dim, int order);
  PolynomialMap(Index input_dim, int order, Matrix coefficients);

  Index input_dim() const { return d_; }
  Index output_dim() const { return C_.rows(); }
  int order() const { return order_; }
  Index monomial_count() const { return static_cast<Index>(exponents_.size()); }
  const std::vector<std::vector<int>> &exponents() const { return exponents_; }

  const Matrix &coefficients() const { return C_; }
  void set_coefficients(Matrix C);

  // Position of an exponent vector in the feature ordering; throws if absent.
  Index monomial_index(const std::vector<int> &exponent) const;

  // Features of one point (length monomial_count) or of many (one column per point).
  Vector features(const Vector &x) const;
  Matrix features(const Matrix &X) const;

  Vector evaluate(const Vector &x) const;
  Matrix evaluate(const Matrix &X) const;

  // Homogeneous part of the given degree at x.
  Vector evaluate_degree(const Vector &x, int degree) const;

  // Jacobian dy/dx at x (output_dim x input_dim).
  Matrix jacobian(const Vector &x) const;

  // Coefficients of the degree-1 monomials, output_dim x input_dim.
  Matrix linear_part() const;

private:
  Index d_;
  int order_;
  std::vector<std::vector<int>> exponents_;
  Matrix C_;
};

}  // namespace ssmo

#endif  // SSMO_POLYNOMIAL_HPP
