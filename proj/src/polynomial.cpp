// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/polynomial.hpp"

#include <algorithm>
#include <numeric>
#include <fmt/format.h>

namespace ssmo
{

namespace
{

void append_degree(Index d, int degree, std::vector<int> &current, Index pos,
                   std::vector<std::vector<int>> &out)
{
  if (pos == d - 1)
  {
    current[pos] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; e--)
  {
    current[pos] = e;
    append_degree(d, degree - e, current, pos + 1, out);
  }
}

double ipow(double x, int e)
{
  double r = 1.0;
  for (int k = 0; k < e; k++)
  {
    r *= x;
  }
  return r;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(Index d, int order)
{
  if (d < 1 || order < 1)
  {
    throw Error(fmt::format("polynomial needs d >= 1 and order >= 1 (got d = {}, order = {})",
                            d, order));
  }
  std::vector<std::vector<int>> out;
  std::vector<int> current(d, 0);
  for (int degree = 1; degree <= order; degree++)
  {
    append_degree(d, degree, current, 0, out);
  }
  return out;
}

PolynomialMap::PolynomialMap(Index input_dim, Index output_dim, int order)
  : d_(input_dim), order_(order), exponents_(monomial_exponents(input_dim, order))
{
  if (output_dim < 1)
  {
    throw Error("polynomial output dimension must be positive");
  }
  C_ = Matrix::Zero(output_dim, monomial_count());
}

PolynomialMap::PolynomialMap(Index input_dim, int order, Matrix coefficients)
  : d_(input_dim), order_(order), exponents_(monomial_exponents(input_dim, order))
{
  set_coefficients(std::move(coefficients));
}

void PolynomialMap::set_coefficients(Matrix C)
{
  if (C.cols() != monomial_count() || C.rows() < 1)
  {
    throw Error(fmt::format("coefficient matrix must have {} columns (got {}x{})",
                            monomial_count(), C.rows(), C.cols()));
  }
  C_ = std::move(C);
}

Index PolynomialMap::monomial_index(const std::vector<int> &exponent) const
{
  const auto it = std::find(exponents_.begin(), exponents_.end(), exponent);
  if (it == exponents_.end())
  {
    throw Error("monomial not present in this polynomial map");
  }
  return static_cast<Index>(it - exponents_.begin());
}

Vector PolynomialMap::features(const Vector &x) const
{
  if (x.size() != d_)
  {
    throw Error(fmt::format("polynomial input has length {}, expected {}", x.size(), d_));
  }
  // Powers table x_i^e for e = 0..order.
  Matrix pw(d_, order_ + 1);
  for (Index i = 0; i < d_; i++)
  {
    pw(i, 0) = 1.0;
    for (int e = 1; e <= order_; e++)
    {
      pw(i, e) = pw(i, e - 1) * x(i);
    }
  }
  Vector phi(monomial_count());
  for (Index k = 0; k < monomial_count(); k++)
  {
    double v = 1.0;
    for (Index i = 0; i < d_; i++)
    {
      v *= pw(i, exponents_[k][i]);
    }
    phi(k) = v;
  }
  return phi;
}

Matrix PolynomialMap::features(const Matrix &X) const
{
  Matrix Phi(monomial_count(), X.cols());
  for (Index j = 0; j < X.cols(); j++)
  {
    Phi.col(j) = features(Vector(X.col(j)));
  }
  return Phi;
}

Vector PolynomialMap::evaluate(const Vector &x) const { return C_ * features(x); }

Matrix PolynomialMap::evaluate(const Matrix &X) const { return C_ * features(X); }

Vector PolynomialMap::evaluate_degree(const Vector &x, int degree) const
{
  const Vector phi = features(x);
  Vector y = Vector::Zero(output_dim());
  for (Index k = 0; k < monomial_count(); k++)
  {
    const auto &e = exponents_[k];
    if (std::accumulate(e.begin(), e.end(), 0) == degree)
    {
      y += C_.col(k) * phi(k);
    }
  }
  return y;
}

Matrix PolynomialMap::jacobian(const Vector &x) const
{
  if (x.size() != d_)
  {
    throw Error("polynomial jacobian: input length mismatch");
  }
  Matrix dphi = Matrix::Zero(monomial_count(), d_);
  for (Index k = 0; k < monomial_count(); k++)
  {
    for (Index i = 0; i < d_; i++)
    {
      const int ei = exponents_[k][i];
      if (ei == 0)
      {
        continue;
      }
      double v = ei * ipow(x(i), ei - 1);
      for (Index l = 0; l < d_; l++)
      {
        if (l != i)
        {
          v *= ipow(x(l), exponents_[k][l]);
        }
      }
      dphi(k, i) = v;
    }
  }
  return C_ * dphi;
}

Matrix PolynomialMap::linear_part() const { return C_.leftCols(d_); }

}  // namespace ssmo
