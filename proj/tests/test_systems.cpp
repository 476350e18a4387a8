// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numbers>
#include "oracles.hpp"
#include "ssmo/systems.hpp"

using namespace ssmo;

namespace
{

// Eigenvalues with Im >= 0, ascending by |Re|.
std::vector<Complex> upper_eigenvalues(const CVector &ev)
{
  std::vector<Complex> out;
  for (Index k = 0; k < ev.size(); k++)
  {
    if (ev(k).imag() >= 0.0)
    {
      out.push_back(ev(k));
    }
  }
  std::sort(out.begin(), out.end(),
            [](Complex a, Complex b) { return std::abs(a.real()) < std::abs(b.real()); });
  return out;
}

// First-order matrix of the two-mass chain written out entry by entry.
Matrix shaw_pierre_matrix(double m1, double m2, double c1, double c2, double k1, double k2)
{
  Matrix A(4, 4);
  // clang-format off
  A << 0, 0, 1, 0,
       0, 0, 0, 1,
       -k1 / m1, k2 / m1, -c1 / m1, c2 / m1,
       -(m1 - m2) * k1 / (m1 * m2), -(m1 * (k1 + k2) + m2 * k2) / (m1 * m2),
       -(m1 - m2) * c1 / (m1 * m2), -(m1 * (c1 + c2) + m2 * c2) / (m1 * m2);
  // clang-format on
  return A;
}

}  // namespace

TEST_CASE("Shaw-Pierre eigenvalues")
{
  const auto ev = upper_eigenvalues(shaw_pierre().eigenvalues());
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0] - Complex(-0.025, 0.9997)) < 5e-4);
  CHECK(std::abs(ev[1] - Complex(-0.035, 2.7656)) < 5e-4);
}

TEST_CASE("Shaw-Pierre first-order matrix and nonlinearity")
{
  const MechanicalSystem sys = shaw_pierre();
  const Matrix ref = shaw_pierre_matrix(1.0, 1.0, 0.05, 0.01, 1.0, 3.325);
  CHECK((sys.first_order_matrix() - ref).cwiseAbs().maxCoeff() < 1e-14);
  Vector x(4);
  x << 0.7, -0.2, 0.3, 0.1;
  const Vector F = sys.nonlinearity(x);
  CHECK(std::abs(F(0)) == 0.0);
  CHECK(std::abs(F(1)) == 0.0);
  CHECK(F(2) == doctest::Approx(-0.5 * 0.7 * 0.7 * 0.7).epsilon(1e-14));
  CHECK(std::abs(F(3)) < 1e-15);
}

TEST_CASE("Shaw-Pierre matrix for unequal masses")
{
  ShawPierreParams p;
  p.m1 = 1.3;
  p.m2 = 0.7;
  const Matrix ref = shaw_pierre_matrix(p.m1, p.m2, p.c1, p.c2, p.k1, p.k2);
  CHECK((shaw_pierre(p).first_order_matrix() - ref).cwiseAbs().maxCoeff() < 1e-13);
  Vector x(4);
  x << 0.4, 0.1, 0.0, 0.0;
  const Vector F = shaw_pierre(p).nonlinearity(x);
  CHECK(F(2) == doctest::Approx(-p.alpha / p.m1 * 0.064).epsilon(1e-13));
  CHECK(std::abs(F(3)) < 1e-15);
}

TEST_CASE("cart eigenvalues")
{
  const auto ev = upper_eigenvalues(shaw_pierre_cart().eigenvalues());
  REQUIRE(ev.size() == 3);
  CHECK(std::abs(ev[0] - Complex(-0.022, 0.97)) < 5e-3);
  CHECK(std::abs(ev[1] - Complex(-0.035, 2.77)) < 5e-3);
  CHECK(std::abs(ev[2] - Complex(-0.059, 5.94)) < 5e-3);
}

TEST_CASE("cart nonlinearity pattern")
{
  const MechanicalSystem sys = shaw_pierre_cart();
  Vector x = Vector::Zero(6);
  x(0) = 0.5;
  // First-order nonlinearity is -M^{-1} alpha y1^3 (1, 0, -1).
  Vector f(3);
  f << 1.0, 0.0, -1.0;
  const Vector expect = -(sys.mass().inverse() * f) * 0.5 * 0.125;
  const Vector F = sys.nonlinearity(x);
  CHECK(F.head(3).norm() == 0.0);
  CHECK((F.tail(3) - expect).norm() < 1e-15);
}

TEST_CASE("linear example matrices")
{
  const LinearSystem s4 = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  const auto ev = upper_eigenvalues(s4.eigenvalues());
  CHECK(std::abs(ev[0] - Complex(-0.3, 3.0)) < 1e-12);
  CHECK(std::abs(ev[1] - Complex(-0.63, 8.0)) < 1e-12);
  CHECK_THROWS_AS(linear_4d(0.7, 0.63, 3.0, 8.0, {1, 1, 1, 1}), Error);
  const LinearSystem s2 = linear_2d(1.0, 2.0, 1.0);
  CHECK(s2.matrix()(0, 1) == 1.0);
  CHECK_THROWS_AS(linear_2d(2.0, 1.0, 1.0), Error);
}

TEST_CASE("linear decay matches the matrix exponential")
{
  const LinearSystem sys = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  Vector x0(4);
  x0 << 1.0, 1.0, 0.8, 0.8;
  const Trajectory tr = simulate_decay(sys, x0, 10.0, 0.05);
  const Matrix ref = oracle::linear_flow(sys.matrix(), x0, tr.times());
  CHECK((tr.states() - ref).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("integrator on the harmonic oscillator")
{
  VectorField f = [](double, const Vector &x, Vector &dx)
  {
    dx(0) = x(1);
    dx(1) = -4.0 * x(0);
  };
  Vector x0(2);
  x0 << 1.0, 0.0;
  const Vector t = uniform_grid(0.0, 50.0, 0.37);
  const Matrix X = integrate_on_grid(f, x0, t);
  double err = 0.0;
  for (Index k = 0; k < t.size(); k++)
  {
    err = std::max(err, std::abs(X(0, k) - std::cos(2.0 * t(k))));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("integrator reports non-finite states")
{
  VectorField blowup = [](double, const Vector &x, Vector &dx) { dx(0) = x(0) * x(0); };
  Vector x0(1);
  x0 << 1.0;
  CHECK_THROWS_AS(integrate_on_grid(blowup, x0, uniform_grid(0.0, 2.0, 0.1)), Error);
}

TEST_CASE("forced steady state of a linear chain matches the transfer function")
{
  ShawPierreParams p;
  p.alpha = 0.0;
  const MechanicalSystem sys = shaw_pierre(p);
  Vector r(2);
  r << 1.0, 1.0;
  const Vector g = sys.forcing_vector(r);
  for (double W : {0.9, 1.0, 1.1})
  {
    HarmonicForcing forcing{g, 0.01, W};
    const SteadyResponse resp = simulate_forced_steady_amplitude(sys, forcing, 0);
    const CVector X = oracle::transfer_response(sys.first_order_matrix(), g * 0.01, W);
    CHECK(resp.amplitude == doctest::Approx(std::abs(X(0))).epsilon(2e-3));
    // y ~ A cos(W t + phi) with phi the argument of X.
    const double dphi = std::remainder(resp.phase - std::arg(X(0)), 2.0 * std::numbers::pi);
    CHECK(std::abs(dphi) < 1e-2);
  }
}

TEST_CASE("forcing vector is (0, M^{-1} r)")
{
  const MechanicalSystem sys = shaw_pierre_cart();
  Vector r(3);
  r << 1.0, 0.0, 1.0;
  const Vector g = sys.forcing_vector(r);
  CHECK(g.head(3).norm() == 0.0);
  CHECK((g.tail(3) - sys.mass().inverse() * r).norm() < 1e-15);
  CHECK_THROWS_AS(sys.forcing_vector(Vector::Ones(2)), Error);
}
