// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include "ssmo/bfgs.hpp"
#include "ssmo/parallel.hpp"

using namespace ssmo;

TEST_CASE("convex quadratic")
{
  Matrix H(3, 3);
  H << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
  Vector b(3);
  b << 1, -2, 0.5;
  auto f = [&](const Vector &x) { return 0.5 * x.dot(H * x) - b.dot(x); };
  const BfgsResult r = minimize_bfgs(f, Vector::Zero(3));
  const Vector xs = H.ldlt().solve(b);
  CHECK(r.converged);
  CHECK((r.x - xs).norm() < 1e-6);
}

TEST_CASE("Rosenbrock")
{
  auto f = [](const Vector &x)
  { return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2); };
  Vector x0(2);
  x0 << -1.2, 1.0;
  const BfgsResult r = minimize_bfgs(f, x0);
  CHECK(r.converged);
  CHECK(std::abs(r.x(0) - 1.0) < 1e-4);
  CHECK(std::abs(r.x(1) - 1.0) < 1e-4);
}

TEST_CASE("history never increases")
{
  auto f = [](const Vector &x) { return std::cosh(x(0) - 0.3) + x(1) * x(1) * (1.0 + x(0) * x(0)); };
  Vector x0(2);
  x0 << 2.0, -1.5;
  const BfgsResult r = minimize_bfgs(f, x0);
  REQUIRE(r.history.size() >= 2);
  for (std::size_t k = 1; k < r.history.size(); k++)
  {
    CHECK(r.history[k] <= r.history[k - 1]);
  }
  CHECK(r.history.front() == doctest::Approx(f(x0)));
}

TEST_CASE("iteration limit is reported")
{
  auto f = [](const Vector &x)
  { return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2); };
  Vector x0(2);
  x0 << -1.2, 1.0;
  BfgsOptions o;
  o.max_iterations = 3;
  const BfgsResult r = minimize_bfgs(f, x0, o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(r.status.find("iteration limit") != std::string::npos);
}

TEST_CASE("central gradient")
{
  auto f = [](const Vector &x) { return std::sin(x(0)) * std::exp(x(1)); };
  Vector x(2);
  x << 0.4, -0.2;
  const Vector g = central_gradient(f, x, 1e-6);
  CHECK(g(0) == doctest::Approx(std::cos(0.4) * std::exp(-0.2)).epsilon(1e-8));
  CHECK(g(1) == doctest::Approx(std::sin(0.4) * std::exp(-0.2)).epsilon(1e-8));
}

TEST_CASE("results do not depend on the worker count")
{
  auto f = [](const Vector &x)
  {
    double s = 0.0;
    for (Index k = 0; k < x.size(); k++)
    {
      s += std::pow(x(k) - 0.1 * double(k), 2) * (1.0 + 0.1 * std::sin(x(k)));
    }
    return s;
  };
  const Vector x0 = Vector::Constant(6, 1.0);
  set_thread_count(1);
  const BfgsResult a = minimize_bfgs(f, x0);
  set_thread_count(4);
  const BfgsResult b = minimize_bfgs(f, x0);
  set_thread_count(0);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
}
