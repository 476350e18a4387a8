// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include "oracles.hpp"
#include "ssmo/backbone.hpp"
#include "ssmo/diagnostics.hpp"
#include "ssmo/projection.hpp"
#include "ssmo/subspace.hpp"
#include "ssmo/systems.hpp"

using namespace ssmo;

namespace
{

std::vector<double> sampled(double dt, int n, auto &&f)
{
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; k++)
  {
    v[static_cast<std::size_t>(k)] = f(k * dt);
  }
  return v;
}

BackboneCurve synthetic_curve(const std::vector<double> &amps, auto &&omega_of_a)
{
  BackboneCurve c;
  double t = 0.0;
  for (double a : amps)
  {
    c.points.push_back({omega_of_a(a), a, t});
    t += 1.0;
  }
  return c;
}

}  // namespace

TEST_CASE("pure cosine")
{
  const auto v = sampled(0.01, 3000, [](double t) { return std::cos(2.0 * t); });
  const BackboneCurve c = pff_extract(v, 0.0, 0.01);
  REQUIRE(c.points.size() > 15);
  for (const auto &p : c.points)
  {
    CHECK(std::abs(p.frequency - 2.0) < 1e-3);
    CHECK(std::abs(p.amplitude - 1.0) < 1e-4);
  }
  CHECK(backbone_variance(v, 0.0, 0.01) < 1e-6);
}

TEST_CASE("slow Shaw-Pierre mode decays geometrically")
{
  const double w = 0.9997, s = 0.025, dt = 0.05;
  const auto v = sampled(dt, 8000, [&](double t) { return std::exp(-s * t) * std::cos(w * t); });
  const BackboneCurve c = pff_extract(v, 0.0, dt);
  REQUIRE(c.points.size() > 20);
  const double ratio = std::exp(-s * std::numbers::pi / w);
  for (std::size_t k = 0; k < c.points.size(); k++)
  {
    CHECK(std::abs(c.points[k].frequency - w) < 1e-3);
    if (k > 0)
    {
      CHECK(c.points[k].amplitude / c.points[k - 1].amplitude ==
            doctest::Approx(ratio).epsilon(1e-3));
    }
  }
}

TEST_CASE("damped cosines across quality factors 10 to 1000")
{
  for (double Q : {10.0, 30.0, 100.0, 300.0, 1000.0})
  {
    const double w = 1.7, zeta = 1.0 / (2.0 * Q), dt = 0.01;
    const double wd = w * std::sqrt(1.0 - zeta * zeta);
    // Long enough for 20 cycles or until the signal is 1e-6 of its start.
    const double t_end = std::min(20.0 * 2.0 * std::numbers::pi / wd, 13.8 / (zeta * w));
    const int n = static_cast<int>(t_end / dt);
    const auto v = oracle::damped_cosine(w, zeta, dt, n);
    const BackboneCurve c = pff_extract(v, 0.0, dt);
    REQUIRE(c.points.size() >= 3);
    for (const auto &p : c.points)
    {
      CHECK(std::abs(p.frequency - wd) / wd < 2e-3);
    }
  }
}

TEST_CASE("variance properties")
{
  const double dt = 0.02;
  auto sig = [](double t) { return std::exp(-0.05 * t) * std::cos(t + 0.3 * std::sin(0.2 * t)); };
  const auto v = sampled(dt, 5000, sig);
  const double base = backbone_variance(v, 0.0, dt);
  auto scaled = v, flipped = v;
  for (auto &x : scaled)
  {
    x *= 5.0;
  }
  for (auto &x : flipped)
  {
    x = -x;
  }
  CHECK(backbone_variance(scaled, 0.0, dt) == doctest::Approx(base).epsilon(1e-9));
  CHECK(backbone_variance(flipped, 0.0, dt) == doctest::Approx(base).epsilon(1e-2));
  CHECK(base > 1e-4);
}

TEST_CASE("errors")
{
  const auto v = sampled(0.01, 100, [](double t) { return 1.0 + 0.0 * t; });
  CHECK_THROWS_WITH_AS(pff_extract(v, 0.0, 0.01), "signal not oscillatory", Error);
  // Two crossings give a single semi-period: variance is undefined.
  const auto w = sampled(0.01, 400, [](double t) { return std::cos(1.0 * t); });
  CHECK_THROWS_AS(backbone_variance(w, 0.0, 0.01), Error);
  BackboneCurve tiny;
  tiny.points = {{1, 1, 0}, {1, 0.5, 1}, {1, 0.2, 2}};
  CHECK_THROWS_AS(identify_linear_regime(tiny), Error);
}

TEST_CASE("semi-periods with too few samples are skipped")
{
  // Sampling at 2.2 samples per semi-period.
  const double w = 1.0, dt = std::numbers::pi / 2.2;
  const auto v = sampled(dt, 200, [&](double t) { return std::cos(w * t + 0.1); });
  const BackboneCurve c = pff_extract(v, 0.0, dt);
  CHECK(c.skipped > 0);
}

TEST_CASE("regime: identical frequencies give the full range")
{
  std::vector<double> amps;
  for (int k = 0; k < 20; k++)
  {
    amps.push_back(std::pow(0.8, k));
  }
  const BackboneCurve c = synthetic_curve(amps, [](double) { return 1.0; });
  const LinearRegime r = identify_linear_regime(c, 1e-3);
  CHECK(r.first == 0);
  CHECK(r.last == 20);
  CHECK_FALSE(r.marginal);
}

TEST_CASE("regime: softening curve matches a brute-force scan")
{
  std::vector<double> amps;
  for (double a = 1.0; a > 0.04; a -= 0.05)
  {
    amps.push_back(a);
  }
  auto omega = [](double a) { return 1.0 - 0.2 * a * a; };
  const BackboneCurve c = synthetic_curve(amps, omega);
  std::vector<double> freqs;
  for (double a : amps)
  {
    freqs.push_back(omega(a));
  }
  for (double th : {1e-2, 3e-3, 1e-3, 3e-4})
  {
    const LinearRegime r = identify_linear_regime(c, th);
    const std::size_t expect = oracle::regime_scan(freqs, th);
    CHECK(std::size_t(r.last - r.first) == expect);
    for (Index k = r.first; k < r.last; k++)
    {
      CHECK(c.points[std::size_t(k)].amplitude <= r.amplitude_ceiling);
    }
  }
}

TEST_CASE("regime size is monotone in the threshold")
{
  std::vector<double> amps;
  for (int k = 0; k < 40; k++)
  {
    amps.push_back(std::exp(-0.1 * k));
  }
  const BackboneCurve c =
      synthetic_curve(amps, [](double a) { return 1.0 + 0.3 * a * a - 0.1 * a * a * a * a; });
  Index previous = 0;
  for (double th : {1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2})
  {
    const LinearRegime r = identify_linear_regime(c, th);
    CHECK(r.last - r.first >= previous);
    previous = r.last - r.first;
  }
}

TEST_CASE("regime keeps at least three points")
{
  std::vector<double> amps{1.0, 0.8, 0.6, 0.4, 0.2};
  const BackboneCurve c = synthetic_curve(amps, [](double a) { return 1.0 + a; });
  const LinearRegime r = identify_linear_regime(c, 1e-12);
  CHECK(r.marginal);
  CHECK(r.last - r.first == 3);
}

TEST_CASE("normal projection of the non-normal 4D example oscillates")
{
  const LinearSystem sys = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  Vector x0(4);
  x0 << 1.0, 1.0, 0.8, 0.8;
  const Trajectory tr = simulate_decay(sys, x0, 40.0, 0.01);
  const Matrix E = spectral_projector(sys.matrix(), 2).range_basis();
  const ObliqueProjector normal = normal_projector(E);
  const ObliqueProjector exact = spectral_projector(sys.matrix(), 2);
  const Trajectory zn = project(normal, tr).row(0), ze = project(exact, tr).row(0);
  const auto fn = pff_extract(zn).frequencies(), fe = pff_extract(ze).frequencies();
  auto stdev = [](const std::vector<double> &f)
  {
    double m = 0.0, s = 0.0;
    for (double x : f)
    {
      m += x;
    }
    m /= double(f.size());
    for (double x : f)
    {
      s += (x - m) * (x - m);
    }
    return std::sqrt(s / double(f.size() - 1));
  };
  CHECK(stdev(fn) > 10.0 * stdev(fe));
  CHECK(backbone_variance(zn) > 100.0 * backbone_variance(ze));
}
