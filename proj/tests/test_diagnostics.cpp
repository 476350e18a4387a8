// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>
#include "oracles.hpp"
#include "ssmo/diagnostics.hpp"
#include "ssmo/systems.hpp"

using namespace ssmo;

TEST_CASE("Shaw-Pierre spectrum is non-resonant up to order 7")
{
  const SpectrumReport r = check_nonresonance(shaw_pierre().first_order_matrix());
  CHECK(r.nonresonant);
  CHECK(r.near_resonances.empty());
  CHECK(r.max_order == 7);
  REQUIRE(r.eigenvalues.size() == 4);
  CHECK(std::abs(r.eigenvalues(0).real()) <= std::abs(r.eigenvalues(2).real()));
}

TEST_CASE("a 1:3 internal resonance is flagged")
{
  Matrix A = Matrix::Zero(4, 4);
  A.topLeftCorner(2, 2) = oracle::rotation_block(-0.01, 1.0);
  A.bottomRightCorner(2, 2) = oracle::rotation_block(-0.03, 3.0);
  const SpectrumReport r = check_nonresonance(A, 7, 1e-6);
  CHECK_FALSE(r.nonresonant);
  bool found = false;
  for (const auto &nr : r.near_resonances)
  {
    int order = 0;
    for (int m : nr.m)
    {
      order += m;
    }
    found |= order == 3 && nr.defect < 1e-6 * 3.0;
  }
  CHECK(found);
}

TEST_CASE("defective matrices raise a warning")
{
  Matrix A(2, 2);
  A << -1.0, 1.0, 0.0, -1.0;
  const SpectrumReport r = check_nonresonance(A, 3, 1e-6);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("spectral projector against the eigenvector oracle")
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; trial++)
  {
    Matrix D = Matrix::Zero(6, 6);
    D.block(0, 0, 2, 2) = oracle::rotation_block(-0.05, 1.0);
    D.block(2, 2, 2, 2) = oracle::rotation_block(-0.3, 2.0);
    D.block(4, 4, 2, 2) = oracle::rotation_block(-0.7, 4.0);
    const Matrix S = oracle::random_matrix(rng, 6, 6) + 3.0 * Matrix::Identity(6, 6);
    const Matrix A = S * D * S.inverse();
    // In the block basis the slow invariant subspace is spanned by the first two columns
    // of S and the fast one by the rest.
    const Matrix expect = oracle::projector_along(S.leftCols(2), S.rightCols(4));
    const ObliqueProjector P = spectral_projector(A, 2);
    CHECK((P.matrix() - expect).norm() < 1e-8 * expect.norm());
    CHECK((A * P.matrix() - P.matrix() * A).norm() < 1e-8 * A.norm() * expect.norm());
  }
}

TEST_CASE("spectral projector rejects ties and complex splits")
{
  Matrix A = Matrix::Zero(4, 4);
  A.topLeftCorner(2, 2) = oracle::rotation_block(-0.1, 1.0);
  A.bottomRightCorner(2, 2) = oracle::rotation_block(-0.1, 2.0);
  CHECK_THROWS_AS(spectral_projector(A, 2), Error);
  Matrix B = Matrix::Zero(4, 4);
  B.topLeftCorner(2, 2) = oracle::rotation_block(-0.1, 1.0);
  B.bottomRightCorner(2, 2) = oracle::rotation_block(-0.5, 2.0);
  CHECK_THROWS_AS(spectral_projector(B, 1), Error);
}

TEST_CASE("principal angles")
{
  Matrix S1 = Matrix::Zero(3, 1), S2 = Matrix::Zero(3, 1);
  S1(0, 0) = 1.0;
  const double th = 0.3;
  S2(0, 0) = std::cos(th);
  S2(1, 0) = std::sin(th);
  const auto a = principal_angles(S1, S2);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == doctest::Approx(th).epsilon(1e-12));
  // Tiny angles stay accurate.
  S2(0, 0) = std::cos(1e-9);
  S2(1, 0) = std::sin(1e-9);
  CHECK(principal_angles(S1, S2)[0] == doctest::Approx(1e-9).epsilon(1e-4));
  // Orthogonal planes.
  Matrix P1 = Matrix::Zero(4, 2), P2 = Matrix::Zero(4, 2);
  P1(0, 0) = P1(1, 1) = 1.0;
  P2(2, 0) = P2(3, 1) = 1.0;
  const auto b = principal_angles(P1, P2);
  CHECK(b[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(b[1] == doctest::Approx(std::numbers::pi / 2));
}
