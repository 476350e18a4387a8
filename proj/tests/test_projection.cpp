// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include "oracles.hpp"
#include "ssmo/backbone.hpp"
#include "ssmo/linalg.hpp"
#include "ssmo/projection.hpp"
#include "ssmo/subspace.hpp"
#include "ssmo/systems.hpp"

using namespace ssmo;

namespace
{

// Exact F-parallel projector of the 4D example from its eigenvectors.
Matrix exact_projector_4d(const Matrix &A)
{
  Eigen::EigenSolver<Matrix> es(A);
  Matrix VE(4, 2), VF(4, 2);
  for (Index k = 0; k < 4; k++)
  {
    const Complex l = es.eigenvalues()(k);
    if (l.imag() > 0.0)
    {
      Matrix &V = std::abs(l.real() + 0.3) < 1e-9 ? VE : VF;
      V.col(0) = es.eigenvectors().col(k).real();
      V.col(1) = es.eigenvectors().col(k).imag();
    }
  }
  return oracle::projector_along(VE, VF);
}

Trajectory fig4_trajectory()
{
  const LinearSystem sys = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  Vector x0(4);
  x0 << 1.0, 1.0, 0.8, 0.8;
  return simulate_decay(sys, x0, 40.0, 0.01);
}

}  // namespace

TEST_CASE("projector invariants on 100 random valid pairs")
{
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(2, 8);
  int checked = 0;
  while (checked < 100)
  {
    const Index p = dim(rng);
    const Index d = 1 + Index(rng() % std::uint64_t(p - 1));
    const Matrix Q = oracle::random_matrix(rng, p, d);
    const Matrix B = Q + 0.8 * oracle::random_matrix(rng, p, d);
    if (condition_number(B.transpose() * Q) > 1e6)
    {
      continue;
    }
    const ObliqueProjector P(Q, B);
    const Matrix &M = P.matrix();
    const double scale = std::max(1.0, M.norm());
    CHECK((M * M - M).norm() < 1e-9 * scale * scale);
    CHECK((M * Q - Q).norm() < 1e-9 * scale * Q.norm());
    CHECK((B.transpose() * (Matrix::Identity(p, p) - M)).norm() < 1e-9 * scale * B.norm());
    // Vectors orthogonal to span(B) are annihilated.
    const Matrix Bperp = orthogonal_complement(orthonormalize(B));
    if (Bperp.cols() > 0)
    {
      CHECK((M * Bperp).norm() < 1e-9 * scale);
    }
    CHECK(P.rank() == d);
    checked++;
  }
}

TEST_CASE("B = Q gives the orthogonal projector")
{
  std::mt19937_64 rng(5);
  const Matrix Q = oracle::random_matrix(rng, 5, 2);
  const ObliqueProjector P(Q, Q);
  CHECK((P.matrix() - P.matrix().transpose()).norm() < 1e-12);
  const ObliqueProjector N = normal_projector(Q);
  CHECK((N.matrix() - P.matrix()).norm() < 1e-12);
}

TEST_CASE("nearly parallel and malformed directions are rejected")
{
  Matrix Q = Matrix::Zero(3, 1), B = Matrix::Zero(3, 1);
  Q(0, 0) = 1.0;
  B(1, 0) = 1.0;
  B(0, 0) = 1e-12;
  CHECK_THROWS_WITH_AS(ObliqueProjector(Q, B), doctest::Contains("nearly parallel"), Error);
  CHECK_THROWS_AS(ObliqueProjector(Q, Matrix::Zero(3, 2)), Error);
  CHECK_THROWS_AS(ObliqueProjector(Matrix::Zero(3, 3), Matrix::Identity(3, 3)), Error);
  Matrix Qdep(3, 2);
  Qdep << 1, 2, 0, 0, 0, 0;
  CHECK_THROWS_AS(normal_projector(Qdep), Error);
}

TEST_CASE("oblique flattening on the 4D non-normal example")
{
  const Trajectory tr = fig4_trajectory();
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, tr.dt());
  const OptimizeResult res = optimize_B(sub.basis, tr, sub.orthonormal);
  CHECK(res.converged);
  const Matrix Pex = exact_projector_4d(linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1}).matrix());
  CHECK((res.projector.matrix() - Pex).norm() < 0.05);
  CHECK(res.final_objective < res.initial_objective);
  Matrix e1 = Matrix::Zero(4, 1);
  e1(0, 0) = 1.0;
  const double normal = projection_objective(normal_projector(sub.basis), tr, e1);
  const double oblique = projection_objective(res.projector, tr, e1);
  CHECK(normal >= 100.0 * oblique);
  // The history starts at the normal projection.
  REQUIRE_FALSE(res.history.empty());
  CHECK(res.history.front() == doctest::Approx(res.initial_objective));
}

TEST_CASE("single-row objective still flattens that row")
{
  const Trajectory tr = fig4_trajectory();
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, tr.dt());
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  const OptimizeResult res = optimize_B(sub.basis, tr, e1);
  const double normal = projection_objective(normal_projector(sub.basis), tr, Matrix(e1));
  CHECK(res.final_objective <= 1e-2 * normal);
}

TEST_CASE("reduced coordinates and projection")
{
  const Trajectory tr = fig4_trajectory();
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, tr.dt());
  const ObliqueProjector P = normal_projector(sub.basis);
  const Trajectory z = project(P, tr);
  const Trajectory xi = reduced_coordinates(P, sub.orthonormal, tr);
  CHECK(xi.dim() == 2);
  CHECK(xi.labels()[0] == "xi1");
  CHECK((sub.orthonormal * xi.states() - z.states()).norm() < 1e-10);
}

TEST_CASE("objective is NaN when a readout stops oscillating")
{
  Vector t(400);
  Matrix y(2, 400);
  for (Index k = 0; k < 400; k++)
  {
    t(k) = 0.05 * k;
    y(0, k) = std::cos(t(k));
    y(1, k) = 1.0;
  }
  const Trajectory tr(t, y);
  Matrix Q = Matrix::Identity(2, 2);
  Matrix r(2, 1);
  r << 0.0, 1.0;
  CHECK(std::isnan(projection_objective(normal_projector(Q.col(0)), tr, r)));
}
