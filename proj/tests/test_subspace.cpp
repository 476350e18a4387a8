// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include "oracles.hpp"
#include "ssmo/diagnostics.hpp"
#include "ssmo/linalg.hpp"
#include "ssmo/subspace.hpp"
#include "ssmo/systems.hpp"

using namespace ssmo;

namespace
{

// Real block-diagonal spectrum seen through a random change of basis.
Matrix random_stable_matrix(std::mt19937_64 &rng, const std::vector<std::pair<double, double>> &pairs)
{
  const Index n = 2 * static_cast<Index>(pairs.size());
  Matrix D = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < pairs.size(); k++)
  {
    D.block(2 * Index(k), 2 * Index(k), 2, 2) =
        oracle::rotation_block(pairs[k].first, pairs[k].second);
  }
  const Matrix S = oracle::random_matrix(rng, n, n) + 2.0 * Matrix::Identity(n, n);
  return S * D * S.inverse();
}

}  // namespace

TEST_CASE("exact recovery on the 4D non-normal example")
{
  const LinearSystem sys = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  Vector x0(4);
  x0 << 1.0, 1.0, 0.8, 0.8;
  const double dt = 0.01;
  const Trajectory tr = simulate_decay(sys, x0, 40.0, dt);
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, dt);
  CHECK(sub.dim() == 2);
  // Exact slow eigenvectors: the first two coordinates.
  Matrix E = Matrix::Zero(4, 2);
  E(0, 0) = 1.0;
  E(1, 1) = 1.0;
  const Vector cosines = oracle::principal_cosines(sub.basis, E);
  for (Index k = 0; k < cosines.size(); k++)
  {
    CHECK(std::acos(std::min(1.0, cosines(k))) < 1e-6);
  }
  bool found = false;
  for (Index k = 0; k < sub.eigenvalues.size(); k++)
  {
    found |= std::abs(sub.eigenvalues(k) - Complex(-0.3, 3.0)) < 1e-8;
  }
  CHECK(found);
  CHECK((sub.orthonormal.transpose() * sub.orthonormal - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("exact recovery on random noiseless linear systems")
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; trial++)
  {
    const Matrix A = random_stable_matrix(rng, {{-0.1, 1.0}, {-0.4, 2.5}, {-0.9, 4.0}});
    const Vector x0 = oracle::random_matrix(rng, 6, 1).col(0);
    const double dt = 0.02;
    const Trajectory tr = simulate_decay(LinearSystem(A), x0, 30.0, dt);
    const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, dt);
    Eigen::EigenSolver<Matrix> es(A);
    Matrix E(6, 2);
    for (Index k = 0; k < 6; k++)
    {
      if (std::abs(es.eigenvalues()(k) - Complex(-0.1, 1.0)) < 1e-8)
      {
        E.col(0) = es.eigenvectors().col(k).real();
        E.col(1) = es.eigenvectors().col(k).imag();
      }
    }
    const auto angles = principal_angles(sub.basis, E);
    CHECK(angles.back() < 1e-6);
    CHECK(std::abs(sub.eigenvalues(0).real() + 0.1) < 1e-7);
  }
}

TEST_CASE("all eigenvalues are reported slowest first")
{
  std::mt19937_64 rng(3);
  const Matrix A = random_stable_matrix(rng, {{-0.2, 1.0}, {-0.5, 3.0}});
  const Trajectory tr =
      simulate_decay(LinearSystem(A), oracle::random_matrix(rng, 4, 1).col(0), 20.0, 0.01);
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, 0.01);
  REQUIRE(sub.all_eigenvalues.size() == 4);
  for (Index k = 1; k < 4; k++)
  {
    CHECK(sub.all_eigenvalues(k).real() <= sub.all_eigenvalues(k - 1).real() + 1e-9);
  }
  CHECK(sub.svd_rank == 4);
}

TEST_CASE("dimension errors")
{
  const LinearSystem sys = linear_2d(1.0, 2.0, 1.0);
  Vector x0(2);
  x0 << 1.0, 1.0;
  const Trajectory tr = simulate_decay(sys, x0, 5.0, 0.01);
  CHECK_THROWS_AS(dmd_slow_subspace(snapshot_pair(tr), 3, 0.01), Error);
  CHECK_THROWS_AS(dmd_slow_subspace(snapshot_pair(tr), 0, 0.01), Error);
}

TEST_CASE("rank cap reproduces the plain rank-d truncation")
{
  const LinearSystem sys = linear_4d(0.3, 0.63, 3.0, 8.0, {1, 1, 1, 1});
  Vector x0(4);
  x0 << 1.0, 1.0, 0.8, 0.8;
  const Trajectory tr = simulate_decay(sys, x0, 40.0, 0.01);
  DmdOptions opts;
  opts.max_rank = 2;
  const SlowSubspace sub = dmd_slow_subspace(snapshot_pair(tr), 2, 0.01, opts);
  CHECK(sub.svd_rank == 2);
}
