// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include "ssmo/ode.hpp"
#include "ssmo/trajectory.hpp"

using namespace ssmo;

namespace
{

Trajectory ramp(Index p, Index n, double dt)
{
  Vector t(n);
  Matrix x(p, n);
  for (Index j = 0; j < n; j++)
  {
    t(j) = j * dt;
    for (Index i = 0; i < p; i++)
    {
      x(i, j) = 10.0 * double(i) + double(j);
    }
  }
  return Trajectory(t, x);
}

std::filesystem::path tmp_dir()
{
  std::filesystem::path dir = SSMO_TEST_TMP;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("construction validates sampling and shapes")
{
  Vector t(4);
  t << 0.0, 0.1, 0.2, 0.3;
  CHECK_NOTHROW(Trajectory(t, Matrix::Zero(2, 4)));
  CHECK_THROWS_AS(Trajectory(t, Matrix::Zero(2, 3)), Error);
  Vector bad(4);
  bad << 0.0, 0.1, 0.25, 0.3;
  CHECK_THROWS_AS(Trajectory(bad, Matrix::Zero(1, 4)), Error);
  Vector back(4);
  back << 0.0, 0.1, 0.05, 0.3;
  CHECK_THROWS_AS(Trajectory(back, Matrix::Zero(1, 4)), Error);
  CHECK_THROWS_AS(Trajectory(t, Matrix::Zero(2, 4), {"only-one"}), Error);
}

TEST_CASE("dt, row and with_states")
{
  const Trajectory tr = ramp(3, 11, 0.05);
  CHECK(tr.dim() == 3);
  CHECK(tr.size() == 11);
  CHECK(tr.dt() == doctest::Approx(0.05).epsilon(1e-14));
  const Trajectory r = tr.row(2);
  CHECK(r.dim() == 1);
  CHECK(r.states()(0, 4) == 24.0);
  CHECK_THROWS_AS(tr.row(3), Error);
  CHECK_THROWS_AS(tr.with_states(Matrix::Zero(2, 10)), Error);
}

TEST_CASE("CSV round trip is bit-exact")
{
  Vector t = uniform_grid(0.0, 1.0, 0.1);
  Matrix x(2, t.size());
  for (Index j = 0; j < t.size(); j++)
  {
    x(0, j) = std::sin(1.234567 * t(j)) / 3.0;
    x(1, j) = std::exp(-t(j)) * 1e-7;
  }
  const Trajectory tr(t, x, {"a", "b"});
  const auto path = tmp_dir() / "roundtrip.csv";
  save_csv(tr, path);
  const Trajectory back = load_csv(path);
  CHECK(back == tr);
}

TEST_CASE("CSV errors report the line")
{
  const auto path = tmp_dir() / "broken.csv";
  {
    std::ofstream f(path);
    f << "t,x\n0,1\n0.1,abc\n";
  }
  try
  {
    load_csv(path);
    FAIL("expected a parse error");
  }
  catch (const Error &e)
  {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv(tmp_dir() / "missing.csv"), Error);
}

TEST_CASE("delay embedding")
{
  const Trajectory s = ramp(1, 10, 0.1);
  const Trajectory e = delay_embed(s, 3, 2);
  // (3 - 1) * 2 = 4 samples are consumed by the window.
  CHECK(e.dim() == 3);
  CHECK(e.size() == 6);
  for (Index j = 0; j < e.size(); j++)
  {
    CHECK(e.states()(0, j) == double(j));
    CHECK(e.states()(1, j) == double(j + 2));
    CHECK(e.states()(2, j) == double(j + 4));
  }
  CHECK(e.times()(5) == s.times()(5));
  CHECK_THROWS_AS(delay_embed(ramp(2, 10, 0.1), 3, 1), Error);
  CHECK_THROWS_AS(delay_embed(s, 6, 2), Error);
  CHECK_THROWS_AS(delay_embed(s, 0, 1), Error);
}

TEST_CASE("snapshot pairs stay within each trajectory")
{
  const Trajectory a = ramp(2, 5, 0.1), b = ramp(2, 4, 0.1);
  const SnapshotPair one = snapshot_pair(a);
  CHECK(one.v1.cols() == 4);
  CHECK((one.v2 - one.v1).cwiseAbs().maxCoeff() == 1.0);
  const std::vector<Trajectory> both{a, b};
  const SnapshotPair two = snapshot_pair(std::span<const Trajectory>(both));
  CHECK(two.v1.cols() == 4 + 3);
  // No column pairs the end of a with the start of b.
  CHECK((two.v2 - two.v1).cwiseAbs().maxCoeff() == 1.0);
  CHECK_THROWS_AS(snapshot_pair(ramp(1, 2, 0.1)), Error);
}

TEST_CASE("restrict and restrict_time")
{
  const Trajectory tr = ramp(1, 21, 0.1);
  const Trajectory r = restrict(tr, 5, 10);
  CHECK(r.size() == 5);
  CHECK(r.states()(0, 0) == 5.0);
  const Trajectory rt = restrict_time(tr, 0.5, 1.0);
  CHECK(rt.size() == 6);
  CHECK(rt.times()(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(restrict(tr, 10, 5), Error);
}

TEST_CASE("uniform grid includes the end point")
{
  const Vector g = uniform_grid(0.0, 1.0, 0.1);
  CHECK(g.size() == 11);
  CHECK(g(10) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(uniform_grid(0.0, 600.0, 0.05).size() == 12001);
}
