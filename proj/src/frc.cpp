// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/frc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fmt/format.h>
#include "ssmo/parallel.hpp"

namespace ssmo
{

namespace
{

const PolarForm &require_polar(const SsmModel &model)
{
  if (!model.polar)
  {
    throw Error("model has no polar form (needs d = 2 with oscillatory linear part)");
  }
  return *model.polar;
}

FrcPoint steady_state(const PolarForm &pf, double rho, double Omega)
{
  const double a = pf.radial(rho), da = pf.radial_derivative(rho);
  const double detune = pf.frequency(rho) - Omega, dw = pf.frequency_derivative(rho);
  FrcPoint pt;
  pt.omega = Omega;
  pt.rho = rho;
  pt.amplitude = rho;
  pt.phase = std::atan2(rho * detune, -a) - 0.5 * std::numbers::pi;
  const double trace = da + a / rho;
  const double det = a * da / rho + detune * detune + rho * detune * dw;
  pt.stable = trace < 0.0 && det > 0.0;
  return pt;
}

std::vector<double> roots_on_grid(const PolarForm &pf, double Omega, double f,
                                  const std::vector<double> &grid)
{
  std::vector<double> roots;
  double r0 = grid[0], g0 = frc_residual(pf, r0, Omega, f);
  for (std::size_t k = 1; k < grid.size(); k++)
  {
    const double r1 = grid[k], g1 = frc_residual(pf, r1, Omega, f);
    if (g1 == 0.0)
    {
      roots.push_back(r1);
    }
    else if ((g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0))
    {
      double lo = r0, hi = r1, glo = g0;
      for (int it = 0; it < 200; it++)
      {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
        {
          break;
        }
        const double gm = frc_residual(pf, mid, Omega, f);
        if (gm == 0.0)
        {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0))
        {
          lo = mid;
          glo = gm;
        }
        else
        {
          hi = mid;
        }
      }
      const double glo_abs = std::abs(frc_residual(pf, lo, Omega, f));
      const double ghi_abs = std::abs(frc_residual(pf, hi, Omega, f));
      roots.push_back(glo_abs <= ghi_abs ? lo : hi);
    }
    r0 = r1;
    g0 = g1;
  }
  return roots;
}

}  // namespace

double observable_amplitude(const SsmModel &model, const Vector &readout, double rho,
                            int samples)
{
  const PolarForm &pf = require_polar(model);
  if (readout.size() != model.observable_dim())
  {
    throw Error("readout length must equal the observable dimension");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int s = 0; s < samples; s++)
  {
    const double theta = 2.0 * std::numbers::pi * double(s) / double(samples);
    const double v = readout.dot(model.parametrization.evaluate(pf.to_reduced(rho, theta)));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return 0.5 * (hi - lo);
}

BackboneCurve backbone_from_model(const SsmModel &model, double rho_max, const Vector &readout,
                                  int n)
{
  const PolarForm &pf = require_polar(model);
  if (!(rho_max > 0.0) || n < 1)
  {
    throw Error("backbone needs rho_max > 0 and at least one point");
  }
  BackboneCurve curve;
  for (int k = 1; k <= n; k++)
  {
    const double rho = rho_max * double(k) / double(n);
    curve.points.push_back({pf.frequency(rho), observable_amplitude(model, readout, rho), rho});
  }
  return curve;
}

double frc_residual(const PolarForm &pf, double rho, double Omega, double f)
{
  const double a = pf.radial(rho), detune = pf.frequency(rho) - Omega;
  return a * a + rho * rho * detune * detune - f * f;
}

std::vector<FrcBranch> frc_polar(const PolarForm &pf, const std::vector<double> &f_values,
                                 double omega_min, double omega_max, int n_points,
                                 double rho_max, int rho_points)
{
  if (!(omega_max > omega_min) || omega_min <= 0.0 || n_points < 2)
  {
    throw Error("FRC sweep needs 0 < omega_min < omega_max and at least 2 frequencies");
  }
  if (!(rho_max > 0.0) || rho_points < 2)
  {
    throw Error("FRC root grid needs rho_max > 0 and at least 2 points");
  }
  std::vector<double> grid(rho_points);
  for (int k = 0; k < rho_points; k++)
  {
    grid[k] = rho_max * double(k + 1) / double(rho_points);
  }
  for (double r : grid)
  {
    if (!(pf.radial(r) < 0.0))
    {
      throw Error(fmt::format("model invalid for FRC: a(rho) = {:.3e} >= 0 at rho = {:.4g}",
                              pf.radial(r), r));
    }
  }
  std::vector<FrcBranch> out;
  for (double f : f_values)
  {
    if (f < 0.0)
    {
      throw Error("forcing amplitudes must be non-negative");
    }
    FrcBranch branch;
    branch.forcing = f;
    if (f == 0.0)
    {
      out.push_back(branch);
      continue;
    }
    std::vector<std::vector<FrcPoint>> per_omega(n_points);
    parallel_for(static_cast<std::size_t>(n_points),
                 [&](std::size_t i)
                 {
                   const double Omega =
                       omega_min + (omega_max - omega_min) * double(i) / double(n_points - 1);
                   for (double rho : roots_on_grid(pf, Omega, f, grid))
                   {
                     per_omega[i].push_back(steady_state(pf, rho, Omega));
                   }
                 });
    for (auto &pts : per_omega)
    {
      branch.points.insert(branch.points.end(), pts.begin(), pts.end());
    }
    out.push_back(std::move(branch));
  }
  return out;
}

std::vector<FrcBranch> frc_analytic(const SsmModel &model, const std::vector<double> &f_values,
                                    double omega_min, double omega_max, int n_points,
                                    const Vector &readout, const FrcOptions &opts)
{
  const PolarForm &pf = require_polar(model);
  double rho_max = opts.rho_max;
  if (!(rho_max > 0.0))
  {
    rho_max = 1.5 * model.training_rho;
  }
  auto branches =
      frc_polar(pf, f_values, omega_min, omega_max, n_points, rho_max, opts.rho_points);
  for (auto &branch : branches)
  {
    std::vector<double> amps(branch.points.size());
    parallel_for(branch.points.size(), [&](std::size_t k)
                 { amps[k] = observable_amplitude(model, readout, branch.points[k].rho); });
    for (std::size_t k = 0; k < amps.size(); k++)
    {
      branch.points[k].amplitude = amps[k];
    }
  }
  return branches;
}

double calibrate_forcing(const SsmModel &model, const MechanicalSystem &system,
                         const Vector &dof_force, double amplitude, const Matrix &observable_map)
{
  const PolarForm &pf = require_polar(model);
  if (observable_map.rows() != model.observable_dim() || observable_map.cols() != system.dim())
  {
    throw Error(fmt::format("observable map must be {}x{}", model.observable_dim(),
                            system.dim()));
  }
  if (amplitude < 0.0)
  {
    throw Error("physical forcing amplitude must be non-negative");
  }
  const Vector g = system.forcing_vector(dof_force);
  const Vector modal = pf.T.partialPivLu().solve(
      model.Q_tilde().transpose() * (model.projector.matrix() * (observable_map * g)));
  return 0.5 * amplitude * modal.norm();
}

}  // namespace ssmo
