// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_FRC_HPP
#define SSMO_FRC_HPP

#include <vector>
#include "ssmo/backbone.hpp"
#include "ssmo/core.hpp"
#include "ssmo/ssm.hpp"
#include "ssmo/systems.hpp"

namespace ssmo
{

struct FrcPoint
{
  double omega = 0.0;      // forcing frequency
  double amplitude = 0.0;  // observable units
  double rho = 0.0;
  double phase = 0.0;      // response phase relative to the forcing, -pi/2 at resonance
  bool stable = false;
};

struct FrcBranch
{
  double forcing = 0.0;  // modal amplitude f
  std::vector<FrcPoint> points;  // ordered by omega, then rho
};

// Half peak-to-peak of readout^T h(xi) along the circle of radius rho of the polar form.
double observable_amplitude(const SsmModel &model, const Vector &readout, double rho,
                            int samples = 256);

// Backbone (omega(rho), amplitude(rho)) at n points rho_k = k rho_max / n, k = 1..n.
BackboneCurve backbone_from_model(const SsmModel &model, double rho_max, const Vector &readout,
                                  int n = 200);

struct FrcOptions
{
  int rho_points = 2000;
  // Largest rho on the root-finding grid. 0 selects 1.5x the training rho of the model.
  double rho_max = 0.0;
};

// Residual a(rho)^2 + rho^2 (omega(rho) - Omega)^2 - f^2.
double frc_residual(const PolarForm &pf, double rho, double Omega, double f);

// Steady states of the averaged forced normal form
//   rho' = a(rho) + f cos psi,  rho psi' = rho (omega(rho) - Omega) - f sin psi
// at n_points equally spaced Omega in [omega_min, omega_max], for every f. Every root of
// the residual on the rho grid is kept; stability from the trace and determinant of the
// averaged Jacobian.
std::vector<FrcBranch> frc_analytic(const SsmModel &model, const std::vector<double> &f_values,
                                    double omega_min, double omega_max, int n_points,
                                    const Vector &readout, const FrcOptions &opts = {});

// Same sweep with the polar form given directly (amplitudes reported as rho).
std::vector<FrcBranch> frc_polar(const PolarForm &pf, const std::vector<double> &f_values,
                                 double omega_min, double omega_max, int n_points,
                                 double rho_max, int rho_points = 2000);

// Modal forcing f = amplitude |T^{-1} Q_tilde^T P O g| / 2 for the first-order forcing
// vector g = (0, M^{-1} r), where O maps the first-order state to the observables
// (for full-state observables O = I). The factor 1/2 keeps the resonant half of cos.
// Forces inside the kernel of P give f = 0.
double calibrate_forcing(const SsmModel &model, const MechanicalSystem &system,
                         const Vector &dof_force, double amplitude, const Matrix &observable_map);

}  // namespace ssmo

#endif  // SSMO_FRC_HPP
