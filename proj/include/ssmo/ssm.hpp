// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_SSM_HPP
#define SSMO_SSM_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>
#include "ssmo/core.hpp"
#include "ssmo/polynomial.hpp"
#include "ssmo/projection.hpp"
#include "ssmo/subspace.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

// Fitted map with per-output residual diagnostics on the training samples.
struct PolynomialFit
{
  PolynomialMap map;
  Vector residual_rms;  // per output row
  Vector signal_rms;    // per output row, of the regression target
  Index samples = 0;
  std::vector<std::string> warnings;
};

inline constexpr double kPoorFitRatio = 0.2;

// Parametrization y = M1 xi + M xi^{2:M} over all training samples, subject to
// Q_tilde^T M1 = I. The component Q_tilde^T y - xi is regressed on the nonlinear
// monomials and N^T y (N spanning the orthogonal complement of Q_tilde) on all monomials.
// ridge adds ridge * ||coefficients||^2 on the column-equilibrated features.
PolynomialFit fit_parametrization(std::span<const Trajectory> ys,
                                  std::span<const Trajectory> xis, const Matrix &Q_tilde,
                                  int order, double ridge = 0.0);
PolynomialFit fit_parametrization(const Trajectory &y, const Trajectory &xi,
                                  const Matrix &Q_tilde, int order, double ridge = 0.0);

// Fourth-order finite-difference time derivative of every row (one-sided stencils on the
// two samples at each end). Needs N >= 5.
Matrix time_derivative(const Trajectory &traj);

// Reduced vector field d xi/dt = r(xi), regressed on monomials of degree 1..order.
PolynomialFit fit_reduced_dynamics(std::span<const Trajectory> xis, int order,
                                   double ridge = 0.0);
PolynomialFit fit_reduced_dynamics(const Trajectory &xi, int order, double ridge = 0.0);
// Same, with the linear part fixed to the given d x d matrix; only the nonlinear
// coefficients are regressed.
PolynomialFit fit_reduced_dynamics(std::span<const Trajectory> xis, int order,
                                   const Matrix &linear, double ridge = 0.0);

//
// Planar normal form rho' = a(rho), theta' = omega(rho) with a(rho) = sum a_j rho^{2j+1}
// and omega(rho) = sum b_j rho^{2j}. xi = T (rho cos theta, rho sin theta).
//
struct PolarForm
{
  Vector a;
  Vector b;
  Matrix T;  // 2 x 2

  double radial(double rho) const;            // a(rho)
  double radial_derivative(double rho) const; // a'(rho)
  double frequency(double rho) const;         // omega(rho)
  double frequency_derivative(double rho) const;

  // Reduced coordinates of the polar point (rho, theta).
  Vector to_reduced(double rho, double theta) const;
  // rho of a reduced-coordinate point.
  double radius(const Vector &xi) const;

  // Cartesian vector field in xi implied by the polar form.
  Vector cartesian_field(const Vector &xi) const;
};

// Transforms a planar polynomial field to the eigenbasis w = u1 + i u2 (xi = T u) of its
// linear part, T = sqrt(2) [Re v, -Im v] with v the unit eigenvector of the eigenvalue with
// positive imaginary part, phase-fixed so v_1 is real and positive. The resonant terms
// w |w|^{2j} give a_j + i b_j. The coefficients of each homogeneous part are exact discrete
// Fourier sums on the unit circle.
PolarForm to_polar(const PolynomialMap &reduced_dynamics);

struct SsmModel
{
  SlowSubspace subspace;
  ObliqueProjector projector;
  PolynomialMap parametrization;   // xi -> y
  PolynomialMap reduced_dynamics;  // xi -> d xi / dt
  std::optional<PolarForm> polar;
  double training_radius = 0.0;    // max ||xi|| over the training samples
  double training_rho = 0.0;       // max polar radius over the training samples
  std::vector<std::string> diagnostics;

  const Matrix &Q_tilde() const { return subspace.orthonormal; }
  Index observable_dim() const { return projector.dim(); }
  Index reduced_dim() const { return subspace.dim(); }
};

// y = h(xi) per column.
Trajectory reconstruct(const SsmModel &model, const Trajectory &xi);

// xi = Q_tilde^T P y per column.
Trajectory reduce(const SsmModel &model, const Trajectory &y);

struct Prediction
{
  Trajectory y;
  Trajectory xi;
  std::vector<std::string> warnings;
};

// Integrates the reduced dynamics from xi0 = Q_tilde^T P y0 and maps through h.
Prediction predict_trajectory(const SsmModel &model, const Vector &y0, double t_end,
                              double dt_out);

// Mean over time of ||pred - truth||_2 divided by max over time of ||truth||_2.
double nmte(const Trajectory &predicted, const Trajectory &truth);

}  // namespace ssmo

#endif  // SSMO_SSM_HPP
