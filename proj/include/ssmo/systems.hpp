// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_SYSTEMS_HPP
#define SSMO_SYSTEMS_HPP

#include <array>
#include <optional>
#include "ssmo/core.hpp"
#include "ssmo/ode.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

//
// Linear system dx/dt = A x with an asymptotically stable origin.
//
class LinearSystem
{
public:
  explicit LinearSystem(Matrix A);

  const Matrix &matrix() const { return A_; }
  Index dim() const { return A_.rows(); }
  CVector eigenvalues() const;
  VectorField vector_field() const;

private:
  Matrix A_;
};

// Cubic restoring term of a mechanical system. In the second-order equations it contributes
// f_nl(y) = coeff * y[coordinate]^3 * pattern.
struct CubicTerm
{
  Index coordinate = 0;
  double coeff = 0.0;
  Vector pattern;
};

//
// Second-order system M y'' + C y' + K y + f_nl(y) = force(t), realized in first order as
// x = (y, y'), dx/dt = A x + F_nl(x) + g(t).
//
class MechanicalSystem
{
public:
  MechanicalSystem(Matrix M, Matrix C, Matrix K, CubicTerm cubic);

  const Matrix &mass() const { return M_; }
  const Matrix &damping() const { return C_; }
  const Matrix &stiffness() const { return K_; }
  const CubicTerm &cubic() const { return cubic_; }

  Index dofs() const { return M_.rows(); }
  Index dim() const { return 2 * M_.rows(); }

  const Matrix &first_order_matrix() const { return A_; }
  CVector eigenvalues() const;

  // First-order nonlinearity F_nl(x) = (0, -M^{-1} f_nl(y)).
  Vector nonlinearity(const Vector &x) const;

  // First-order image (0, M^{-1} r) of a generalized force r acting on the dofs.
  Vector forcing_vector(const Vector &dof_force) const;

  // Copy with the cubic coefficient replaced.
  MechanicalSystem with_cubic_coeff(double coeff) const;

  VectorField vector_field() const;

private:
  Matrix M_, C_, K_;
  CubicTerm cubic_;
  Matrix Minv_, A_;
  Vector nl_direction_;  // -M^{-1} pattern
};

// Harmonic excitation g(t) = amplitude * direction * cos(frequency * t) in first-order
// coordinates.
struct HarmonicForcing
{
  Vector direction;
  double amplitude = 0.0;
  double frequency = 1.0;
};

// 2D non-normal linear example: diag(-alpha, -beta) seen through the shear
// T = [[1, delta / (beta - alpha)], [0, 1]], giving [[-alpha, delta], [0, -beta]].
LinearSystem linear_2d(double alpha, double beta, double delta);

// 4D damped oscillator pair: slow block (-alpha, -omega; omega, -alpha), fast block
// (-beta, -nu; nu, -beta), the fast pair feeding the slow one through coupling (A, B; C, D).
LinearSystem linear_4d(double alpha, double beta, double omega, double nu,
                       const std::array<double, 4> &coupling);

struct ShawPierreParams
{
  double m1 = 1.0, m2 = 1.0;
  double c1 = 0.05, c2 = 0.01;
  double k1 = 1.0, k2 = 3.325;
  double alpha = 0.5;
};

struct CartParams
{
  double m1 = 1.0, m2 = 1.0, mf = 1.0;
  double c1 = 0.05, c2 = 0.01, cf = 0.01;
  double k1 = 1.0, k2 = 3.325, kf = 33.25;
  double alpha = 0.5;
};

// Two-mass chain in the relative coordinates (y1, y2) = (q1, q2 - q1).
MechanicalSystem shaw_pierre(const ShawPierreParams &p = {});

// The same chain mounted on a cart with coordinates (y1, y2, x_f).
MechanicalSystem shaw_pierre_cart(const CartParams &p = {});

// Unforced decay sampled at t = 0, dt_out, ..., t_end. States are the full first-order
// vector; labels x1..xn.
Trajectory simulate_decay(const VectorField &f, const Vector &x0, double t_end, double dt_out,
                          const IntegratorOptions &opts = {});
Trajectory simulate_decay(const LinearSystem &sys, const Vector &x0, double t_end,
                          double dt_out);
Trajectory simulate_decay(const MechanicalSystem &sys, const Vector &x0, double t_end,
                          double dt_out);

struct SteadyStateOptions
{
  int settle_periods = 60;
  int measure_periods = 5;
  int max_windows = 60;
  double drift_tol = 0.01;
  int samples_per_period = 128;
};

struct SteadyResponse
{
  double amplitude = 0.0;  // half peak-to-peak of the observable
  double phase = 0.0;      // phi in y ~ amplitude * cos(Omega t + phi)
  Vector final_state;      // state at the end of the last window (for continuation)
  int windows = 0;
};

// Forced response: integrates settle_periods of the forcing, then measures successive
// windows of measure_periods until the amplitude drifts by less than drift_tol between two
// consecutive windows. x0 defaults to the origin; a previous steady state can be passed to
// follow a branch in a frequency sweep. The forcing phase is referenced to t = 0.
SteadyResponse simulate_forced_steady_amplitude(const MechanicalSystem &sys,
                                                const HarmonicForcing &forcing,
                                                Index observable_index,
                                                const SteadyStateOptions &opts = {},
                                                std::optional<Vector> x0 = std::nullopt);

}  // namespace ssmo

#endif  // SSMO_SYSTEMS_HPP
