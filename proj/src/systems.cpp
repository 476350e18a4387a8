// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/systems.hpp"

#include <cmath>
#include <numbers>
#include <fmt/format.h>
#include "ssmo/linalg.hpp"

namespace ssmo
{

namespace
{

void require_stable(const CVector &lambda, const char *what)
{
  for (Index j = 0; j < lambda.size(); j++)
  {
    if (!(lambda(j).real() < 0.0))
    {
      throw Error(fmt::format("{}: eigenvalue {}{:+}i is not in the open left half plane",
                              what, lambda(j).real(), lambda(j).imag()));
    }
  }
}

std::vector<std::string> state_labels(Index n)
{
  std::vector<std::string> out;
  for (Index k = 0; k < n; k++)
  {
    out.push_back(fmt::format("x{}", k + 1));
  }
  return out;
}

// Half peak-to-peak of uniformly sampled values with 3-point parabolic refinement of the
// extreme samples.
double half_peak_to_peak(const Vector &y)
{
  auto refine = [&](Index j)
  {
    if (j <= 0 || j >= y.size() - 1)
    {
      return y(j);
    }
    const double ym = y(j - 1), y0 = y(j), yp = y(j + 1);
    const double den = ym - 2.0 * y0 + yp;
    if (den == 0.0)
    {
      return y0;
    }
    const double s = 0.5 * (ym - yp) / den;
    return y0 - 0.25 * (ym - yp) * s;
  };
  Index imax = 0, imin = 0;
  y.maxCoeff(&imax);
  y.minCoeff(&imin);
  return 0.5 * (refine(imax) - refine(imin));
}

}  // namespace

LinearSystem::LinearSystem(Matrix A) : A_(std::move(A))
{
  if (A_.rows() != A_.cols() || A_.rows() == 0)
  {
    throw Error("linear system matrix must be square and nonempty");
  }
  require_stable(eigenvalues(), "linear system");
}

CVector LinearSystem::eigenvalues() const
{
  return eigen_decompose(A_).values;
}

VectorField LinearSystem::vector_field() const
{
  return [A = A_](double, const Vector &x, Vector &dx) { dx.noalias() = A * x; };
}

MechanicalSystem::MechanicalSystem(Matrix M, Matrix C, Matrix K, CubicTerm cubic)
  : M_(std::move(M)), C_(std::move(C)), K_(std::move(K)), cubic_(std::move(cubic))
{
  const Index m = M_.rows();
  if (M_.cols() != m || C_.rows() != m || C_.cols() != m || K_.rows() != m || K_.cols() != m)
  {
    throw Error("mass, damping and stiffness matrices must be square and of equal size");
  }
  if (cubic_.pattern.size() == 0)
  {
    cubic_.pattern = Vector::Zero(m);
  }
  if (cubic_.pattern.size() != m || cubic_.coordinate < 0 || cubic_.coordinate >= m)
  {
    throw Error("cubic term does not match the number of degrees of freedom");
  }
  Eigen::FullPivLU<Matrix> lu(M_);
  if (!lu.isInvertible())
  {
    throw Error("mass matrix is singular");
  }
  Minv_ = lu.inverse();
  A_ = Matrix::Zero(2 * m, 2 * m);
  A_.topRightCorner(m, m).setIdentity();
  A_.bottomLeftCorner(m, m) = -Minv_ * K_;
  A_.bottomRightCorner(m, m) = -Minv_ * C_;
  nl_direction_ = -Minv_ * cubic_.pattern;
  require_stable(eigenvalues(), "mechanical system");
}

CVector MechanicalSystem::eigenvalues() const
{
  return eigen_decompose(A_).values;
}

Vector MechanicalSystem::nonlinearity(const Vector &x) const
{
  const Index m = dofs();
  Vector out = Vector::Zero(2 * m);
  const double y = x(cubic_.coordinate);
  out.tail(m) = (cubic_.coeff * y * y * y) * nl_direction_;
  return out;
}

Vector MechanicalSystem::forcing_vector(const Vector &dof_force) const
{
  if (dof_force.size() != dofs())
  {
    throw Error("force vector size does not match the number of degrees of freedom");
  }
  Vector g = Vector::Zero(dim());
  g.tail(dofs()) = Minv_ * dof_force;
  return g;
}

MechanicalSystem MechanicalSystem::with_cubic_coeff(double coeff) const
{
  CubicTerm c = cubic_;
  c.coeff = coeff;
  return MechanicalSystem(M_, C_, K_, c);
}

VectorField MechanicalSystem::vector_field() const
{
  return [A = A_, dir = nl_direction_, k = cubic_.coordinate, a = cubic_.coeff,
          m = dofs()](double, const Vector &x, Vector &dx)
  {
    dx.noalias() = A * x;
    const double y = x(k);
    dx.tail(m) += (a * y * y * y) * dir;
  };
}

LinearSystem linear_2d(double alpha, double beta, double delta)
{
  if (!(beta > alpha && alpha > 0.0))
  {
    throw Error("linear_2d requires beta > alpha > 0");
  }
  Matrix A(2, 2);
  A << -alpha, delta, 0.0, -beta;
  return LinearSystem(std::move(A));
}

LinearSystem linear_4d(double alpha, double beta, double omega, double nu,
                       const std::array<double, 4> &coupling)
{
  if (!(beta > alpha && alpha > 0.0))
  {
    throw Error("linear_4d requires beta > alpha > 0");
  }
  Matrix A(4, 4);
  // clang-format off
  A << -alpha, -omega, coupling[0], coupling[1],
        omega, -alpha, coupling[2], coupling[3],
        0.0,    0.0,   -beta,       -nu,
        0.0,    0.0,    nu,         -beta;
  // clang-format on
  return LinearSystem(std::move(A));
}

MechanicalSystem shaw_pierre(const ShawPierreParams &p)
{
  Matrix M(2, 2), C(2, 2), K(2, 2);
  // clang-format off
  M << p.m1, 0.0,
       p.m2, p.m2;
  C << p.c1, -p.c2,
       p.c1,  p.c1 + p.c2;
  K << p.k1, -p.k2,
       p.k1,  p.k1 + p.k2;
  // clang-format on
  // The cubic force is set so that the first-order nonlinearity is (0, 0, -alpha/m1 x1^3, 0):
  // f_nl = alpha y1^3 M (1/m1, 0).
  Vector pattern(2);
  pattern << 1.0, p.m2 / p.m1;
  return MechanicalSystem(M, C, K, CubicTerm{0, p.alpha, pattern});
}

MechanicalSystem shaw_pierre_cart(const CartParams &p)
{
  Matrix M(3, 3), C(3, 3), K(3, 3);
  // clang-format off
  M << p.m1,  0.0,   p.m1,
       p.m2,  p.m2,  p.m2,
       0.0,   0.0,   p.mf;
  C << p.c1,        -p.c2,         0.0,
       p.c1,         p.c1 + p.c2,  0.0,
       -2.0 * p.c1, -p.c1,         p.cf;
  K << p.k1,        -p.k2,         0.0,
       p.k1,         p.k1 + p.k2,  0.0,
       -2.0 * p.k1, -p.k1,         p.kf;
  // clang-format on
  Vector pattern(3);
  pattern << 1.0, 0.0, -1.0;
  return MechanicalSystem(M, C, K, CubicTerm{0, p.alpha, pattern});
}

Trajectory simulate_decay(const VectorField &f, const Vector &x0, double t_end, double dt_out,
                          const IntegratorOptions &opts)
{
  if (!(dt_out > 0.0) || !(t_end > 0.0))
  {
    throw Error("simulate_decay needs dt_out > 0 and t_end > 0");
  }
  const Vector t = uniform_grid(0.0, t_end, dt_out);
  Matrix x = integrate_on_grid(f, x0, t, opts);
  return Trajectory(t, std::move(x), state_labels(x0.size()));
}

Trajectory simulate_decay(const LinearSystem &sys, const Vector &x0, double t_end,
                          double dt_out)
{
  if (x0.size() != sys.dim())
  {
    throw Error("initial condition does not match the system dimension");
  }
  return simulate_decay(sys.vector_field(), x0, t_end, dt_out);
}

Trajectory simulate_decay(const MechanicalSystem &sys, const Vector &x0, double t_end,
                          double dt_out)
{
  if (x0.size() != sys.dim())
  {
    throw Error("initial condition does not match the system dimension");
  }
  return simulate_decay(sys.vector_field(), x0, t_end, dt_out);
}

SteadyResponse simulate_forced_steady_amplitude(const MechanicalSystem &sys,
                                                const HarmonicForcing &forcing,
                                                Index observable_index,
                                                const SteadyStateOptions &opts,
                                                std::optional<Vector> x0)
{
  if (!(forcing.frequency > 0.0))
  {
    throw Error("forcing frequency must be positive");
  }
  if (forcing.amplitude < 0.0)
  {
    throw Error("forcing amplitude must be nonnegative");
  }
  if (forcing.direction.size() != sys.dim())
  {
    throw Error("forcing direction does not match the system dimension");
  }
  if (observable_index < 0 || observable_index >= sys.dim())
  {
    throw Error("observable index out of range");
  }
  const double Omega = forcing.frequency;
  const double period = 2.0 * std::numbers::pi / Omega;
  const VectorField free = sys.vector_field();
  const Vector g = forcing.amplitude * forcing.direction;
  const VectorField f = [&](double t, const Vector &x, Vector &dx)
  {
    free(t, x, dx);
    dx += std::cos(Omega * t) * g;
  };

  SteadyResponse out;
  Vector x = x0 ? *x0 : Vector::Zero(sys.dim());
  if (x.size() != sys.dim())
  {
    throw Error("initial condition does not match the system dimension");
  }
  double t = 0.0;
  if (opts.settle_periods > 0)
  {
    Vector grid(2);
    grid << 0.0, opts.settle_periods * period;
    x = integrate_on_grid(f, x, grid).col(1);
    t = grid(1);
  }

  const Index samples = Index(opts.measure_periods) * opts.samples_per_period;
  double previous = -1.0;
  for (int w = 0; w < opts.max_windows; w++)
  {
    Vector grid(samples + 1);
    for (Index j = 0; j <= samples; j++)
    {
      grid(j) = t + double(j) * period / opts.samples_per_period;
    }
    const Matrix states = integrate_on_grid(f, x, grid);
    const Vector y = states.row(observable_index).transpose();
    const double amp = half_peak_to_peak(y);
    x = states.col(samples);
    t = grid(samples);
    out.windows = w + 1;

    // Fourier coefficients over the window (trapezoid rule is exact on whole periods).
    double cc = 0.0, ss = 0.0;
    for (Index j = 0; j < samples; j++)
    {
      cc += y(j) * std::cos(Omega * grid(j));
      ss += y(j) * std::sin(Omega * grid(j));
    }
    cc *= 2.0 / double(samples);
    ss *= 2.0 / double(samples);

    if (previous >= 0.0 && std::abs(amp - previous) <= opts.drift_tol * std::max(amp, 1e-300))
    {
      out.amplitude = amp;
      out.phase = std::atan2(-ss, cc);
      out.final_state = x;
      return out;
    }
    previous = amp;
  }
  throw Error(fmt::format("forced response did not settle at Omega = {} within {} windows",
                          Omega, opts.max_windows));
}

}  // namespace ssmo
