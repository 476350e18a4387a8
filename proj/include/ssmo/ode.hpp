// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_ODE_HPP
#define SSMO_ODE_HPP

#include <functional>
#include "ssmo/core.hpp"

namespace ssmo
{

// Right-hand side dx/dt = f(t, x), written into the output argument.
using VectorField = std::function<void(double t, const Vector &x, Vector &dxdt)>;

struct IntegratorOptions
{
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  long max_steps = 20'000'000;
};

// Integrates with the Dormand-Prince 5(4) pair under local error control and evaluates the
// continuous extension at every entry of times (ascending; times(0) is the initial time).
// Returns one column per requested instant. Throws Error on step-size underflow, step
// budget exhaustion or a non-finite state.
Matrix integrate_on_grid(const VectorField &f, const Vector &x0, const Vector &times,
                         const IntegratorOptions &opts = {});

// Uniform output grid t0, t0 + dt, ..., up to and including t_end (within rounding).
Vector uniform_grid(double t0, double t_end, double dt);

}  // namespace ssmo

#endif  // SSMO_ODE_HPP
