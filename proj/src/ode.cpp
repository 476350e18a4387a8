// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/ode.hpp"

#include <cmath>
#include <vector>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

namespace ssmo
{

namespace odeint = boost::numeric::odeint;

Matrix integrate_on_grid(const VectorField &f, const Vector &x0, const Vector &times,
                         const IntegratorOptions &opts)
{
  using State = std::vector<double>;
  const Index n = x0.size(), m = times.size();
  Matrix out(n, m);
  if (m == 0)
  {
    return out;
  }
  out.col(0) = x0;
  if (m == 1)
  {
    return out;
  }

  Vector xv(n), dv(n);
  auto rhs = [&](const State &x, State &dxdt, double t)
  {
    xv = Eigen::Map<const Vector>(x.data(), n);
    f(t, xv, dv);
    Eigen::Map<Vector>(dxdt.data(), n) = dv;
  };

  auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
  State x(x0.data(), x0.data() + n), xi(n);
  const double t0 = times(0), t_end = times(m - 1);
  const double h0 = std::min(opts.initial_step, t_end - t0);
  stepper.initialize(x, t0, h0);

  Index next = 1;
  long steps = 0;
  while (next < m)
  {
    while (next < m && times(next) <= stepper.current_time())
    {
      stepper.calc_state(times(next), xi);
      out.col(next) = Eigen::Map<const Vector>(xi.data(), n);
      next++;
    }
    if (next >= m)
    {
      break;
    }
    std::pair<double, double> interval;
    try
    {
      interval = stepper.do_step(rhs);
    }
    catch (const odeint::odeint_error &e)
    {
      throw Error(fmt::format("integrator failure at t = {}: {}", stepper.current_time(),
                              e.what()));
    }
    const auto [t_prev, t_now] = interval;
    if (++steps > opts.max_steps)
    {
      throw Error(fmt::format("integrator failure: step budget exhausted at t = {}", t_now));
    }
    if (!(t_now - t_prev > 1e-14 * std::max(1.0, std::abs(t_now))))
    {
      throw Error(fmt::format("integrator failure: step size underflow at t = {}", t_now));
    }
    for (double v : stepper.current_state())
    {
      if (!std::isfinite(v))
      {
        throw Error(fmt::format("integrator failure: non-finite state at t = {}", t_now));
      }
    }
  }
  return out;
}

Vector uniform_grid(double t0, double t_end, double dt)
{
  if (!(dt > 0.0) || !(t_end > t0))
  {
    throw Error("uniform grid needs dt > 0 and t_end > t0");
  }
  const auto n = static_cast<Index>(std::floor((t_end - t0) / dt * (1.0 + 1e-12))) + 1;
  Vector t(n);
  for (Index j = 0; j < n; j++)
  {
    t(j) = t0 + double(j) * dt;
  }
  return t;
}

}  // namespace ssmo
