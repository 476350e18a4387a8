// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/bfgs.hpp"

#include <cmath>
#include "ssmo/parallel.hpp"

namespace ssmo
{

Vector central_gradient(const std::function<double(const Vector &)> &objective,
                        const Vector &x, double rel_step)
{
  const Index m = x.size();
  std::vector<double> values(2 * static_cast<std::size_t>(m));
  Vector h(m);
  for (Index i = 0; i < m; i++)
  {
    h(i) = rel_step * std::max(1.0, std::abs(x(i)));
  }
  parallel_for(values.size(),
               [&](std::size_t k)
               {
                 const Index i = static_cast<Index>(k / 2);
                 Vector xs = x;
                 xs(i) += (k % 2 == 0) ? h(i) : -h(i);
                 values[k] = objective(xs);
               });
  Vector g(m);
  for (Index i = 0; i < m; i++)
  {
    g(i) = (values[2 * i] - values[2 * i + 1]) / (2.0 * h(i));
  }
  return g;
}

BfgsResult minimize_bfgs(const std::function<double(const Vector &)> &objective,
                         const Vector &x0, const BfgsOptions &opts)
{
  const Index m = x0.size();
  BfgsResult out;
  Vector x = x0;
  double f = objective(x);
  out.evaluations = 1;
  out.history.push_back(f);
  if (m == 0)
  {
    out.x = x;
    out.value = f;
    out.converged = true;
    out.status = "no free parameters";
    return out;
  }
  Vector g = central_gradient(objective, x, opts.fd_step);
  out.evaluations += 2 * static_cast<int>(m);
  Matrix H = Matrix::Identity(m, m);
  bool scaled = false;

  auto finish = [&](bool converged, std::string status)
  {
    out.x = x;
    out.value = f;
    out.gradient_norm = g.lpNorm<Eigen::Infinity>();
    out.converged = converged;
    out.status = std::move(status);
    return out;
  };

  for (int it = 0; it < opts.max_iterations; it++)
  {
    out.iterations = it;
    if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tol)
    {
      return finish(true, "gradient tolerance reached");
    }
    bool accepted = false;
    Vector x_new, p;
    double f_new = f;
    for (int attempt = 0; attempt < 2 && !accepted; attempt++)
    {
      p = -H * g;
      double slope = g.dot(p);
      if (!(slope < 0.0))
      {
        H.setIdentity();
        scaled = false;
        p = -g;
        slope = g.dot(p);
      }
      if (opts.max_step_norm > 0.0 && p.norm() > opts.max_step_norm)
      {
        p *= opts.max_step_norm / p.norm();
        slope = g.dot(p);
      }
      double t = 1.0;
      for (int ls = 0; ls < opts.max_line_search; ls++)
      {
        x_new = x + t * p;
        f_new = objective(x_new);
        out.evaluations++;
        if (std::isfinite(f_new) && f_new <= f + opts.armijo * t * slope)
        {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted)
      {
        // Retry once along steepest descent.
        H.setIdentity();
        scaled = false;
      }
    }
    if (!accepted)
    {
      out.iterations = it + 1;
      return finish(true, "line search could not decrease the objective");
    }

    const Vector g_new = central_gradient(objective, x_new, opts.fd_step);
    out.evaluations += 2 * static_cast<int>(m);
    const Vector s = x_new - x, y = g_new - g;
    const double ys = y.dot(s);
    if (ys > 1e-12 * s.norm() * y.norm())
    {
      if (!scaled)
      {
        H = (ys / y.squaredNorm()) * Matrix::Identity(m, m);
        scaled = true;
      }
      const double rho = 1.0 / ys;
      const Matrix V = Matrix::Identity(m, m) - rho * y * s.transpose();
      H = V.transpose() * H * V + rho * s * s.transpose();
    }
    x = x_new;
    f = f_new;
    g = g_new;
    out.history.push_back(f);

    const auto k = out.history.size();
    if (k > static_cast<std::size_t>(opts.stall_window))
    {
      const double old = out.history[k - 1 - opts.stall_window];
      if (old - f <= opts.rel_decrease_tol * std::max(std::abs(old), 1e-300))
      {
        out.iterations = it + 1;
        return finish(true, "relative objective decrease below tolerance");
      }
    }
  }
  out.iterations = opts.max_iterations;
  return finish(false, "not converged: iteration limit reached");
}

}  // namespace ssmo
