// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_BFGS_HPP
#define SSMO_BFGS_HPP

#include <functional>
#include <string>
#include <vector>
#include "ssmo/core.hpp"

namespace ssmo
{

struct BfgsOptions
{
  int max_iterations = 500;
  double gradient_tol = 1e-8;      // max-norm
  double rel_decrease_tol = 1e-12;  // over stall_window iterations
  int stall_window = 5;
  double fd_step = 1e-6;  // relative central-difference step, floored at fd_step itself
  double armijo = 1e-4;
  double max_step_norm = 0.0;  // trust cap on ||step|| (0: none)
  int max_line_search = 40;
};

struct BfgsResult
{
  Vector x;
  double value = 0.0;
  double gradient_norm = 0.0;  // max-norm at x
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> history;  // objective at every accepted iterate, starting with x0
};

// Quasi-Newton minimization with inverse-Hessian BFGS updates, backtracking Armijo line
// search and central finite-difference gradients. The gradient stencil evaluations run
// through parallel_for; the iteration itself is sequential, so results do not depend on
// the worker count. Accepted iterates never increase the objective.
BfgsResult minimize_bfgs(const std::function<double(const Vector &)> &objective,
                         const Vector &x0, const BfgsOptions &opts = {});

// Central-difference gradient with the same step rule as minimize_bfgs.
Vector central_gradient(const std::function<double(const Vector &)> &objective,
                        const Vector &x, double rel_step);

}  // namespace ssmo

#endif  // SSMO_BFGS_HPP
