// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_PROJECTION_HPP
#define SSMO_PROJECTION_HPP

#include <span>
#include <string>
#include <vector>
#include "ssmo/bfgs.hpp"
#include "ssmo/core.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

inline constexpr double kProjectorMaxCondition = 1e8;
inline constexpr double kProjectorTol = 1e-10;

//
// P = Q (B^T Q)^{-1} B^T: range span(Q), kernel orthogonal to span(B).
//
class ObliqueProjector
{
public:
  // Checks the conditioning of B^T Q and the projector identities; throws Error on failure.
  ObliqueProjector(Matrix Q, Matrix B);

  const Matrix &range_basis() const { return Q_; }
  const Matrix &kernel_complement_basis() const { return B_; }
  const Matrix &matrix() const { return P_; }
  Index dim() const { return P_.rows(); }
  Index rank() const { return Q_.cols(); }

  Vector apply(const Vector &y) const { return P_ * y; }

private:
  Matrix Q_, B_, P_;
};

ObliqueProjector make_projector(const Matrix &Q, const Matrix &B);

// Orthogonal projector onto span(Q).
ObliqueProjector normal_projector(const Matrix &Q);

struct OptimizeOptions
{
  BfgsOptions bfgs;
  // Objective value assigned to projections whose readouts stop oscillating, relative to
  // the objective at the normal projection.
  double penalty_factor = 1e6;
};

struct OptimizeResult
{
  ObliqueProjector projector;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> history;
};

// Objective J(B) = sum over readout columns r of backbone_variance(r^T P_B y_lin).
// Returns NaN when PFF fails on some readout.
double projection_objective(const ObliqueProjector &proj, const Trajectory &y_lin,
                            const Matrix &readouts);
// Sum of the objective over several linear-regime segments.
double projection_objective(const ObliqueProjector &proj, std::span<const Trajectory> y_lin,
                            const Matrix &readouts);

// Minimizes J over span(B), starting from B = Q. B is parametrized in the chart
// B = Q_tilde + N X, where Q_tilde is an orthonormal basis of span(Q) and N of its
// orthogonal complement; each chart point is one span, so no gauge directions remain.
// readouts is p x r (one weight vector per column); pass Q_tilde to use the reduced
// coordinates, or a single unit column to follow one observable row.
OptimizeResult optimize_B(const Matrix &Q, const Trajectory &y_lin, const Matrix &readouts,
                          const OptimizeOptions &opts = {});
OptimizeResult optimize_B(const Matrix &Q, const Trajectory &y_lin, const Vector &readout,
                          const OptimizeOptions &opts = {});
OptimizeResult optimize_B(const Matrix &Q, std::span<const Trajectory> y_lin,
                          const Matrix &readouts, const OptimizeOptions &opts = {});

// Column-wise z = P y.
Trajectory project(const ObliqueProjector &proj, const Trajectory &traj);

// xi = Q_tilde^T P y, one row per reduced coordinate.
Trajectory reduced_coordinates(const ObliqueProjector &proj, const Matrix &Q_tilde,
                               const Trajectory &traj);

}  // namespace ssmo

#endif  // SSMO_PROJECTION_HPP
