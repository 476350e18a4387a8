// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/projection.hpp"

#include <cmath>
#include <limits>
#include <fmt/format.h>
#include "ssmo/backbone.hpp"
#include "ssmo/linalg.hpp"

namespace ssmo
{

ObliqueProjector::ObliqueProjector(Matrix Q, Matrix B) : Q_(std::move(Q)), B_(std::move(B))
{
  if (Q_.rows() != B_.rows() || Q_.cols() != B_.cols() || Q_.cols() < 1 ||
      Q_.cols() > Q_.rows())
  {
    throw Error(fmt::format("projector bases must share shape p x d with 1 <= d <= p (Q is "
                            "{}x{}, B is {}x{})",
                            Q_.rows(), Q_.cols(), B_.rows(), B_.cols()));
  }
  const Matrix BtQ = B_.transpose() * Q_;
  const double cond = condition_number(BtQ);
  if (!(cond < kProjectorMaxCondition))
  {
    throw Error(fmt::format(
        "projection direction nearly parallel to range (cond(B^T Q) = {:.3e})", cond));
  }
  // Scale-free check on the smallest principal cosine between span(B) and span(Q).
  const Eigen::JacobiSVD<Matrix> sq(Q_, Eigen::ComputeThinU);
  const Eigen::JacobiSVD<Matrix> sb(B_, Eigen::ComputeThinU);
  const Vector cosines =
      Eigen::JacobiSVD<Matrix>(sb.matrixU().transpose() * sq.matrixU()).singularValues();
  const double cmin = cosines.minCoeff();
  if (!(cmin * kProjectorMaxCondition > 1.0))
  {
    throw Error(fmt::format(
        "projection direction nearly parallel to range (smallest cosine {:.3e})", cmin));
  }
  P_ = Q_ * BtQ.partialPivLu().solve(B_.transpose());

  const double pn = P_.norm();
  const Matrix I = Matrix::Identity(P_.rows(), P_.rows());
  if ((P_ * P_ - P_).norm() > kProjectorTol * pn)
  {
    throw Error("projector fails idempotency check");
  }
  if ((P_ * Q_ - Q_).norm() > kProjectorTol * pn * Q_.norm())
  {
    throw Error("projector fails range check P Q = Q");
  }
  if ((B_.transpose() * (I - P_)).norm() > kProjectorTol * pn * B_.norm())
  {
    throw Error("projector fails kernel check B^T (I - P) = 0");
  }
}

ObliqueProjector make_projector(const Matrix &Q, const Matrix &B)
{
  return ObliqueProjector(Q, B);
}

ObliqueProjector normal_projector(const Matrix &Q)
{
  if (numerical_rank(Q, 1e-12) < Q.cols())
  {
    throw Error("normal projector needs a full-rank basis");
  }
  ObliqueProjector proj(Q, Q);
  return proj;
}

double projection_objective(const ObliqueProjector &proj, const Trajectory &y_lin,
                            const Matrix &readouts)
{
  if (readouts.rows() != proj.dim() || y_lin.dim() != proj.dim())
  {
    throw Error("readout and trajectory dimensions must match the projector");
  }
  const Matrix Z = (readouts.transpose() * proj.matrix()) * y_lin.states();
  const double t0 = y_lin.times()(0), dt = y_lin.dt();
  double J = 0.0;
  try
  {
    for (Index r = 0; r < Z.rows(); r++)
    {
      const Vector z = Z.row(r).transpose();
      J += backbone_variance(
          std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), t0, dt);
    }
  }
  catch (const Error &)
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return J;
}

double projection_objective(const ObliqueProjector &proj, std::span<const Trajectory> y_lin,
                            const Matrix &readouts)
{
  double J = 0.0;
  for (const auto &seg : y_lin)
  {
    J += projection_objective(proj, seg, readouts);
  }
  return J;
}

OptimizeResult optimize_B(const Matrix &Q, const Trajectory &y_lin, const Matrix &readouts,
                          const OptimizeOptions &opts)
{
  return optimize_B(Q, std::span<const Trajectory>(&y_lin, 1), readouts, opts);
}

OptimizeResult optimize_B(const Matrix &Q, std::span<const Trajectory> y_lin,
                          const Matrix &readouts, const OptimizeOptions &opts)
{
  const Index p = Q.rows(), d = Q.cols();
  if (y_lin.empty())
  {
    throw Error("B optimization needs at least one linear-regime segment");
  }
  for (const auto &seg : y_lin)
  {
    if (seg.dim() != p)
    {
      throw Error(fmt::format("y_lin has {} rows, Q has {}", seg.dim(), p));
    }
  }
  if (readouts.rows() != p || readouts.cols() < 1)
  {
    throw Error("readouts must be p x r with r >= 1");
  }
  const Matrix Qt = orthonormalize(Q);
  const Matrix N = orthogonal_complement(Qt);
  const Index m = (p - d) * d;

  auto basis = [&](const Vector &x)
  {
    const Matrix X = Eigen::Map<const Matrix>(x.data(), p - d, d);
    return Matrix(Qt + N * X);
  };

  const double J0 = projection_objective(normal_projector(Q), y_lin, readouts);
  if (!std::isfinite(J0))
  {
    throw Error("projection objective undefined at the normal projection: readouts lose "
                "oscillation");
  }
  const double penalty = opts.penalty_factor * std::max(J0, 1e-300);

  auto objective = [&](const Vector &x)
  {
    try
    {
      const double J = projection_objective(ObliqueProjector(Q, basis(x)), y_lin, readouts);
      return std::isfinite(J) ? J : penalty;
    }
    catch (const Error &)
    {
      return penalty;
    }
  };

  const BfgsResult res = minimize_bfgs(objective, Vector::Zero(m), opts.bfgs);
  if (res.value >= penalty)
  {
    throw Error(fmt::format("B optimization ended on a degenerate projection ({})",
                            res.status));
  }
  Matrix B = basis(res.x);
  // Report B with orthonormal columns; the projector only depends on its span.
  B = orthonormalize(B);
  OptimizeResult out{ObliqueProjector(Q, B), 0.0, 0.0, 0.0, 0, 0, false, {}, {}};
  out.initial_objective = J0;
  out.final_objective = res.value;
  out.gradient_norm = res.gradient_norm;
  out.iterations = res.iterations;
  out.evaluations = res.evaluations;
  out.converged = res.converged;
  out.status = res.status;
  out.history = res.history;
  return out;
}

OptimizeResult optimize_B(const Matrix &Q, const Trajectory &y_lin, const Vector &readout,
                          const OptimizeOptions &opts)
{
  return optimize_B(Q, y_lin, Matrix(readout), opts);
}

Trajectory project(const ObliqueProjector &proj, const Trajectory &traj)
{
  if (traj.dim() != proj.dim())
  {
    throw Error(fmt::format("cannot project a {}-dimensional trajectory with a {}-dimensional "
                            "projector",
                            traj.dim(), proj.dim()));
  }
  return traj.with_states(proj.matrix() * traj.states(), traj.labels());
}

Trajectory reduced_coordinates(const ObliqueProjector &proj, const Matrix &Q_tilde,
                               const Trajectory &traj)
{
  if (Q_tilde.rows() != proj.dim() || traj.dim() != proj.dim())
  {
    throw Error("reduced coordinates: shape mismatch between Q_tilde, projector and data");
  }
  std::vector<std::string> labels;
  for (Index k = 0; k < Q_tilde.cols(); k++)
  {
    labels.push_back(fmt::format("xi{}", k + 1));
  }
  return traj.with_states((Q_tilde.transpose() * proj.matrix()) * traj.states(),
                          std::move(labels));
}

}  // namespace ssmo
