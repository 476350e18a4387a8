// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/ssm.hpp"

#include <cmath>
#include <numbers>
#include <Eigen/QR>
#include <fmt/format.h>
#include "ssmo/linalg.hpp"
#include "ssmo/ode.hpp"

namespace ssmo
{

namespace
{

// Least squares C = argmin ||Y - C Phi||_F^2 + ridge ||C S||_F^2 with S the row norms of
// Phi (equilibration), returning C (rows of Y x rows of Phi).
Matrix solve_regression(const Matrix &Phi, const Matrix &Y, double ridge)
{
  const Index n = Phi.rows();
  Vector s = Phi.rowwise().norm();
  for (Index k = 0; k < n; k++)
  {
    if (!(s(k) > 0.0))
    {
      throw Error("regression feature vanishes on all samples; data cannot determine the fit");
    }
  }
  Matrix A = s.cwiseInverse().asDiagonal() * Phi;  // n x N
  Matrix lhs = A.transpose(), rhs = Y.transpose();
  if (ridge > 0.0)
  {
    const Index N = lhs.rows();
    lhs.conservativeResize(N + n, Eigen::NoChange);
    rhs.conservativeResize(N + n, Eigen::NoChange);
    lhs.bottomRows(n) = std::sqrt(ridge) * Matrix::Identity(n, n);
    rhs.bottomRows(n).setZero();
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(lhs);
  if (qr.rank() < n)
  {
    throw Error(fmt::format("regression is rank deficient ({} of {} features independent)",
                            qr.rank(), n));
  }
  const Matrix Cs = qr.solve(rhs).transpose();  // rows(Y) x n
  return Cs * s.cwiseInverse().asDiagonal();
}

void attach_residuals(PolynomialFit &fit, const Matrix &target, const Matrix &model)
{
  const double N = double(target.cols());
  fit.residual_rms = ((target - model).rowwise().squaredNorm() / N).cwiseSqrt();
  fit.signal_rms = (target.rowwise().squaredNorm() / N).cwiseSqrt();
  for (Index r = 0; r < target.rows(); r++)
  {
    if (fit.residual_rms(r) > kPoorFitRatio * fit.signal_rms(r))
    {
      fit.warnings.push_back(fmt::format(
          "poor fit: output {} residual RMS {:.3e} exceeds {:.0f}% of signal RMS {:.3e}", r + 1,
          fit.residual_rms(r), 100.0 * kPoorFitRatio, fit.signal_rms(r)));
    }
  }
}

Matrix concat_states(std::span<const Trajectory> trajs)
{
  Index total = 0;
  for (const auto &t : trajs)
  {
    total += t.size();
  }
  if (trajs.empty())
  {
    throw Error("no training trajectories");
  }
  Matrix out(trajs[0].dim(), total);
  Index c = 0;
  for (const auto &t : trajs)
  {
    if (t.dim() != out.rows())
    {
      throw Error("training trajectories differ in dimension");
    }
    out.middleCols(c, t.size()) = t.states();
    c += t.size();
  }
  return out;
}

}  // namespace

PolynomialFit fit_parametrization(std::span<const Trajectory> ys,
                                  std::span<const Trajectory> xis, const Matrix &Q_tilde,
                                  int order, double ridge)
{
  if (ys.size() != xis.size())
  {
    throw Error("parametrization fit needs one reduced-coordinate trajectory per observable "
                "trajectory");
  }
  for (std::size_t k = 0; k < ys.size(); k++)
  {
    if (ys[k].size() != xis[k].size() ||
        (ys[k].times() - xis[k].times()).cwiseAbs().maxCoeff() > 0.0)
    {
      throw Error(fmt::format("trajectory {}: y and xi must share sample times", k));
    }
  }
  const Matrix Y = concat_states(ys), Xi = concat_states(xis);
  const Index p = Y.rows(), d = Xi.rows();
  if (Q_tilde.rows() != p || Q_tilde.cols() != d)
  {
    throw Error(fmt::format("Q_tilde must be {}x{}", p, d));
  }
  PolynomialFit fit{PolynomialMap(d, p, order), {}, {}, Y.cols(), {}};
  const Index n_mono = fit.map.monomial_count();
  if (Y.cols() < 3 * p * n_mono)
  {
    throw Error(fmt::format("under-determined parametrization fit: {} samples for {} "
                            "coefficients (need at least 3x)",
                            Y.cols(), p * n_mono));
  }
  const Matrix Phi = fit.map.features(Xi);
  const Matrix N = orthogonal_complement(Q_tilde);

  Matrix C(p, n_mono);
  Matrix Cq(d, n_mono);
  Cq.leftCols(d).setIdentity();
  if (n_mono > d)
  {
    Cq.rightCols(n_mono - d) =
        solve_regression(Phi.bottomRows(n_mono - d), Q_tilde.transpose() * Y - Xi, ridge);
  }
  C = Q_tilde * Cq;
  if (N.cols() > 0)
  {
    C += N * solve_regression(Phi, N.transpose() * Y, ridge);
  }
  fit.map.set_coefficients(C);
  attach_residuals(fit, Y, C * Phi);
  return fit;
}

PolynomialFit fit_parametrization(const Trajectory &y, const Trajectory &xi,
                                  const Matrix &Q_tilde, int order, double ridge)
{
  return fit_parametrization(std::span<const Trajectory>(&y, 1),
                             std::span<const Trajectory>(&xi, 1), Q_tilde, order, ridge);
}

Matrix time_derivative(const Trajectory &traj)
{
  const Index N = traj.size();
  if (N < 5)
  {
    throw Error("derivative estimation needs at least 5 samples");
  }
  const Matrix &X = traj.states();
  const double h12 = 12.0 * traj.dt();
  Matrix D(X.rows(), N);
  D.col(0) = (-25.0 * X.col(0) + 48.0 * X.col(1) - 36.0 * X.col(2) + 16.0 * X.col(3) -
              3.0 * X.col(4)) /
             h12;
  D.col(1) =
      (-3.0 * X.col(0) - 10.0 * X.col(1) + 18.0 * X.col(2) - 6.0 * X.col(3) + X.col(4)) / h12;
  for (Index j = 2; j + 2 < N; j++)
  {
    D.col(j) = (X.col(j - 2) - 8.0 * X.col(j - 1) + 8.0 * X.col(j + 1) - X.col(j + 2)) / h12;
  }
  D.col(N - 2) = (3.0 * X.col(N - 1) + 10.0 * X.col(N - 2) - 18.0 * X.col(N - 3) +
                  6.0 * X.col(N - 4) - X.col(N - 5)) /
                 h12;
  D.col(N - 1) = (25.0 * X.col(N - 1) - 48.0 * X.col(N - 2) + 36.0 * X.col(N - 3) -
                  16.0 * X.col(N - 4) + 3.0 * X.col(N - 5)) /
                 h12;
  return D;
}

namespace
{

PolynomialFit reduced_fit(std::span<const Trajectory> xis, int order, double ridge,
                          const Matrix *linear)
{
  if (xis.empty())
  {
    throw Error("no training trajectories");
  }
  std::vector<Trajectory> rates;
  for (const auto &xi : xis)
  {
    rates.push_back(xi.with_states(time_derivative(xi)));
  }
  const Matrix Xi = concat_states(xis);
  const Matrix Xdot = concat_states(rates);
  const Index d = Xi.rows();
  PolynomialFit fit{PolynomialMap(d, d, order), {}, {}, Xi.cols(), {}};
  const Index n_mono = fit.map.monomial_count();
  if (Xi.cols() < 3 * d * n_mono)
  {
    throw Error(fmt::format("under-determined reduced-dynamics fit: {} samples for {} "
                            "coefficients (need at least 3x)",
                            Xi.cols(), d * n_mono));
  }
  const Matrix Phi = fit.map.features(Xi);
  Matrix C(d, n_mono);
  if (linear)
  {
    if (linear->rows() != d || linear->cols() != d)
    {
      throw Error(fmt::format("fixed linear part must be {}x{}", d, d));
    }
    C.leftCols(d) = *linear;
    if (n_mono > d)
    {
      C.rightCols(n_mono - d) =
          solve_regression(Phi.bottomRows(n_mono - d), Xdot - *linear * Xi, ridge);
    }
  }
  else
  {
    C = solve_regression(Phi, Xdot, ridge);
  }
  fit.map.set_coefficients(C);
  attach_residuals(fit, Xdot, C * Phi);
  return fit;
}

}  // namespace

PolynomialFit fit_reduced_dynamics(std::span<const Trajectory> xis, int order, double ridge)
{
  return reduced_fit(xis, order, ridge, nullptr);
}

PolynomialFit fit_reduced_dynamics(std::span<const Trajectory> xis, int order,
                                   const Matrix &linear, double ridge)
{
  return reduced_fit(xis, order, ridge, &linear);
}

PolynomialFit fit_reduced_dynamics(const Trajectory &xi, int order, double ridge)
{
  return fit_reduced_dynamics(std::span<const Trajectory>(&xi, 1), order, ridge);
}

double PolarForm::radial(double rho) const
{
  double v = 0.0, r = rho;
  for (Index j = 0; j < a.size(); j++)
  {
    v += a(j) * r;
    r *= rho * rho;
  }
  return v;
}

double PolarForm::radial_derivative(double rho) const
{
  double v = 0.0, r = 1.0;
  for (Index j = 0; j < a.size(); j++)
  {
    v += double(2 * j + 1) * a(j) * r;
    r *= rho * rho;
  }
  return v;
}

double PolarForm::frequency(double rho) const
{
  double v = 0.0, r = 1.0;
  for (Index j = 0; j < b.size(); j++)
  {
    v += b(j) * r;
    r *= rho * rho;
  }
  return v;
}

double PolarForm::frequency_derivative(double rho) const
{
  double v = 0.0, r = rho;
  for (Index j = 1; j < b.size(); j++)
  {
    v += double(2 * j) * b(j) * r;
    r *= rho * rho;
  }
  return v;
}

Vector PolarForm::to_reduced(double rho, double theta) const
{
  return T * Eigen::Vector2d(rho * std::cos(theta), rho * std::sin(theta));
}

double PolarForm::radius(const Vector &xi) const { return T.partialPivLu().solve(xi).norm(); }

Vector PolarForm::cartesian_field(const Vector &xi) const
{
  const Vector u = T.partialPivLu().solve(xi);
  const Complex w(u(0), u(1));
  const double rho2 = std::norm(w);
  Complex wdot = 0.0, r = 1.0;
  for (Index j = 0; j < std::max(a.size(), b.size()); j++)
  {
    const double aj = j < a.size() ? a(j) : 0.0, bj = j < b.size() ? b(j) : 0.0;
    wdot += Complex(aj, bj) * w * r;
    r *= rho2;
  }
  return T * Eigen::Vector2d(wdot.real(), wdot.imag());
}

PolarForm to_polar(const PolynomialMap &rd)
{
  if (rd.input_dim() != 2 || rd.output_dim() != 2)
  {
    throw Error("polar form needs a planar reduced vector field (d = 2)");
  }
  const EigenPairs eig = eigen_decompose(rd.linear_part());
  Index k = eig.values(0).imag() >= eig.values(1).imag() ? 0 : 1;
  const Complex lambda = eig.values(k);
  if (!(std::abs(lambda.imag()) > 1e-12 * std::max(1.0, std::abs(lambda))))
  {
    throw Error("polar form unsupported: linear part has real eigenvalues (no oscillation)");
  }
  CVector v = eig.vectors.col(k);
  v /= v.norm();
  const Index ref = std::abs(v(0)) > 1e-8 ? 0 : 1;
  v *= std::conj(v(ref)) / std::abs(v(ref));

  PolarForm pf;
  pf.T.resize(2, 2);
  pf.T.col(0) = std::numbers::sqrt2 * v.real();
  pf.T.col(1) = -std::numbers::sqrt2 * v.imag();
  const Matrix Tinv = pf.T.inverse();

  const int order = rd.order();
  const int terms = (order + 1) / 2;
  pf.a = Vector::Zero(terms);
  pf.b = Vector::Zero(terms);
  pf.a(0) = lambda.real();
  pf.b(0) = lambda.imag();
  const int K = 4 * (order + 1);
  for (int j = 1; j < terms; j++)
  {
    const int degree = 2 * j + 1;
    Complex c = 0.0;
    for (int s = 0; s < K; s++)
    {
      const double phi = 2.0 * std::numbers::pi * double(s) / double(K);
      const Vector g =
          Tinv * rd.evaluate_degree(pf.T * Eigen::Vector2d(std::cos(phi), std::sin(phi)),
                                    degree);
      c += Complex(g(0), g(1)) * std::exp(Complex(0.0, -phi));
    }
    c /= double(K);
    pf.a(j) = c.real();
    pf.b(j) = c.imag();
  }
  return pf;
}

Trajectory reconstruct(const SsmModel &model, const Trajectory &xi)
{
  if (xi.dim() != model.parametrization.input_dim())
  {
    throw Error(fmt::format("reconstruct: xi has {} rows, model expects {}", xi.dim(),
                            model.parametrization.input_dim()));
  }
  return xi.with_states(model.parametrization.evaluate(xi.states()));
}

Trajectory reduce(const SsmModel &model, const Trajectory &y)
{
  return reduced_coordinates(model.projector, model.Q_tilde(), y);
}

Prediction predict_trajectory(const SsmModel &model, const Vector &y0, double t_end,
                              double dt_out)
{
  if (y0.size() != model.observable_dim())
  {
    throw Error(fmt::format("initial observable has length {}, model expects {}", y0.size(),
                            model.observable_dim()));
  }
  const Vector xi0 = model.Q_tilde().transpose() * (model.projector.matrix() * y0);
  std::vector<std::string> warnings;
  if (xi0.norm() > model.training_radius)
  {
    warnings.push_back(fmt::format("extrapolation: ||xi0|| = {:.4g} exceeds the training "
                                   "range {:.4g}",
                                   xi0.norm(), model.training_radius));
  }
  const PolynomialMap &rd = model.reduced_dynamics;
  const VectorField f = [&rd](double, const Vector &x, Vector &dx) { dx = rd.evaluate(x); };
  const Vector times = uniform_grid(0.0, t_end, dt_out);
  const Matrix Xi = integrate_on_grid(f, xi0, times);
  std::vector<std::string> xl;
  for (Index k = 0; k < Xi.rows(); k++)
  {
    xl.push_back(fmt::format("xi{}", k + 1));
  }
  Trajectory xi(times, Xi, xl);
  Trajectory y(times, model.parametrization.evaluate(Xi));
  return {std::move(y), std::move(xi), std::move(warnings)};
}

double nmte(const Trajectory &predicted, const Trajectory &truth)
{
  if (predicted.dim() != truth.dim() || predicted.size() != truth.size())
  {
    throw Error(fmt::format("NMTE shape mismatch: {}x{} vs {}x{}", predicted.dim(),
                            predicted.size(), truth.dim(), truth.size()));
  }
  const double tol = 1e-9 * truth.dt();
  if ((predicted.times() - truth.times()).cwiseAbs().maxCoeff() > tol)
  {
    throw Error("NMTE needs identical sample times");
  }
  const Vector err = (predicted.states() - truth.states()).colwise().norm();
  const double peak = truth.states().colwise().norm().maxCoeff();
  if (!(peak > 0.0))
  {
    throw Error("NMTE undefined for an identically zero reference trajectory");
  }
  return err.mean() / peak;
}

}  // namespace ssmo
