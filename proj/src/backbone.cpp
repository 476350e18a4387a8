// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace ssmo
{

std::vector<double> BackboneCurve::frequencies() const
{
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto &p : points)
  {
    out.push_back(p.frequency);
  }
  return out;
}

std::vector<double> BackboneCurve::amplitudes() const
{
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto &p : points)
  {
    out.push_back(p.amplitude);
  }
  return out;
}

BackboneCurve pff_extract(std::span<const double> raw, double t0, double dt)
{
  const std::size_t n = raw.size();
  if (n < 3 || !(dt > 0.0))
  {
    throw Error("signal not oscillatory");
  }
  std::vector<double> x(raw.begin(), raw.end());
  double peak = 0.0, mean = 0.0;
  for (double v : x)
  {
    peak = std::max(peak, std::abs(v));
    mean += v;
  }
  mean /= double(n);
  if (std::abs(mean) > 1e-2 * peak)
  {
    for (double &v : x)
    {
      v -= mean;
    }
  }

  // Crossing positions in fractional sample units.
  std::vector<double> crossings;
  for (std::size_t j = 0; j + 1 < n; j++)
  {
    const double a = x[j], b = x[j + 1];
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0))
    {
      crossings.push_back(double(j) + a / (a - b));
    }
  }
  if (crossings.size() < 3)
  {
    throw Error("signal not oscillatory");
  }

  BackboneCurve curve;
  curve.points.reserve(crossings.size() - 1);
  for (std::size_t k = 0; k + 1 < crossings.size(); k++)
  {
    const double c0 = crossings[k], c1 = crossings[k + 1];
    // Samples strictly inside the semi-period.
    const auto first = static_cast<std::size_t>(std::floor(c0)) + 1;
    auto last = static_cast<std::size_t>(std::ceil(c1)) - 1;
    if (double(last) >= c1)
    {
      last--;
    }
    if (last < first || last - first + 1 < 3)
    {
      curve.skipped++;
      continue;
    }
    std::size_t jmax = first;
    for (std::size_t j = first; j <= last; j++)
    {
      if (std::abs(x[j]) > std::abs(x[jmax]))
      {
        jmax = j;
      }
    }
    double amp = std::abs(x[jmax]), shift = 0.0;
    if (jmax > 0 && jmax + 1 < n)
    {
      const double ym = x[jmax - 1], y0 = x[jmax], yp = x[jmax + 1];
      const double den = ym - 2.0 * y0 + yp;
      if (den != 0.0)
      {
        shift = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
        amp = std::abs(y0 - 0.25 * (ym - yp) * shift);
      }
    }
    const double period = (c1 - c0) * dt;
    curve.points.push_back(
        {std::numbers::pi / period, amp, t0 + (double(jmax) + shift) * dt});
  }
  return curve;
}

BackboneCurve pff_extract(const Trajectory &signal)
{
  if (signal.dim() != 1)
  {
    throw Error("PFF needs a scalar signal (p = 1)");
  }
  const Vector v = signal.states().row(0).transpose();
  return pff_extract(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())),
                     signal.times()(0), signal.dt());
}

double frequency_variance(const BackboneCurve &curve)
{
  const std::size_t n = curve.points.size();
  if (n < 2)
  {
    throw Error("backbone variance needs at least 2 backbone points");
  }
  double mean = 0.0;
  for (const auto &p : curve.points)
  {
    mean += p.frequency;
  }
  mean /= double(n);
  double ss = 0.0;
  for (const auto &p : curve.points)
  {
    ss += (p.frequency - mean) * (p.frequency - mean);
  }
  return ss / double(n - 1) / (mean * mean);
}

double backbone_variance(const Trajectory &signal)
{
  return frequency_variance(pff_extract(signal));
}

double backbone_variance(std::span<const double> values, double t0, double dt)
{
  return frequency_variance(pff_extract(values, t0, dt));
}

LinearRegime identify_linear_regime(const BackboneCurve &curve, double threshold)
{
  const auto n = static_cast<Index>(curve.points.size());
  if (n < 4)
  {
    throw Error("linear regime identification needs at least 4 backbone points");
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b)
                   { return curve.points[a].amplitude > curve.points[b].amplitude; });

  double sum = 0.0;
  for (const auto &p : curve.points)
  {
    sum += p.frequency;
  }
  // Candidate regime {order[k], ..., order[n-1]} is accepted when removing order[k] moves
  // the mean of the rest by less than threshold.
  Index k = 0;
  bool marginal = true;
  for (; n - k >= 3; k++)
  {
    const double before = sum / double(n - k);
    const double after = (sum - curve.points[order[k]].frequency) / double(n - k - 1);
    if (std::abs(after - before) < threshold * std::abs(before))
    {
      marginal = false;
      break;
    }
    if (n - k == 3)
    {
      break;
    }
    sum -= curve.points[order[k]].frequency;
  }

  LinearRegime regime;
  regime.marginal = marginal;
  regime.amplitude_ceiling = curve.points[order[k]].amplitude;
  regime.last = n;
  regime.first = 0;
  for (Index i = 0; i < n; i++)
  {
    if (curve.points[i].amplitude > regime.amplitude_ceiling)
    {
      regime.first = i + 1;
    }
  }
  regime.first = std::min(regime.first, n - 3);
  return regime;
}

}  // namespace ssmo
