// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_BACKBONE_HPP
#define SSMO_BACKBONE_HPP

#include <span>
#include <vector>
#include "ssmo/core.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

struct BackbonePoint
{
  double frequency;  // rad/s
  double amplitude;  // signal units
  double time;       // instant of the extremum
};

// Instantaneous (frequency, amplitude) pairs, one per semi-period, in time order.
struct BackboneCurve
{
  std::vector<BackbonePoint> points;
  int skipped = 0;  // semi-periods with fewer than 3 samples

  std::vector<double> frequencies() const;
  std::vector<double> amplitudes() const;
};

// Peak finding and fitting. Zero crossings are located by linear interpolation between
// samples of opposite sign; each pair of consecutive crossings bounds a semi-period T_k with
// local frequency pi / T_k; the amplitude is the largest |sample| inside it, refined by a
// parabola through its two neighbours. Signals whose mean exceeds 1% of the peak magnitude
// are centered first. Throws Error("signal not oscillatory") below 3 crossings.
BackboneCurve pff_extract(const Trajectory &signal);
BackboneCurve pff_extract(std::span<const double> values, double t0, double dt);

// Sample variance of the PFF frequencies divided by the squared mean frequency.
double frequency_variance(const BackboneCurve &curve);
double backbone_variance(const Trajectory &signal);
double backbone_variance(std::span<const double> values, double t0, double dt);

// Low-amplitude (late-time) stretch of a backbone curve over which the mean frequency has
// stopped drifting. points [first, last) index the time-ordered curve.
struct LinearRegime
{
  Index first = 0;
  Index last = 0;
  double amplitude_ceiling = 0.0;
  bool marginal = false;  // the removal rule was cut short to keep 3 points
};

// Removes points in order of descending amplitude, tracking the mean frequency of the
// remainder, and stops at the first removal that changes it by less than threshold
// (relative). The surviving points form the regime; at least 3 are always kept.
LinearRegime identify_linear_regime(const BackboneCurve &curve, double threshold = 1e-3);

}  // namespace ssmo

#endif  // SSMO_BACKBONE_HPP
