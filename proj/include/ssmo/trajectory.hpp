// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_TRAJECTORY_HPP
#define SSMO_TRAJECTORY_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>
#include "ssmo/core.hpp"

namespace ssmo
{

// Relative tolerance on the sampling step for a trajectory to count as uniformly sampled.
inline constexpr double kUniformSamplingTol = 1e-9;

//
// Uniformly sampled time series of an observable vector. States are stored one column per
// sample instant (p rows, N columns). Immutable after construction.
//
class Trajectory
{
public:
  Trajectory(Vector times, Matrix states, std::vector<std::string> labels = {});

  const Vector &times() const { return times_; }
  const Matrix &states() const { return states_; }
  const std::vector<std::string> &labels() const { return labels_; }

  // Observable dimension p and sample count N.
  Index dim() const { return states_.rows(); }
  Index size() const { return states_.cols(); }

  // Mean sampling step.
  double dt() const { return (times_(size() - 1) - times_(0)) / double(size() - 1); }

  // Scalar signal formed by a single observable row.
  Trajectory row(Index k) const;

  // Same sample instants with new state values (column count must match).
  Trajectory with_states(Matrix states, std::vector<std::string> labels = {}) const;

  // Bitwise equality of times, states and labels.
  bool operator==(const Trajectory &other) const;

private:
  Vector times_;
  Matrix states_;
  std::vector<std::string> labels_;
};

// Paired snapshot matrices: columns of v2 are the columns of v1 advanced by one sample.
struct SnapshotPair
{
  Matrix v1;
  Matrix v2;
};

// Reads a CSV whose first column is time. A single header row is optional and, when present,
// supplies the observable labels.
Trajectory load_csv(const std::filesystem::path &path);

// Writes a CSV with header "t,<labels>" (labels default to y1..yp) at 17 significant digits.
void save_csv(const Trajectory &traj, const std::filesystem::path &path);

// Delay embedding of a scalar signal: row k of column j is the input at sample j + k * lag.
Trajectory delay_embed(const Trajectory &signal, Index embed_dim, Index lag);

SnapshotPair snapshot_pair(const Trajectory &traj);

// Concatenates the per-trajectory pairs, so no column straddles two trajectories.
SnapshotPair snapshot_pair(std::span<const Trajectory> trajs);

// Samples [begin, end).
Trajectory restrict(const Trajectory &traj, Index begin, Index end);

// Samples whose time lies in [t_begin, t_end].
Trajectory restrict_time(const Trajectory &traj, double t_begin, double t_end);

}  // namespace ssmo

#endif  // SSMO_TRAJECTORY_HPP
