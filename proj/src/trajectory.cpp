// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/trajectory.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <fmt/format.h>

namespace ssmo
{

namespace
{

void check_uniform(const Vector &t)
{
  if (t.size() < 2)
  {
    return;
  }
  const double step = t(1) - t(0);
  if (!(step > 0.0))
  {
    throw Error("times must be strictly increasing (index 1)");
  }
  for (Index j = 2; j < t.size(); j++)
  {
    const double sj = t(j) - t(j - 1);
    if (!(sj > 0.0))
    {
      throw Error(fmt::format("times must be strictly increasing (index {})", j));
    }
    if (std::abs(sj - step) > kUniformSamplingTol * step)
    {
      throw Error(fmt::format("non-uniform sampling at index {}", j));
    }
  }
}

std::vector<std::string> split_fields(const std::string &line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ','))
  {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',')
  {
    out.emplace_back();
  }
  return out;
}

bool parse_double(const std::string &s, double &value)
{
  const char *begin = s.c_str();
  while (*begin == ' ' || *begin == '\t')
  {
    begin++;
  }
  if (*begin == '\0')
  {
    return false;
  }
  char *end = nullptr;
  errno = 0;
  value = std::strtod(begin, &end);
  while (*end == ' ' || *end == '\t' || *end == '\r')
  {
    end++;
  }
  return *end == '\0' && errno != ERANGE;
}

std::string trim(std::string s)
{
  const auto first = s.find_first_not_of(" \t\r");
  const auto last = s.find_last_not_of(" \t\r");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

}  // namespace

Trajectory::Trajectory(Vector times, Matrix states, std::vector<std::string> labels)
  : times_(std::move(times)), states_(std::move(states)), labels_(std::move(labels))
{
  if (states_.rows() < 1)
  {
    throw Error("trajectory needs at least one observable row");
  }
  if (times_.size() != states_.cols())
  {
    throw Error(fmt::format("trajectory has {} times but {} state columns", times_.size(),
                            states_.cols()));
  }
  if (times_.size() < 2)
  {
    throw Error("trajectory needs at least two samples");
  }
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != states_.rows())
  {
    throw Error("label count does not match observable dimension");
  }
  check_uniform(times_);
}

Trajectory Trajectory::row(Index k) const
{
  if (k < 0 || k >= dim())
  {
    throw Error(fmt::format("observable row {} out of range (p = {})", k, dim()));
  }
  std::vector<std::string> lbl;
  if (!labels_.empty())
  {
    lbl.push_back(labels_[k]);
  }
  return Trajectory(times_, states_.row(k), std::move(lbl));
}

Trajectory Trajectory::with_states(Matrix states, std::vector<std::string> labels) const
{
  return Trajectory(times_, std::move(states), std::move(labels));
}

bool Trajectory::operator==(const Trajectory &other) const
{
  return times_.size() == other.times_.size() && states_.rows() == other.states_.rows() &&
         states_.cols() == other.states_.cols() && times_ == other.times_ &&
         states_ == other.states_ && labels_ == other.labels_;
}

Trajectory load_csv(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(fmt::format("cannot open '{}'", path.string()));
  }
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0, width = 0;
  while (std::getline(in, line))
  {
    line_no++;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (trim(line).empty())
    {
      continue;
    }
    const auto fields = split_fields(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size() && numeric; k++)
    {
      numeric = parse_double(fields[k], values[k]);
    }
    if (!numeric)
    {
      if (rows.empty() && labels.empty())
      {
        for (std::size_t k = 1; k < fields.size(); k++)
        {
          labels.push_back(trim(fields[k]));
        }
        width = fields.size();
        continue;
      }
      throw Error(fmt::format("parse error in '{}' line {}: non-numeric field", path.string(),
                              line_no));
    }
    if (width == 0)
    {
      width = values.size();
    }
    if (values.size() != width)
    {
      throw Error(fmt::format("parse error in '{}' line {}: expected {} fields, got {}",
                              path.string(), line_no, width, values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (width < 2)
  {
    throw Error(fmt::format("parse error in '{}': need a time column and at least one "
                            "observable column",
                            path.string()));
  }
  const Index n = static_cast<Index>(rows.size()), p = static_cast<Index>(width) - 1;
  Vector t(n);
  Matrix y(p, n);
  for (Index j = 0; j < n; j++)
  {
    t(j) = rows[j][0];
    for (Index k = 0; k < p; k++)
    {
      y(k, j) = rows[j][k + 1];
    }
  }
  return Trajectory(std::move(t), std::move(y), std::move(labels));
}

void save_csv(const Trajectory &traj, const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw Error(fmt::format("cannot write '{}'", path.string()));
  }
  std::string buf = "t";
  for (Index k = 0; k < traj.dim(); k++)
  {
    buf += ',';
    buf += traj.labels().empty() ? fmt::format("y{}", k + 1) : traj.labels()[k];
  }
  buf += '\n';
  for (Index j = 0; j < traj.size(); j++)
  {
    buf += fmt::format("{:.17g}", traj.times()(j));
    for (Index k = 0; k < traj.dim(); k++)
    {
      buf += fmt::format(",{:.17g}", traj.states()(k, j));
    }
    buf += '\n';
  }
  out << buf;
  if (!out)
  {
    throw Error(fmt::format("write failure on '{}'", path.string()));
  }
}

Trajectory delay_embed(const Trajectory &signal, Index embed_dim, Index lag)
{
  if (signal.dim() != 1)
  {
    throw Error("delay embedding needs a scalar signal (p = 1)");
  }
  if (embed_dim < 1 || lag < 1)
  {
    throw Error("embedding dimension and lag must be positive");
  }
  const Index span = (embed_dim - 1) * lag;
  if (signal.size() <= span)
  {
    throw Error(fmt::format("signal too short for embedding: N = {} needs more than {}",
                            signal.size(), span));
  }
  const Index n = signal.size() - span;
  Matrix eta(embed_dim, n);
  for (Index k = 0; k < embed_dim; k++)
  {
    eta.row(k) = signal.states().row(0).segment(k * lag, n);
  }
  std::vector<std::string> labels;
  const std::string base = signal.labels().empty() ? "v" : signal.labels()[0];
  for (Index k = 0; k < embed_dim; k++)
  {
    labels.push_back(k == 0 ? base : fmt::format("{}+{}", base, k * lag));
  }
  return Trajectory(signal.times().head(n), std::move(eta), std::move(labels));
}

SnapshotPair snapshot_pair(const Trajectory &traj)
{
  if (traj.size() < 3)
  {
    throw Error("snapshot pair needs at least 3 samples");
  }
  const Index n = traj.size() - 1;
  return {traj.states().leftCols(n), traj.states().rightCols(n)};
}

SnapshotPair snapshot_pair(std::span<const Trajectory> trajs)
{
  if (trajs.empty())
  {
    throw Error("snapshot pair needs at least one trajectory");
  }
  Index cols = 0;
  for (const auto &t : trajs)
  {
    if (t.dim() != trajs.front().dim())
    {
      throw Error("trajectories have different observable dimensions");
    }
    if (t.size() < 3)
    {
      throw Error("snapshot pair needs at least 3 samples per trajectory");
    }
    cols += t.size() - 1;
  }
  SnapshotPair out{Matrix(trajs.front().dim(), cols), Matrix(trajs.front().dim(), cols)};
  Index offset = 0;
  for (const auto &t : trajs)
  {
    const auto pair = snapshot_pair(t);
    out.v1.middleCols(offset, pair.v1.cols()) = pair.v1;
    out.v2.middleCols(offset, pair.v2.cols()) = pair.v2;
    offset += pair.v1.cols();
  }
  return out;
}

Trajectory restrict(const Trajectory &traj, Index begin, Index end)
{
  if (begin < 0 || end > traj.size() || begin >= end)
  {
    throw Error(fmt::format("empty or invalid index range [{}, {}) for N = {}", begin, end,
                            traj.size()));
  }
  return Trajectory(traj.times().segment(begin, end - begin),
                    traj.states().middleCols(begin, end - begin), traj.labels());
}

Trajectory restrict_time(const Trajectory &traj, double t_begin, double t_end)
{
  Index begin = 0, end = traj.size();
  while (begin < traj.size() && traj.times()(begin) < t_begin)
  {
    begin++;
  }
  while (end > begin && traj.times()(end - 1) > t_end)
  {
    end--;
  }
  return restrict(traj, begin, end);
}

}  // namespace ssmo
