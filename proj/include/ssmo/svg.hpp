// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_SVG_HPP
#define SSMO_SVG_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace ssmo
{

struct SvgSeries
{
  std::vector<double> x, y;
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  bool markers_only = false;
};

// Static x-y line plot with axes, ticks and a legend.
void write_svg_plot(const std::filesystem::path &path, const std::string &title,
                    const std::string &xlabel, const std::string &ylabel,
                    const std::vector<SvgSeries> &series);

}  // namespace ssmo

#endif  // SSMO_SVG_HPP
