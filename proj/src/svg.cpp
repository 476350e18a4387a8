// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>
#include <fmt/format.h>
#include <fmt/os.h>
#include "ssmo/core.hpp"

namespace ssmo
{

namespace
{

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;

std::string escape(const std::string &s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Round tick values (1, 2 or 5 times a power of ten) covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi)
{
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (double m : {1.0, 2.0, 5.0})
  {
    if (m * mag >= raw)
    {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
  {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

}  // namespace

void write_svg_plot(const std::filesystem::path &path, const std::string &title,
                    const std::string &xlabel, const std::string &ylabel,
                    const std::vector<SvgSeries> &series)
{
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto &s : series)
  {
    if (s.x.size() != s.y.size())
    {
      throw Error("plot series x and y differ in length");
    }
    for (std::size_t k = 0; k < s.x.size(); k++)
    {
      if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
      {
        xmin = std::min(xmin, s.x[k]);
        xmax = std::max(xmax, s.x[k]);
        ymin = std::min(ymin, s.y[k]);
        ymax = std::max(ymax, s.y[k]);
      }
    }
  }
  if (!(xmax >= xmin))
  {
    xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  }
  if (xmax == xmin)
  {
    xmax = xmin + 1.0;
  }
  if (ymax == ymin)
  {
    ymax = ymin + 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto Y = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  auto out = fmt::output_file(path.string());
  out.print("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
            "font-family=\"sans-serif\" font-size=\"12\">\n",
            kWidth, kHeight);
  out.print("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  out.print("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
            kLeft + pw / 2, escape(title));
  out.print("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
            "stroke=\"black\"/>\n",
            kLeft, kTop, pw, ph);
  for (double xv : nice_ticks(xmin, xmax))
  {
    out.print("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" "
              "stroke=\"black\"/>\n",
              X(xv), kTop + ph, kTop + ph + 5);
    out.print("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.6g}</text>\n", X(xv),
              kTop + ph + 18, xv);
  }
  for (double yv : nice_ticks(ymin, ymax))
  {
    out.print("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
              "stroke=\"black\"/>\n",
              kLeft - 5, Y(yv), kLeft);
    out.print("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:.6g}</text>\n", kLeft - 8,
              Y(yv) + 4, yv);
  }
  out.print("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
            kHeight - 15, escape(xlabel));
  out.print("<text x=\"18\" y=\"{0:.2f}\" text-anchor=\"middle\" "
            "transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
            kTop + ph / 2, escape(ylabel));

  int legend = 0;
  for (const auto &s : series)
  {
    if (s.markers_only)
    {
      for (std::size_t k = 0; k < s.x.size(); k++)
      {
        if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
        {
          out.print("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"none\" "
                    "stroke=\"{}\"/>\n",
                    X(s.x[k]), Y(s.y[k]), s.color);
        }
      }
    }
    else if (!s.x.empty())
    {
      out.print("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{} points=\"",
                s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "");
      for (std::size_t k = 0; k < s.x.size(); k++)
      {
        if (std::isfinite(s.x[k]) && std::isfinite(s.y[k]))
        {
          out.print("{:.2f},{:.2f} ", X(s.x[k]), Y(s.y[k]));
        }
      }
      out.print("\"/>\n");
    }
    if (!s.label.empty())
    {
      const double ly = kTop + 10 + 18 * legend++;
      const double lx = kLeft + pw + 12;
      if (s.markers_only)
      {
        out.print("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"none\" stroke=\"{}\"/>\n",
                  lx + 10, ly, s.color);
      }
      else
      {
        out.print("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                  "stroke-width=\"1.5\"{}/>\n",
                  lx, ly, lx + 20, ly, s.color, s.dashed ? " stroke-dasharray=\"6,4\"" : "");
      }
      out.print("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", lx + 26, ly + 4, escape(s.label));
    }
  }
  out.print("</svg>\n");
}

}  // namespace ssmo
