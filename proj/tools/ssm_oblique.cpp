// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>
#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/os.h>
#include <fmt/ranges.h>
#include "ssmo/diagnostics.hpp"
#include "ssmo/parallel.hpp"
#include "ssmo/pipeline.hpp"
#include "ssmo/serialize.hpp"
#include "ssmo/svg.hpp"

namespace fs = std::filesystem;
using namespace ssmo;

namespace
{

struct Options
{
  std::string config;
  std::vector<std::string> overrides;
  std::size_t threads = 0;
  std::string system, projection, out_dir, matrix_csv;
  std::vector<std::string> params;  // name=value pairs for [system.params]
  bool oracle = false;
};

PipelineConfig build_config(const Options &o)
{
  std::vector<std::string> ov = o.overrides;
  if (!o.system.empty())
  {
    ov.push_back("system.name=\"" + o.system + "\"");
  }
  for (const auto &p : o.params)
  {
    ov.push_back("system.params." + p);
  }
  if (!o.projection.empty())
  {
    ov.push_back("fit.projection=\"" + o.projection + "\"");
  }
  if (!o.out_dir.empty())
  {
    ov.push_back("output.dir=\"" + o.out_dir + "\"");
  }
  if (o.oracle)
  {
    ov.push_back("frc.oracle=true");
  }
  return resolve_config(load_config(o.config, ov));
}

void write_text(const fs::path &path, const std::string &text)
{
  std::ofstream out(path);
  out << text;
  if (!out)
  {
    throw Error(fmt::format("failed writing {}", path.string()));
  }
}

std::vector<fs::path> train_paths(const PipelineConfig &cfg)
{
  std::vector<fs::path> out;
  if (!cfg.data.train_csv.empty())
  {
    for (const auto &p : cfg.data.train_csv)
    {
      out.emplace_back(p);
    }
    return out;
  }
  const fs::path dir(cfg.output_dir);
  for (std::size_t k = 0; k < cfg.data.train_ics.size(); k++)
  {
    out.push_back(dir / (k == 0 ? std::string("train.csv") : fmt::format("train_{}.csv", k + 1)));
  }
  return out;
}

fs::path test_path(const PipelineConfig &cfg)
{
  return cfg.data.test_csv.empty() ? fs::path(cfg.output_dir) / "test.csv"
                                   : fs::path(cfg.data.test_csv);
}

Trajectory load_input(const fs::path &path)
{
  if (!fs::exists(path))
  {
    throw Error(fmt::format("input trajectory {} not found (run 'simulate' first or set "
                            "data.train_csv / data.test_csv)",
                            path.string()));
  }
  return load_csv(path);
}

SsmModel load_model(const PipelineConfig &cfg)
{
  return model_from_json(read_json(fs::path(cfg.output_dir) / "model.json"));
}

void cmd_simulate(const PipelineConfig &cfg)
{
  const BenchmarkSystem sys = make_system(cfg);
  const auto train = simulate_training(cfg, sys);
  const auto paths = train_paths(cfg);
  for (std::size_t k = 0; k < train.size(); k++)
  {
    save_csv(train[k], paths[k]);
    fmt::print("wrote {}\n", paths[k].string());
  }
  save_csv(simulate_test(cfg, sys), test_path(cfg));
  fmt::print("wrote {}\n", test_path(cfg).string());
}

void cmd_fit(const PipelineConfig &cfg)
{
  std::vector<Trajectory> obs;
  for (const auto &p : train_paths(cfg))
  {
    obs.push_back(observe(cfg, load_input(p)));
  }
  FitOutput fit = fit_model(cfg, obs);
  const fs::path dir(cfg.output_dir);
  write_json(to_json(fit.model), dir / "model.json");
  nlohmann::json report = fit.report;
  report["config"] = to_toml(cfg);
  write_json(report, dir / "fit_report.json");

  // Backbone of the first training trajectory before and after projection.
  const Trajectory &y = obs[0];
  const BackboneCurve raw = pff_extract(y.row(cfg.fit.regime_row));
  const BackboneCurve proj = pff_extract(project(fit.model.projector, y).row(cfg.fit.regime_row));
  save_backbone_csv(raw, dir / "backbone_raw.csv");
  save_backbone_csv(proj, dir / "backbone_projected.csv");
  write_svg_plot(dir / "backbone.svg", "Backbone of training trajectory 1", "frequency (rad/s)",
                 "amplitude",
                 {{raw.frequencies(), raw.amplitudes(), "raw observable", "#999999"},
                  {proj.frequencies(), proj.amplitudes(), cfg.fit.projection + " projection",
                   "#d62728"}});
  if (fit.optimization)
  {
    const auto &h = fit.optimization->history;
    std::vector<double> it(h.size()), val(h.size());
    for (std::size_t k = 0; k < h.size(); k++)
    {
      it[k] = double(k);
      val[k] = std::log10(std::max(h[k], 1e-300));
    }
    write_svg_plot(dir / "optimization.svg", "B optimization", "iteration",
                   "log10 objective", {{it, val, "objective", "#1f77b4"}});
    fmt::print("B optimization: {} after {} iterations, objective {:.6e} -> {:.6e}\n",
               fit.optimization->status, fit.optimization->iterations,
               fit.optimization->initial_objective, fit.optimization->final_objective);
  }
  if (fit.model.polar)
  {
    fmt::print("polar a = [{:.6g}], b = [{:.6g}]\n", fmt::join(fit.model.polar->a, ", "),
               fmt::join(fit.model.polar->b, ", "));
  }
  for (const auto &w : fit.model.diagnostics)
  {
    fmt::print("warning: {}\n", w);
  }
  fmt::print("wrote {}\n", (dir / "model.json").string());
}

void cmd_predict(const PipelineConfig &cfg)
{
  const SsmModel model = load_model(cfg);
  const Trajectory test = observe(cfg, load_input(test_path(cfg)));
  const PredictOutput pred = predict_test(model, test);
  const fs::path dir(cfg.output_dir);
  save_csv(pred.prediction, dir / "prediction.csv");
  write_json({{"nmte", pred.nmte}, {"warnings", pred.warnings}, {"config", to_toml(cfg)}},
             dir / "predict_report.json");
  std::vector<double> t(test.times().data(), test.times().data() + test.size());
  const Index r = cfg.frc.readout_row;
  std::vector<double> truth(test.size()), predicted(test.size());
  for (Index j = 0; j < test.size(); j++)
  {
    truth[j] = test.states()(r, j);
    predicted[j] = pred.prediction.states()(r, j);
  }
  write_svg_plot(dir / "prediction.svg", "Test trajectory", "time", fmt::format("y{}", r + 1),
                 {{t, truth, "truth", "#000000"},
                  {t, predicted, "prediction", "#d62728", true}});
  for (const auto &w : pred.warnings)
  {
    fmt::print("warning: {}\n", w);
  }
  fmt::print("NMTE = {:.6e}\n", pred.nmte);
}

void cmd_frc(const PipelineConfig &cfg)
{
  const SsmModel model = load_model(cfg);
  const BenchmarkSystem sys = make_system(cfg);
  const FrcOutput out = run_frc(cfg, model, sys, cfg.frc.oracle);
  const fs::path dir(cfg.output_dir);
  save_backbone_csv(out.backbone, dir / "frc_backbone.csv");
  std::vector<SvgSeries> series{
      {out.backbone.frequencies(), out.backbone.amplitudes(), "backbone", "#000000"}};
  const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  nlohmann::json report = nlohmann::json::array();
  for (std::size_t k = 0; k < out.branches.size(); k++)
  {
    const FrcBranch &b = out.branches[k];
    save_frc_csv(b, dir / fmt::format("frc_{}.csv", k + 1));
    const std::string color = colors[k % 5];
    SvgSeries stable{{}, {}, fmt::format("F = {:g}", cfg.frc.forcing[k]), color};
    SvgSeries unstable{{}, {}, "", color, true, true};
    for (const auto &p : b.points)
    {
      (p.stable ? stable : unstable).x.push_back(p.omega);
      (p.stable ? stable : unstable).y.push_back(p.amplitude);
    }
    stable.markers_only = true;
    series.push_back(std::move(stable));
    series.push_back(std::move(unstable));
    const OraclePoint peak = branch_peak(b);
    nlohmann::json entry = {{"forcing", cfg.frc.forcing[k]},
                            {"modal_forcing", out.modal_forcing[k]},
                            {"peak_omega", peak.omega},
                            {"peak_amplitude", peak.amplitude}};
    if (!out.oracle.empty())
    {
      const auto &o = out.oracle[k];
      auto f = fmt::output_file((dir / fmt::format("frc_oracle_{}.csv", k + 1)).string());
      f.print("omega,amplitude\n");
      SvgSeries os{{}, {}, fmt::format("simulation F = {:g}", cfg.frc.forcing[k]), "#000000",
                   false, true};
      for (const auto &pt : o)
      {
        f.print("{:.17g},{:.17g}\n", pt.omega, pt.amplitude);
        os.x.push_back(pt.omega);
        os.y.push_back(pt.amplitude);
      }
      series.push_back(std::move(os));
      const OraclePoint op = oracle_peak(o);
      entry["oracle_peak_omega"] = op.omega;
      entry["oracle_peak_amplitude"] = op.amplitude;
      fmt::print("F = {:g}: analytic peak ({:.5f}, {:.5e}), simulated peak ({:.5f}, {:.5e})\n",
                 cfg.frc.forcing[k], peak.omega, peak.amplitude, op.omega, op.amplitude);
    }
    else
    {
      fmt::print("F = {:g}: analytic peak ({:.5f}, {:.5e})\n", cfg.frc.forcing[k], peak.omega,
                 peak.amplitude);
    }
    report.push_back(entry);
  }
  write_svg_plot(dir / "frc.svg", "Forced response", "forcing frequency (rad/s)",
                 fmt::format("amplitude of y{}", cfg.frc.readout_row + 1), series);

  // Phase plot, offset applied for display only.
  std::vector<SvgSeries> phases;
  for (std::size_t k = 0; k < out.branches.size(); k++)
  {
    SvgSeries s{{}, {}, fmt::format("F = {:g}", cfg.frc.forcing[k]), colors[k % 5], false, true};
    for (const auto &p : out.branches[k].points)
    {
      s.x.push_back(p.omega);
      s.y.push_back(p.phase + cfg.frc.phase_offset);
    }
    phases.push_back(std::move(s));
  }
  write_svg_plot(dir / "frc_phase.svg", "Forced response phase", "forcing frequency (rad/s)",
                 "phase (rad)", phases);
  write_json({{"levels", report}, {"config", to_toml(cfg)}}, dir / "frc_report.json");
}

void cmd_doctor(const PipelineConfig &cfg, const std::string &matrix_csv)
{
  Matrix A;
  if (!matrix_csv.empty())
  {
    // Rows of the CSV are matrix rows; no time column.
    std::ifstream in(matrix_csv);
    if (!in)
    {
      throw Error(fmt::format("cannot open {}", matrix_csv));
    }
    std::vector<std::vector<double>> rows;
    for (std::string line; std::getline(in, line);)
    {
      if (line.empty())
      {
        continue;
      }
      std::vector<double> row;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');)
      {
        row.push_back(std::stod(cell));
      }
      rows.push_back(row);
    }
    A.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); i++)
    {
      if (rows[i].size() != rows.size())
      {
        throw Error("doctor matrix must be square");
      }
      for (std::size_t j = 0; j < rows.size(); j++)
      {
        A(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
      }
    }
  }
  else
  {
    A = make_system(cfg).first_order_matrix();
  }
  const SpectrumReport rep = check_nonresonance(A);
  nlohmann::json j = to_json(rep);
  write_json(j, fs::path(cfg.output_dir) / "doctor.json");
  fmt::print("{}\n", j.dump(2));
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Reduced-order models on slow spectral submanifolds via oblique projection"};
  app.require_subcommand(1, 1);
  Options o;
  const std::vector<std::string> names{"simulate", "fit", "predict", "frc", "doctor"};
  for (const auto &name : names)
  {
    auto *sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "TOML configuration file")->required();
    sub->add_option("--set", o.overrides, "Override as section.key=value (repeatable)");
    sub->add_option("--threads", o.threads, "Worker threads (default: SSM_OBLIQUE_THREADS or "
                                            "all cores)");
    sub->add_option("--system", o.system, "Benchmark name");
    sub->add_option("--param", o.params, "Benchmark parameter as name=value (repeatable)");
    sub->add_option("--alpha", [&o](const CLI::results_t &r)
                    {
                      o.params.push_back("alpha=" + r[0]);
                      return true;
                    }, "Cubic coefficient override");
    sub->add_option("--projection", o.projection, "oblique or normal");
    sub->add_option("--out", o.out_dir, "Output directory");
    if (name == "frc")
    {
      sub->add_flag("--oracle", o.oracle, "Overlay brute-force forced simulations");
    }
    if (name == "doctor")
    {
      sub->add_option("--matrix", o.matrix_csv, "Square matrix CSV instead of the system");
    }
  }
  CLI11_PARSE(app, argc, argv);
  if (o.threads > 0)
  {
    set_thread_count(o.threads);
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  fs::path out_dir = ".";
  try
  {
    const PipelineConfig cfg = build_config(o);
    out_dir = cfg.output_dir;
    fs::create_directories(out_dir);
    fs::remove(out_dir / (cmd + ".failed"));
    write_text(out_dir / "resolved_config.toml", to_toml(cfg));
    if (cmd == "simulate")
    {
      cmd_simulate(cfg);
    }
    else if (cmd == "fit")
    {
      cmd_fit(cfg);
    }
    else if (cmd == "predict")
    {
      cmd_predict(cfg);
    }
    else if (cmd == "frc")
    {
      cmd_frc(cfg);
    }
    else
    {
      cmd_doctor(cfg, o.matrix_csv);
    }
  }
  catch (const std::exception &e)
  {
    fmt::print(stderr, "ssm-oblique {}: error: {}\n", cmd, e.what());
    std::error_code ec;
    if (fs::is_directory(out_dir, ec))
    {
      std::ofstream(out_dir / (cmd + ".failed")) << e.what() << '\n';
    }
    return 1;
  }
  return 0;
}
