// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_PIPELINE_HPP
#define SSMO_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>
#include <json.hpp>
#include "ssmo/backbone.hpp"
#include "ssmo/core.hpp"
#include "ssmo/frc.hpp"
#include "ssmo/ssm.hpp"
#include "ssmo/systems.hpp"
#include "ssmo/trajectory.hpp"

namespace ssmo
{

struct SystemConfig
{
  // shaw-pierre | cart | linear-4d | linear-2d | csv
  std::string name = "shaw-pierre";
  // Benchmark parameter overrides by name (see benchmark_parameters).
  std::map<std::string, double> params;
};

struct DataConfig
{
  std::vector<std::vector<double>> train_ics;  // empty: benchmark defaults
  std::vector<double> test_ic;                 // empty: benchmark default
  double t_end = 0.0;                          // 0: benchmark default
  double dt = 0.0;                             // 0: benchmark default
  std::vector<std::string> train_csv;          // system "csv" only
  std::string test_csv;
};

struct ObservableConfig
{
  std::string kind = "full";  // full | delay
  Index state = 0;            // scalar state read out for delay embedding
  Index embed_dim = 6;
  Index lag = 1;
};

struct FitConfig
{
  Index d = 2;
  double regime_threshold = 1e-3;
  Index regime_row = 0;                // observable row used for regime identification
  std::string projection = "oblique";  // oblique | normal
  std::string objective = "reduced";   // reduced (Q_tilde readouts) | row
  Index objective_row = 0;
  int parametrization_order = 5;
  int dynamics_order = 5;
  double ridge = 0.0;
  double t_start = 0.0;  // training samples before t_start are excluded from the SSM fits
  // Fix the linear part of the reduced dynamics to the map identified on the projected
  // linear-regime data instead of regressing it.
  bool anchor_linear = false;
  int max_iterations = 500;
};

struct FrcConfig
{
  std::vector<double> forcing;     // physical amplitudes
  std::vector<double> force_dofs;  // generalized force direction on the dofs
  double omega_min = 0.0, omega_max = 0.0;  // 0: around the linear frequency
  int n_omega = 400;
  Index readout_row = 0;  // observable row for amplitudes
  int rho_points = 2000;
  double rho_max = 0.0;
  bool oracle = false;
  int oracle_points = 21;
  double oracle_halfwidth = 0.05;  // sweep window around each analytic peak, relative
  int settle_periods = 60;
  int measure_periods = 5;
  double phase_offset = 0.0;  // added to plotted phases only
};

struct PipelineConfig
{
  SystemConfig system;
  DataConfig data;
  ObservableConfig observable;
  FitConfig fit;
  FrcConfig frc;
  std::string output_dir = "out";
};

// Names accepted by [system].name.
std::vector<std::string> benchmark_names();

// Parameter names and default values of a benchmark.
std::map<std::string, double> benchmark_parameters(const std::string &name);

// A TOML document with sections [system] (+ [system.params]), [data], [observable], [fit],
// [frc], [output]. Unknown sections or keys are rejected. Overrides are "section.key=value"
// strings applied before validation; values are parsed as TOML, falling back to a string.
PipelineConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::string> &overrides = {});
PipelineConfig parse_config(const std::string &toml_text,
                            const std::vector<std::string> &overrides = {});

// Fills benchmark defaults (initial conditions, horizon, step, FRC window) and validates.
PipelineConfig resolve_config(PipelineConfig cfg);

// TOML text of a resolved configuration; doubles in shortest round-trip form, so parsing it
// back gives an identical configuration.
std::string to_toml(const PipelineConfig &cfg);

struct BenchmarkSystem
{
  std::string name;
  std::optional<MechanicalSystem> mechanical;
  std::optional<LinearSystem> linear;

  Index dim() const;
  const Matrix &first_order_matrix() const;
  VectorField vector_field() const;
};

BenchmarkSystem make_system(const PipelineConfig &cfg);

// Decay simulations from the configured initial conditions (full first-order states).
std::vector<Trajectory> simulate_training(const PipelineConfig &cfg, const BenchmarkSystem &sys);
Trajectory simulate_test(const PipelineConfig &cfg, const BenchmarkSystem &sys);

// Observable trajectory of a state trajectory (identity or delay embedding).
Trajectory observe(const PipelineConfig &cfg, const Trajectory &state);

// Linearized state-to-observable map: identity, or rows C exp(A k lag dt) for delays.
Matrix observable_map(const PipelineConfig &cfg, const BenchmarkSystem &sys);

// First-order state index whose steady amplitude matches frc.readout_row.
Index readout_state(const PipelineConfig &cfg);

struct RegimeInfo
{
  LinearRegime regime;
  double t_start = 0.0;
  Index points = 0;
};

struct FitOutput
{
  SsmModel model;
  std::vector<RegimeInfo> regimes;
  std::optional<OptimizeResult> optimization;
  PolynomialFit parametrization_fit;
  PolynomialFit dynamics_fit;
  nlohmann::json report;
};

// Linear regime -> DMD -> projector -> SSM fits -> polar form.
FitOutput fit_model(const PipelineConfig &cfg, std::span<const Trajectory> train_obs);

struct PredictOutput
{
  Trajectory prediction;
  double nmte = 0.0;
  std::vector<std::string> warnings;
};

PredictOutput predict_test(const SsmModel &model, const Trajectory &test_obs);

struct OraclePoint
{
  double omega = 0.0;
  double amplitude = 0.0;
};

struct FrcOutput
{
  std::vector<double> modal_forcing;
  std::vector<FrcBranch> branches;
  BackboneCurve backbone;
  std::vector<std::vector<OraclePoint>> oracle;  // per forcing level, when requested
};

// Peak (omega, amplitude) of an analytic branch; amplitude 0 for an empty branch.
OraclePoint branch_peak(const FrcBranch &branch);
OraclePoint oracle_peak(const std::vector<OraclePoint> &sweep);

// Brute-force steady amplitudes at n frequencies in [omega_lo, omega_hi], swept upward with
// each run started from the previous steady state.
std::vector<OraclePoint> oracle_sweep(const PipelineConfig &cfg, const BenchmarkSystem &sys,
                                      double amplitude, double omega_lo, double omega_hi,
                                      int n);

FrcOutput run_frc(const PipelineConfig &cfg, const SsmModel &model, const BenchmarkSystem &sys,
                  bool with_oracle);

}  // namespace ssmo

#endif  // SSMO_PIPELINE_HPP
