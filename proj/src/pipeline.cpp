// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <toml.hpp>
#include <unsupported/Eigen/MatrixFunctions>
#include "ssmo/linalg.hpp"
#include "ssmo/parallel.hpp"
#include "ssmo/serialize.hpp"

namespace ssmo
{

namespace
{

//
// Typed access to one TOML table with unknown-key rejection.
//
class Section
{
public:
  Section(const toml::table *table, std::string name) : table_(table), name_(std::move(name)) {}

  const toml::node *find(const std::string &key)
  {
    seen_.insert(key);
    return table_ ? table_->get(key) : nullptr;
  }

  void get(const std::string &key, double &out)
  {
    if (const auto *n = find(key))
    {
      if (auto v = n->value<double>())
      {
        out = *v;
        return;
      }
      fail(key, "a number");
    }
  }

  void get(const std::string &key, int &out)
  {
    if (const auto *n = find(key))
    {
      if (n->is_integer())
      {
        out = static_cast<int>(*n->value<int64_t>());
        return;
      }
      fail(key, "an integer");
    }
  }

  void get(const std::string &key, Index &out)
  {
    if (const auto *n = find(key))
    {
      if (n->is_integer())
      {
        out = static_cast<Index>(*n->value<int64_t>());
        return;
      }
      fail(key, "an integer");
    }
  }

  void get(const std::string &key, bool &out)
  {
    if (const auto *n = find(key))
    {
      if (auto v = n->value<bool>())
      {
        out = *v;
        return;
      }
      fail(key, "a boolean");
    }
  }

  void get(const std::string &key, std::string &out)
  {
    if (const auto *n = find(key))
    {
      if (auto v = n->value<std::string>())
      {
        out = *v;
        return;
      }
      fail(key, "a string");
    }
  }

  void get(const std::string &key, std::vector<double> &out)
  {
    if (const auto *n = find(key))
    {
      out = numbers(n, key);
    }
  }

  void get(const std::string &key, std::vector<std::string> &out)
  {
    if (const auto *n = find(key))
    {
      const auto *arr = n->as_array();
      if (!arr)
      {
        fail(key, "an array of strings");
      }
      out.clear();
      for (const auto &e : *arr)
      {
        auto v = e.value<std::string>();
        if (!v)
        {
          fail(key, "an array of strings");
        }
        out.push_back(*v);
      }
    }
  }

  void get(const std::string &key, std::vector<std::vector<double>> &out)
  {
    if (const auto *n = find(key))
    {
      const auto *arr = n->as_array();
      if (!arr)
      {
        fail(key, "an array of number arrays");
      }
      out.clear();
      for (const auto &e : *arr)
      {
        out.push_back(numbers(&e, key));
      }
    }
  }

  // Keys that are sub-tables handled elsewhere.
  void allow(const std::string &key) { seen_.insert(key); }

  void finish() const
  {
    if (!table_)
    {
      return;
    }
    for (const auto &[k, v] : *table_)
    {
      const std::string key(k.str());
      if (!seen_.count(key))
      {
        throw Error(fmt::format("unknown configuration key '{}{}'",
                                name_.empty() ? "" : name_ + ".", key));
      }
    }
  }

private:
  [[noreturn]] void fail(const std::string &key, const char *what) const
  {
    throw Error(fmt::format("configuration key '{}.{}' must be {}", name_, key, what));
  }

  std::vector<double> numbers(const toml::node *n, const std::string &key) const
  {
    const auto *arr = n->as_array();
    if (!arr)
    {
      fail(key, "an array of numbers");
    }
    std::vector<double> out;
    for (const auto &e : *arr)
    {
      auto v = e.value<double>();
      if (!v)
      {
        fail(key, "an array of numbers");
      }
      out.push_back(*v);
    }
    return out;
  }

  const toml::table *table_;
  std::string name_;
  std::set<std::string> seen_;
};

const toml::table *subtable(const toml::table &root, const std::string &key)
{
  const auto *n = root.get(key);
  if (!n)
  {
    return nullptr;
  }
  const auto *t = n->as_table();
  if (!t)
  {
    throw Error(fmt::format("configuration entry '{}' must be a table", key));
  }
  return t;
}

void apply_override(toml::table &root, const std::string &text)
{
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
  {
    throw Error(fmt::format("override '{}' is not of the form section.key=value", text));
  }
  std::string path = text.substr(0, eq), value = text.substr(eq + 1);
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');)
  {
    if (part.empty())
    {
      throw Error(fmt::format("override '{}' has an empty key component", text));
    }
    parts.push_back(part);
  }
  toml::table *t = &root;
  for (std::size_t k = 0; k + 1 < parts.size(); k++)
  {
    auto *n = t->get(parts[k]);
    if (!n)
    {
      t->insert(parts[k], toml::table{});
      n = t->get(parts[k]);
    }
    t = n->as_table();
    if (!t)
    {
      throw Error(fmt::format("override '{}': '{}' is not a table", text, parts[k]));
    }
  }
  try
  {
    toml::table parsed = toml::parse("v = " + value);
    t->insert_or_assign(parts.back(), *parsed.get("v"));
  }
  catch (const toml::parse_error &)
  {
    t->insert_or_assign(parts.back(), value);
  }
}

PipelineConfig config_from_table(const toml::table &root)
{
  PipelineConfig cfg;
  Section top(&root, "");
  for (const char *s : {"system", "data", "observable", "fit", "frc", "output"})
  {
    top.allow(s);
  }
  top.finish();

  Section sys(subtable(root, "system"), "system");
  sys.get("name", cfg.system.name);
  sys.allow("params");
  sys.finish();
  if (const auto *st = subtable(root, "system"))
  {
    if (const auto *pt = subtable(*st, "params"))
    {
      for (const auto &[k, v] : *pt)
      {
        auto val = v.value<double>();
        if (!val)
        {
          throw Error(fmt::format("system.params.{} must be a number", k.str()));
        }
        cfg.system.params[std::string(k.str())] = *val;
      }
    }
  }

  Section data(subtable(root, "data"), "data");
  data.get("train_ics", cfg.data.train_ics);
  data.get("test_ic", cfg.data.test_ic);
  data.get("t_end", cfg.data.t_end);
  data.get("dt", cfg.data.dt);
  data.get("train_csv", cfg.data.train_csv);
  data.get("test_csv", cfg.data.test_csv);
  data.finish();

  Section obs(subtable(root, "observable"), "observable");
  obs.get("kind", cfg.observable.kind);
  obs.get("state", cfg.observable.state);
  obs.get("embed_dim", cfg.observable.embed_dim);
  obs.get("lag", cfg.observable.lag);
  obs.finish();

  Section fit(subtable(root, "fit"), "fit");
  fit.get("d", cfg.fit.d);
  fit.get("regime_threshold", cfg.fit.regime_threshold);
  fit.get("regime_row", cfg.fit.regime_row);
  fit.get("projection", cfg.fit.projection);
  fit.get("objective", cfg.fit.objective);
  fit.get("objective_row", cfg.fit.objective_row);
  fit.get("parametrization_order", cfg.fit.parametrization_order);
  fit.get("dynamics_order", cfg.fit.dynamics_order);
  fit.get("ridge", cfg.fit.ridge);
  fit.get("t_start", cfg.fit.t_start);
  fit.get("anchor_linear", cfg.fit.anchor_linear);
  fit.get("max_iterations", cfg.fit.max_iterations);
  fit.finish();

  Section frc(subtable(root, "frc"), "frc");
  frc.get("forcing", cfg.frc.forcing);
  frc.get("force_dofs", cfg.frc.force_dofs);
  frc.get("omega_min", cfg.frc.omega_min);
  frc.get("omega_max", cfg.frc.omega_max);
  frc.get("n_omega", cfg.frc.n_omega);
  frc.get("readout_row", cfg.frc.readout_row);
  frc.get("rho_points", cfg.frc.rho_points);
  frc.get("rho_max", cfg.frc.rho_max);
  frc.get("oracle", cfg.frc.oracle);
  frc.get("oracle_points", cfg.frc.oracle_points);
  frc.get("oracle_halfwidth", cfg.frc.oracle_halfwidth);
  frc.get("settle_periods", cfg.frc.settle_periods);
  frc.get("measure_periods", cfg.frc.measure_periods);
  frc.get("phase_offset", cfg.frc.phase_offset);
  frc.finish();

  Section out(subtable(root, "output"), "output");
  out.get("dir", cfg.output_dir);
  out.finish();
  return cfg;
}

std::string fmt_double(double v) { return fmt::format("{}", v); }

std::string fmt_list(const std::vector<double> &v)
{
  std::vector<std::string> parts;
  for (double x : v)
  {
    parts.push_back(fmt_double(x));
  }
  return fmt::format("[{}]", fmt::join(parts, ", "));
}

std::string quoted(const std::string &s)
{
  std::string out = "\"";
  for (char c : s)
  {
    if (c == '"' || c == '\\')
    {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

Vector to_vector(const std::vector<double> &v)
{
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

bool is_mechanical(const std::string &name) { return name == "shaw-pierre" || name == "cart"; }

// Runs one pipeline stage, prefixing errors with its name.
template <class F>
auto stage(const char *name, F &&f)
{
  try
  {
    return f();
  }
  catch (const Error &e)
  {
    throw Error(fmt::format("stage '{}': {}", name, e.what()));
  }
}

// Continuous-time linear map of the reduced coordinates on the linear-regime data:
// least-squares one-step map G, then log(G) / dt through its eigendecomposition.
Matrix reduced_linear_map(std::span<const Trajectory> xi_lin, double dt)
{
  const SnapshotPair pair = snapshot_pair(xi_lin);
  const Matrix G = pair.v1.transpose()
                       .colPivHouseholderQr()
                       .solve(pair.v2.transpose())
                       .transpose();
  const EigenPairs eig = eigen_decompose(G);
  CVector logs(eig.values.size());
  for (Index k = 0; k < logs.size(); k++)
  {
    if (std::abs(eig.values(k)) == 0.0)
    {
      throw Error("singular one-step map on the linear-regime data");
    }
    logs(k) = std::log(eig.values(k)) / dt;
  }
  const CMatrix L = eig.vectors * logs.asDiagonal() * eig.vectors.inverse();
  return L.real();
}

}  // namespace

std::vector<std::string> benchmark_names()
{
  return {"shaw-pierre", "cart", "linear-4d", "linear-2d", "csv"};
}

std::map<std::string, double> benchmark_parameters(const std::string &name)
{
  if (name == "shaw-pierre")
  {
    const ShawPierreParams p;
    return {{"m1", p.m1}, {"m2", p.m2}, {"c1", p.c1},      {"c2", p.c2},
            {"k1", p.k1}, {"k2", p.k2}, {"alpha", p.alpha}};
  }
  if (name == "cart")
  {
    const CartParams p;
    return {{"m1", p.m1}, {"m2", p.m2}, {"mf", p.mf}, {"c1", p.c1},      {"c2", p.c2},
            {"cf", p.cf}, {"k1", p.k1}, {"k2", p.k2}, {"kf", p.kf}, {"alpha", p.alpha}};
  }
  if (name == "linear-4d")
  {
    return {{"alpha", 0.3},      {"beta", 0.63},      {"omega", 3.0},       {"nu", 8.0},
            {"coupling_a", 1.0}, {"coupling_b", 1.0}, {"coupling_c", 1.0}, {"coupling_d", 1.0}};
  }
  if (name == "linear-2d")
  {
    return {{"alpha", 1.0}, {"beta", 2.0}, {"delta", 1.0}};
  }
  if (name == "csv")
  {
    return {};
  }
  throw Error(fmt::format("unknown system '{}'; valid names: {}", name,
                          fmt::join(benchmark_names(), ", ")));
}

PipelineConfig parse_config(const std::string &text, const std::vector<std::string> &overrides)
{
  toml::table root;
  try
  {
    root = toml::parse(text);
  }
  catch (const toml::parse_error &e)
  {
    throw Error(fmt::format("configuration parse error: {}", e.description()));
  }
  for (const auto &o : overrides)
  {
    apply_override(root, o);
  }
  return config_from_table(root);
}

PipelineConfig load_config(const std::filesystem::path &path,
                           const std::vector<std::string> &overrides)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(fmt::format("cannot open configuration {}", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

PipelineConfig resolve_config(PipelineConfig cfg)
{
  auto defaults = benchmark_parameters(cfg.system.name);
  for (const auto &[k, v] : cfg.system.params)
  {
    if (!defaults.count(k))
    {
      throw Error(fmt::format("system '{}' has no parameter '{}'", cfg.system.name, k));
    }
  }
  for (const auto &[k, v] : defaults)
  {
    cfg.system.params.try_emplace(k, v);
  }

  const std::string &name = cfg.system.name;
  if (name == "csv")
  {
    if (cfg.data.train_csv.empty())
    {
      throw Error("system 'csv' needs data.train_csv");
    }
  }
  else
  {
    std::vector<std::vector<double>> ics;
    std::vector<double> test;
    double t_end = 0.0, dt = 0.0;
    if (name == "shaw-pierre")
    {
      ics = {{0.5, 0.1, 0.0, 0.0}};
      test = {0.35, -0.05, 0.0, 0.1};
      t_end = 600.0;
      dt = 0.05;
    }
    else if (name == "cart")
    {
      ics = {{0.4, 0.1, 0.05, 0.0, 0.0, 0.0}, {-0.3, 0.0, 0.0, 0.2, -0.1, 0.1}};
      test = {0.35, -0.05, 0.03, 0.0, 0.1, 0.0};
      t_end = 600.0;
      dt = 0.1;
    }
    else if (name == "linear-4d")
    {
      ics = {{1.0, 1.0, 0.8, 0.8}};
      test = {0.8, -0.6, 0.5, 0.4};
      t_end = 40.0;
      dt = 0.01;
    }
    else
    {
      ics = {{1.0, 1.0}};
      test = {0.5, -1.0};
      t_end = 10.0;
      dt = 0.01;
    }
    if (cfg.data.train_ics.empty())
    {
      cfg.data.train_ics = ics;
    }
    if (cfg.data.test_ic.empty())
    {
      cfg.data.test_ic = test;
    }
    if (cfg.data.t_end == 0.0)
    {
      cfg.data.t_end = t_end;
    }
    if (cfg.data.dt == 0.0)
    {
      cfg.data.dt = dt;
    }
    const std::size_t n = name == "cart" ? 6 : (name == "linear-2d" ? 2 : 4);
    for (const auto &ic : cfg.data.train_ics)
    {
      if (ic.size() != n)
      {
        throw Error(fmt::format("initial conditions for '{}' need {} entries", name, n));
      }
    }
    if (cfg.data.test_ic.size() != n)
    {
      throw Error(fmt::format("test initial condition for '{}' needs {} entries", name, n));
    }
    if (!(cfg.data.t_end > 0.0) || !(cfg.data.dt > 0.0))
    {
      throw Error("data.t_end and data.dt must be positive");
    }
    if (is_mechanical(name) && cfg.frc.force_dofs.empty())
    {
      cfg.frc.force_dofs.assign(n / 2, 0.0);
      cfg.frc.force_dofs[0] = 1.0;
      if (name == "shaw-pierre")
      {
        cfg.frc.force_dofs = {1.0, 1.0};
      }
    }
  }
  if (cfg.observable.kind != "full" && cfg.observable.kind != "delay")
  {
    throw Error(fmt::format("observable.kind must be 'full' or 'delay' (got '{}')",
                            cfg.observable.kind));
  }
  if (cfg.observable.embed_dim < 1 || cfg.observable.lag < 1)
  {
    throw Error("observable.embed_dim and observable.lag must be positive");
  }
  if (cfg.fit.projection != "oblique" && cfg.fit.projection != "normal")
  {
    throw Error(fmt::format("fit.projection must be 'oblique' or 'normal' (got '{}')",
                            cfg.fit.projection));
  }
  if (cfg.fit.objective != "reduced" && cfg.fit.objective != "row")
  {
    throw Error(fmt::format("fit.objective must be 'reduced' or 'row' (got '{}')",
                            cfg.fit.objective));
  }
  if (cfg.fit.d < 1 || cfg.fit.d % 2 != 0)
  {
    throw Error(fmt::format("fit.d must be an even positive integer (got {})", cfg.fit.d));
  }
  if (!(cfg.fit.regime_threshold > 0.0))
  {
    throw Error("fit.regime_threshold must be positive");
  }
  if (cfg.fit.parametrization_order < 1 || cfg.fit.dynamics_order < 1)
  {
    throw Error("polynomial orders must be at least 1");
  }
  if (cfg.fit.ridge < 0.0)
  {
    throw Error("fit.ridge must be non-negative");
  }
  for (double f : cfg.frc.forcing)
  {
    if (f < 0.0)
    {
      throw Error("frc.forcing amplitudes must be non-negative");
    }
  }
  if (cfg.frc.n_omega < 2 || cfg.frc.oracle_points < 2 || cfg.frc.rho_points < 2)
  {
    throw Error("frc.n_omega, frc.oracle_points and frc.rho_points must be at least 2");
  }
  return cfg;
}

std::string to_toml(const PipelineConfig &cfg)
{
  std::string s;
  s += "[system]\n";
  s += fmt::format("name = {}\n", quoted(cfg.system.name));
  s += "\n[system.params]\n";
  for (const auto &[k, v] : cfg.system.params)
  {
    s += fmt::format("{} = {}\n", k, fmt_double(v));
  }
  s += "\n[data]\n";
  std::vector<std::string> ics;
  for (const auto &ic : cfg.data.train_ics)
  {
    ics.push_back(fmt_list(ic));
  }
  s += fmt::format("train_ics = [{}]\n", fmt::join(ics, ", "));
  s += fmt::format("test_ic = {}\n", fmt_list(cfg.data.test_ic));
  s += fmt::format("t_end = {}\n", fmt_double(cfg.data.t_end));
  s += fmt::format("dt = {}\n", fmt_double(cfg.data.dt));
  std::vector<std::string> csvs;
  for (const auto &c : cfg.data.train_csv)
  {
    csvs.push_back(quoted(c));
  }
  s += fmt::format("train_csv = [{}]\n", fmt::join(csvs, ", "));
  s += fmt::format("test_csv = {}\n", quoted(cfg.data.test_csv));
  s += "\n[observable]\n";
  s += fmt::format("kind = {}\n", quoted(cfg.observable.kind));
  s += fmt::format("state = {}\n", cfg.observable.state);
  s += fmt::format("embed_dim = {}\n", cfg.observable.embed_dim);
  s += fmt::format("lag = {}\n", cfg.observable.lag);
  s += "\n[fit]\n";
  s += fmt::format("d = {}\n", cfg.fit.d);
  s += fmt::format("regime_threshold = {}\n", fmt_double(cfg.fit.regime_threshold));
  s += fmt::format("regime_row = {}\n", cfg.fit.regime_row);
  s += fmt::format("projection = {}\n", quoted(cfg.fit.projection));
  s += fmt::format("objective = {}\n", quoted(cfg.fit.objective));
  s += fmt::format("objective_row = {}\n", cfg.fit.objective_row);
  s += fmt::format("parametrization_order = {}\n", cfg.fit.parametrization_order);
  s += fmt::format("dynamics_order = {}\n", cfg.fit.dynamics_order);
  s += fmt::format("ridge = {}\n", fmt_double(cfg.fit.ridge));
  s += fmt::format("t_start = {}\n", fmt_double(cfg.fit.t_start));
  s += fmt::format("anchor_linear = {}\n", cfg.fit.anchor_linear);
  s += fmt::format("max_iterations = {}\n", cfg.fit.max_iterations);
  s += "\n[frc]\n";
  s += fmt::format("forcing = {}\n", fmt_list(cfg.frc.forcing));
  s += fmt::format("force_dofs = {}\n", fmt_list(cfg.frc.force_dofs));
  s += fmt::format("omega_min = {}\n", fmt_double(cfg.frc.omega_min));
  s += fmt::format("omega_max = {}\n", fmt_double(cfg.frc.omega_max));
  s += fmt::format("n_omega = {}\n", cfg.frc.n_omega);
  s += fmt::format("readout_row = {}\n", cfg.frc.readout_row);
  s += fmt::format("rho_points = {}\n", cfg.frc.rho_points);
  s += fmt::format("rho_max = {}\n", fmt_double(cfg.frc.rho_max));
  s += fmt::format("oracle = {}\n", cfg.frc.oracle);
  s += fmt::format("oracle_points = {}\n", cfg.frc.oracle_points);
  s += fmt::format("oracle_halfwidth = {}\n", fmt_double(cfg.frc.oracle_halfwidth));
  s += fmt::format("settle_periods = {}\n", cfg.frc.settle_periods);
  s += fmt::format("measure_periods = {}\n", cfg.frc.measure_periods);
  s += fmt::format("phase_offset = {}\n", fmt_double(cfg.frc.phase_offset));
  s += "\n[output]\n";
  s += fmt::format("dir = {}\n", quoted(cfg.output_dir));
  return s;
}

Index BenchmarkSystem::dim() const
{
  return mechanical ? mechanical->dim() : linear->dim();
}

const Matrix &BenchmarkSystem::first_order_matrix() const
{
  return mechanical ? mechanical->first_order_matrix() : linear->matrix();
}

VectorField BenchmarkSystem::vector_field() const
{
  return mechanical ? mechanical->vector_field() : linear->vector_field();
}

BenchmarkSystem make_system(const PipelineConfig &cfg)
{
  const std::string &name = cfg.system.name;
  auto p = benchmark_parameters(name);
  for (const auto &[k, v] : cfg.system.params)
  {
    p[k] = v;
  }
  BenchmarkSystem sys{name, std::nullopt, std::nullopt};
  if (name == "shaw-pierre")
  {
    ShawPierreParams sp;
    sp.m1 = p["m1"], sp.m2 = p["m2"], sp.c1 = p["c1"], sp.c2 = p["c2"];
    sp.k1 = p["k1"], sp.k2 = p["k2"], sp.alpha = p["alpha"];
    sys.mechanical = shaw_pierre(sp);
  }
  else if (name == "cart")
  {
    CartParams cp;
    cp.m1 = p["m1"], cp.m2 = p["m2"], cp.mf = p["mf"], cp.c1 = p["c1"], cp.c2 = p["c2"];
    cp.cf = p["cf"], cp.k1 = p["k1"], cp.k2 = p["k2"], cp.kf = p["kf"], cp.alpha = p["alpha"];
    sys.mechanical = shaw_pierre_cart(cp);
  }
  else if (name == "linear-4d")
  {
    sys.linear = linear_4d(p["alpha"], p["beta"], p["omega"], p["nu"],
                           {p["coupling_a"], p["coupling_b"], p["coupling_c"], p["coupling_d"]});
  }
  else if (name == "linear-2d")
  {
    sys.linear = linear_2d(p["alpha"], p["beta"], p["delta"]);
  }
  else
  {
    throw Error(fmt::format("system '{}' has no dynamical model to simulate", name));
  }
  return sys;
}

std::vector<Trajectory> simulate_training(const PipelineConfig &cfg, const BenchmarkSystem &sys)
{
  std::vector<std::optional<Trajectory>> out(cfg.data.train_ics.size());
  const VectorField f = sys.vector_field();
  parallel_for(out.size(),
               [&](std::size_t k)
               {
                 out[k] = simulate_decay(f, to_vector(cfg.data.train_ics[k]), cfg.data.t_end,
                                         cfg.data.dt);
               });
  std::vector<Trajectory> res;
  for (auto &t : out)
  {
    res.push_back(std::move(*t));
  }
  return res;
}

Trajectory simulate_test(const PipelineConfig &cfg, const BenchmarkSystem &sys)
{
  return simulate_decay(sys.vector_field(), to_vector(cfg.data.test_ic), cfg.data.t_end,
                        cfg.data.dt);
}

Trajectory observe(const PipelineConfig &cfg, const Trajectory &state)
{
  if (cfg.observable.kind == "full")
  {
    return state;
  }
  if (cfg.observable.state < 0 || cfg.observable.state >= state.dim())
  {
    throw Error(fmt::format("observable.state = {} out of range for {} states",
                            cfg.observable.state, state.dim()));
  }
  return delay_embed(state.row(cfg.observable.state), cfg.observable.embed_dim,
                     cfg.observable.lag);
}

Matrix observable_map(const PipelineConfig &cfg, const BenchmarkSystem &sys)
{
  const Index n = sys.dim();
  if (cfg.observable.kind == "full")
  {
    return Matrix::Identity(n, n);
  }
  const Matrix &A = sys.first_order_matrix();
  const Matrix step = (A * (double(cfg.observable.lag) * cfg.data.dt)).exp();
  Matrix O(cfg.observable.embed_dim, n);
  Matrix E = Matrix::Identity(n, n);
  for (Index k = 0; k < cfg.observable.embed_dim; k++)
  {
    O.row(k) = E.row(cfg.observable.state);
    E = E * step;
  }
  return O;
}

Index readout_state(const PipelineConfig &cfg)
{
  return cfg.observable.kind == "full" ? cfg.frc.readout_row : cfg.observable.state;
}

FitOutput fit_model(const PipelineConfig &cfg, std::span<const Trajectory> train_obs)
{
  if (train_obs.empty())
  {
    throw Error("fit: no training trajectories");
  }
  const Index p = train_obs[0].dim(), d = cfg.fit.d;
  const double dt = train_obs[0].dt();
  for (const auto &t : train_obs)
  {
    if (t.dim() != p || std::abs(t.dt() - dt) > 1e-9 * dt)
    {
      throw Error("fit: training trajectories must share dimension and sampling step");
    }
  }
  if (cfg.fit.regime_row < 0 || cfg.fit.regime_row >= p)
  {
    throw Error(fmt::format("fit.regime_row = {} out of range for p = {}", cfg.fit.regime_row,
                            p));
  }

  // Step 1: linear regime of each training trajectory.
  std::vector<RegimeInfo> regimes;
  std::vector<Trajectory> y_lin;
  for (const auto &t : train_obs)
  {
    const BackboneCurve curve =
        stage("linear regime", [&] { return pff_extract(t.row(cfg.fit.regime_row)); });
    RegimeInfo info;
    info.regime = stage("linear regime",
                        [&] { return identify_linear_regime(curve, cfg.fit.regime_threshold); });
    info.points = static_cast<Index>(curve.points.size());
    // Start at the zero crossing opening the first regime semi-period.
    const auto &pt = curve.points[static_cast<std::size_t>(info.regime.first)];
    info.t_start = pt.time - 0.5 * std::numbers::pi / pt.frequency;
    regimes.push_back(info);
    y_lin.push_back(restrict_time(t, info.t_start, t.times()(t.size() - 1)));
  }

  // Step 2: slow subspace.
  SlowSubspace subspace = stage("slow subspace", [&] {
    return dmd_slow_subspace(snapshot_pair(std::span<const Trajectory>(y_lin)), d, dt);
  });

  // Step 3: projector.
  std::optional<OptimizeResult> opt;
  std::optional<ObliqueProjector> proj;
  if (cfg.fit.projection == "normal")
  {
    proj = stage("projection", [&] { return normal_projector(subspace.basis); });
  }
  else
  {
    Matrix readouts;
    if (cfg.fit.objective == "reduced")
    {
      readouts = subspace.orthonormal;
    }
    else
    {
      if (cfg.fit.objective_row < 0 || cfg.fit.objective_row >= p)
      {
        throw Error("fit.objective_row out of range");
      }
      readouts = Matrix::Zero(p, 1);
      readouts(cfg.fit.objective_row, 0) = 1.0;
    }
    OptimizeOptions oo;
    oo.bfgs.max_iterations = cfg.fit.max_iterations;
    opt = stage("projection", [&] {
      return optimize_B(subspace.basis, std::span<const Trajectory>(y_lin), readouts, oo);
    });
    proj = opt->projector;
  }

  // Step 4: SSM fits on the training samples after t_start.
  std::vector<Trajectory> ys, xis;
  const Matrix &Qt = subspace.orthonormal;
  for (const auto &t : train_obs)
  {
    Trajectory y = restrict_time(t, cfg.fit.t_start, t.times()(t.size() - 1));
    xis.push_back(reduced_coordinates(*proj, Qt, y));
    ys.push_back(std::move(y));
  }
  PolynomialFit pfit = stage("parametrization", [&] {
    return fit_parametrization(ys, xis, Qt, cfg.fit.parametrization_order, cfg.fit.ridge);
  });
  PolynomialFit dfit = stage("reduced dynamics", [&] {
    if (cfg.fit.anchor_linear)
    {
      std::vector<Trajectory> xi_lin;
      for (const auto &y : y_lin)
      {
        xi_lin.push_back(reduced_coordinates(*proj, Qt, y));
      }
      const Matrix L = reduced_linear_map(xi_lin, dt);
      return fit_reduced_dynamics(xis, cfg.fit.dynamics_order, L, cfg.fit.ridge);
    }
    return fit_reduced_dynamics(xis, cfg.fit.dynamics_order, cfg.fit.ridge);
  });

  SsmModel model{subspace, *proj, pfit.map, dfit.map, std::nullopt, 0.0, 0.0, {}};
  for (const auto &xi : xis)
  {
    model.training_radius =
        std::max(model.training_radius, xi.states().colwise().norm().maxCoeff());
  }
  if (d == 2)
  {
    try
    {
      model.polar = stage("polar form", [&] { return to_polar(dfit.map); });
      for (const auto &xi : xis)
      {
        for (Index j = 0; j < xi.size(); j++)
        {
          model.training_rho = std::max(model.training_rho, model.polar->radius(xi.states().col(j)));
        }
      }
    }
    catch (const Error &e)
    {
      model.diagnostics.push_back(e.what());
    }
  }
  for (const auto &w : subspace.diagnostics)
  {
    model.diagnostics.push_back(w);
  }
  for (const auto &w : pfit.warnings)
  {
    model.diagnostics.push_back("parametrization: " + w);
  }
  for (const auto &w : dfit.warnings)
  {
    model.diagnostics.push_back("reduced dynamics: " + w);
  }
  if (opt && !opt->converged)
  {
    model.diagnostics.push_back("B optimization: " + opt->status);
  }
  const CVector lin_eig = eigen_decompose(dfit.map.linear_part()).values;
  for (Index k = 0; k < lin_eig.size(); k++)
  {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < subspace.eigenvalues.size(); j++)
    {
      best = std::min(best, std::abs(lin_eig(k) - subspace.eigenvalues(j)) /
                                std::abs(subspace.eigenvalues(j)));
    }
    if (best > 0.05)
    {
      model.diagnostics.push_back(fmt::format(
          "reduced-dynamics linear eigenvalue {:.6f}{:+.6f}i differs from DMD by {:.1f}%",
          lin_eig(k).real(), lin_eig(k).imag(), 100.0 * best));
    }
  }

  nlohmann::json report;
  nlohmann::json reg = nlohmann::json::array();
  for (const auto &r : regimes)
  {
    reg.push_back({{"first_point", r.regime.first},
                   {"last_point", r.regime.last},
                   {"backbone_points", r.points},
                   {"amplitude_ceiling", r.regime.amplitude_ceiling},
                   {"marginal", r.regime.marginal},
                   {"t_start", r.t_start}});
  }
  report["regimes"] = reg;
  report["dmd"] = {{"eigenvalues", complex_to_json(subspace.eigenvalues)},
                   {"all_eigenvalues", complex_to_json(subspace.all_eigenvalues)},
                   {"svd_rank", subspace.svd_rank}};
  report["projection"] = cfg.fit.projection;
  if (opt)
  {
    report["optimization"] = to_json(*opt)["optimization"];
  }
  report["parametrization"] = {{"residual_rms", vector_to_json(pfit.residual_rms)},
                               {"signal_rms", vector_to_json(pfit.signal_rms)},
                               {"samples", pfit.samples}};
  report["reduced_dynamics"] = {{"residual_rms", vector_to_json(dfit.residual_rms)},
                                {"signal_rms", vector_to_json(dfit.signal_rms)},
                                {"linear_eigenvalues", complex_to_json(lin_eig)}};
  report["polar"] = model.polar ? to_json(*model.polar) : nlohmann::json(nullptr);
  report["training_radius"] = model.training_radius;
  report["training_rho"] = model.training_rho;
  report["diagnostics"] = model.diagnostics;

  return {std::move(model), std::move(regimes), std::move(opt), std::move(pfit),
          std::move(dfit), std::move(report)};
}

PredictOutput predict_test(const SsmModel &model, const Trajectory &test_obs)
{
  const double t0 = test_obs.times()(0);
  const double t_end = test_obs.times()(test_obs.size() - 1) - t0;
  Prediction pred = predict_trajectory(model, test_obs.states().col(0), t_end, test_obs.dt());
  if (pred.y.size() != test_obs.size())
  {
    throw Error("prediction grid does not match the test trajectory");
  }
  Trajectory y = test_obs.with_states(pred.y.states(), test_obs.labels());
  const double e = nmte(y, test_obs);
  return {std::move(y), e, std::move(pred.warnings)};
}

OraclePoint branch_peak(const FrcBranch &branch)
{
  OraclePoint best;
  for (const auto &p : branch.points)
  {
    if (p.amplitude > best.amplitude)
    {
      best = {p.omega, p.amplitude};
    }
  }
  return best;
}

OraclePoint oracle_peak(const std::vector<OraclePoint> &sweep)
{
  OraclePoint best;
  for (const auto &p : sweep)
  {
    if (p.amplitude > best.amplitude)
    {
      best = p;
    }
  }
  return best;
}

std::vector<OraclePoint> oracle_sweep(const PipelineConfig &cfg, const BenchmarkSystem &sys,
                                      double amplitude, double omega_lo, double omega_hi, int n)
{
  if (!sys.mechanical)
  {
    throw Error("forced-response oracle needs a mechanical benchmark");
  }
  const MechanicalSystem &mech = *sys.mechanical;
  HarmonicForcing forcing{mech.forcing_vector(to_vector(cfg.frc.force_dofs)), amplitude, 1.0};
  SteadyStateOptions so;
  so.settle_periods = cfg.frc.settle_periods;
  so.measure_periods = cfg.frc.measure_periods;
  std::vector<OraclePoint> out;
  std::optional<Vector> x0;
  for (int k = 0; k < n; k++)
  {
    forcing.frequency = omega_lo + (omega_hi - omega_lo) * double(k) / double(n - 1);
    const SteadyResponse r =
        simulate_forced_steady_amplitude(mech, forcing, readout_state(cfg), so, x0);
    x0 = r.final_state;
    out.push_back({forcing.frequency, r.amplitude});
  }
  return out;
}

FrcOutput run_frc(const PipelineConfig &cfg, const SsmModel &model, const BenchmarkSystem &sys,
                  bool with_oracle)
{
  if (!model.polar)
  {
    throw Error("FRC needs a model with a polar form");
  }
  if (!sys.mechanical)
  {
    throw Error("FRC calibration needs a mechanical benchmark");
  }
  if (cfg.frc.forcing.empty())
  {
    throw Error("frc.forcing lists no forcing amplitudes");
  }
  const Index p = model.observable_dim();
  if (cfg.frc.readout_row < 0 || cfg.frc.readout_row >= p)
  {
    throw Error("frc.readout_row out of range");
  }
  Vector readout = Vector::Zero(p);
  readout(cfg.frc.readout_row) = 1.0;
  const Matrix O = observable_map(cfg, sys);
  const Vector dofs = to_vector(cfg.frc.force_dofs);

  FrcOutput out;
  for (double A : cfg.frc.forcing)
  {
    out.modal_forcing.push_back(calibrate_forcing(model, *sys.mechanical, dofs, A, O));
  }
  const double b0 = model.polar->b(0);
  const double lo = cfg.frc.omega_min > 0.0 ? cfg.frc.omega_min : 0.8 * b0;
  const double hi = cfg.frc.omega_max > 0.0 ? cfg.frc.omega_max : 1.2 * b0;
  FrcOptions fo;
  fo.rho_points = cfg.frc.rho_points;
  fo.rho_max = cfg.frc.rho_max > 0.0 ? cfg.frc.rho_max : 1.5 * model.training_rho;
  out.branches = frc_analytic(model, out.modal_forcing, lo, hi, cfg.frc.n_omega, readout, fo);
  out.backbone = backbone_from_model(model, model.training_rho, readout);
  if (with_oracle)
  {
    out.oracle.resize(cfg.frc.forcing.size());
    parallel_for(cfg.frc.forcing.size(),
                 [&](std::size_t k)
                 {
                   const OraclePoint peak = branch_peak(out.branches[k]);
                   const double w = cfg.frc.oracle_halfwidth * peak.omega;
                   out.oracle[k] = oracle_sweep(cfg, sys, cfg.frc.forcing[k], peak.omega - w,
                                                peak.omega + w, cfg.frc.oracle_points);
                 });
  }
  return out;
}

}  // namespace ssmo
