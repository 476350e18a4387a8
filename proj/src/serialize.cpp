// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "ssmo/serialize.hpp"

#include <fstream>
#include <fmt/format.h>
#include <fmt/os.h>

namespace ssmo
{

namespace
{

// Report malformed documents as library errors.
template <class F>
auto decode(const char *what, F &&f)
{
  try
  {
    return f();
  }
  catch (const json::exception &e)
  {
    throw Error(fmt::format("invalid {} JSON: {}", what, e.what()));
  }
}

}  // namespace

json matrix_to_json(const Matrix &A)
{
  json data = json::array();
  for (Index i = 0; i < A.rows(); i++)
  {
    for (Index j = 0; j < A.cols(); j++)
    {
      data.push_back(A(i, j));
    }
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"data", data}};
}

Matrix matrix_from_json(const json &j)
{
  return decode("matrix", [&]
  {
    const auto rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
    const auto &data = j.at("data");
    if (!data.is_array() || static_cast<Index>(data.size()) != rows * cols)
    {
      throw Error(fmt::format("matrix entry count does not match {}x{}", rows, cols));
    }
    Matrix A(rows, cols);
    for (Index i = 0; i < rows; i++)
    {
      for (Index c = 0; c < cols; c++)
      {
        A(i, c) = data[static_cast<std::size_t>(i * cols + c)].get<double>();
      }
    }
    return A;
  });
}

json vector_to_json(const Vector &v)
{
  json out = json::array();
  for (Index i = 0; i < v.size(); i++)
  {
    out.push_back(v(i));
  }
  return out;
}

Vector vector_from_json(const json &j)
{
  return decode("vector", [&]
  {
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); i++)
    {
      v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
  });
}

json complex_to_json(const CVector &v)
{
  json out = json::array();
  for (Index i = 0; i < v.size(); i++)
  {
    out.push_back({v(i).real(), v(i).imag()});
  }
  return out;
}

CVector complex_from_json(const json &j)
{
  return decode("complex vector", [&]
  {
    CVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); i++)
    {
      v(static_cast<Index>(i)) = Complex(j[i].at(0).get<double>(), j[i].at(1).get<double>());
    }
    return v;
  });
}

json to_json(const SlowSubspace &s)
{
  return {{"Q", matrix_to_json(s.basis)},
          {"Q_tilde", matrix_to_json(s.orthonormal)},
          {"dmd_eigenvalues", complex_to_json(s.eigenvalues)},
          {"all_eigenvalues", complex_to_json(s.all_eigenvalues)},
          {"svd_rank", s.svd_rank},
          {"diagnostics", s.diagnostics}};
}

SlowSubspace subspace_from_json(const json &j)
{
  return decode("subspace", [&]
  {
    SlowSubspace s;
    s.basis = matrix_from_json(j.at("Q"));
    s.orthonormal = matrix_from_json(j.at("Q_tilde"));
    s.eigenvalues = complex_from_json(j.at("dmd_eigenvalues"));
    s.all_eigenvalues = complex_from_json(j.at("all_eigenvalues"));
    s.svd_rank = j.at("svd_rank").get<Index>();
    s.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return s;
  });
}

json to_json(const ObliqueProjector &p)
{
  return {{"Q", matrix_to_json(p.range_basis())},
          {"B", matrix_to_json(p.kernel_complement_basis())},
          {"P", matrix_to_json(p.matrix())}};
}

json to_json(const OptimizeResult &r)
{
  json j = to_json(r.projector);
  j["optimization"] = {{"iterations", r.iterations},
                       {"evaluations", r.evaluations},
                       {"initial_objective", r.initial_objective},
                       {"final_objective", r.final_objective},
                       {"gradient_norm", r.gradient_norm},
                       {"converged", r.converged},
                       {"status", r.status},
                       {"history", r.history}};
  return j;
}

ObliqueProjector projector_from_json(const json &j)
{
  return decode("projector", [&]
  {
    return ObliqueProjector(matrix_from_json(j.at("Q")), matrix_from_json(j.at("B")));
  });
}

json to_json(const PolynomialMap &m)
{
  return {{"input_dim", m.input_dim()},
          {"output_dim", m.output_dim()},
          {"order", m.order()},
          {"monomial_order", "graded lexicographic, degrees 1..order"},
          {"exponents", m.exponents()},
          {"coefficients", matrix_to_json(m.coefficients())}};
}

PolynomialMap polynomial_from_json(const json &j)
{
  return decode("polynomial", [&]
  {
    PolynomialMap m(j.at("input_dim").get<Index>(), j.at("order").get<int>(),
                    matrix_from_json(j.at("coefficients")));
    if (j.contains("exponents") &&
        j.at("exponents").get<std::vector<std::vector<int>>>() != m.exponents())
    {
      throw Error("stored monomial exponents do not match the graded lexicographic order");
    }
    return m;
  });
}

json to_json(const PolarForm &pf)
{
  return {{"a", vector_to_json(pf.a)}, {"b", vector_to_json(pf.b)}, {"T", matrix_to_json(pf.T)}};
}

PolarForm polar_from_json(const json &j)
{
  return decode("polar form", [&]
  {
    PolarForm pf;
    pf.a = vector_from_json(j.at("a"));
    pf.b = vector_from_json(j.at("b"));
    pf.T = matrix_from_json(j.at("T"));
    return pf;
  });
}

json to_json(const SsmModel &m)
{
  json j = {{"subspace", to_json(m.subspace)},
            {"projector", to_json(m.projector)},
            {"parametrization", to_json(m.parametrization)},
            {"reduced_dynamics", to_json(m.reduced_dynamics)},
            {"training_radius", m.training_radius},
            {"training_rho", m.training_rho},
            {"diagnostics", m.diagnostics}};
  j["polar"] = m.polar ? to_json(*m.polar) : json(nullptr);
  return j;
}

SsmModel model_from_json(const json &j)
{
  return decode("model", [&]
  {
    SsmModel m{subspace_from_json(j.at("subspace")),
               projector_from_json(j.at("projector")),
               polynomial_from_json(j.at("parametrization")),
               polynomial_from_json(j.at("reduced_dynamics")),
               std::nullopt,
               j.at("training_radius").get<double>(),
               j.at("training_rho").get<double>(),
               j.at("diagnostics").get<std::vector<std::string>>()};
    if (!j.at("polar").is_null())
    {
      m.polar = polar_from_json(j.at("polar"));
    }
    return m;
  });
}

json to_json(const SpectrumReport &r)
{
  json near = json::array();
  for (const auto &nr : r.near_resonances)
  {
    near.push_back({{"j", nr.j}, {"m", nr.m}, {"defect", nr.defect}});
  }
  return {{"eigenvalues", complex_to_json(r.eigenvalues)},
          {"nonresonant", r.nonresonant},
          {"max_order", r.max_order},
          {"tol", r.tol},
          {"near_resonances", near},
          {"warnings", r.warnings}};
}

void write_json(const json &j, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw Error(fmt::format("cannot open {} for writing", path.string()));
  }
  out << j.dump(2) << '\n';
  if (!out)
  {
    throw Error(fmt::format("failed writing {}", path.string()));
  }
}

json read_json(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(fmt::format("cannot open {}", path.string()));
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void save_backbone_csv(const BackboneCurve &curve, const std::filesystem::path &path)
{
  auto out = fmt::output_file(path.string());
  out.print("time,frequency,amplitude\n");
  for (const auto &p : curve.points)
  {
    out.print("{:.17g},{:.17g},{:.17g}\n", p.time, p.frequency, p.amplitude);
  }
}

void save_frc_csv(const FrcBranch &branch, const std::filesystem::path &path)
{
  auto out = fmt::output_file(path.string());
  out.print("f,omega,amplitude,phase,stable\n");
  for (const auto &p : branch.points)
  {
    out.print("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", branch.forcing, p.omega, p.amplitude,
              p.phase, p.stable ? 1 : 0);
  }
}

}  // namespace ssmo
