// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_SERIALIZE_HPP
#define SSMO_SERIALIZE_HPP

#include <filesystem>
#include <string>
#include <json.hpp>
#include "ssmo/backbone.hpp"
#include "ssmo/core.hpp"
#include "ssmo/diagnostics.hpp"
#include "ssmo/frc.hpp"
#include "ssmo/projection.hpp"
#include "ssmo/ssm.hpp"
#include "ssmo/subspace.hpp"

namespace ssmo
{

using json = nlohmann::json;

// Matrices are {"rows", "cols", "data"} with data in row-major order; complex vectors are
// lists of [re, im] pairs.
json matrix_to_json(const Matrix &A);
Matrix matrix_from_json(const json &j);
json vector_to_json(const Vector &v);
Vector vector_from_json(const json &j);
json complex_to_json(const CVector &v);
CVector complex_from_json(const json &j);

json to_json(const SlowSubspace &s);
SlowSubspace subspace_from_json(const json &j);

json to_json(const ObliqueProjector &p);
json to_json(const OptimizeResult &r);
ObliqueProjector projector_from_json(const json &j);

// Polynomial maps carry their exponent list so the monomial order is explicit.
json to_json(const PolynomialMap &m);
PolynomialMap polynomial_from_json(const json &j);

json to_json(const PolarForm &pf);
PolarForm polar_from_json(const json &j);

json to_json(const SsmModel &m);
SsmModel model_from_json(const json &j);

json to_json(const SpectrumReport &r);

// Pretty-printed with a trailing newline.
void write_json(const json &j, const std::filesystem::path &path);
json read_json(const std::filesystem::path &path);

// CSV with columns time, frequency, amplitude.
void save_backbone_csv(const BackboneCurve &curve, const std::filesystem::path &path);

// CSV with columns f, omega, amplitude, phase, stable.
void save_frc_csv(const FrcBranch &branch, const std::filesystem::path &path);

}  // namespace ssmo

#endif  // SSMO_SERIALIZE_HPP
