// Copyright ssm-oblique contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SSMO_CORE_HPP
#define SSMO_CORE_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>

namespace ssmo
{

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

// All recoverable failures in the toolkit are reported through this type. The message
// names the failing condition; callers that run multi-stage pipelines prefix the stage.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssmo

#endif  // SSMO_CORE_HPP
