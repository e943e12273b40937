// SPDX-License-Identifier: Apache-2.0
//
// mbmimo - multi-band massive MIMO simulator with mutually coupled antenna arrays
// Copyright (C) 2026 mbmimo project contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MBMIMO_COMMON_HPP
#define MBMIMO_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mbmimo {

inline constexpr const char *version = "0.1.0";

// Speed of light in vacuum [m/s].
inline constexpr double speed_of_light = 2.99792458e8;

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Bad argument values (out of the documented domain of an operation).
struct domain_error : std::invalid_argument {
    explicit domain_error(const std::string &msg) : std::invalid_argument(msg) {}
};

// Inputs that are syntactically valid but numerically unusable
// (singular factor, indefinite matrix beyond tolerance, ...).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid scenario / experiment configuration; the message names the field.
struct config_error : std::runtime_error {
    explicit config_error(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace mbmimo

#endif
