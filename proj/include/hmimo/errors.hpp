// SPDX-License-Identifier: Apache-2.0
//
// hmimo: spatial correlation models and subspace channel estimation for
// holographic massive MIMO with uniform planar arrays
// Copyright (C) 2026 The hmimo authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace hmimo
{
    // Bad user input: malformed config, invalid parameters, out-of-range values.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Malformed input file (matrix container, CSV).
    class FormatError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class IndexError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    class ShapeError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class DomainError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Base for failures of a numerical procedure on otherwise valid input.
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Quadrature self-check failed; what() carries the diagnostic.
    class AccuracyError : public NumericalError
    {
    public:
        using NumericalError::NumericalError;
    };

    class UnsupportedModelError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // An analytic NMSE oracle was requested outside the conditions that make it exact.
    class OracleInvalidError : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };
}
