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

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace hmimo
{
    using cvec = Eigen::VectorXcd;
    using cmat = Eigen::MatrixXcd;
    using rvec = Eigen::VectorXd;
    using vec3 = Eigen::Vector3d;

    inline constexpr double pi = std::numbers::pi;

    inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
    inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

    /// Plane-wave arrival direction in radians. Azimuth and elevation are both
    /// restricted to [-pi/2, pi/2], i.e. waves arrive from in front of the array.
    struct Direction
    {
        double azimuth = 0.0;
        double elevation = 0.0;

        static Direction from_degrees(double azimuth_deg, double elevation_deg)
        {
            return Direction{deg_to_rad(azimuth_deg), deg_to_rad(elevation_deg)}.validated();
        }

        Direction validated() const
        {
            constexpr double half = pi / 2.0;
            if (!(std::abs(azimuth) <= half) || !(std::abs(elevation) <= half))
                throw ConfigError("Direction: azimuth and elevation must lie in [-pi/2, pi/2].");
            return *this;
        }
    };

    // 0-based grid position of an antenna; i runs along a row, j along a column.
    struct GridIndex
    {
        std::size_t horizontal = 0;
        std::size_t vertical = 0;
        friend bool operator==(const GridIndex &, const GridIndex &) = default;
    };

    // Horizontal and vertical antenna separation in wavelengths.
    struct NormalizedDistance
    {
        double horizontal = 0.0;
        double vertical = 0.0;
    };

    /*
     * Uniform planar array in the yz-plane. m_h antennas per row, m_v per column,
     * identical horizontal and vertical spacing. Antennas are numbered row by row
     * and the public interface uses 1-based antenna indices m in [1, M].
     */
    class ArrayGeometry
    {
    public:
        ArrayGeometry(std::size_t m_h, std::size_t m_v, double spacing, double wavelength)
            : m_h_(m_h), m_v_(m_v), spacing_(spacing), wavelength_(wavelength)
        {
            if (m_h == 0 || m_v == 0)
                throw ConfigError("ArrayGeometry: m_h and m_v must be positive.");
            if (!(spacing > 0.0) || !std::isfinite(spacing))
                throw ConfigError("ArrayGeometry: spacing must be positive.");
            if (!(wavelength > 0.0) || !std::isfinite(wavelength))
                throw ConfigError("ArrayGeometry: wavelength must be positive.");
        }

        // Wavelength fixed to 1, spacing given in wavelengths.
        static ArrayGeometry with_relative_spacing(std::size_t m_h, std::size_t m_v, double spacing_over_lambda)
        {
            return ArrayGeometry(m_h, m_v, spacing_over_lambda, 1.0);
        }

        std::size_t m_h() const { return m_h_; }
        std::size_t m_v() const { return m_v_; }
        std::size_t size() const { return m_h_ * m_v_; }
        double spacing() const { return spacing_; }
        double wavelength() const { return wavelength_; }
        double spacing_over_lambda() const { return spacing_ / wavelength_; }

        GridIndex indices(std::size_t m) const
        {
            check_index(m);
            return {(m - 1) % m_h_, (m - 1) / m_h_};
        }

        // Inverse of indices(): 1-based antenna index of grid position (i, j).
        std::size_t antenna_at(GridIndex g) const
        {
            if (g.horizontal >= m_h_ || g.vertical >= m_v_)
                throw IndexError("ArrayGeometry: grid position outside the array.");
            return g.vertical * m_h_ + g.horizontal + 1;
        }

        vec3 position(std::size_t m) const
        {
            const auto g = indices(m);
            return {0.0, double(g.horizontal) * spacing_, double(g.vertical) * spacing_};
        }

        vec3 wave_vector(Direction dir) const
        {
            dir.validated();
            const double k = 2.0 * pi / wavelength_;
            const double ct = std::cos(dir.elevation);
            return {k * ct * std::cos(dir.azimuth), k * ct * std::sin(dir.azimuth), k * std::sin(dir.elevation)};
        }

        // Entry m is exp(i k^T u_m); the first entry is exactly 1.
        cvec response(Direction dir) const
        {
            const vec3 k = wave_vector(dir);
            cvec a(static_cast<Eigen::Index>(size()));
            for (std::size_t j = 0; j < m_v_; ++j)
                for (std::size_t i = 0; i < m_h_; ++i)
                {
                    const double phase = k.y() * double(i) * spacing_ + k.z() * double(j) * spacing_;
                    a(Eigen::Index(j * m_h_ + i)) = std::polar(1.0, phase);
                }
            return a;
        }

        NormalizedDistance normalized_distance(std::size_t m, std::size_t l) const
        {
            const auto gm = indices(m), gl = indices(l);
            const double r = spacing_over_lambda();
            return {(double(gm.horizontal) - double(gl.horizontal)) * r,
                    (double(gm.vertical) - double(gl.vertical)) * r};
        }

    private:
        void check_index(std::size_t m) const
        {
            if (m < 1 || m > size())
                throw IndexError("ArrayGeometry: antenna index " + std::to_string(m) + " outside [1, " +
                                 std::to_string(size()) + "].");
        }

        std::size_t m_h_, m_v_;
        double spacing_, wavelength_;
    };
}
