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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "array_geometry.hpp"
#include "errors.hpp"

namespace hmimo
{
    /// One angular scattering cluster. Angles in radians.
    /// A specular cluster is a Dirac point at its nominal direction instead of a
    /// von Mises spread; it contributes a rank-one term to the correlation matrix.
    struct Cluster
    {
        double azimuth = 0.0;
        double elevation = 0.0;
        double power = 1.0;
        bool specular = false;
    };

    /// Clustered scattering with cosine antenna directivity cos^a(phi) cos^b(theta).
    struct ScatteringConfig
    {
        std::vector<Cluster> clusters;
        double sigma_azimuth = 0.0;   // radians
        double sigma_elevation = 0.0; // radians
        double directivity_a = 0.0;
        double directivity_b = 0.0;
        double gain = 1.0; // average channel gain beta

        bool has_specular() const
        {
            return std::any_of(clusters.begin(), clusters.end(), [](const Cluster &c)
                               { return c.specular; });
        }

        const ScatteringConfig &validate() const
        {
            constexpr double half = pi / 2.0;
            if (clusters.empty())
                throw ConfigError("ScatteringConfig: at least one cluster is required.");
            bool any_power = false;
            for (std::size_t n = 0; n < clusters.size(); ++n)
            {
                const auto &c = clusters[n];
                if (!(std::abs(c.azimuth) < half) || !(std::abs(c.elevation) < half))
                    throw ConfigError("ScatteringConfig: cluster " + std::to_string(n) +
                                      " nominal angles must lie strictly inside (-90, 90) degrees.");
                if (!(c.power >= 0.0) || !std::isfinite(c.power))
                    throw ConfigError("ScatteringConfig: cluster " + std::to_string(n) + " has negative power.");
                any_power = any_power || c.power > 0.0;
            }
            if (!any_power)
                throw ConfigError("ScatteringConfig: all cluster powers are zero.");
            if (!(sigma_azimuth > 0.0) || !(sigma_elevation > 0.0))
                throw ConfigError("ScatteringConfig: angular standard deviations must be positive.");
            if (!(directivity_a >= 0.0) || !(directivity_b >= 0.0))
                throw ConfigError("ScatteringConfig: directivity exponents must be nonnegative.");
            if (!(gain > 0.0) || !std::isfinite(gain))
                throw ConfigError("ScatteringConfig: gain must be positive.");
            return *this;
        }
    };

    // Deviation window of cluster n: phi_n + delta and theta_n + epsilon stay in [-pi/2, pi/2].
    struct ClusterWindow
    {
        double delta_lo, delta_hi;
        double epsilon_lo, epsilon_hi;
    };

    inline ClusterWindow cluster_window(const Cluster &c)
    {
        constexpr double half = pi / 2.0;
        return {-half - c.azimuth, half - c.azimuth, -half - c.elevation, half - c.elevation};
    }

    /// Isotropic scattering with isotropic antennas: cos(theta) / (2 pi).
    inline double isotropic_density(Direction dir)
    {
        dir.validated();
        return std::cos(dir.elevation) / (2.0 * pi);
    }

    namespace detail
    {
        // cos(x)^p with 0^0 = 1 and clamping of tiny negative rounding at +-pi/2.
        inline double cos_pow(double x, double p)
        {
            const double c = std::max(0.0, std::cos(x));
            return p == 0.0 ? 1.0 : std::pow(c, p);
        }

        inline double log_cos_pow(double x, double p)
        {
            if (p == 0.0)
                return 0.0;
            const double c = std::max(0.0, std::cos(x));
            return c == 0.0 ? -std::numeric_limits<double>::infinity() : p * std::log(c);
        }

        inline bool in_window(const Cluster &c, double delta, double epsilon)
        {
            constexpr double half = pi / 2.0;
            return std::abs(c.azimuth + delta) <= half && std::abs(c.elevation + epsilon) <= half;
        }

        // Angular profile exponent offset that is factored out of every evaluation.
        inline double von_mises_log_peak(double sigma) { return 1.0 / (4.0 * sigma * sigma); }

        // exp((cos(2x) - 1) / (4 sigma^2)), peak value 1 at x = 0.
        inline double von_mises_scaled(double x, double sigma)
        {
            return std::exp((std::cos(2.0 * x) - 1.0) / (4.0 * sigma * sigma));
        }

        // Adaptive Gauss-Kronrod over [lo, hi] with breakpoints at the peak and +-10 sigma.
        template <typename F>
        double peaked_integral(F &&f, double lo, double hi, double sigma)
        {
            std::vector<double> cuts{lo};
            for (double b : {-10.0 * sigma, 0.0, 10.0 * sigma})
                if (b > cuts.back() && b < hi)
                    cuts.push_back(b);
            cuts.push_back(hi);
            double total = 0.0;
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
                total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[k], cuts[k + 1], 15, 1e-12);
            return total;
        }
    }

    /// log of P_n cos^a(phi_n + delta) cos^{b+1}(theta_n + epsilon)
    /// exp(cos(2 delta) / (4 sigma_phi^2)) exp(cos(2 epsilon) / (4 sigma_theta^2)).
    /// Returns -inf outside the cluster's angular window.
    inline double log_unnormalized_cluster_density(const ScatteringConfig &cfg, std::size_t n, double delta, double epsilon)
    {
        if (n >= cfg.clusters.size())
            throw IndexError("cluster index " + std::to_string(n) + " out of range.");
        const auto &c = cfg.clusters[n];
        if (!detail::in_window(c, delta, epsilon) || c.power <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return std::log(c.power) + detail::log_cos_pow(c.azimuth + delta, cfg.directivity_a) +
               detail::log_cos_pow(c.elevation + epsilon, cfg.directivity_b + 1.0) +
               std::cos(2.0 * delta) * detail::von_mises_log_peak(cfg.sigma_azimuth) +
               std::cos(2.0 * epsilon) * detail::von_mises_log_peak(cfg.sigma_elevation);
    }

    /// Cluster density without the normalization constant. Overflows to +inf for
    /// very small spreads; use scaled_cluster_density in numerical work.
    inline double unnormalized_cluster_density(const ScatteringConfig &cfg, std::size_t n, double delta, double epsilon)
    {
        return std::exp(log_unnormalized_cluster_density(cfg, n, delta, epsilon));
    }

    /// Log of the factor removed by scaled_cluster_density (same for all clusters).
    inline double density_log_offset(const ScatteringConfig &cfg)
    {
        return detail::von_mises_log_peak(cfg.sigma_azimuth) + detail::von_mises_log_peak(cfg.sigma_elevation);
    }

    /// unnormalized_cluster_density * exp(-density_log_offset(cfg)); bounded by P_n.
    inline double scaled_cluster_density(const ScatteringConfig &cfg, std::size_t n, double delta, double epsilon)
    {
        if (n >= cfg.clusters.size())
            throw IndexError("cluster index " + std::to_string(n) + " out of range.");
        const auto &c = cfg.clusters[n];
        if (!detail::in_window(c, delta, epsilon))
            return 0.0;
        return c.power * detail::cos_pow(c.azimuth + delta, cfg.directivity_a) *
               detail::cos_pow(c.elevation + epsilon, cfg.directivity_b + 1.0) *
               detail::von_mises_scaled(delta, cfg.sigma_azimuth) *
               detail::von_mises_scaled(epsilon, cfg.sigma_elevation);
    }

    /*
     * Integral of the scaled density of cluster n over its window, without the power
     * factor. The density is separable, so this is a product of two 1-D integrals
     * evaluated with adaptive Gauss-Kronrod.
     *
     * A specular cluster has the mass of a diffuse cluster collapsed onto its nominal
     * direction: cos^a(phi_n) cos^{b+1}(theta_n) times the full-window von Mises integrals.
     */
    inline double cluster_shape_integral(const ScatteringConfig &cfg, std::size_t n)
    {
        const auto &c = cfg.clusters.at(n);
        const double a = cfg.directivity_a, b1 = cfg.directivity_b + 1.0;
        const double sp = cfg.sigma_azimuth, st = cfg.sigma_elevation;
        if (c.specular)
        {
            const double zp = detail::peaked_integral([sp](double x)
                                                      { return detail::von_mises_scaled(x, sp); },
                                                      -pi / 2.0, pi / 2.0, sp);
            const double zt = detail::peaked_integral([st](double x)
                                                      { return detail::von_mises_scaled(x, st); },
                                                      -pi / 2.0, pi / 2.0, st);
            return detail::cos_pow(c.azimuth, a) * detail::cos_pow(c.elevation, b1) * zp * zt;
        }
        const auto w = cluster_window(c);
        const double ip = detail::peaked_integral([&](double d)
                                                  { return detail::cos_pow(c.azimuth + d, a) * detail::von_mises_scaled(d, sp); },
                                                  w.delta_lo, w.delta_hi, sp);
        const double it = detail::peaked_integral([&](double e)
                                                  { return detail::cos_pow(c.elevation + e, b1) * detail::von_mises_scaled(e, st); },
                                                  w.epsilon_lo, w.epsilon_hi, st);
        return ip * it;
    }

    /// Sum over clusters of P_n times cluster_shape_integral, i.e. the total mass of
    /// the scaled density. Summation order is the cluster order.
    inline double total_scaled_mass(const ScatteringConfig &cfg)
    {
        cfg.validate();
        double total = 0.0;
        for (std::size_t n = 0; n < cfg.clusters.size(); ++n)
            if (cfg.clusters[n].power > 0.0)
                total += cfg.clusters[n].power * cluster_shape_integral(cfg, n);
        if (!(total > 0.0))
            throw ConfigError("normalization: scattering density has zero mass over the front hemisphere.");
        return total;
    }

    /// log of the constant A that makes sum_n of the double integral of A f_n equal to 1.
    inline double log_normalization_constant(const ScatteringConfig &cfg)
    {
        return -std::log(total_scaled_mass(cfg)) - density_log_offset(cfg);
    }

    /// A itself. Underflows to zero for very narrow spreads; prefer the log form.
    inline double normalization_constant(const ScatteringConfig &cfg)
    {
        return std::exp(log_normalization_constant(cfg));
    }

    namespace detail
    {
        // Integral of cos^k over [-pi/2, pi/2].
        inline double cos_power_integral(double k)
        {
            return std::sqrt(pi) * std::tgamma((k + 1.0) / 2.0) / std::tgamma(k / 2.0 + 1.0);
        }
    }

    /// Proportionality constant of the cosine directivity pattern such that
    /// the integral of D(phi, theta) cos(theta) over the front hemisphere is 4 pi.
    inline double directivity_constant(double a, double b)
    {
        if (!(a >= 0.0) || !(b >= 0.0))
            throw ConfigError("directivity exponents must be nonnegative.");
        return 4.0 * pi / (detail::cos_power_integral(a) * detail::cos_power_integral(b + 1.0));
    }

    inline double directivity_gain(Direction dir, double a, double b)
    {
        dir.validated();
        return directivity_constant(a, b) * detail::cos_pow(dir.azimuth, a) * detail::cos_pow(dir.elevation, b);
    }

    /// Parametric cluster generator: exponential power profile P_n ~ exp(-n / decay),
    /// n = 1..count, normalized to unit sum; nominal angles uniform in the given ranges.
    struct ClusterGeneratorSpec
    {
        std::size_t count = 20;
        double decay = 5.0;
        double azimuth_min = -pi / 3.0, azimuth_max = pi / 3.0;
        double elevation_min = -pi / 12.0, elevation_max = pi / 12.0;
    };

    inline std::vector<Cluster> generate_clusters(const ClusterGeneratorSpec &spec, std::uint64_t seed)
    {
        constexpr double half = pi / 2.0;
        if (spec.count == 0)
            throw ConfigError("cluster generator: count must be positive.");
        if (!(spec.decay > 0.0))
            throw ConfigError("cluster generator: decay must be positive.");
        if (!(spec.azimuth_min <= spec.azimuth_max) || !(spec.elevation_min <= spec.elevation_max))
            throw ConfigError("cluster generator: angle ranges must satisfy min <= max.");
        if (!(std::abs(spec.azimuth_min) < half && std::abs(spec.azimuth_max) < half &&
              std::abs(spec.elevation_min) < half && std::abs(spec.elevation_max) < half))
            throw ConfigError("cluster generator: angle ranges must lie strictly inside (-90, 90) degrees.");

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<Cluster> out(spec.count);
        double total = 0.0;
        for (std::size_t n = 0; n < spec.count; ++n)
        {
            out[n].power = std::exp(-double(n + 1) / spec.decay);
            total += out[n].power;
            out[n].azimuth = spec.azimuth_min + (spec.azimuth_max - spec.azimuth_min) * unit(rng);
            out[n].elevation = spec.elevation_min + (spec.elevation_max - spec.elevation_min) * unit(rng);
        }
        for (auto &c : out)
            c.power /= total;
        return out;
    }
}
