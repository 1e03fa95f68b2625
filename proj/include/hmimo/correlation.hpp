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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "array_geometry.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "quadrature.hpp"
#include "scattering.hpp"

namespace hmimo
{
    enum class Provenance : std::uint8_t
    {
        Isotropic = 0,
        ExactClustered = 1,
        ApproxClustered = 2,
        External = 3,
    };

    inline std::string to_string(Provenance p)
    {
        switch (p)
        {
        case Provenance::Isotropic:
            return "isotropic";
        case Provenance::ExactClustered:
            return "exact";
        case Provenance::ApproxClustered:
            return "approx";
        case Provenance::External:
            return "external";
        }
        return "unknown";
    }

    /*
     * Spatial correlation matrix R = E{h h^H} of an M-antenna channel.
     * Hermitian symmetry is enforced on construction: the upper triangle is
     * authoritative, the lower triangle is overwritten by its conjugate and the
     * imaginary parts of the diagonal are dropped.
     */
    class CorrelationMatrix
    {
    public:
        CorrelationMatrix(cmat entries, double gain, Provenance provenance)
            : entries_(std::move(entries)), gain_(gain), provenance_(provenance)
        {
            if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
                throw ShapeError("CorrelationMatrix: entries must be a non-empty square matrix.");
            if (!(gain > 0.0) || !std::isfinite(gain))
                throw ConfigError("CorrelationMatrix: gain must be positive.");
            const Eigen::Index n = entries_.rows();
            for (Eigen::Index m = 0; m < n; ++m)
            {
                entries_(m, m) = entries_(m, m).real();
                for (Eigen::Index l = m + 1; l < n; ++l)
                    entries_(l, m) = std::conj(entries_(m, l));
            }
            if (!entries_.allFinite())
                throw NumericalError("CorrelationMatrix: non-finite entries.");
            if ((entries_.diagonal().real().array() < 0.0).any())
                throw DomainError("CorrelationMatrix: negative diagonal entry.");
        }

        std::size_t size() const { return std::size_t(entries_.rows()); }
        double gain() const { return gain_; }
        Provenance provenance() const { return provenance_; }
        const cmat &entries() const { return entries_; }
        double trace() const { return entries_.diagonal().real().sum(); }

        // 1-based access matching antenna numbering.
        std::complex<double> operator()(std::size_t m, std::size_t l) const
        {
            if (m < 1 || l < 1 || m > size() || l > size())
                throw IndexError("CorrelationMatrix: index out of range.");
            return entries_(Eigen::Index(m - 1), Eigen::Index(l - 1));
        }

    private:
        cmat entries_;
        double gain_;
        Provenance provenance_;
    };

    /*
     * Table of correlation values indexed by the grid offset (p, q) = (i(m) - i(l), j(m) - j(l)).
     * Every model here depends on (m, l) only through this offset. Only the half-plane
     * p > 0, or p == 0 and q >= 0, is stored; the rest follows from R(-p,-q) = conj R(p,q).
     */
    class OffsetTable
    {
    public:
        explicit OffsetTable(const ArrayGeometry &g)
            : m_h_(long(g.m_h())), m_v_(long(g.m_v())), values_(std::size_t(m_h_ * (2 * m_v_ - 1)))
        {
        }

        long max_p() const { return m_h_ - 1; }
        long max_q() const { return m_v_ - 1; }

        static bool stored(long p, long q) { return p > 0 || (p == 0 && q >= 0); }

        std::complex<double> &at(long p, long q) { return values_[slot(p, q)]; }
        const std::complex<double> &at(long p, long q) const { return values_[slot(p, q)]; }

        std::complex<double> lookup(long p, long q) const
        {
            return stored(p, q) ? at(p, q) : std::conj(at(-p, -q));
        }

        // Enumerates the stored offsets in a fixed order.
        std::vector<std::pair<long, long>> offsets() const
        {
            std::vector<std::pair<long, long>> out;
            for (long p = 0; p <= max_p(); ++p)
                for (long q = -max_q(); q <= max_q(); ++q)
                    if (stored(p, q))
                        out.emplace_back(p, q);
            return out;
        }

        void scale(std::complex<double> s)
        {
            for (auto &v : values_)
                v *= s;
        }

        cmat assemble(const ArrayGeometry &g) const
        {
            const auto M = Eigen::Index(g.size());
            const long mh = m_h_;
            cmat R = cmat::Zero(M, M);
            for (Eigen::Index m = 0; m < M; ++m)
            {
                const long im = long(m) % mh, jm = long(m) / mh;
                for (Eigen::Index l = m; l < M; ++l)
                {
                    const long il = long(l) % mh, jl = long(l) / mh;
                    R(m, l) = lookup(im - il, jm - jl);
                }
            }
            return R;
        }

    private:
        std::size_t slot(long p, long q) const { return std::size_t(p * (2 * m_v_ - 1) + (q + m_v_ - 1)); }

        long m_h_, m_v_;
        std::vector<std::complex<double>> values_;
    };

    namespace detail
    {
        inline double sinc(double x)
        {
            if (x == 0.0)
                return 1.0;
            const double px = pi * x;
            return std::sin(px) / px;
        }
    }

    /// Isotropic scattering, isotropic antennas: beta sinc(2 sqrt(d_h^2 + d_v^2)).
    inline CorrelationMatrix build_isotropic(const ArrayGeometry &g, double beta)
    {
        if (!(beta > 0.0))
            throw ConfigError("build_isotropic: beta must be positive.");
        OffsetTable table(g);
        const double r = g.spacing_over_lambda();
        for (auto [p, q] : table.offsets())
        {
            const double dh = double(p) * r, dv = double(q) * r;
            table.at(p, q) = beta * detail::sinc(2.0 * std::sqrt(dh * dh + dv * dv));
        }
        return CorrelationMatrix(table.assemble(g), beta, Provenance::Isotropic);
    }

    struct ExactBuildOptions
    {
        QuadratureSpec quadrature{};
        std::size_t threads = 1;
        // Core panel half-width of the composite rule, in angular standard deviations.
        double core_sigmas = 12.0;
        // |quadrature density integral - 1| allowed before the build is rejected.
        double density_tolerance = 1e-8;
        // Largest allowed change of the farthest-offset entries (relative to the diagonal)
        // when the node counts are doubled.
        double refinement_tolerance = 1e-6;
        bool refinement_check = true;
    };

    /// Diagnostics of an exact build.
    struct ExactBuildReport
    {
        double density_integral = 0.0;     // quadrature of A * sum_n f_n, ideally 1
        double pre_normalization_trace = 0.0;
        double trace_correction = 1.0;     // factor applied to reach trace M beta
        double refinement_deviation = 0.0; // max change at the farthest offsets under node doubling
        std::size_t offsets = 0;
        bool passed = true;
        std::string diagnostic;
    };

    namespace detail
    {
        // Sum over clusters of P_n * (quadrature of scaled density times phase) for
        // every stored offset. Unnormalized: dividing by total_scaled_mass gives R / beta.
        // When `subset` is given only those offsets are evaluated.
        inline OffsetTable clustered_offsets(const ArrayGeometry &g, const ScatteringConfig &cfg,
                                             const QuadratureSpec &quad, const ExactBuildOptions &opt,
                                             const std::vector<std::pair<long, long>> *subset = nullptr)
        {
            OffsetTable table(g);
            const double r = g.spacing_over_lambda();
            const long P = table.max_p() + 1;
            const auto offs = subset ? *subset : table.offsets();
            const double two_pi_r = 2.0 * pi * r;

            for (std::size_t n = 0; n < cfg.clusters.size(); ++n)
            {
                const auto &c = cfg.clusters[n];
                if (c.power <= 0.0)
                    continue;
                if (c.specular)
                {
                    const double mass = c.power * cluster_shape_integral(cfg, n);
                    const double u = std::sin(c.azimuth) * std::cos(c.elevation), v = std::sin(c.elevation);
                    for (auto [p, q] : offs)
                        table.at(p, q) += mass * std::polar(1.0, two_pi_r * (double(p) * u + double(q) * v));
                    continue;
                }

                const auto w = cluster_window(c);
                const Rule1D rd = peaked_rule(quad.nodes_azimuth, w.delta_lo, w.delta_hi, 0.0, opt.core_sigmas * cfg.sigma_azimuth);
                const Rule1D re = peaked_rule(quad.nodes_elevation, w.epsilon_lo, w.epsilon_hi, 0.0, opt.core_sigmas * cfg.sigma_elevation);
                const std::size_t nd = rd.size(), ne = re.size();

                // Separable factors of the scaled density.
                std::vector<double> fd(nd), sin_az(nd);
                for (std::size_t i = 0; i < nd; ++i)
                {
                    fd[i] = rd.weights[i] * cos_pow(c.azimuth + rd.nodes[i], cfg.directivity_a) *
                            von_mises_scaled(rd.nodes[i], cfg.sigma_azimuth);
                    sin_az[i] = std::sin(c.azimuth + rd.nodes[i]);
                }
                std::vector<double> fe(ne), cos_el(ne), sin_el(ne);
                for (std::size_t j = 0; j < ne; ++j)
                {
                    fe[j] = c.power * re.weights[j] * cos_pow(c.elevation + re.nodes[j], cfg.directivity_b + 1.0) *
                            von_mises_scaled(re.nodes[j], cfg.sigma_elevation);
                    cos_el[j] = std::cos(c.elevation + re.nodes[j]);
                    sin_el[j] = std::sin(c.elevation + re.nodes[j]);
                }

                // inner[j][p] = fe_j * sum_i fd_i exp(i 2 pi p r sin(phi) cos(theta_j))
                std::vector<std::complex<double>> inner(ne * std::size_t(P));
                parallel_for(ne, opt.threads, [&](std::size_t j)
                             {
                    for (long p = 0; p < P; ++p)
                    {
                        std::complex<double> acc = 0.0;
                        const double k = two_pi_r * double(p) * cos_el[j];
                        for (std::size_t i = 0; i < nd; ++i)
                            acc += fd[i] * std::polar(1.0, k * sin_az[i]);
                        inner[j * std::size_t(P) + std::size_t(p)] = fe[j] * acc;
                    } });

                // table(p, q) += sum_j inner[j][p] exp(i 2 pi q r sin(theta_j))
                std::vector<std::complex<double>> contrib(offs.size());
                parallel_for(offs.size(), opt.threads, [&](std::size_t k)
                             {
                    const auto [p, q] = offs[k];
                    std::complex<double> acc = 0.0;
                    for (std::size_t j = 0; j < ne; ++j)
                        acc += inner[j * std::size_t(P) + std::size_t(p)] * std::polar(1.0, two_pi_r * double(q) * sin_el[j]);
                    contrib[k] = acc; });
                for (std::size_t k = 0; k < offs.size(); ++k)
                    table.at(offs[k].first, offs[k].second) += contrib[k];
            }
            return table;
        }
    }

    /*
     * Exact clustered correlation matrix by tensor-product Gauss-Legendre quadrature
     * of each cluster's deviation window. One integral per distinct antenna offset.
     *
     * Self-checks: the quadrature of the normalized density must be 1 within
     * density_tolerance, and the farthest-offset entries must be stable under node
     * doubling. Failure throws AccuracyError. The result is scaled so that the trace
     * equals M beta; the correction factor is recorded in the report.
     */
    inline CorrelationMatrix build_exact_clustered(const ArrayGeometry &g, const ScatteringConfig &cfg,
                                                   const ExactBuildOptions &opt = {}, ExactBuildReport *report = nullptr)
    {
        cfg.validate();
        if (opt.quadrature.nodes_azimuth < 2 || opt.quadrature.nodes_elevation < 2)
            throw ConfigError("build_exact_clustered: at least 2 quadrature nodes per dimension are required.");

        const double mass = total_scaled_mass(cfg);
        OffsetTable table = detail::clustered_offsets(g, cfg, opt.quadrature, opt);

        ExactBuildReport rep;
        rep.offsets = table.offsets().size();
        const double diag = table.at(0, 0).real();
        rep.density_integral = diag / mass;
        rep.pre_normalization_trace = double(g.size()) * cfg.gain * rep.density_integral;

        std::ostringstream diag_msg;
        diag_msg.precision(6);
        if (!(std::abs(rep.density_integral - 1.0) <= opt.density_tolerance))
        {
            rep.passed = false;
            diag_msg << "density integral " << std::scientific << rep.density_integral
                     << " deviates from 1 by more than " << opt.density_tolerance << "; ";
        }

        if (opt.refinement_check && (table.max_p() > 0 || table.max_q() > 0))
        {
            const long P = table.max_p(), Q = table.max_q();
            std::vector<std::pair<long, long>> probes{{0, 0}};
            for (auto pq : {std::pair{P, Q}, std::pair{P, -Q}, std::pair{P, 0L}, std::pair{0L, Q}})
                if (OffsetTable::stored(pq.first, pq.second) && pq != std::pair{0L, 0L} &&
                    std::find(probes.begin(), probes.end(), pq) == probes.end())
                    probes.push_back(pq);
            const QuadratureSpec fine{2 * opt.quadrature.nodes_azimuth, 2 * opt.quadrature.nodes_elevation};
            const OffsetTable refined = detail::clustered_offsets(g, cfg, fine, opt, &probes);
            const double fine_diag = refined.at(0, 0).real();
            for (auto [p, q] : probes)
            {
                const double dev = std::abs(table.at(p, q) / diag - refined.at(p, q) / fine_diag);
                rep.refinement_deviation = std::max(rep.refinement_deviation, dev);
            }
            if (!(rep.refinement_deviation <= opt.refinement_tolerance))
            {
                rep.passed = false;
                diag_msg << "farthest-offset entries change by " << std::scientific << rep.refinement_deviation
                         << " under node doubling (tolerance " << opt.refinement_tolerance << "); ";
            }
        }

        rep.diagnostic = diag_msg.str();
        if (report)
            *report = rep;
        if (!rep.passed)
            throw AccuracyError("build_exact_clustered: quadrature self-check failed with " +
                                std::to_string(opt.quadrature.nodes_azimuth) + "x" +
                                std::to_string(opt.quadrature.nodes_elevation) + " nodes: " + rep.diagnostic +
                                "increase the quadrature order.");

        table.scale(cfg.gain / diag);
        rep.trace_correction = 1.0 / rep.density_integral;
        if (report)
            *report = rep;
        return CorrelationMatrix(table.assemble(g), cfg.gain, Provenance::ExactClustered);
    }

    /*
     * Closed-form small-deviation approximation of the clustered model. Per offset
     * and cluster the entry is built from the phase anchor A, the linearized phase
     * slopes B, C, D, the effective spread sigma~^2 = sigma_phi^2 / (1 + C^2 sigma_phi^2 sigma_theta^2)
     * and the first-order directivity terms X, Y.
     */
    inline CorrelationMatrix build_approx_clustered(const ArrayGeometry &g, const ScatteringConfig &cfg)
    {
        cfg.validate();
        if (cfg.has_specular())
            throw UnsupportedModelError("build_approx_clustered: specular clusters are not supported by the "
                                        "closed-form approximation; use build_exact_clustered.");

        struct ClusterConst
        {
            double power, cp, sp, ct, st;
            double cos_a, cos_b, cos_b1;
            double a_cos_am1; // a cos^{a-1}(phi_n), zero when a == 0
        };
        const double a = cfg.directivity_a, b = cfg.directivity_b;
        std::vector<ClusterConst> cc;
        double denom = 0.0;
        for (const auto &c : cfg.clusters)
        {
            ClusterConst k{};
            k.power = c.power;
            k.cp = std::cos(c.azimuth);
            k.sp = std::sin(c.azimuth);
            k.ct = std::cos(c.elevation);
            k.st = std::sin(c.elevation);
            k.cos_a = detail::cos_pow(c.azimuth, a);
            k.cos_b = detail::cos_pow(c.elevation, b);
            k.cos_b1 = detail::cos_pow(c.elevation, b + 1.0);
            k.a_cos_am1 = a == 0.0 ? 0.0 : a * std::pow(k.cp, a - 1.0);
            denom += c.power * k.cos_a * k.cos_b1;
            cc.push_back(k);
        }
        if (!(denom > 0.0))
            throw DomainError("build_approx_clustered: zero total directivity-weighted power.");

        const double sp2 = cfg.sigma_azimuth * cfg.sigma_azimuth;
        const double st2 = cfg.sigma_elevation * cfg.sigma_elevation;
        const double r = g.spacing_over_lambda();
        const std::complex<double> I(0.0, 1.0);

        OffsetTable table(g);
        for (auto [p, q] : table.offsets())
        {
            const double dh = double(p) * r, dv = double(q) * r;
            std::complex<double> sum = 0.0;
            for (const auto &k : cc)
            {
                if (k.power == 0.0)
                    continue;
                const std::complex<double> A = std::polar(1.0, 2.0 * pi * (dh * k.sp * k.ct + dv * k.st));
                const double B = 2.0 * pi * dh * k.cp * k.ct;
                const double C = -2.0 * pi * dh * k.cp * k.st;
                const double D = -2.0 * pi * dh * k.sp * k.st + 2.0 * pi * dv * k.ct;
                const double s2 = sp2 / (1.0 + C * C * sp2 * st2);

                const std::complex<double> X = k.cos_a * (k.cos_b1 - I * (b + 1.0) * k.cos_b * k.st * st2 * D);
                const std::complex<double> Y = k.a_cos_am1 * k.sp * k.cos_b1 +
                                               I * st2 * (b + 1.0) * k.cos_b * k.st * (k.cos_a * C - k.a_cos_am1 * k.sp * D);

                const double magnitude = std::sqrt(s2 / sp2) * std::exp(-B * B * s2 / 2.0) *
                                         std::exp(D * D * st2 * (C * C * st2 * s2 - 1.0) / 2.0);
                const std::complex<double> rotation = std::polar(1.0, -B * C * D * st2 * s2);
                const std::complex<double> directivity = X - Y * (I * B * s2 - C * D * st2 * s2);
                sum += k.power * A * magnitude * rotation * directivity;
            }
            table.at(p, q) = cfg.gain * sum / denom;
        }
        return CorrelationMatrix(table.assemble(g), cfg.gain, Provenance::ApproxClustered);
    }

    /// 1 - tr(R1 R2) / (|R1|_F |R2|_F), in [0, 1] for PSD inputs.
    inline double correlation_matrix_distance(const CorrelationMatrix &r1, const CorrelationMatrix &r2)
    {
        if (r1.size() != r2.size())
            throw ShapeError("correlation_matrix_distance: dimension mismatch.");
        const double n1 = r1.entries().norm(), n2 = r2.entries().norm();
        if (n1 == 0.0 || n2 == 0.0)
            throw DomainError("correlation_matrix_distance: zero matrix.");
        // tr(R1 R2) = sum_ml R1(m,l) conj(R2(m,l)) for Hermitian R2
        const double tr = (r1.entries().array() * r2.entries().conjugate().array()).sum().real();
        return std::clamp(1.0 - tr / (n1 * n2), 0.0, 1.0);
    }
}
