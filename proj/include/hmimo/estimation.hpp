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
#include <cstddef>
#include <optional>
#include <string>

#include "correlation.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace hmimo
{
    enum class Estimator
    {
        MMSE,
        LS,
        RSLS,
        ConservativeRSLS,
    };

    inline std::string to_string(Estimator e)
    {
        switch (e)
        {
        case Estimator::MMSE:
            return "MMSE";
        case Estimator::LS:
            return "LS";
        case Estimator::RSLS:
            return "RSLS";
        case Estimator::ConservativeRSLS:
            return "ConservativeRSLS";
        }
        return "unknown";
    }

    inline Estimator parse_estimator(const std::string &name)
    {
        if (name == "MMSE")
            return Estimator::MMSE;
        if (name == "LS")
            return Estimator::LS;
        if (name == "RSLS" || name == "RS-LS")
            return Estimator::RSLS;
        if (name == "ConservativeRSLS" || name == "IsotropicRSLS" || name == "Isotropic-RS-LS")
            return Estimator::ConservativeRSLS;
        throw ConfigError("unknown estimator '" + name + "'.");
    }

    /// Orthonormal column basis (M x r). Orthonormality is verified once on construction.
    class Subspace
    {
    public:
        explicit Subspace(cmat columns, double tolerance = 1e-8) : basis_(std::move(columns))
        {
            if (basis_.cols() > basis_.rows())
                throw ShapeError("Subspace: more columns than rows.");
            const cmat gram = basis_.adjoint() * basis_;
            const double dev = (gram - cmat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
            if (basis_.cols() > 0 && !(dev <= tolerance))
                throw ContractViolation("Subspace: columns are not orthonormal (Gram deviation " + std::to_string(dev) + ").");
        }

        static Subspace leading(const EigenBasis &basis, std::size_t r) { return Subspace(cmat(basis.leading(r))); }

        const cmat &basis() const { return basis_; }
        std::size_t rank() const { return std::size_t(basis_.cols()); }
        std::size_t dimension() const { return std::size_t(basis_.rows()); }

    private:
        cmat basis_;
    };

    struct PilotObservation
    {
        cvec y;
        double snr = 1.0; // linear
    };

    struct ChannelEstimate
    {
        cvec h_hat;
        Estimator estimator = Estimator::LS;
    };

    namespace detail
    {
        inline void check_snr(double snr)
        {
            if (!(snr > 0.0) || !std::isfinite(snr))
                throw ConfigError("pilot SNR must be positive and finite.");
        }
    }

    /// h = U_1 Lambda_1^{1/2} v, v ~ CN(0, I_r), r = numerical rank.
    inline cvec sample_channel(const EigenBasis &basis, Rng &rng)
    {
        const auto r = Eigen::Index(basis.numerical_rank);
        const cvec v = rng.complex_normal(r);
        const rvec scale = basis.eigenvalues.head(r).cwiseSqrt();
        return basis.leading(std::size_t(r)) * scale.cast<std::complex<double>>().cwiseProduct(v);
    }

    /// y = sqrt(snr) h + n, n ~ CN(0, I).
    inline PilotObservation observe_pilot(const cvec &h, double snr, Rng &rng)
    {
        detail::check_snr(snr);
        return {std::sqrt(snr) * h + rng.complex_normal(h.size()), snr};
    }

    /*
     * MMSE estimate computed in the eigenbasis: project onto U_1, scale each
     * coordinate by snr lambda_i / (snr lambda_i + 1) / sqrt(snr), lift back.
     */
    inline ChannelEstimate estimate_mmse(const PilotObservation &obs, const EigenBasis &basis)
    {
        detail::check_snr(obs.snr);
        if (std::size_t(obs.y.size()) != basis.size())
            throw ShapeError("estimate_mmse: observation and basis dimensions differ.");
        const std::size_t r = basis.numerical_rank;
        const auto U = basis.leading(r);
        const rvec lam = basis.eigenvalues.head(Eigen::Index(r));
        const rvec d = ((obs.snr * lam.array()) / (obs.snr * lam.array() + 1.0) / std::sqrt(obs.snr)).matrix();
        const cvec coords = U.adjoint() * obs.y;
        return {U * d.cast<std::complex<double>>().cwiseProduct(coords), Estimator::MMSE};
    }

    /// Direct form sqrt(snr) R (snr R + I)^{-1} y via an LU solve. O(M^3); test oracle only.
    inline cvec estimate_mmse_direct(const PilotObservation &obs, const CorrelationMatrix &R)
    {
        detail::check_snr(obs.snr);
        const cmat &A = R.entries();
        const cmat system = obs.snr * A + cmat::Identity(A.rows(), A.cols());
        return std::sqrt(obs.snr) * (A * system.partialPivLu().solve(obs.y));
    }

    inline ChannelEstimate estimate_ls(const PilotObservation &obs)
    {
        detail::check_snr(obs.snr);
        return {obs.y / std::sqrt(obs.snr), Estimator::LS};
    }

    /// LS restricted to span(U): U U^H y / sqrt(snr).
    inline ChannelEstimate estimate_rsls(const PilotObservation &obs, const Subspace &subspace)
    {
        detail::check_snr(obs.snr);
        if (std::size_t(obs.y.size()) != subspace.dimension())
            throw ShapeError("estimate_rsls: observation and subspace dimensions differ.");
        const cmat &U = subspace.basis();
        return {U * (U.adjoint() * obs.y) / std::sqrt(obs.snr), Estimator::RSLS};
    }

    /// RS-LS with a user-agnostic container subspace (e.g. the isotropic basis of the array).
    inline ChannelEstimate estimate_conservative_rsls(const PilotObservation &obs, const Subspace &container)
    {
        auto est = estimate_rsls(obs, container);
        est.estimator = Estimator::ConservativeRSLS;
        return est;
    }

    struct AnalyticOptions
    {
        // RS-LS subspace dimension; defaults to the numerical rank of the true basis.
        std::optional<std::size_t> rank;
        // Conservative RS-LS: container dimension and the measured containment residual
        // of the true channel subspace inside the container.
        std::optional<std::size_t> container_rank;
        std::optional<double> containment_residual;
        double containment_tolerance = 1e-5;
    };

    /*
     * Closed-form NMSE, E|h - h_hat|^2 / tr(R), for pilot SNR `snr` (linear):
     *   MMSE:   sum_i lambda_i / (snr lambda_i + 1) / tr(R)
     *   LS:     M / (snr tr(R))
     *   RS-LS:  (r / snr + sum_{i > r} lambda_i) / tr(R)   (tail term vanishes at the numerical rank)
     *   conservative RS-LS: r_bar / (snr tr(R)), valid only when the containment residual is within tolerance.
     */
    inline double analytic_nmse(Estimator estimator, const EigenBasis &truth, double snr, const AnalyticOptions &opt = {})
    {
        detail::check_snr(snr);
        const double tr = truth.source_trace;
        if (!(tr > 0.0))
            throw DomainError("analytic_nmse: correlation matrix has zero trace.");
        const double M = double(truth.size());
        switch (estimator)
        {
        case Estimator::MMSE:
        {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < truth.eigenvalues.size(); ++i)
                acc += truth.eigenvalues(i) / (snr * truth.eigenvalues(i) + 1.0);
            return acc / tr;
        }
        case Estimator::LS:
            return M / (snr * tr);
        case Estimator::RSLS:
        {
            const std::size_t r = opt.rank.value_or(truth.numerical_rank);
            if (r > truth.size())
                throw IndexError("analytic_nmse: rank exceeds dimension.");
            const double tail = truth.eigenvalues.tail(Eigen::Index(truth.size() - r)).sum();
            return (double(r) / snr + tail) / tr;
        }
        case Estimator::ConservativeRSLS:
        {
            if (!opt.container_rank)
                throw OracleInvalidError("analytic_nmse: conservative RS-LS needs the container rank.");
            if (!opt.containment_residual || !(*opt.containment_residual <= opt.containment_tolerance))
                throw OracleInvalidError("analytic_nmse: containment of the channel subspace in the container "
                                         "is not established within tolerance.");
            if (*opt.container_rank > truth.size())
                throw IndexError("analytic_nmse: container rank exceeds dimension.");
            return double(*opt.container_rank) / (snr * tr);
        }
        }
        throw ConfigError("analytic_nmse: unknown estimator.");
    }
}
