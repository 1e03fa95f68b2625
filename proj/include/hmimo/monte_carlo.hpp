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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "estimation.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace hmimo
{
    struct NmseRecord
    {
        Estimator estimator = Estimator::LS;
        double snr_db = 0.0;
        double nmse_mc = 0.0;
        double nmse_ci95 = 0.0; // half-width
        std::optional<double> nmse_analytic;
        std::size_t trials = 0;
    };

    struct SweepSpec
    {
        std::vector<double> snr_grid_db;
        std::vector<Estimator> estimators{Estimator::MMSE, Estimator::LS, Estimator::RSLS, Estimator::ConservativeRSLS};
        std::size_t trials = 1000;
        std::uint64_t seed = 0;
        std::size_t threads = 1;
        std::size_t rsls_rank = 0;      // columns of the true basis used by RS-LS
        std::size_t container_rank = 0; // columns of the container basis used by conservative RS-LS
        double containment_tolerance = 1e-5;
    };

    struct SweepResult
    {
        std::vector<NmseRecord> records; // estimator-major, SNR-minor, in sweep order
        std::vector<std::string> warnings;
        double containment_residual = 0.0;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

    /// Squared estimation errors of all four estimators for one channel/noise draw.
    /// Uses |h - Q c|^2 = |h|^2 - 2 Re(c^H Q^H h) + |c|^2 for orthonormal Q, so the
    /// per-SNR cost is O(r) once the projections of h and n are known.
    struct TrialProjections
    {
        double h_energy = 0.0, n_energy = 0.0;
        cvec truth_h, truth_n;         // U_num^H h, U_num^H n
        cvec rsls_h, rsls_n;           // U_r^H h, U_r^H n
        cvec container_h, container_n; // Ub^H h, Ub^H n

        double ls(double snr) const { return n_energy / snr; }

        double rsls(double snr) const { return projection_error(rsls_h, rsls_n, snr); }
        double conservative(double snr) const { return projection_error(container_h, container_n, snr); }

        double mmse(double snr, const rvec &lambda) const
        {
            const double root = std::sqrt(snr);
            double cross = 0.0, coeff_energy = 0.0;
            for (Eigen::Index i = 0; i < truth_h.size(); ++i)
            {
                const double d = snr * lambda(i) / (snr * lambda(i) + 1.0);
                const std::complex<double> c = d * (truth_h(i) + truth_n(i) / root);
                cross += (std::conj(c) * truth_h(i)).real();
                coeff_energy += std::norm(c);
            }
            return std::max(0.0, h_energy - 2.0 * cross + coeff_energy);
        }

    private:
        double projection_error(const cvec &ph, const cvec &pn, double snr) const
        {
            return std::max(0.0, h_energy - ph.squaredNorm()) + pn.squaredNorm() / snr;
        }
    };

    /// Channel and noise for trial `t`: h from the true basis, then n ~ CN(0, I).
    inline std::pair<cvec, cvec> draw_trial(const EigenBasis &truth, std::uint64_t seed, std::uint64_t t)
    {
        Rng rng = Rng::for_trial(seed, t);
        cvec h = sample_channel(truth, rng);
        cvec n = rng.complex_normal(Eigen::Index(truth.size()));
        return {std::move(h), std::move(n)};
    }

    /*
     * Monte Carlo NMSE sweep. Every trial draws one channel and one unit-variance
     * noise vector and reuses them across the SNR grid. Per-trial errors go to fixed
     * slots and are reduced in trial order, so results do not depend on `threads`.
     */
    inline SweepResult run_nmse_monte_carlo(const EigenBasis &truth, const EigenBasis &container, const SweepSpec &spec)
    {
        if (spec.snr_grid_db.empty())
            throw ConfigError("nmse sweep: SNR grid is empty.");
        for (std::size_t k = 1; k < spec.snr_grid_db.size(); ++k)
            if (!(spec.snr_grid_db[k] > spec.snr_grid_db[k - 1]))
                throw ConfigError("nmse sweep: SNR grid must be strictly increasing.");
        if (spec.trials == 0)
            throw ConfigError("nmse sweep: trials must be at least 1.");
        if (truth.size() != container.size())
            throw ShapeError("nmse sweep: true and container bases differ in dimension.");
        if (spec.rsls_rank > truth.size() || spec.container_rank > container.size())
            throw IndexError("nmse sweep: subspace rank exceeds dimension.");

        const std::size_t S = spec.snr_grid_db.size(), E = spec.estimators.size(), T = spec.trials;
        const double tr = truth.source_trace;
        const auto U_num = truth.leading(truth.numerical_rank);
        const auto U_r = truth.leading(spec.rsls_rank);
        const auto U_c = container.leading(spec.container_rank);
        const rvec lambda = truth.eigenvalues.head(Eigen::Index(truth.numerical_rank));

        std::vector<double> snr(S);
        for (std::size_t s = 0; s < S; ++s)
            snr[s] = db_to_linear(spec.snr_grid_db[s]);

        std::vector<double> errors(T * E * S);
        parallel_for(T, spec.threads, [&](std::size_t t)
                     {
            auto [h, n] = draw_trial(truth, spec.seed, t);
            TrialProjections p;
            p.h_energy = h.squaredNorm();
            p.n_energy = n.squaredNorm();
            p.truth_h = U_num.adjoint() * h;
            p.truth_n = U_num.adjoint() * n;
            p.rsls_h = U_r.adjoint() * h;
            p.rsls_n = U_r.adjoint() * n;
            p.container_h = U_c.adjoint() * h;
            p.container_n = U_c.adjoint() * n;
            for (std::size_t e = 0; e < E; ++e)
                for (std::size_t s = 0; s < S; ++s)
                {
                    double err = 0.0;
                    switch (spec.estimators[e])
                    {
                    case Estimator::MMSE: err = p.mmse(snr[s], lambda); break;
                    case Estimator::LS: err = p.ls(snr[s]); break;
                    case Estimator::RSLS: err = p.rsls(snr[s]); break;
                    case Estimator::ConservativeRSLS: err = p.conservative(snr[s]); break;
                    }
                    errors[(t * E + e) * S + s] = err / tr;
                }
        });

        SweepResult result;
        const std::size_t contained = truth.effective_rank;
        result.containment_residual = subspace_containment_residual(container, truth, spec.container_rank, contained);

        bool warned = false;
        for (std::size_t e = 0; e < E; ++e)
            for (std::size_t s = 0; s < S; ++s)
            {
                double sum = 0.0;
                for (std::size_t t = 0; t < T; ++t)
                    sum += errors[(t * E + e) * S + s];
                const double mean = sum / double(T);
                double ss = 0.0;
                for (std::size_t t = 0; t < T; ++t)
                {
                    const double d = errors[(t * E + e) * S + s] - mean;
                    ss += d * d;
                }
                const double sd = T > 1 ? std::sqrt(ss / double(T - 1)) : 0.0;

                NmseRecord rec;
                rec.estimator = spec.estimators[e];
                rec.snr_db = spec.snr_grid_db[s];
                rec.nmse_mc = mean;
                rec.nmse_ci95 = 1.96 * sd / std::sqrt(double(T));
                rec.trials = T;

                AnalyticOptions opt;
                opt.rank = spec.rsls_rank;
                opt.container_rank = spec.container_rank;
                opt.containment_residual = result.containment_residual;
                opt.containment_tolerance = spec.containment_tolerance;
                try
                {
                    rec.nmse_analytic = analytic_nmse(rec.estimator, truth, snr[s], opt);
                }
                catch (const OracleInvalidError &err)
                {
                    if (!warned)
                        result.warnings.push_back(std::string("analytic ConservativeRSLS omitted: containment residual ") +
                                                  std::to_string(result.containment_residual) + " exceeds tolerance " +
                                                  std::to_string(spec.containment_tolerance) + " (" + err.what() + ")");
                    warned = true;
                }
                result.records.push_back(rec);
            }
        return result;
    }
}
