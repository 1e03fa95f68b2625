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
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "array_geometry.hpp"
#include "correlation.hpp"
#include "errors.hpp"

namespace hmimo
{
    struct SpectralOptions
    {
        // lambda_i > rank_threshold * lambda_max counts as nonzero.
        double rank_threshold = 1e-12;
        // Effective rank keeps a fraction 1 - energy_complement of the eigenvalue sum.
        double energy_complement = 1e-5;
    };

    /*
     * Full Hermitian eigendecomposition R = U diag(lambda) U^H with eigenvalues in
     * descending order and negative rounding dust clamped to zero. The compact basis
     * of the analysis is a view over the leading columns.
     */
    struct EigenBasis
    {
        rvec eigenvalues;
        cmat eigenvectors;
        std::size_t numerical_rank = 0;
        std::size_t effective_rank = 0;
        double source_trace = 0.0;
        double min_raw_eigenvalue = 0.0; // before clamping, for PSD diagnostics

        std::size_t size() const { return std::size_t(eigenvalues.size()); }
        double max_eigenvalue() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }

        // First r eigenvectors.
        auto leading(std::size_t r) const
        {
            if (r > size())
                throw IndexError("EigenBasis::leading: rank exceeds dimension.");
            return eigenvectors.leftCols(Eigen::Index(r));
        }
    };

    /// Smallest k such that the k largest eigenvalues hold a fraction 1 - complement of the total.
    inline std::size_t effective_rank(const rvec &sorted_eigenvalues, double complement = 1e-5)
    {
        if (!(complement > 0.0 && complement < 1.0))
            throw ConfigError("effective_rank: fraction complement must lie in (0, 1).");
        const double total = sorted_eigenvalues.sum();
        if (!(total > 0.0))
            return 0;
        const double target = (1.0 - complement) * total;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < sorted_eigenvalues.size(); ++k)
        {
            acc += sorted_eigenvalues(k);
            if (acc >= target)
                return std::size_t(k + 1);
        }
        return std::size_t(sorted_eigenvalues.size());
    }

    inline std::size_t effective_rank(const EigenBasis &basis, double complement = 1e-5)
    {
        return effective_rank(basis.eigenvalues, complement);
    }

    inline std::size_t numerical_rank(const rvec &sorted_eigenvalues, double threshold = 1e-12)
    {
        if (sorted_eigenvalues.size() == 0)
            return 0;
        const double cut = threshold * sorted_eigenvalues(0);
        std::size_t r = 0;
        while (r < std::size_t(sorted_eigenvalues.size()) && sorted_eigenvalues(Eigen::Index(r)) > cut)
            ++r;
        return r;
    }

    inline EigenBasis eigendecompose(const CorrelationMatrix &R, const SpectralOptions &opt = {})
    {
        const cmat &A = R.entries();
        const Eigen::Index n = A.rows();
        rvec values;
        cmat vectors;

        // Real symmetric matrices (isotropic model) take the cheaper real solver.
        if (A.imag().cwiseAbs().maxCoeff() == 0.0)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.real());
            if (es.info() != Eigen::Success)
                throw NumericalError("eigendecompose: real symmetric solver did not converge (M = " + std::to_string(n) + ").");
            values = es.eigenvalues();
            vectors = es.eigenvectors().cast<std::complex<double>>();
        }
        else
        {
            Eigen::SelfAdjointEigenSolver<cmat> es(A);
            if (es.info() != Eigen::Success)
                throw NumericalError("eigendecompose: Hermitian solver did not converge (M = " + std::to_string(n) +
                                     ", |R|_F = " + std::to_string(A.norm()) + ").");
            values = es.eigenvalues();
            vectors = es.eigenvectors();
        }

        EigenBasis basis;
        basis.source_trace = R.trace();
        basis.min_raw_eigenvalue = values.size() ? values(0) : 0.0;
        basis.eigenvalues = values.reverse().cwiseMax(0.0);
        basis.eigenvectors = vectors.rowwise().reverse();
        basis.numerical_rank = numerical_rank(basis.eigenvalues, opt.rank_threshold);
        basis.effective_rank = effective_rank(basis.eigenvalues, opt.energy_complement);
        return basis;
    }

    /// Asymptotic rank-to-dimension ratio of the isotropic model, min(1, pi (spacing / lambda)^2).
    inline double rank_fraction_prediction(const ArrayGeometry &g)
    {
        const double r = g.spacing_over_lambda();
        return std::min(1.0, pi * r * r);
    }

    /*
     * Mean energy per dimension of the first `contained_rank` columns of `contained`
     * that falls outside the span of the first `container_rank` columns of `container`:
     * |(I - Ub Ub^H) U|_F^2 / r. Zero iff the subspace is contained.
     */
    inline double subspace_containment_residual(const EigenBasis &container, const EigenBasis &contained,
                                                std::size_t container_rank, std::size_t contained_rank)
    {
        if (container.size() != contained.size())
            throw ShapeError("subspace_containment_residual: dimension mismatch.");
        if (container_rank > container.size() || contained_rank > contained.size())
            throw IndexError("subspace_containment_residual: rank exceeds dimension.");
        if (contained_rank == 0)
            return 0.0;
        const auto Ub = container.leading(container_rank);
        const auto U = contained.leading(contained_rank);
        const cmat leak = U - Ub * (Ub.adjoint() * U);
        return leak.squaredNorm() / double(contained_rank);
    }

    /// Invariant checks on a built correlation matrix.
    struct MatrixInvariants
    {
        bool hermitian = true;
        bool diagonal_real_nonnegative = true;
        double min_eigenvalue_ratio = 0.0; // lambda_min / lambda_max
        double trace_relative_error = 0.0; // |tr R - M beta| / (M beta)

        bool holds(double psd_tolerance = 1e-10, double trace_tolerance = 1e-8) const
        {
            return hermitian && diagonal_real_nonnegative && min_eigenvalue_ratio >= -psd_tolerance &&
                   trace_relative_error <= trace_tolerance;
        }
    };

    inline MatrixInvariants check_invariants(const CorrelationMatrix &R, const EigenBasis &basis)
    {
        MatrixInvariants inv;
        const cmat &A = R.entries();
        for (Eigen::Index m = 0; m < A.rows(); ++m)
        {
            if (A(m, m).imag() != 0.0 || A(m, m).real() < 0.0)
                inv.diagonal_real_nonnegative = false;
            for (Eigen::Index l = m + 1; l < A.cols(); ++l)
                if (A(l, m) != std::conj(A(m, l)))
                    inv.hermitian = false;
        }
        inv.min_eigenvalue_ratio = basis.max_eigenvalue() > 0.0 ? basis.min_raw_eigenvalue / basis.max_eigenvalue() : 0.0;
        const double expected = double(R.size()) * R.gain();
        inv.trace_relative_error = std::abs(R.trace() - expected) / expected;
        return inv;
    }

    /// Spectrum table: index (1-based), eigenvalue, cumulative energy fraction.
    inline void write_spectrum_csv(std::ostream &os, const EigenBasis &basis)
    {
        os << "index,eigenvalue,cum_energy_fraction\n";
        const double total = basis.eigenvalues.sum();
        double acc = 0.0;
        const auto old_precision = os.precision(17);
        for (Eigen::Index k = 0; k < basis.eigenvalues.size(); ++k)
        {
            acc += basis.eigenvalues(k);
            os << (k + 1) << ',' << basis.eigenvalues(k) << ',' << (total > 0.0 ? acc / total : 0.0) << '\n';
        }
        os.precision(old_precision);
    }
}
