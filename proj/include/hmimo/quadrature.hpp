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
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace hmimo
{
    // Node counts of the tensor-product rule used per cluster window.
    struct QuadratureSpec
    {
        std::size_t nodes_azimuth = 96;
        std::size_t nodes_elevation = 96;
    };

    struct Rule1D
    {
        std::vector<double> nodes;
        std::vector<double> weights;

        std::size_t size() const { return nodes.size(); }

        void append(const Rule1D &other)
        {
            nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
            weights.insert(weights.end(), other.weights.begin(), other.weights.end());
        }
    };

    /*
     * n-point Gauss-Legendre rule on [-1, 1]. Nodes are the roots of P_n found by
     * Newton iteration from the Tricomi initial guess; weights 2 / ((1 - x^2) P_n'(x)^2).
     * Nodes are returned in increasing order.
     */
    inline Rule1D gauss_legendre(std::size_t n)
    {
        if (n == 0)
            throw ConfigError("gauss_legendre: need at least one node.");

        Rule1D rule;
        rule.nodes.assign(n, 0.0);
        rule.weights.assign(n, 0.0);
        const std::size_t half = (n + 1) / 2;
        const double nd = double(n);

        for (std::size_t k = 0; k < half; ++k)
        {
            double x = std::cos(std::numbers::pi * (double(k) + 0.75) / (nd + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter)
            {
                double p0 = 1.0, p1 = x;
                for (std::size_t j = 2; j <= n; ++j)
                {
                    const double p2 = ((2.0 * double(j) - 1.0) * x * p1 - (double(j) - 1.0) * p0) / double(j);
                    p0 = p1;
                    p1 = p2;
                }
                dp = nd * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16)
                    break;
            }
            // Recompute the derivative at the converged root.
            double p0 = 1.0, p1 = x;
            for (std::size_t j = 2; j <= n; ++j)
            {
                const double p2 = ((2.0 * double(j) - 1.0) * x * p1 - (double(j) - 1.0) * p0) / double(j);
                p0 = p1;
                p1 = p2;
            }
            dp = (n == 1) ? 1.0 : nd * (x * p1 - p0) / (x * x - 1.0);
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);

            rule.nodes[k] = -x;
            rule.nodes[n - 1 - k] = x;
            rule.weights[k] = w;
            rule.weights[n - 1 - k] = w;
        }
        if (n % 2 == 1)
            rule.nodes[n / 2] = 0.0;
        return rule;
    }

    // Gauss-Legendre rule mapped to [lo, hi].
    inline Rule1D gauss_legendre(std::size_t n, double lo, double hi)
    {
        Rule1D rule = gauss_legendre(n);
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t k = 0; k < n; ++k)
        {
            rule.nodes[k] = mid + half * rule.nodes[k];
            rule.weights[k] *= half;
        }
        return rule;
    }

    /*
     * Composite Gauss-Legendre rule on [lo, hi] for integrands concentrated around
     * `center` with width `halfwidth`. The core panel [center - halfwidth, center + halfwidth]
     * (clipped to the interval) receives `n` nodes; the remaining tails get
     * max(8, n / 8) nodes each. When the core covers the interval this is a plain
     * n-point rule.
     */
    inline Rule1D peaked_rule(std::size_t n, double lo, double hi, double center, double halfwidth)
    {
        if (!(hi > lo))
            throw ConfigError("peaked_rule: empty interval.");
        const double core_lo = std::max(lo, center - halfwidth);
        const double core_hi = std::min(hi, center + halfwidth);
        const std::size_t tail_nodes = std::max<std::size_t>(8, n / 8);
        // Tails narrower than this carry nothing of interest and only cost nodes.
        const double min_tail = 1e-12 * (hi - lo);

        Rule1D rule;
        if (core_lo - lo > min_tail)
            rule.append(gauss_legendre(tail_nodes, lo, core_lo));
        rule.append(gauss_legendre(n, core_lo, core_hi));
        if (hi - core_hi > min_tail)
            rule.append(gauss_legendre(tail_nodes, core_hi, hi));
        return rule;
    }
}
