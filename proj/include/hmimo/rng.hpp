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
#include <cstdint>
#include <random>

#include "array_geometry.hpp"

namespace hmimo
{
    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    /*
     * Random source for channel and noise draws. Each Monte Carlo trial owns a
     * generator derived from (seed, stream, trial), so trials can run in any order
     * or on any worker and still reproduce bit for bit.
     */
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

        static Rng for_trial(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream = 0)
        {
            return Rng(splitmix64(seed) ^ splitmix64(0xD1B54A32D192ED03ULL * (stream + 1) + trial));
        }

        // CN(0, 1): real and imaginary parts N(0, 1/2).
        std::complex<double> complex_normal()
        {
            const double re = normal_(engine_);
            const double im = normal_(engine_);
            return {re, im};
        }

        cvec complex_normal(Eigen::Index n)
        {
            cvec v(n);
            for (Eigen::Index k = 0; k < n; ++k)
                v(k) = complex_normal();
            return v;
        }

        double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, std::sqrt(0.5)};
    };
}
