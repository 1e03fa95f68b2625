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

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "correlation.hpp"
#include "errors.hpp"

namespace hmimo
{
    /*
     * Binary correlation-matrix container, little-endian:
     *
     *   offset  size  field
     *   0       4     magic "HMRC"
     *   4       4     version (u32, currently 1)
     *   8       4     M (u32)
     *   12      8     beta (f64)
     *   20      1     provenance (u8: 0 isotropic, 1 exact, 2 approx, 3 external)
     *   21      ...   M(M+1)/2 complex entries of the upper triangle, row by row
     *                 (m = 1..M, l = m..M), each as real f64 then imaginary f64
     */
    inline constexpr std::array<char, 4> matrix_magic{'H', 'M', 'R', 'C'};
    inline constexpr std::uint32_t matrix_format_version = 1;

    namespace detail
    {
        template <typename U>
        void put_le(std::ostream &os, U value)
        {
            std::array<char, sizeof(U)> buf{};
            for (std::size_t k = 0; k < sizeof(U); ++k)
                buf[k] = char((value >> (8 * k)) & 0xFF);
            os.write(buf.data(), buf.size());
        }

        template <typename U>
        U get_le(std::istream &is)
        {
            std::array<unsigned char, sizeof(U)> buf{};
            if (!is.read(reinterpret_cast<char *>(buf.data()), buf.size()))
                throw FormatError("matrix container: unexpected end of file.");
            U value = 0;
            for (std::size_t k = 0; k < sizeof(U); ++k)
                value |= U(buf[k]) << (8 * k);
            return value;
        }

        inline void put_f64(std::ostream &os, double v) { put_le(os, std::bit_cast<std::uint64_t>(v)); }
        inline double get_f64(std::istream &is) { return std::bit_cast<double>(get_le<std::uint64_t>(is)); }
    }

    inline void write_matrix_binary(std::ostream &os, const CorrelationMatrix &R)
    {
        const std::size_t M = R.size();
        if (M > 0xFFFFFFFFu)
            throw ShapeError("matrix container: dimension exceeds u32.");
        os.write(matrix_magic.data(), matrix_magic.size());
        detail::put_le<std::uint32_t>(os, matrix_format_version);
        detail::put_le<std::uint32_t>(os, std::uint32_t(M));
        detail::put_f64(os, R.gain());
        detail::put_le<std::uint8_t>(os, std::uint8_t(R.provenance()));
        const cmat &A = R.entries();
        for (Eigen::Index m = 0; m < A.rows(); ++m)
            for (Eigen::Index l = m; l < A.cols(); ++l)
            {
                detail::put_f64(os, A(m, l).real());
                detail::put_f64(os, A(m, l).imag());
            }
        if (!os)
            throw FormatError("matrix container: write failed.");
    }

    inline CorrelationMatrix read_matrix_binary(std::istream &is)
    {
        std::array<char, 4> magic{};
        if (!is.read(magic.data(), magic.size()) || magic != matrix_magic)
            throw FormatError("matrix container: bad magic (expected \"HMRC\").");
        const auto version = detail::get_le<std::uint32_t>(is);
        if (version != matrix_format_version)
            throw FormatError("matrix container: unsupported version " + std::to_string(version) + ".");
        const auto M = Eigen::Index(detail::get_le<std::uint32_t>(is));
        if (M == 0)
            throw FormatError("matrix container: zero dimension.");
        const double beta = detail::get_f64(is);
        const auto prov = detail::get_le<std::uint8_t>(is);
        if (prov > std::uint8_t(Provenance::External))
            throw FormatError("matrix container: unknown provenance tag " + std::to_string(prov) + ".");
        cmat A = cmat::Zero(M, M);
        for (Eigen::Index m = 0; m < M; ++m)
            for (Eigen::Index l = m; l < M; ++l)
            {
                const double re = detail::get_f64(is);
                const double im = detail::get_f64(is);
                A(m, l) = {re, im};
            }
        if (is.peek() != std::char_traits<char>::eof())
            throw FormatError("matrix container: trailing bytes after the last entry.");
        return CorrelationMatrix(std::move(A), beta, Provenance(prov));
    }

    /// Lossy inspection export: one matrix row per line, re,im pairs interleaved.
    inline void write_matrix_csv(std::ostream &os, const CorrelationMatrix &R)
    {
        const auto old = os.precision(17);
        const cmat &A = R.entries();
        for (Eigen::Index m = 0; m < A.rows(); ++m)
        {
            for (Eigen::Index l = 0; l < A.cols(); ++l)
            {
                if (l)
                    os << ',';
                os << A(m, l).real() << ',' << A(m, l).imag();
            }
            os << '\n';
        }
        os.precision(old);
    }
}
