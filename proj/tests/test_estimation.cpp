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

#include <catch2/catch_amalgamated.hpp>

#include <hmimo/correlation.hpp>
#include <hmimo/estimation.hpp>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace hmimo;

namespace
{
    ScatteringConfig clustered()
    {
        ScatteringConfig cfg;
        cfg.clusters = generate_clusters({}, 42);
        cfg.sigma_azimuth = cfg.sigma_elevation = deg_to_rad(2);
        cfg.directivity_a = cfg.directivity_b = 1;
        return cfg;
    }

    CorrelationMatrix rank_one(const ArrayGeometry &g, double beta)
    {
        const cvec a = g.response({-0.4, 0.25});
        return CorrelationMatrix(beta * a * a.adjoint(), beta, Provenance::External);
    }

    // Mean squared error of an estimator over `trials` explicit draws, normalized by tr R.
    template <typename F>
    double empirical_nmse(const EigenBasis &truth, double snr, std::size_t trials, std::uint64_t seed, F &&estimate)
    {
        double acc = 0.0;
        for (std::size_t t = 0; t < trials; ++t)
        {
            Rng rng = Rng::for_trial(seed, t);
            const cvec h = sample_channel(truth, rng);
            const auto obs = observe_pilot(h, snr, rng);
            acc += (estimate(obs) - h).squaredNorm();
        }
        return acc / double(trials) / truth.source_trace;
    }
}

TEST_CASE("Rng - complex normal moments and per-trial streams")
{
    Rng rng(1);
    double re2 = 0, im2 = 0, cross = 0;
    const int n = 200000;
    for (int k = 0; k < n; ++k)
    {
        const auto z = rng.complex_normal();
        re2 += z.real() * z.real();
        im2 += z.imag() * z.imag();
        cross += z.real() * z.imag();
    }
    CHECK_THAT(re2 / n, WithinAbs(0.5, 0.01));
    CHECK_THAT(im2 / n, WithinAbs(0.5, 0.01));
    CHECK_THAT(cross / n, WithinAbs(0.0, 0.01));

    auto a = Rng::for_trial(5, 17), b = Rng::for_trial(5, 17), c = Rng::for_trial(5, 18);
    const auto za = a.complex_normal();
    CHECK(za == b.complex_normal());
    CHECK(za != c.complex_normal());
}

TEST_CASE("sample_channel - structure and second moments")
{
    SECTION("rank-one basis gives multiples of the eigenvector")
    {
        const auto g = ArrayGeometry::with_relative_spacing(4, 4, 0.25);
        const auto basis = eigendecompose(rank_one(g, 1.0));
        const cvec u = basis.eigenvectors.col(0);
        Rng rng(3);
        for (int k = 0; k < 20; ++k)
        {
            const cvec h = sample_channel(basis, rng);
            const std::complex<double> c = u.dot(h);
            CHECK((h - c * u).norm() < 1e-12 * std::max(1.0, h.norm()));
        }
    }
    SECTION("mean energy and empirical correlation")
    {
        const auto g = ArrayGeometry::with_relative_spacing(4, 4, 0.25);
        const double beta = 1.5;
        auto cfg = clustered();
        cfg.gain = beta;
        const auto R = build_exact_clustered(g, cfg);
        const auto basis = eigendecompose(R);
        const std::size_t T = 100000;
        double energy = 0.0;
        cmat S = cmat::Zero(16, 16);
        for (std::size_t t = 0; t < T; ++t)
        {
            Rng rng = Rng::for_trial(11, t);
            const cvec h = sample_channel(basis, rng);
            energy += h.squaredNorm();
            S += h * h.adjoint();
        }
        CHECK_THAT(energy / double(T), WithinRel(16 * beta, 0.01));
        S /= double(T);
        CHECK((S - R.entries()).norm() / R.entries().norm() < 0.02);
    }
}

TEST_CASE("observe_pilot - noise model")
{
    const std::size_t M = 16;
    Rng rng(8);
    double pure = 0.0, mixed = 0.0;
    const auto g = ArrayGeometry::with_relative_spacing(4, 4, 0.25);
    const auto basis = eigendecompose(build_isotropic(g, 1.0));
    const double snr = 3.0;
    const int T = 50000;
    for (int t = 0; t < T; ++t)
    {
        pure += observe_pilot(cvec::Zero(M), snr, rng).y.squaredNorm();
        mixed += observe_pilot(sample_channel(basis, rng), snr, rng).y.squaredNorm();
    }
    CHECK_THAT(pure / T, WithinRel(double(M), 0.01));
    CHECK_THAT(mixed / T, WithinRel(snr * M * 1.0 + M, 0.01));

    Rng fixed_a(2), fixed_b(2);
    const cvec h = basis.eigenvectors.col(0);
    const auto obs = observe_pilot(h, 1e16, fixed_a);
    CHECK((obs.y / 1e8 - h).norm() < 1e-7);
    (void)fixed_b;
    CHECK_THROWS_AS(observe_pilot(h, 0.0, fixed_a), ConfigError);
}

TEST_CASE("estimate_mmse - scalar Wiener filter and direct solve")
{
    const auto g = ArrayGeometry::with_relative_spacing(4, 4, 0.25);
    SECTION("rank one")
    {
        const double beta = 0.9, snr = 2.0;
        const auto R = rank_one(g, beta);
        const auto basis = eigendecompose(R);
        Rng rng(4);
        const auto obs = observe_pilot(sample_channel(basis, rng), snr, rng);
        const cvec u = basis.eigenvectors.col(0);
        const double lam = 16 * beta;
        const cvec expected = u * (snr * lam / (snr * lam + 1.0)) * u.dot(obs.y) / std::sqrt(snr);
        CHECK((estimate_mmse(obs, basis).h_hat - expected).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("eigenbasis form equals the linear solve")
    {
        const auto R = build_exact_clustered(g, clustered());
        const auto basis = eigendecompose(R);
        Rng rng(12);
        for (double snr : {0.1, 1.0, 100.0})
        {
            const auto obs = observe_pilot(sample_channel(basis, rng), snr, rng);
            const cvec a = estimate_mmse(obs, basis).h_hat;
            const cvec b = estimate_mmse_direct(obs, R);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SECTION("high SNR approaches RS-LS")
    {
        const auto basis = eigendecompose(build_isotropic(g, 1.0));
        Rng rng(6);
        const auto obs = observe_pilot(sample_channel(basis, rng), 1e14, rng);
        const cvec a = estimate_mmse(obs, basis).h_hat;
        const cvec b = estimate_rsls(obs, Subspace::leading(basis, basis.numerical_rank)).h_hat;
        CHECK((a - b).norm() / b.norm() < 1e-6);
    }
}

TEST_CASE("estimate_ls - identities")
{
    const cvec h = cvec::Random(9);
    CHECK(estimate_ls({cvec::Zero(9), 4.0}).h_hat.isZero(0.0));
    CHECK((estimate_ls({2.0 * h, 4.0}).h_hat - h).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(estimate_ls({h, 1.0}).estimator == Estimator::LS);
}

TEST_CASE("estimate_rsls - projection properties")
{
    const auto g = ArrayGeometry::with_relative_spacing(5, 4, 0.25);
    const auto basis = eigendecompose(build_isotropic(g, 1.0));
    const cvec y = cvec::Random(20);

    const auto full = Subspace(cmat::Identity(20, 20));
    CHECK((estimate_rsls({y, 2.0}, full).h_hat - estimate_ls({y, 2.0}).h_hat).cwiseAbs().maxCoeff() < 1e-15);

    const auto S = Subspace::leading(basis, 6);
    const cvec once = estimate_rsls({y, 1.0}, S).h_hat;
    const cvec twice = estimate_rsls({once, 1.0}, S).h_hat;
    CHECK((once - twice).norm() < 1e-13);

    const cvec orth = basis.eigenvectors.col(10);
    CHECK(estimate_rsls({orth, 1.0}, S).h_hat.norm() < 1e-14);

    CHECK((estimate_conservative_rsls({y, 3.0}, S).h_hat - estimate_rsls({y, 3.0}, S).h_hat).norm() == 0.0);
    CHECK(estimate_conservative_rsls({y, 3.0}, S).estimator == Estimator::ConservativeRSLS);

    cmat skew = basis.leading(3);
    skew.col(1) += 1e-3 * skew.col(0);
    CHECK_THROWS_AS(Subspace(skew), ContractViolation);
    CHECK_THROWS_AS(estimate_rsls({cvec::Zero(7), 1.0}, S), ShapeError);
}

TEST_CASE("analytic_nmse - closed forms")
{
    EigenBasis flat;
    const double beta = 2.0;
    flat.eigenvalues = rvec::Constant(10, beta);
    flat.eigenvectors = cmat::Identity(10, 10);
    flat.numerical_rank = flat.effective_rank = 10;
    flat.source_trace = 10 * beta;
    for (double snr : {0.3, 1.0, 7.0})
    {
        CHECK_THAT(analytic_nmse(Estimator::MMSE, flat, snr), WithinRel(1.0 / (snr * beta + 1.0), 1e-14));
        CHECK_THAT(analytic_nmse(Estimator::LS, flat, snr), WithinRel(1.0 / (snr * beta), 1e-14));
    }
    CHECK_THAT(analytic_nmse(Estimator::LS, flat, 1.0 / beta), WithinRel(1.0, 1e-15));

    const auto g = ArrayGeometry::with_relative_spacing(8, 8, 0.25);
    const auto truth = eigendecompose(build_exact_clustered(g, clustered()));
    const std::size_t r = truth.numerical_rank;
    const double snr = 5.0;
    const double rs = analytic_nmse(Estimator::RSLS, truth, snr);
    CHECK_THAT(rs, WithinRel(double(r) / (snr * 64.0), 1e-10));
    CHECK_THAT(rs / analytic_nmse(Estimator::LS, truth, snr), WithinRel(double(r) / 64.0, 1e-10));

    AnalyticOptions opt;
    opt.container_rank = 40;
    opt.containment_residual = 1e-7;
    CHECK_THAT(analytic_nmse(Estimator::ConservativeRSLS, truth, snr, opt), WithinRel(40.0 / (snr * 64.0), 1e-14));
    opt.containment_residual = 1e-3;
    CHECK_THROWS_AS(analytic_nmse(Estimator::ConservativeRSLS, truth, snr, opt), OracleInvalidError);
    CHECK_THROWS_AS(analytic_nmse(Estimator::ConservativeRSLS, truth, snr), OracleInvalidError);
    CHECK_THROWS_AS(analytic_nmse(Estimator::LS, truth, -1.0), ConfigError);
}

TEST_CASE("analytic_nmse - ordering and high-SNR limit")
{
    const auto g = ArrayGeometry::with_relative_spacing(8, 8, 0.25);
    const auto truth = eigendecompose(build_exact_clustered(g, clustered()));
    AnalyticOptions opt;
    opt.container_rank = 64;
    opt.containment_residual = 0.0;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (double db = -10; db <= 60; db += 10)
    {
        const double snr = std::pow(10.0, db / 10);
        const double mmse = analytic_nmse(Estimator::MMSE, truth, snr);
        const double rs = analytic_nmse(Estimator::RSLS, truth, snr);
        const double cons = analytic_nmse(Estimator::ConservativeRSLS, truth, snr, opt);
        const double ls = analytic_nmse(Estimator::LS, truth, snr);
        CHECK(mmse <= rs);
        CHECK(rs <= cons);
        CHECK(cons <= ls);
        CHECK(rs / mmse <= prev_ratio);
        prev_ratio = rs / mmse;
    }
}

TEST_CASE("analytic_nmse - RS-LS approaches MMSE once every kept eigenvalue dominates the noise")
{
    EigenBasis b;
    const Eigen::Index M = 40, r = 24;
    b.eigenvalues = rvec::Zero(M);
    for (Eigen::Index i = 0; i < r; ++i)
        b.eigenvalues(i) = std::pow(10.0, -double(i) / 6.0);
    b.eigenvectors = cmat::Identity(M, M);
    b.numerical_rank = std::size_t(r);
    b.source_trace = b.eigenvalues.sum();
    const double lam_r = b.eigenvalues(r - 1);
    double prev = std::numeric_limits<double>::infinity();
    for (double snr : {1.0, 1e2, 1e4, 1e6, 1e8})
    {
        const double ratio = analytic_nmse(Estimator::RSLS, b, snr) / analytic_nmse(Estimator::MMSE, b, snr);
        CHECK(ratio >= 1.0);
        CHECK(ratio <= prev);
        prev = ratio;
    }
    const double high = 1e3 / lam_r;
    CHECK(analytic_nmse(Estimator::RSLS, b, high) / analytic_nmse(Estimator::MMSE, b, high) < 1.05);
}

TEST_CASE("estimators - Monte Carlo matches the analytic NMSE")
{
    const auto g = ArrayGeometry::with_relative_spacing(8, 8, 0.25);
    const auto R = build_exact_clustered(g, clustered());
    const auto truth = eigendecompose(R);
    const auto iso = eigendecompose(build_isotropic(g, 1.0));
    const auto Sr = Subspace::leading(truth, truth.numerical_rank);
    const auto Sc = Subspace::leading(iso, iso.numerical_rank);
    AnalyticOptions opt;
    opt.container_rank = iso.numerical_rank;
    opt.containment_residual = subspace_containment_residual(iso, truth, iso.numerical_rank, truth.effective_rank);
    const std::size_t T = 10000;

    for (double snr : {1.0, 10.0})
    {
        INFO("snr " << snr);
        const double mmse = empirical_nmse(truth, snr, T, 1, [&](const PilotObservation &o)
                                           { return estimate_mmse(o, truth).h_hat; });
        const double ls = empirical_nmse(truth, snr, T, 2, [](const PilotObservation &o)
                                         { return estimate_ls(o).h_hat; });
        const double rs = empirical_nmse(truth, snr, T, 3, [&](const PilotObservation &o)
                                         { return estimate_rsls(o, Sr).h_hat; });
        const double cons = empirical_nmse(truth, snr, T, 4, [&](const PilotObservation &o)
                                           { return estimate_conservative_rsls(o, Sc).h_hat; });
        CHECK_THAT(mmse, WithinRel(analytic_nmse(Estimator::MMSE, truth, snr), 0.03));
        CHECK_THAT(ls, WithinRel(analytic_nmse(Estimator::LS, truth, snr), 0.03));
        CHECK_THAT(rs, WithinRel(analytic_nmse(Estimator::RSLS, truth, snr), 0.03));
        CHECK_THAT(cons, WithinRel(analytic_nmse(Estimator::ConservativeRSLS, truth, snr, opt), 0.03));
    }
}

TEST_CASE("estimators - LS and RS-LS at unit SNR and gain")
{
    const auto g = ArrayGeometry::with_relative_spacing(6, 6, 0.25);
    const auto truth = eigendecompose(build_isotropic(g, 1.0));
    const auto S = Subspace::leading(truth, truth.numerical_rank);
    const std::size_t T = 10000;
    const double ls = empirical_nmse(truth, 1.0, T, 21, [](const PilotObservation &o)
                                     { return estimate_ls(o).h_hat; });
    const double rs = empirical_nmse(truth, 1.0, T, 22, [&](const PilotObservation &o)
                                     { return estimate_rsls(o, S).h_hat; });
    CHECK_THAT(ls, WithinRel(1.0, 0.02));
    CHECK_THAT(rs, WithinRel(double(truth.numerical_rank) / 36.0, 0.02));
}

TEST_CASE("parse_estimator - names")
{
    CHECK(parse_estimator("MMSE") == Estimator::MMSE);
    CHECK(parse_estimator("RS-LS") == Estimator::RSLS);
    CHECK(parse_estimator("Isotropic-RS-LS") == Estimator::ConservativeRSLS);
    for (auto e : {Estimator::MMSE, Estimator::LS, Estimator::RSLS, Estimator::ConservativeRSLS})
        CHECK(parse_estimator(to_string(e)) == e);
    CHECK_THROWS_AS(parse_estimator("ZF"), ConfigError);
}
