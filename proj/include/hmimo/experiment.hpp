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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "correlation.hpp"
#include "matrix_io.hpp"
#include "monte_carlo.hpp"
#include "scattering.hpp"
#include "spectral.hpp"

namespace hmimo
{
    using json = nlohmann::json;

    enum class ScatteringModel
    {
        Isotropic,
        Clusters,
        Parametric,
    };

    enum class RankChoice
    {
        Numerical,
        Effective,
    };

    inline std::string to_string(RankChoice r) { return r == RankChoice::Numerical ? "numerical" : "effective"; }

    /*
     * Fully resolved experiment description. Angles are radians internally and
     * degrees in JSON; SNR values stay in dB. Clusters produced by the parametric
     * generator are stored here after resolution so that to_json() can be replayed.
     */
    struct ExperimentConfig
    {
        std::size_t m_h = 8, m_v = 8;
        double spacing = 0.25, wavelength = 1.0;

        ScatteringModel model = ScatteringModel::Isotropic;
        ScatteringConfig scattering; // clusters, spreads, directivity, gain (= beta)
        std::optional<ClusterGeneratorSpec> generator;
        std::uint64_t generator_seed = 0;

        std::vector<double> snr_grid_db{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
        std::size_t trials = 1000;
        std::uint64_t seed = 0;
        std::vector<Estimator> estimators{Estimator::MMSE, Estimator::LS, Estimator::RSLS, Estimator::ConservativeRSLS};
        QuadratureSpec quadrature{};
        std::string truth_model = "exact";
        RankChoice subspace_rank = RankChoice::Numerical;
        RankChoice container_rank = RankChoice::Numerical;
        std::vector<std::string> matrices;
        std::string export_model = "exact";
        std::string export_format = "binary";
        std::string output_dir = ".";
        std::string output_prefix;

        ArrayGeometry geometry() const { return ArrayGeometry(m_h, m_v, spacing, wavelength); }
        double beta() const { return scattering.gain; }
        bool clustered() const { return model != ScatteringModel::Isotropic; }

        json to_json() const;
        static ExperimentConfig from_json(const json &j);
    };

    namespace detail
    {
        template <typename T>
        T get_or(const json &j, const char *key, T fallback)
        {
            return j.contains(key) ? j.at(key).get<T>() : fallback;
        }

        inline void reject_unknown(const json &j, std::initializer_list<const char *> allowed, const std::string &where)
        {
            std::set<std::string> ok(allowed.begin(), allowed.end());
            for (auto it = j.begin(); it != j.end(); ++it)
                if (!ok.count(it.key()))
                    throw ConfigError("config: unknown key '" + it.key() + "' in " + where + ".");
        }

        inline RankChoice parse_rank(const std::string &s)
        {
            if (s == "numerical")
                return RankChoice::Numerical;
            if (s == "effective")
                return RankChoice::Effective;
            throw ConfigError("config: rank choice must be 'numerical' or 'effective', got '" + s + "'.");
        }

        inline std::pair<double, double> range_deg(const json &j, const char *key, std::pair<double, double> fallback)
        {
            if (!j.contains(key))
                return fallback;
            const auto v = j.at(key).get<std::vector<double>>();
            if (v.size() != 2)
                throw ConfigError(std::string("config: ") + key + " must be [min, max].");
            return {deg_to_rad(v[0]), deg_to_rad(v[1])};
        }
    }

    inline ExperimentConfig ExperimentConfig::from_json(const json &j)
    {
        if (!j.is_object())
            throw ConfigError("config: top level must be a JSON object.");
        detail::reject_unknown(j, {"geometry", "scattering", "directivity", "beta", "snr_grid_db", "trials", "seed",
                                   "estimators", "quadrature", "truth_model", "subspace_rank", "container_rank",
                                   "matrices", "export", "output", "comment"},
                               "top level");
        ExperimentConfig c;
        try
        {
            if (!j.contains("geometry"))
                throw ConfigError("config: missing 'geometry' block.");
            const json &g = j.at("geometry");
            detail::reject_unknown(g, {"m_h", "m_v", "spacing_over_lambda", "spacing", "wavelength"}, "geometry");
            c.m_h = g.at("m_h").get<std::size_t>();
            c.m_v = g.at("m_v").get<std::size_t>();
            if (g.contains("spacing_over_lambda"))
            {
                if (g.contains("spacing"))
                    throw ConfigError("config: give either spacing_over_lambda or spacing + wavelength, not both.");
                c.spacing = g.at("spacing_over_lambda").get<double>();
                c.wavelength = detail::get_or(g, "wavelength", 1.0);
                c.spacing *= c.wavelength;
            }
            else
            {
                c.spacing = g.at("spacing").get<double>();
                c.wavelength = g.at("wavelength").get<double>();
            }
            (void)c.geometry();

            c.scattering.gain = detail::get_or(j, "beta", 1.0);
            if (j.contains("directivity"))
            {
                const json &d = j.at("directivity");
                detail::reject_unknown(d, {"a", "b"}, "directivity");
                c.scattering.directivity_a = detail::get_or(d, "a", 0.0);
                c.scattering.directivity_b = detail::get_or(d, "b", 0.0);
            }

            const json s = j.contains("scattering") ? j.at("scattering") : json{{"model", "isotropic"}};
            detail::reject_unknown(s, {"model", "clusters", "generator", "sigma_azimuth_deg", "sigma_elevation_deg"}, "scattering");
            const std::string model = s.at("model").get<std::string>();
            if (model == "isotropic")
                c.model = ScatteringModel::Isotropic;
            else if (model == "clusters")
                c.model = ScatteringModel::Clusters;
            else if (model == "parametric")
                c.model = ScatteringModel::Parametric;
            else
                throw ConfigError("config: scattering.model must be isotropic, clusters or parametric.");

            if (c.clustered())
            {
                c.scattering.sigma_azimuth = deg_to_rad(s.at("sigma_azimuth_deg").get<double>());
                c.scattering.sigma_elevation = deg_to_rad(s.at("sigma_elevation_deg").get<double>());
            }
            if (c.model == ScatteringModel::Clusters)
            {
                for (const auto &cl : s.at("clusters"))
                {
                    detail::reject_unknown(cl, {"azimuth_deg", "elevation_deg", "power", "specular"}, "cluster");
                    c.scattering.clusters.push_back({deg_to_rad(cl.at("azimuth_deg").get<double>()),
                                                     deg_to_rad(cl.at("elevation_deg").get<double>()),
                                                     detail::get_or(cl, "power", 1.0), detail::get_or(cl, "specular", false)});
                }
            }
            else if (c.model == ScatteringModel::Parametric)
            {
                const json &gen = s.at("generator");
                detail::reject_unknown(gen, {"count", "decay", "azimuth_range_deg", "elevation_range_deg", "seed"}, "generator");
                ClusterGeneratorSpec spec;
                spec.count = detail::get_or(gen, "count", spec.count);
                spec.decay = detail::get_or(gen, "decay", spec.decay);
                std::tie(spec.azimuth_min, spec.azimuth_max) = detail::range_deg(gen, "azimuth_range_deg", {spec.azimuth_min, spec.azimuth_max});
                std::tie(spec.elevation_min, spec.elevation_max) = detail::range_deg(gen, "elevation_range_deg", {spec.elevation_min, spec.elevation_max});
                c.generator = spec;
                c.generator_seed = detail::get_or<std::uint64_t>(gen, "seed", detail::get_or<std::uint64_t>(j, "seed", 0));
                c.scattering.clusters = generate_clusters(spec, c.generator_seed);
            }
            if (c.clustered())
                c.scattering.validate();
            else if (!(c.scattering.gain > 0.0))
                throw ConfigError("config: beta must be positive.");

            c.snr_grid_db = detail::get_or(j, "snr_grid_db", c.snr_grid_db);
            if (c.snr_grid_db.empty())
                throw ConfigError("config: snr_grid_db must not be empty.");
            for (std::size_t k = 1; k < c.snr_grid_db.size(); ++k)
                if (!(c.snr_grid_db[k] > c.snr_grid_db[k - 1]))
                    throw ConfigError("config: snr_grid_db must be strictly increasing.");
            const long long trials = detail::get_or<long long>(j, "trials", 1000);
            if (trials < 1)
                throw ConfigError("config: trials must be at least 1.");
            c.trials = std::size_t(trials);
            c.seed = detail::get_or<std::uint64_t>(j, "seed", 0);

            if (j.contains("estimators"))
            {
                c.estimators.clear();
                for (const auto &e : j.at("estimators"))
                    c.estimators.push_back(parse_estimator(e.get<std::string>()));
                if (c.estimators.empty())
                    throw ConfigError("config: estimators must not be empty.");
            }
            if (j.contains("quadrature"))
            {
                const json &q = j.at("quadrature");
                detail::reject_unknown(q, {"nodes_azimuth", "nodes_elevation"}, "quadrature");
                c.quadrature.nodes_azimuth = detail::get_or(q, "nodes_azimuth", c.quadrature.nodes_azimuth);
                c.quadrature.nodes_elevation = detail::get_or(q, "nodes_elevation", c.quadrature.nodes_elevation);
                if (c.quadrature.nodes_azimuth < 2 || c.quadrature.nodes_elevation < 2)
                    throw ConfigError("config: quadrature needs at least 2 nodes per dimension.");
            }
            c.truth_model = detail::get_or<std::string>(j, "truth_model", c.clustered() ? "exact" : "isotropic");
            if (c.truth_model != "exact" && c.truth_model != "approx" && c.truth_model != "isotropic")
                throw ConfigError("config: truth_model must be exact, approx or isotropic.");
            if (c.clustered() == (c.truth_model == "isotropic"))
                throw ConfigError("config: truth_model '" + c.truth_model + "' does not match the scattering model.");
            c.subspace_rank = detail::parse_rank(detail::get_or<std::string>(j, "subspace_rank", "numerical"));
            c.container_rank = detail::parse_rank(detail::get_or<std::string>(j, "container_rank", "numerical"));

            const std::vector<std::string> default_matrices = c.clustered() ? std::vector<std::string>{"isotropic", "exact", "approx"}
                                                                            : std::vector<std::string>{"isotropic"};
            c.matrices = detail::get_or(j, "matrices", default_matrices);
            for (const auto &m : c.matrices)
            {
                if (m != "isotropic" && m != "exact" && m != "approx")
                    throw ConfigError("config: unknown matrix model '" + m + "'.");
                if (m != "isotropic" && !c.clustered())
                    throw ConfigError("config: matrix model '" + m + "' needs clustered scattering.");
            }
            if (j.contains("export"))
            {
                const json &e = j.at("export");
                detail::reject_unknown(e, {"model", "format"}, "export");
                c.export_model = detail::get_or<std::string>(e, "model", c.export_model);
                c.export_format = detail::get_or<std::string>(e, "format", c.export_format);
            }
            else if (!c.clustered())
                c.export_model = "isotropic";
            if (c.export_format != "binary" && c.export_format != "csv")
                throw ConfigError("config: export.format must be binary or csv.");
            if (j.contains("output"))
            {
                const json &o = j.at("output");
                detail::reject_unknown(o, {"dir", "prefix"}, "output");
                c.output_dir = detail::get_or<std::string>(o, "dir", c.output_dir);
                c.output_prefix = detail::get_or<std::string>(o, "prefix", c.output_prefix);
            }
        }
        catch (const json::exception &e)
        {
            throw ConfigError(std::string("config: ") + e.what());
        }
        return c;
    }

    inline json ExperimentConfig::to_json() const
    {
        json j;
        j["geometry"] = {{"m_h", m_h}, {"m_v", m_v}, {"spacing_over_lambda", spacing / wavelength}, {"wavelength", wavelength}};
        j["beta"] = scattering.gain;
        j["directivity"] = {{"a", scattering.directivity_a}, {"b", scattering.directivity_b}};
        json s;
        if (!clustered())
            s["model"] = "isotropic";
        else
        {
            // Always replayable as an explicit cluster list.
            s["model"] = "clusters";
            s["sigma_azimuth_deg"] = rad_to_deg(scattering.sigma_azimuth);
            s["sigma_elevation_deg"] = rad_to_deg(scattering.sigma_elevation);
            json cl = json::array();
            for (const auto &c : scattering.clusters)
                cl.push_back({{"azimuth_deg", rad_to_deg(c.azimuth)}, {"elevation_deg", rad_to_deg(c.elevation)}, {"power", c.power}, {"specular", c.specular}});
            s["clusters"] = cl;
        }
        j["scattering"] = s;
        if (generator)
        {
            const auto deg = [](double rad) { return std::round(rad_to_deg(rad) * 1e9) / 1e9; };
            j["comment"] = {{"generated_by", {{"count", generator->count}, {"decay", generator->decay},
                                              {"azimuth_range_deg", {deg(generator->azimuth_min), deg(generator->azimuth_max)}},
                                              {"elevation_range_deg", {deg(generator->elevation_min), deg(generator->elevation_max)}},
                                              {"seed", generator_seed}}}};
        }
        j["snr_grid_db"] = snr_grid_db;
        j["trials"] = trials;
        j["seed"] = seed;
        json est = json::array();
        for (auto e : estimators)
            est.push_back(to_string(e));
        j["estimators"] = est;
        j["quadrature"] = {{"nodes_azimuth", quadrature.nodes_azimuth}, {"nodes_elevation", quadrature.nodes_elevation}};
        j["truth_model"] = truth_model;
        j["subspace_rank"] = to_string(subspace_rank);
        j["container_rank"] = to_string(container_rank);
        j["matrices"] = matrices;
        j["export"] = {{"model", export_model}, {"format", export_format}};
        j["output"] = {{"dir", output_dir}, {"prefix", output_prefix}};
        return j;
    }

    inline ExperimentConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("config not found: " + path.string());
        json j;
        try
        {
            in >> j;
        }
        catch (const json::exception &e)
        {
            throw ConfigError("config: cannot parse " + path.string() + ": " + e.what());
        }
        return ExperimentConfig::from_json(j);
    }

    /*
     * Collects output files under temporary names and renames them on commit().
     * Anything not committed (e.g. because a run threw) is removed on destruction.
     */
    class OutputSink
    {
    public:
        explicit OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {}
        OutputSink(const OutputSink &) = delete;
        OutputSink &operator=(const OutputSink &) = delete;

        ~OutputSink()
        {
            if (committed_)
                return;
            std::error_code ec;
            for (const auto &f : files_)
                std::filesystem::remove(partial(f), ec);
        }

        std::ofstream open(const std::string &name, bool binary = false)
        {
            std::filesystem::create_directories(dir_);
            const auto path = dir_ / name;
            files_.push_back(path);
            std::ofstream os(partial(path), binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
            if (!os)
                throw ConfigError("cannot write output file " + partial(path).string());
            return os;
        }

        void write_text(const std::string &name, const std::string &content)
        {
            auto os = open(name);
            os << content;
        }

        std::vector<std::filesystem::path> commit()
        {
            for (const auto &f : files_)
                std::filesystem::rename(partial(f), f);
            committed_ = true;
            return files_;
        }

    private:
        static std::filesystem::path partial(const std::filesystem::path &p) { return p.string() + ".partial"; }

        std::filesystem::path dir_;
        std::vector<std::filesystem::path> files_;
        bool committed_ = false;
    };

    struct RunOptions
    {
        std::size_t threads = 1;
        std::ostream *log = nullptr;
    };

    namespace detail
    {
        inline void log(const RunOptions &opt, const std::string &msg)
        {
            if (opt.log)
                *opt.log << msg << '\n';
        }

        inline std::string csv_config_line(const ExperimentConfig &c) { return "# config: " + c.to_json().dump() + "\n"; }

        inline json exact_report_json(const ExactBuildReport &r)
        {
            return {{"density_integral", r.density_integral}, {"pre_normalization_trace", r.pre_normalization_trace},
                    {"trace_correction", r.trace_correction}, {"refinement_deviation", r.refinement_deviation},
                    {"distinct_offsets", r.offsets}, {"passed", r.passed}};
        }

        inline std::string dump(const json &j) { return j.dump(2) + "\n"; }
    }

    /// Builds one of the named matrix models for the configured scenario.
    inline CorrelationMatrix build_model(const ExperimentConfig &c, const std::string &model, std::size_t threads,
                                         ExactBuildReport *report = nullptr)
    {
        const ArrayGeometry g = c.geometry();
        if (model == "isotropic")
            return build_isotropic(g, c.beta());
        if (!c.clustered())
            throw ConfigError("model '" + model + "' needs clustered scattering.");
        if (model == "exact")
        {
            ExactBuildOptions opt;
            opt.quadrature = c.quadrature;
            opt.threads = threads;
            return build_exact_clustered(g, c.scattering, opt, report);
        }
        if (model == "approx")
            return build_approx_clustered(g, c.scattering);
        throw ConfigError("unknown matrix model '" + model + "'.");
    }

    /// Spectra (CSV per model) and a JSON summary with ranks and pairwise distances.
    inline json run_eigen_report(const ExperimentConfig &c, const RunOptions &opt = {})
    {
        OutputSink sink(c.output_dir);
        const ArrayGeometry g = c.geometry();
        std::map<std::string, CorrelationMatrix> built;
        json summary;
        summary["config"] = c.to_json();
        summary["M"] = g.size();
        summary["rank_fraction_prediction"] = rank_fraction_prediction(g);

        for (const auto &name : c.matrices)
        {
            if (built.count(name))
                continue;
            detail::log(opt, "building " + name + " correlation matrix (M = " + std::to_string(g.size()) + ")");
            ExactBuildReport rep;
            CorrelationMatrix R = build_model(c, name, opt.threads, &rep);
            const EigenBasis basis = eigendecompose(R);
            const MatrixInvariants inv = check_invariants(R, basis);
            json m{{"effective_rank", basis.effective_rank},
                   {"effective_rank_fraction", double(basis.effective_rank) / double(g.size())},
                   {"numerical_rank", basis.numerical_rank},
                   {"trace", R.trace()},
                   {"eigenvalue_sum", basis.eigenvalues.sum()},
                   {"min_eigenvalue_ratio", inv.min_eigenvalue_ratio},
                   {"hermitian", inv.hermitian}};
            if (name == "exact")
                m["self_check"] = detail::exact_report_json(rep);
            summary["models"][name] = m;

            auto os = sink.open(c.output_prefix + "spectrum_" + name + ".csv");
            os << detail::csv_config_line(c);
            write_spectrum_csv(os, basis);
            built.emplace(name, std::move(R));
        }

        json cmd = json::object();
        for (auto a = built.begin(); a != built.end(); ++a)
            for (auto b = std::next(a); b != built.end(); ++b)
                cmd[a->first + "|" + b->first] = correlation_matrix_distance(a->second, b->second);
        summary["correlation_matrix_distance"] = cmd;

        sink.write_text(c.output_prefix + "eigen_summary.json", detail::dump(summary));
        sink.commit();
        return summary;
    }

    /// Exact vs approximate comparison for clustered scattering.
    inline json run_approx_validation(const ExperimentConfig &c, const RunOptions &opt = {})
    {
        if (!c.clustered())
            throw ConfigError("approx-validate needs clustered scattering.");
        OutputSink sink(c.output_dir);
        ExactBuildReport rep;
        detail::log(opt, "building exact correlation matrix");
        const CorrelationMatrix exact = build_model(c, "exact", opt.threads, &rep);
        detail::log(opt, "building approximate correlation matrix");
        const CorrelationMatrix approx = build_model(c, "approx", opt.threads);

        const EigenBasis be = eigendecompose(exact), ba = eigendecompose(approx);
        const double lmax = be.max_eigenvalue();
        const double eig_dev = (be.eigenvalues - ba.eigenvalues).cwiseAbs().maxCoeff() / lmax;
        const double entry_dev = (exact.entries() - approx.entries()).cwiseAbs().maxCoeff() / c.beta();

        json out;
        out["config"] = c.to_json();
        out["correlation_matrix_distance"] = correlation_matrix_distance(exact, approx);
        out["max_entry_deviation"] = entry_dev;
        out["max_eigenvalue_deviation"] = eig_dev;
        out["effective_rank"] = {{"exact", be.effective_rank}, {"approx", ba.effective_rank}};
        out["self_check"] = detail::exact_report_json(rep);
        sink.write_text(c.output_prefix + "approx_validation.json", detail::dump(out));
        sink.commit();
        return out;
    }

    inline std::size_t pick_rank(const EigenBasis &b, RankChoice r)
    {
        return r == RankChoice::Numerical ? b.numerical_rank : b.effective_rank;
    }

    /// NMSE versus SNR for the configured estimators (Monte Carlo plus analytic).
    inline json run_nmse_sweep(const ExperimentConfig &c, const RunOptions &opt = {})
    {
        OutputSink sink(c.output_dir);
        const ArrayGeometry g = c.geometry();
        ExactBuildReport rep;
        detail::log(opt, "building " + c.truth_model + " correlation matrix (M = " + std::to_string(g.size()) + ")");
        const CorrelationMatrix truth_R = build_model(c, c.truth_model, opt.threads, &rep);
        const EigenBasis truth = eigendecompose(truth_R);
        const EigenBasis iso = c.truth_model == "isotropic" ? truth : eigendecompose(build_isotropic(g, c.beta()));

        SweepSpec spec;
        spec.snr_grid_db = c.snr_grid_db;
        spec.estimators = c.estimators;
        spec.trials = c.trials;
        spec.seed = c.seed;
        spec.threads = opt.threads;
        spec.rsls_rank = pick_rank(truth, c.subspace_rank);
        spec.container_rank = pick_rank(iso, c.container_rank);
        detail::log(opt, "running " + std::to_string(c.trials) + " trials");
        const SweepResult res = run_nmse_monte_carlo(truth, iso, spec);

        auto csv = sink.open(c.output_prefix + "nmse.csv");
        csv << detail::csv_config_line(c);
        csv << "estimator,snr_db,nmse_mc,nmse_ci95,nmse_analytic,trials\n";
        csv.precision(17);
        json records = json::array();
        for (const auto &r : res.records)
        {
            csv << to_string(r.estimator) << ',' << r.snr_db << ',' << r.nmse_mc << ',' << r.nmse_ci95 << ',';
            if (r.nmse_analytic)
                csv << *r.nmse_analytic;
            csv << ',' << r.trials << '\n';
            json jr{{"estimator", to_string(r.estimator)}, {"snr_db", r.snr_db}, {"nmse_mc", r.nmse_mc},
                    {"nmse_ci95", r.nmse_ci95}, {"trials", r.trials}};
            jr["nmse_analytic"] = r.nmse_analytic ? json(*r.nmse_analytic) : json(nullptr);
            records.push_back(jr);
        }

        json out;
        out["config"] = c.to_json();
        out["records"] = records;
        out["warnings"] = res.warnings;
        out["containment_residual"] = res.containment_residual;
        out["ranks"] = {{"rsls", spec.rsls_rank}, {"container", spec.container_rank},
                        {"truth_numerical", truth.numerical_rank}, {"truth_effective", truth.effective_rank},
                        {"isotropic_numerical", iso.numerical_rank}, {"isotropic_effective", iso.effective_rank}};
        if (c.truth_model == "exact")
            out["self_check"] = detail::exact_report_json(rep);
        for (const auto &w : res.warnings)
            detail::log(opt, "warning: " + w);
        sink.write_text(c.output_prefix + "nmse.json", detail::dump(out));
        sink.commit();
        return out;
    }

    /// Writes the configured model as a binary container or CSV, plus a JSON sidecar.
    inline json run_export_matrix(const ExperimentConfig &c, const RunOptions &opt = {})
    {
        OutputSink sink(c.output_dir);
        ExactBuildReport rep;
        const CorrelationMatrix R = build_model(c, c.export_model, opt.threads, &rep);
        const std::string stem = c.output_prefix + "matrix_" + c.export_model;
        if (c.export_format == "binary")
        {
            auto os = sink.open(stem + ".hmrc", true);
            write_matrix_binary(os, R);
        }
        else
        {
            auto os = sink.open(stem + ".csv");
            os << detail::csv_config_line(c);
            write_matrix_csv(os, R);
        }
        json meta{{"config", c.to_json()}, {"M", R.size()}, {"beta", R.gain()}, {"provenance", to_string(R.provenance())},
                  {"format", c.export_format}};
        if (c.export_model == "exact")
            meta["self_check"] = detail::exact_report_json(rep);
        sink.write_text(stem + ".json", detail::dump(meta));
        sink.commit();
        return meta;
    }
}
