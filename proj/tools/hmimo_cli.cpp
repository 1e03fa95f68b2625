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

// Command-line front end for the experiment harness.
//
//   hmimo eigen-report    <config.json> [--seed N] [--threads N] [--out DIR]
//   hmimo nmse-sweep      <config.json> ...
//   hmimo approx-validate <config.json> ...
//   hmimo export-matrix   <config.json> ...
//
// Exit status: 0 on success, 1 for configuration/usage/format errors,
// 2 for numerical or accuracy failures.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include <hmimo/experiment.hpp>

namespace
{
    struct CommonArgs
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> threads;
        std::optional<std::string> out;
        bool quiet = false;
    };

    void add_common(CLI::App *sub, CommonArgs &a)
    {
        sub->add_option("config", a.config, "Experiment configuration (JSON)")->required();
        sub->add_option("--seed", a.seed, "Override the configured seed");
        sub->add_option("--threads", a.threads, "Worker threads (results do not depend on this)");
        sub->add_option("--out", a.out, "Output directory");
        sub->add_flag("-q,--quiet", a.quiet, "Suppress progress messages");
    }

    hmimo::ExperimentConfig resolve(const CommonArgs &a)
    {
        auto cfg = hmimo::load_config(a.config);
        if (a.seed)
            cfg.seed = *a.seed;
        if (a.out)
            cfg.output_dir = *a.out;
        return cfg;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Spatial correlation models and subspace channel estimation for planar arrays"};
    app.require_subcommand(1);

    CommonArgs args;
    struct Command
    {
        const char *name;
        const char *help;
        hmimo::json (*run)(const hmimo::ExperimentConfig &, const hmimo::RunOptions &);
    };
    const Command commands[] = {
        {"eigen-report", "Eigenvalue spectra and rank summary", &hmimo::run_eigen_report},
        {"nmse-sweep", "NMSE versus SNR for the configured estimators", &hmimo::run_nmse_sweep},
        {"approx-validate", "Compare exact and approximate clustered models", &hmimo::run_approx_validation},
        {"export-matrix", "Write a correlation matrix to disk", &hmimo::run_export_matrix},
    };
    for (const auto &c : commands)
        add_common(app.add_subcommand(c.name, c.help), args);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try
    {
        const hmimo::ExperimentConfig cfg = resolve(args);
        hmimo::RunOptions opt;
        opt.threads = args.threads.value_or(1);
        if (opt.threads == 0)
            throw hmimo::ConfigError("--threads must be positive.");
        opt.log = args.quiet ? nullptr : &std::cerr;
        for (const auto &c : commands)
            if (app.got_subcommand(c.name))
                c.run(cfg, opt);
        return 0;
    }
    catch (const hmimo::NumericalError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const hmimo::DomainError &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
