//---------------------------------------------------------------------------//
// Copyright 2026 the beamguide developers.
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tools/beamguide_cli.cpp
//! Batch front end: beamguide {simulate|stability|riccati|quantum-verify}.
//---------------------------------------------------------------------------//
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "beamguide/cli.hpp"

namespace
{
//! Thread count: flag, then BEAMGUIDE_THREADS, then the config, then 1
unsigned resolve_threads(int flag, beamguide::json const& cfg)
{
    if (flag > 0)
        return static_cast<unsigned>(flag);
    if (char const* env = std::getenv("BEAMGUIDE_THREADS"))
    {
        try
        {
            int const n = std::stoi(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        }
        catch (std::exception const&)
        {
        }
        throw beamguide::ConfigError(
            "BEAMGUIDE_THREADS must be a positive integer");
    }
    if (cfg.is_object() && cfg.contains("threads")
        && cfg["threads"].is_number_unsigned() && cfg["threads"] > 0)
    {
        return cfg["threads"].get<unsigned>();
    }
    return 1;
}
} // namespace

int main(int argc, char** argv)
{
    using namespace beamguide;
    CLI::App app{"Charged-particle dynamics and exact wave solutions in "
                 "crossed plus longitudinal fields"};
    std::string command;
    std::string config_path;
    cli::RunOptions opts;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string preset;
    app.add_option("command", command,
                   "simulate, stability, riccati or quantum-verify")
        ->check(CLI::IsMember(
            {"simulate", "stability", "riccati", "quantum-verify"}));
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", opts.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides config)");
    app.add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber);
    auto* preset_opt
        = app.add_option("--preset", preset, "replace the profile by a preset")
              ->check(CLI::IsMember({"vortex", "periodic_with_H"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : cli::config_error;
    }

    std::string message;
    cli::RunResult res;
    try
    {
        json cfg = load_json_file(config_path);
        if (!command.empty())
        {
            if (cfg.is_object() && cfg.contains("command")
                && cfg["command"] != command)
            {
                throw ConfigError("field 'command': config says "
                                  + cfg["command"].dump()
                                  + " but the command line says " + command);
            }
            cfg["command"] = command;
        }
        if (*seed_opt)
            opts.seed = seed;
        if (*preset_opt)
            opts.preset = preset;
        opts.threads = resolve_threads(threads, cfg);
        res = cli::run_guarded(cfg, opts, &message);
    }
    catch (ConfigError const& e)
    {
        message = std::string("config error: ") + e.what();
        res.exit_code = cli::config_error;
    }
    catch (std::exception const& e)
    {
        message = std::string("error: ") + e.what();
        res.exit_code = cli::numerical_error;
    }

    if (!message.empty())
    {
        std::cerr << "beamguide: " << message << '\n';
        return res.exit_code;
    }
    for (auto const& f : res.files)
        std::cout << "wrote " << f << '\n';
    if (res.report.contains("checks"))
    {
        for (auto const& c : res.report["checks"])
        {
            std::cout << (c["pass"].get<bool>() ? "ok   " : "FAIL ")
                      << c["name"].get<std::string>() << " = "
                      << format_double(c["value"].get<double>())
                      << " (tol " << format_double(c["tolerance"].get<double>())
                      << ")\n";
        }
    }
    return res.exit_code;
}
