// SPDX-License-Identifier: Apache-2.0
//
// mbmimo - multi-band massive MIMO simulator with mutually coupled antenna arrays
// Copyright (C) 2026 mbmimo project contributors
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
//
// Command-line front end. Every subcommand reads a scenario config (JSON),
// writes a manifest plus result CSVs into --out, and is bit-reproducible for
// a fixed (config, seed) pair.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbmimo/mbmimo.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

void add_common(CLI::App *cmd, CommonArgs &args, bool config_positional = false) {
    if (config_positional)
        cmd->add_option("config", args.config_path, "scenario config (JSON)")->required();
    else
        cmd->add_option("--config", args.config_path, "scenario config (JSON)")->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: out)");
    cmd->add_option("--seed", args.seed, "master seed override");
    cmd->add_option("--threads", args.threads, "worker threads (0 = auto; MBMIMO_THREADS overrides)");
}

struct Loaded {
    mbmimo::ScenarioConfig cfg;
    nlohmann::json experiment;
};

Loaded load(const CommonArgs &args) {
    const nlohmann::json j = mbmimo::load_config_file(args.config_path);
    Loaded out;
    out.cfg = mbmimo::parse_scenario(j);
    if (args.seed)
        out.cfg.master_seed = *args.seed;
    out.experiment = j.contains("experiment") ? j.at("experiment") : nlohmann::json::object();
    return out;
}

mbmimo::RunContext context_of(const CommonArgs &args, const std::string &command) {
    mbmimo::RunContext ctx;
    ctx.out_dir = args.out_dir;
    ctx.threads = args.threads;
    ctx.command = command;
    return ctx;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"multi-band massive MIMO simulator with mutually coupled antenna arrays"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("mbmimo ") + mbmimo::version);

    CommonArgs run_args, spacing_args, subc_args, snr_args, bode_args, opt_args, cmp_args;

    CLI::App *cmd_run = app.add_subcommand("run", "run the experiment named in the config");
    add_common(cmd_run, run_args, /*config_positional=*/true);

    CLI::App *cmd_spacing = app.add_subcommand("sweep-spacing", "sum-rate against element spacing");
    add_common(cmd_spacing, spacing_args);

    CLI::App *cmd_subc = app.add_subcommand("sweep-subcarriers", "scheme comparison against subcarriers per band");
    add_common(cmd_subc, subc_args);

    CLI::App *cmd_snr = app.add_subcommand("sweep-snr", "scheme comparison against target SNR");
    add_common(cmd_snr, snr_args);

    CLI::App *cmd_bode = app.add_subcommand("bode", "equivalent gain and radiation efficiency against frequency");
    add_common(cmd_bode, bode_args);

    CLI::App *cmd_opt = app.add_subcommand("optimize", "spacing optimization");
    add_common(cmd_opt, opt_args);
    std::string mode = "offline";
    cmd_opt->add_option("--mode", mode, "offline | online")->check(CLI::IsMember({"offline", "online"}));

    CLI::App *cmd_cmp = app.add_subcommand("compare-modes", "offline vs online optimization");
    add_common(cmd_cmp, cmp_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const Loaded l = load(run_args);
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(run_args, "run"));
        } else if (cmd_spacing->parsed()) {
            Loaded l = load(spacing_args);
            l.experiment["type"] = "sweep-spacing";
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(spacing_args, "sweep-spacing"));
        } else if (cmd_subc->parsed()) {
            Loaded l = load(subc_args);
            l.experiment["type"] = "sweep-subcarriers";
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(subc_args, "sweep-subcarriers"));
        } else if (cmd_snr->parsed()) {
            Loaded l = load(snr_args);
            l.experiment["type"] = "sweep-snr";
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(snr_args, "sweep-snr"));
        } else if (cmd_bode->parsed()) {
            Loaded l = load(bode_args);
            l.experiment["type"] = "bode";
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(bode_args, "bode"));
        } else if (cmd_opt->parsed()) {
            Loaded l = load(opt_args);
            l.experiment["type"] = "optimize";
            l.experiment["mode"] = mode;
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(opt_args, "optimize"));
        } else if (cmd_cmp->parsed()) {
            Loaded l = load(cmp_args);
            l.experiment["type"] = "compare-modes";
            mbmimo::run_experiment(l.cfg, l.experiment, context_of(cmp_args, "compare-modes"));
        }
    } catch (const mbmimo::config_error &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
