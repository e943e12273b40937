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
// Experiment drivers: spacing / subcarrier / SNR sweeps, frequency response,
// spacing optimization, and the offline-vs-online comparison. Every run
// writes a manifest first, then plot-ready long-format CSVs whose rows carry
// the seed and resolved parameters needed to reproduce them. Identical
// (config, seed) pairs produce byte-identical files.

#ifndef MBMIMO_EXPERIMENTS_HPP
#define MBMIMO_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "mbmimo/common.hpp"
#include "mbmimo/scenario.hpp"
#include "mbmimo/search.hpp"

namespace mbmimo {

// ---------------------------------------------------------------------------
// Plumbing: number formatting, CSV files, manifest, worker fan-out.
// ---------------------------------------------------------------------------

inline std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string fmt_num(std::uint64_t x) { return std::to_string(x); }
inline std::string fmt_num(long x) { return std::to_string(x); }
inline std::string fmt_num(int x) { return std::to_string(x); }

class CsvFile {
  public:
    CsvFile(const std::filesystem::path &path, const std::vector<std::string> &header) : out_(path) {
        if (!out_)
            throw config_error("cannot open output file " + path.string());
        write_row_strings(header);
    }

    void write_row_strings(const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    template <typename... Ts>
    void row(const Ts &...cells) {
        write_row_strings({to_cell(cells)...});
    }

  private:
    static std::string to_cell(const std::string &s) { return s; }
    static std::string to_cell(const char *s) { return s; }
    static std::string to_cell(double x) { return fmt_num(x); }
    static std::string to_cell(int x) { return fmt_num(x); }
    static std::string to_cell(long x) { return fmt_num(x); }
    static std::string to_cell(std::uint64_t x) { return fmt_num(x); }
    std::ofstream out_;
};

// Index-ordered fan-out; results land in caller-provided slots so the output
// does not depend on scheduling.
inline void parallel_for(int n, int threads, const std::function<void(int)> &fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

// MBMIMO_THREADS overrides everything; otherwise an explicit request wins,
// and 0 means one worker per hardware thread.
inline int resolve_threads(int requested) {
    if (const char *env = std::getenv("MBMIMO_THREADS"); env != nullptr && *env != '\0')
        return std::max(1, std::atoi(env));
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct RunContext {
    std::filesystem::path out_dir;
    int threads = 0;
    std::string command;
};

// The manifest is written before any result file.
inline void write_manifest(const RunContext &ctx, const ScenarioConfig &cfg, const nlohmann::json &experiment) {
    std::filesystem::create_directories(ctx.out_dir);
    nlohmann::json m;
    m["mbmimo_version"] = version;
    m["command"] = ctx.command;
    m["seed"] = cfg.master_seed;
    m["config"] = scenario_to_json(cfg);
    m["experiment"] = experiment;
    std::ofstream out(ctx.out_dir / "manifest.json");
    if (!out)
        throw config_error("cannot open output file " + (ctx.out_dir / "manifest.json").string());
    out << m.dump(2) << '\n';
}

namespace detail {

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    int n = 0;
};

inline Stats stats_of(const std::vector<double> &xs) {
    Stats s;
    s.n = static_cast<int>(xs.size());
    if (xs.empty())
        return s;
    for (double x : xs)
        s.mean += x;
    s.mean /= s.n;
    if (s.n > 1) {
        double acc = 0.0;
        for (double x : xs)
            acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / (s.n - 1));
    }
    return s;
}

inline std::vector<std::uint64_t> point_seeds(const ScenarioConfig &cfg, int count) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int r = 0; r < count; ++r)
        seeds.push_back(realization_seed(cfg.master_seed, r));
    return seeds;
}

// Mean optimal sum-rate of each compared array kind at one spacing, all
// kinds sharing the realization seeds and the noise floor calibrated on the
// scenario's own kind.
struct SpacingPointResult {
    std::vector<std::vector<double>> rates_per_kind;
};

inline SpacingPointResult spacing_point(const ScenarioConfig &cfg, double d1, double d2,
                                        const std::vector<ArrayKind> &kinds,
                                        const std::vector<std::uint64_t> &seeds) {
    SpacingPointResult out;
    ScenarioConfig base = cfg;
    base.kind = cfg.kind;
    const ChannelFactory anchor_factory(base, base.geometry_at(d1, d2));
    RealizedPoint anchor = realize_point(anchor_factory, base, seeds);

    out.rates_per_kind.resize(kinds.size());
    for (std::size_t kk = 0; kk < kinds.size(); ++kk) {
        std::vector<EquivalentChannelSet> sets;
        if (kinds[kk] == cfg.kind) {
            sets = anchor.channels;
        } else {
            ScenarioConfig alt = cfg;
            alt.kind = kinds[kk];
            const ChannelFactory f(alt, alt.geometry_at(d1, d2));
            sets.reserve(seeds.size());
            for (const auto s : seeds) {
                sets.push_back(f.realize(s));
                apply_noise(sets.back(), anchor.noise);
            }
        }
        for (std::size_t r = 0; r < seeds.size(); ++r) {
            const auto caps = draw_capabilities(cfg, seeds[r]);
            out.rates_per_kind[kk].push_back(
                inner_optimize(sets[r], cfg.scheme, caps, cfg.inner, cfg.P_T).sum_rate);
        }
    }
    return out;
}

// label -> (scheme, capability case) rows of the scheme comparison sweeps
struct SchemeVariant {
    std::string label;
    PowerScheme scheme;
    CapabilityCase cap_case = CapabilityCase::case1;
};

inline std::vector<SchemeVariant> parse_scheme_variants(const std::vector<std::string> &labels) {
    std::vector<SchemeVariant> out;
    for (const auto &label : labels) {
        SchemeVariant v;
        v.label = label;
        if (label == "CWPA") {
            v.scheme = PowerScheme::cwpa();
        } else if (label.rfind("BWPA", 0) == 0) {
            double beta = 1.0;
            if (const auto pos = label.find(':'); pos != std::string::npos)
                beta = std::stod(label.substr(pos + 1));
            v.scheme = PowerScheme::bwpa(beta);
        } else if (label.rfind("JPA", 0) == 0) {
            v.scheme = PowerScheme::jpa();
            int c = 1;
            if (const auto pos = label.find(':'); pos != std::string::npos)
                c = std::stoi(label.substr(pos + 1));
            if (c < 1 || c > 4)
                throw config_error("experiment.schemes: JPA case must be 1..4 in '" + label + "'");
            v.cap_case = static_cast<CapabilityCase>(c);
        } else {
            throw config_error("experiment.schemes: unknown variant '" + label + "'");
        }
        out.push_back(v);
    }
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// sweep-spacing: inner optimization only, at a list of fixed spacings.
// Linear scenarios also emit the other linear orientation under the same
// noise floor; planar scenarios emit the (delta1, delta2) grid long-format.
// ---------------------------------------------------------------------------
struct SpacingSweepSpec {
    std::vector<double> values;  // spacings [m]; empty = n_points linspace over the domain
    std::vector<double> values2; // planar vertical spacings; empty = same as values
    int n_points = 15;
    int seeds_per_point = 0; // 0 = scenario ensemble_size
};

inline void sweep_spacing(const ScenarioConfig &cfg, SpacingSweepSpec spec, const RunContext &ctx) {
    if (spec.values.empty()) {
        const double lo = cfg.delta_min();
        const double hi = cfg.kind == ArrayKind::planar ? std::min(cfg.delta_max(), cfg.delta2_max()) : cfg.delta_max();
        for (int i = 0; i < spec.n_points; ++i)
            spec.values.push_back(lo + (hi - lo) * i / std::max(1, spec.n_points - 1));
    }
    const int n_seeds = spec.seeds_per_point > 0 ? spec.seeds_per_point : cfg.ensemble_size;
    const auto seeds = detail::point_seeds(cfg, n_seeds);

    std::vector<std::pair<double, double>> points;
    if (cfg.kind == ArrayKind::planar) {
        const auto &v2 = spec.values2.empty() ? spec.values : spec.values2;
        for (const double a : spec.values)
            for (const double b : v2)
                points.emplace_back(a, b);
    } else {
        for (const double a : spec.values)
            points.emplace_back(a, 0.0);
    }
    const std::vector<ArrayKind> kinds = cfg.kind == ArrayKind::planar
                                             ? std::vector<ArrayKind>{ArrayKind::planar}
                                             : std::vector<ArrayKind>{ArrayKind::colinear, ArrayKind::parallel};

    std::vector<detail::SpacingPointResult> results(points.size());
    parallel_for(static_cast<int>(points.size()), resolve_threads(ctx.threads), [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        results[idx] = detail::spacing_point(cfg, points[idx].first, points[idx].second, kinds, seeds);
    });

    CsvFile csv(ctx.out_dir / "spacing.csv",
                {"kind", "delta1_m", "delta2_m", "mean_sumrate_bps", "std_bps", "n_seeds", "master_seed", "K",
                 "M_L", "M_H", "snr_db", "P_T_w"});
    for (std::size_t kk = 0; kk < kinds.size(); ++kk)
        for (std::size_t i = 0; i < points.size(); ++i) {
            const detail::Stats s = detail::stats_of(results[i].rates_per_kind[kk]);
            csv.row(to_string(kinds[kk]), points[i].first, points[i].second, s.mean, s.stddev, s.n,
                    cfg.master_seed, cfg.K, cfg.M_L, cfg.M_H, cfg.snr_db, cfg.P_T);
        }
}

// ---------------------------------------------------------------------------
// sweep-subcarriers / sweep-snr: every configured scheme variant on shared
// realizations per point.
// ---------------------------------------------------------------------------
struct SchemeSweepSpec {
    std::vector<double> values;       // subcarriers-per-band or snr_db values
    std::vector<std::string> schemes; // e.g. CWPA, BWPA:1, JPA:1 .. JPA:4
    int seeds_per_point = 0;
};

namespace detail {

inline void scheme_sweep(const ScenarioConfig &cfg, const SchemeSweepSpec &spec, const RunContext &ctx,
                         bool sweep_subcarrier_count, const char *x_name, const char *csv_name) {
    if (spec.values.empty())
        throw config_error("experiment.values: a non-empty sweep list is required");
    const auto variants = parse_scheme_variants(
        spec.schemes.empty() ? std::vector<std::string>{"CWPA", "BWPA:1", "JPA:1", "JPA:2", "JPA:3", "JPA:4"}
                             : spec.schemes);
    const int n_seeds = spec.seeds_per_point > 0 ? spec.seeds_per_point : cfg.ensemble_size;

    struct Cell {
        std::vector<double> rates;
    };
    std::vector<std::vector<Cell>> table(spec.values.size(), std::vector<Cell>(variants.size()));

    parallel_for(static_cast<int>(spec.values.size()), resolve_threads(ctx.threads), [&](int xi) {
        ScenarioConfig point = cfg;
        if (sweep_subcarrier_count) {
            point.M_L = static_cast<int>(spec.values[static_cast<std::size_t>(xi)]);
            point.M_H = point.M_L;
        } else {
            point.snr_db = spec.values[static_cast<std::size_t>(xi)];
        }
        const auto seeds = point_seeds(point, n_seeds);
        const ChannelFactory factory(point, point.geometry());
        const RealizedPoint rp = realize_point(factory, point, seeds);
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            ScenarioConfig variant = point;
            variant.scheme = variants[vi].scheme;
            variant.cap_case = variants[vi].cap_case;
            auto &cell = table[static_cast<std::size_t>(xi)][vi];
            for (std::size_t r = 0; r < seeds.size(); ++r) {
                const auto caps = draw_capabilities(variant, seeds[r]);
                cell.rates.push_back(
                    inner_optimize(rp.channels[r], variant.scheme, caps, variant.inner, variant.P_T).sum_rate);
            }
        }
    });

    CsvFile csv(ctx.out_dir / csv_name,
                {x_name, "variant", "mean_sumrate_bps", "std_bps", "n_seeds", "master_seed", "kind", "K",
                 "delta1_m", "P_T_w"});
    for (std::size_t xi = 0; xi < spec.values.size(); ++xi)
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            const Stats s = stats_of(table[xi][vi].rates);
            csv.row(spec.values[xi], variants[vi].label, s.mean, s.stddev, s.n, cfg.master_seed,
                    to_string(cfg.kind), cfg.K, cfg.delta, cfg.P_T);
        }
}

} // namespace detail

inline void sweep_subcarriers(const ScenarioConfig &cfg, const SchemeSweepSpec &spec, const RunContext &ctx) {
    detail::scheme_sweep(cfg, spec, ctx, true, "subcarriers_per_band", "subcarriers.csv");
}

inline void sweep_snr(const ScenarioConfig &cfg, const SchemeSweepSpec &spec, const RunContext &ctx) {
    detail::scheme_sweep(cfg, spec, ctx, false, "snr_db", "snr.csv");
}

// ---------------------------------------------------------------------------
// bode: equivalent-channel gain and radiation efficiency against frequency
// for the coupled orientations and the uncoupled baseline, paired fading.
// ---------------------------------------------------------------------------
struct BodeSpec {
    double f_min = 1e9;
    double f_max = 20e9;
    int n_points = 39;
    int seeds = 0;
};

inline void bode(const ScenarioConfig &cfg, const BodeSpec &spec, const RunContext &ctx) {
    if (!(spec.f_min > 0.0) || !(spec.f_max > spec.f_min) || spec.n_points < 2)
        throw config_error("experiment.bode: need 0 < f_min < f_max and at least two points");
    const int n_seeds = spec.seeds > 0 ? spec.seeds : cfg.ensemble_size;
    const auto seeds = detail::point_seeds(cfg, n_seeds);

    // the frequency sweep rides the subcarrier machinery: one grid entry per
    // sample frequency
    SubcarrierGrid fgrid;
    fgrid.M_L = spec.n_points;
    fgrid.M_H = 0;
    for (int i = 0; i < spec.n_points; ++i) {
        const double f = spec.f_min + (spec.f_max - spec.f_min) * i / (spec.n_points - 1);
        fgrid.entries.push_back({f, cfg.B_L, Band::low});
    }

    struct KindCurve {
        std::string label;
        ScenarioConfig cfg;
        std::vector<double> gain_db;
        std::vector<double> eta;
    };
    std::vector<KindCurve> curves;
    const bool planar = cfg.kind == ArrayKind::planar;
    for (const ArrayKind kind :
         planar ? std::vector<ArrayKind>{ArrayKind::planar, ArrayKind::colinear, ArrayKind::parallel}
                : std::vector<ArrayKind>{ArrayKind::colinear, ArrayKind::parallel}) {
        KindCurve c;
        c.label = to_string(kind);
        c.cfg = cfg;
        c.cfg.kind = kind;
        if (kind != ArrayKind::planar) {
            c.cfg.D2 = 0.0;
            c.cfg.delta2 = 0.0;
        }
        curves.push_back(std::move(c));
    }
    {
        KindCurve unc;
        unc.label = "uncoupled";
        unc.cfg = cfg;
        if (planar) {
            unc.cfg.kind = ArrayKind::planar;
        } else {
            unc.cfg.kind = ArrayKind::colinear;
        }
        unc.cfg.coupling = false;
        curves.push_back(std::move(unc));
    }

    parallel_for(static_cast<int>(curves.size()), resolve_threads(ctx.threads), [&](int ci) {
        KindCurve &c = curves[static_cast<std::size_t>(ci)];
        const ArrayGeometry geom = c.cfg.geometry();
        const ChannelFactory factory(c.cfg, geom, fgrid);
        std::vector<double> mean_gain(static_cast<std::size_t>(spec.n_points), 0.0);
        for (const auto s : seeds) {
            const EquivalentChannelSet set = factory.realize(s);
            for (int i = 0; i < spec.n_points; ++i)
                mean_gain[static_cast<std::size_t>(i)] +=
                    set.H_tilde[static_cast<std::size_t>(i)].squaredNorm() / (c.cfg.K * geom.N);
        }
        for (int i = 0; i < spec.n_points; ++i) {
            const double g = mean_gain[static_cast<std::size_t>(i)] / static_cast<double>(seeds.size());
            c.gain_db.push_back(10.0 * std::log10(g));
            c.eta.push_back(max_radiation_efficiency(factory.zt(i), c.cfg.R));
        }
    });

    CsvFile gain(ctx.out_dir / "bode_gain.csv",
                 {"f_hz", "kind", "mean_equivalent_gain_db", "n_seeds", "master_seed", "delta1_m", "K"});
    CsvFile eff(ctx.out_dir / "bode_efficiency.csv", {"f_hz", "kind", "eta_eff", "delta1_m"});
    for (const auto &c : curves)
        for (int i = 0; i < spec.n_points; ++i) {
            gain.row(fgrid.entries[static_cast<std::size_t>(i)].f, c.label,
                     c.gain_db[static_cast<std::size_t>(i)], static_cast<int>(seeds.size()), cfg.master_seed,
                     cfg.delta, cfg.K);
            eff.row(fgrid.entries[static_cast<std::size_t>(i)].f, c.label, c.eta[static_cast<std::size_t>(i)],
                    cfg.delta);
        }
}

// ---------------------------------------------------------------------------
// optimize: one offline search, or one online search per frozen realization.
// ---------------------------------------------------------------------------
struct OptimizeSpec {
    std::string mode = "offline"; // offline | online
    int online_runs = 0;          // 0 = scenario ensemble_size
};

inline void write_search_rows(CsvFile &csv, const std::string &mode, int seed_index, std::uint64_t seed,
                              const SearchResult &res) {
    csv.row(mode, seed_index, seed, res.delta_star, res.planar ? fmt_num(res.delta2_star) : std::string("0"),
            res.g_star, res.evaluations, res.inner_runs, res.pso_evals, res.bracket_evals, res.golden_evals,
            res.gradient_evals, res.delta_snapped, static_cast<long>(res.active_mask.size()));
}

inline void optimize(const ScenarioConfig &cfg, const OptimizeSpec &spec, const RunContext &ctx) {
    CsvFile csv(ctx.out_dir / "optimize.csv",
                {"mode", "seed_index", "realization_seed", "delta_star_m", "delta2_star_m", "g_star_bps",
                 "evaluations", "inner_runs", "pso_evals", "bracket_evals", "golden_evals", "gradient_evals",
                 "delta_snapped_m", "active_elements"});
    if (spec.mode == "offline") {
        const SearchResult res = offline_optimize(cfg, cfg.search, cfg.master_seed);
        write_search_rows(csv, "offline", -1, cfg.master_seed, res);
        CsvFile trace(ctx.out_dir / "optimize_trace.csv", {"order", "delta1_m", "delta2_m", "g_bps"});
        for (std::size_t i = 0; i < res.trace.size(); ++i)
            trace.row(static_cast<long>(i), res.trace[i].delta1, res.trace[i].delta2, res.trace[i].g);
        return;
    }
    if (spec.mode != "online")
        throw config_error("experiment.mode: expected offline or online");
    const int runs = spec.online_runs > 0 ? spec.online_runs : cfg.ensemble_size;
    std::vector<SearchResult> results(static_cast<std::size_t>(runs));
    const auto seeds = detail::point_seeds(cfg, runs);
    parallel_for(runs, resolve_threads(ctx.threads), [&](int r) {
        results[static_cast<std::size_t>(r)] = online_optimize(cfg, cfg.search, seeds[static_cast<std::size_t>(r)]);
    });
    CsvFile mask(ctx.out_dir / "online_mask.csv", {"seed_index", "dense_grid_index"});
    for (int r = 0; r < runs; ++r) {
        write_search_rows(csv, "online", r, seeds[static_cast<std::size_t>(r)], results[static_cast<std::size_t>(r)]);
        for (const int m : results[static_cast<std::size_t>(r)].active_mask)
            mask.row(r, m);
    }
}

// ---------------------------------------------------------------------------
// compare-modes: offline spacing fixed once against the matched ensemble,
// then per-realization online re-optimization; one shared noise map.
// ---------------------------------------------------------------------------
struct CompareModesSpec {
    std::vector<double> snr_values; // empty = the scenario's snr_db
    int seeds = 0;                  // matched realizations per point
};

inline void compare_modes(const ScenarioConfig &cfg, const CompareModesSpec &spec, const RunContext &ctx) {
    std::vector<double> snrs = spec.snr_values.empty() ? std::vector<double>{cfg.snr_db} : spec.snr_values;
    const int n_seeds = spec.seeds > 0 ? spec.seeds : cfg.ensemble_size;

    CsvFile modes(ctx.out_dir / "compare_modes.csv",
                  {"snr_db", "mode", "mean_sumrate_bps", "std_bps", "n_seeds", "master_seed", "delta_star_m"});
    CsvFile evals(ctx.out_dir / "evaluations.csv",
                  {"snr_db", "mode", "seed_index", "pso_evals", "bracket_evals", "golden_evals",
                   "gradient_evals", "total_evals", "inner_runs", "complexity_ratio"});

    for (const double snr : snrs) {
        ScenarioConfig point = cfg;
        point.snr_db = snr;
        SearchConfig scfg = point.search;
        scfg.ensemble_size = n_seeds; // the offline objective averages the matched set
        const auto seeds = detail::point_seeds(point, n_seeds);

        const SearchResult off = offline_optimize(point, scfg, point.master_seed);

        std::vector<double> offline_rates(static_cast<std::size_t>(n_seeds));
        std::vector<SearchResult> online(static_cast<std::size_t>(n_seeds));
        parallel_for(n_seeds, resolve_threads(ctx.threads), [&](int r) {
            const auto idx = static_cast<std::size_t>(r);
            offline_rates[idx] =
                evaluate_realization(point, off.delta_star, off.delta2_star, seeds[idx], seeds);
            online[idx] = online_optimize(point, point.search, seeds[idx], seeds);
        });

        const detail::Stats so = detail::stats_of(offline_rates);
        std::vector<double> online_rates;
        online_rates.reserve(static_cast<std::size_t>(n_seeds));
        for (const auto &res : online)
            online_rates.push_back(res.g_star);
        const detail::Stats sn = detail::stats_of(online_rates);
        modes.row(snr, "offline", so.mean, so.stddev, so.n, point.master_seed, off.delta_star);
        modes.row(snr, "online", sn.mean, sn.stddev, sn.n, point.master_seed, 0.0);

        // offline in operation costs exactly one inner run per period
        for (int r = 0; r < n_seeds; ++r)
            evals.row(snr, "offline", r, 0L, 0L, 0L, 0L, 1L, 1L, 1.0);
        for (int r = 0; r < n_seeds; ++r) {
            const SearchResult &res = online[static_cast<std::size_t>(r)];
            evals.row(snr, "online", r, res.pso_evals, res.bracket_evals, res.golden_evals,
                      res.gradient_evals, res.evaluations, res.inner_runs,
                      1.0 / static_cast<double>(res.evaluations));
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment dispatch from the config's "experiment" object.
// ---------------------------------------------------------------------------
inline void run_experiment(const ScenarioConfig &cfg, const nlohmann::json &experiment, const RunContext &ctx) {
    using detail::get_opt;
    if (!experiment.contains("type"))
        throw config_error("experiment.type: missing required field");
    const std::string type = experiment.at("type").get<std::string>();
    write_manifest(ctx, cfg, experiment);

    auto values_of = [&](const char *key) {
        std::vector<double> v;
        if (experiment.contains(key))
            for (const auto &x : experiment.at(key))
                v.push_back(x.get<double>());
        return v;
    };

    if (type == "sweep-spacing") {
        SpacingSweepSpec spec;
        spec.values = values_of("deltas");
        spec.values2 = values_of("deltas2");
        spec.n_points = get_opt<int>(experiment, "experiment", "n_points", 15);
        spec.seeds_per_point = get_opt<int>(experiment, "experiment", "seeds_per_point", 0);
        sweep_spacing(cfg, spec, ctx);
    } else if (type == "sweep-subcarriers" || type == "sweep-snr") {
        SchemeSweepSpec spec;
        spec.values = values_of("values");
        if (experiment.contains("schemes"))
            for (const auto &s : experiment.at("schemes"))
                spec.schemes.push_back(s.get<std::string>());
        spec.seeds_per_point = get_opt<int>(experiment, "experiment", "seeds_per_point", 0);
        if (type == "sweep-subcarriers")
            sweep_subcarriers(cfg, spec, ctx);
        else
            sweep_snr(cfg, spec, ctx);
    } else if (type == "bode") {
        BodeSpec spec;
        spec.f_min = get_opt<double>(experiment, "experiment", "f_min", 1e9);
        spec.f_max = get_opt<double>(experiment, "experiment", "f_max", 20e9);
        spec.n_points = get_opt<int>(experiment, "experiment", "n_points", 39);
        spec.seeds = get_opt<int>(experiment, "experiment", "seeds", 0);
        bode(cfg, spec, ctx);
    } else if (type == "optimize") {
        OptimizeSpec spec;
        spec.mode = get_opt<std::string>(experiment, "experiment", "mode", "offline");
        spec.online_runs = get_opt<int>(experiment, "experiment", "online_runs", 0);
        optimize(cfg, spec, ctx);
    } else if (type == "compare-modes") {
        CompareModesSpec spec;
        spec.snr_values = values_of("snr_values");
        spec.seeds = get_opt<int>(experiment, "experiment", "seeds", 0);
        compare_modes(cfg, spec, ctx);
    } else {
        throw config_error("experiment.type: unknown experiment '" + type + "'");
    }
}

} // namespace mbmimo

#endif
