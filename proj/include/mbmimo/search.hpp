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
// Outer spacing optimization: particle-swarm seeding, Swann step-doubling
// bracketing with golden-section refinement for linear arrays, projected
// gradient ascent for planar arrays, and the offline / online drivers.
// Every objective probe is counted per phase; the audited total equals the
// number of inner-optimization runs.

#ifndef MBMIMO_SEARCH_HPP
#define MBMIMO_SEARCH_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "mbmimo/common.hpp"
#include "mbmimo/scenario.hpp"

namespace mbmimo {

enum class SearchPhase { pso, bracket, golden, gradient };

// Live evaluation counters; atomic so concurrent probes may share a handle.
struct EvalMonitor {
    std::atomic<long> pso{0}, bracket{0}, golden{0}, gradient{0};
    std::atomic<long> inner_runs{0};
    SearchPhase phase = SearchPhase::pso;

    void count_eval() {
        switch (phase) {
        case SearchPhase::pso: ++pso; break;
        case SearchPhase::bracket: ++bracket; break;
        case SearchPhase::golden: ++golden; break;
        case SearchPhase::gradient: ++gradient; break;
        }
    }
    [[nodiscard]] long evaluations() const { return pso + bracket + golden + gradient; }
};

struct TracePoint {
    double delta1;
    double delta2; // 0 for linear arrays
    double g;      // bits/s
};

struct SearchResult {
    bool planar = false;
    double delta_star = 0.0;
    double delta2_star = 0.0;
    double g_star = 0.0;   // max over the trace
    long evaluations = 0;  // objective evaluations
    long inner_runs = 0;   // audited inner-optimization invocations
    long pso_evals = 0, bracket_evals = 0, golden_evals = 0, gradient_evals = 0;
    std::vector<TracePoint> trace;

    // online mode extras: spacing snapped to the dense-grid pitch and the
    // indices of the activated dense-grid elements
    double delta_snapped = 0.0;
    std::vector<int> active_mask;
    std::vector<int> active_mask2;
};

// ---------------------------------------------------------------------------
// Particle swarm over a box domain. Velocities start uniform in
// [-1/2, 1/2] scaled by the domain width; outliers are mapped to the domain
// margins. Returns the global best after I_PS iterations.
// ---------------------------------------------------------------------------
template <int Dim>
inline std::array<double, Dim> particle_swarm_nd(const std::function<double(const std::array<double, Dim> &)> &g,
                                                 const std::array<double, Dim> &lo, const std::array<double, Dim> &hi,
                                                 const SearchConfig &cfg, RngStream rng) {
    const int zeta = cfg.zeta;
    std::vector<std::array<double, Dim>> x(static_cast<std::size_t>(zeta)), v(static_cast<std::size_t>(zeta)),
        pbest_x(static_cast<std::size_t>(zeta));
    std::vector<double> pbest(static_cast<std::size_t>(zeta));

    for (int p = 0; p < zeta; ++p)
        for (int d = 0; d < Dim; ++d)
            x[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] = rng.uniform(lo[static_cast<std::size_t>(d)], hi[static_cast<std::size_t>(d)]);
    for (int p = 0; p < zeta; ++p)
        for (int d = 0; d < Dim; ++d)
            v[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] =
                rng.uniform(-0.5, 0.5) * (hi[static_cast<std::size_t>(d)] - lo[static_cast<std::size_t>(d)]);

    std::array<double, Dim> gbest_x = x[0];
    double gbest = -std::numeric_limits<double>::infinity();
    for (int p = 0; p < zeta; ++p) {
        pbest_x[static_cast<std::size_t>(p)] = x[static_cast<std::size_t>(p)];
        pbest[static_cast<std::size_t>(p)] = g(x[static_cast<std::size_t>(p)]);
        if (pbest[static_cast<std::size_t>(p)] > gbest) {
            gbest = pbest[static_cast<std::size_t>(p)];
            gbest_x = x[static_cast<std::size_t>(p)];
        }
    }

    for (int t = 0; t < cfg.I_PS; ++t) {
        for (int p = 0; p < zeta; ++p) {
            for (int d = 0; d < Dim; ++d) {
                const double r = rng.next_double();
                const double s = rng.next_double();
                auto &vi = v[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)];
                auto &xi = x[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)];
                vi = cfg.C1 * vi + cfg.C2 * r * (pbest_x[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] - xi) +
                     cfg.C3 * s * (gbest_x[static_cast<std::size_t>(d)] - xi);
                xi = std::clamp(xi + vi, lo[static_cast<std::size_t>(d)], hi[static_cast<std::size_t>(d)]);
            }
        }
        for (int p = 0; p < zeta; ++p) {
            const double val = g(x[static_cast<std::size_t>(p)]);
            if (val > pbest[static_cast<std::size_t>(p)]) {
                pbest[static_cast<std::size_t>(p)] = val;
                pbest_x[static_cast<std::size_t>(p)] = x[static_cast<std::size_t>(p)];
            }
        }
        for (int p = 0; p < zeta; ++p)
            if (pbest[static_cast<std::size_t>(p)] > gbest) {
                gbest = pbest[static_cast<std::size_t>(p)];
                gbest_x = pbest_x[static_cast<std::size_t>(p)];
            }
    }
    return gbest_x;
}

inline double particle_swarm(const std::function<double(double)> &g, double lo, double hi, const SearchConfig &cfg,
                             RngStream rng) {
    if (!(lo < hi))
        throw domain_error("particle_swarm: empty domain");
    auto wrapped = [&](const std::array<double, 1> &x) { return g(x[0]); };
    return particle_swarm_nd<1>(wrapped, {lo}, {hi}, cfg, rng)[0];
}

// ---------------------------------------------------------------------------
// Swann bracketing: geometric step doubling in the ascent direction until
// the objective decreases. Probes are clipped to [lo, hi]; a monotone rise
// ends the bracket at the domain edge.
// ---------------------------------------------------------------------------
struct Bracket {
    double L;
    double R;
};

inline Bracket swan_bracket(const std::function<double(double)> &g, double delta0, double delta_tilde, double lo,
                            double hi) {
    if (!(delta_tilde > 0.0))
        throw domain_error("swan_bracket: step must be positive");
    delta0 = std::clamp(delta0, lo, hi);
    if (delta_tilde >= hi - lo)
        return {lo, hi};

    const double f0 = g(delta0);
    const double right = std::min(delta0 + delta_tilde, hi);
    const double left = std::max(delta0 - delta_tilde, lo);

    double x0 = delta0, x1 = 0.0, f1 = 0.0, dir = 0.0;
    bool went_right = false;
    double f_right = 0.0;
    if (right > delta0) {
        f_right = g(right);
        went_right = true;
    }
    if (went_right && f_right >= f0) {
        dir = 1.0;
        x1 = right;
        f1 = f_right;
    } else {
        if (!(left < delta0)) // pinned at the lower edge with a falling right probe
            return {delta0, right};
        const double f_left = g(left);
        if (went_right && f_left < f0)
            return {left, right}; // the start is already a local peak
        if (!went_right && f_left < f0)
            return {left, delta0}; // peak at the upper edge
        dir = -1.0;
        x1 = left;
        f1 = f_left;
    }

    double step = delta_tilde;
    while (true) {
        step *= 2.0;
        const double x2 = std::clamp(x1 + dir * step, lo, hi);
        if (x2 == x1) // pinned at the boundary while still ascending
            return {std::min(x0, x1), std::max(x0, x1)};
        const double f2 = g(x2);
        if (f2 < f1)
            return {std::min(x0, x2), std::max(x0, x2)};
        x0 = x1;
        x1 = x2;
        f1 = f2;
    }
}

// ---------------------------------------------------------------------------
// Golden-section maximization down to an interval of width tol; returns the
// final midpoint (not evaluated here).
// ---------------------------------------------------------------------------
inline double golden_section(const std::function<double(double)> &g, double L, double R, double tol) {
    if (!(L < R))
        throw domain_error("golden_section: empty interval");
    if (tol >= R - L)
        return 0.5 * (L + R);
    constexpr double gr = 0.6180339887498949; // (sqrt(5)-1)/2
    double c = R - gr * (R - L);
    double d = L + gr * (R - L);
    double fc = g(c);
    double fd = g(d);
    while (R - L > tol) {
        if (fc >= fd) {
            R = d;
            d = c;
            fd = fc;
            c = R - gr * (R - L);
            fc = g(c);
        } else {
            L = c;
            c = d;
            fc = fd;
            d = L + gr * (R - L);
            fd = g(d);
        }
    }
    return 0.5 * (L + R);
}

// ---------------------------------------------------------------------------
// Projected gradient ascent on a box, central finite differences, fixed step
// with halving on non-improvement.
// ---------------------------------------------------------------------------
struct Box2D {
    double lo1, hi1, lo2, hi2;
    [[nodiscard]] std::pair<double, double> project(double x, double y) const {
        return {std::clamp(x, lo1, hi1), std::clamp(y, lo2, hi2)};
    }
    [[nodiscard]] bool contains(double x, double y) const {
        return x >= lo1 && x <= hi1 && y >= lo2 && y <= hi2;
    }
};

inline std::pair<double, double> gradient_ascent_2d(const std::function<double(double, double)> &g,
                                                    std::pair<double, double> start, const SearchConfig &cfg,
                                                    const Box2D &box, int max_iters = 100) {
    if (!box.contains(start.first, start.second))
        throw config_error("gradient_ascent_2d: start point outside the feasible box");
    auto [x, y] = start;
    double fx = g(x, y);
    double step = cfg.ga_step * std::min(box.hi1 - box.lo1, box.hi2 - box.lo2);
    const double h = cfg.fd_step;

    for (int it = 0; it < max_iters; ++it) {
        // central differences on clamped probes, normalized by the actual span
        const double xp = std::min(x + h, box.hi1), xm = std::max(x - h, box.lo1);
        const double yp = std::min(y + h, box.hi2), ym = std::max(y - h, box.lo2);
        const double gx = (g(xp, y) - g(xm, y)) / (xp - xm);
        const double gy = (g(x, yp) - g(x, ym)) / (yp - ym);
        const double norm = std::hypot(gx, gy);
        const double min_improve =
            cfg.ga_min_improvement > 0.0 ? cfg.ga_min_improvement : 1e-6 * std::max(std::abs(fx), 1e-300);
        if (norm == 0.0)
            break;

        bool accepted = false;
        double improvement = 0.0;
        double s = step;
        while (s > 1e-3 * h) {
            auto [cx, cy] = box.project(x + s * gx / norm, y + s * gy / norm);
            const double fc = g(cx, cy);
            if (fc > fx) {
                improvement = fc - fx;
                x = cx;
                y = cy;
                fx = fc;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted || improvement < min_improve)
            break;
        step = s; // keep the accepted scale as the next starting step
    }
    return {x, y};
}

// ---------------------------------------------------------------------------
// Offline / online drivers.
// ---------------------------------------------------------------------------

namespace detail {

// Objective closing over a frozen realization set: mean optimal sum-rate at
// spacing delta, with the noise floor re-anchored at each spacing from the
// calibration seed set. Probes outside the domain are a logic error.
class SpacingObjective {
  public:
    SpacingObjective(const ScenarioConfig &cfg, std::vector<std::uint64_t> eval_seeds,
                     std::vector<std::uint64_t> calib_seeds, EvalMonitor &monitor)
        : cfg_(cfg), eval_seeds_(std::move(eval_seeds)), calib_seeds_(std::move(calib_seeds)), monitor_(&monitor) {}

    double operator()(double d1, double d2, std::vector<TracePoint> *trace) const {
        const ArrayGeometry geom = cfg_.geometry_at(d1, d2);
        const ChannelFactory factory(cfg_, geom);

        NoiseCalibration noise;
        if (calib_seeds_ == eval_seeds_) {
            RealizedPoint pt = realize_point(factory, cfg_, eval_seeds_);
            const double val = mean_rate(pt.channels);
            record(d1, d2, val, trace);
            return val;
        }
        {
            std::vector<EquivalentChannelSet> calib;
            calib.reserve(calib_seeds_.size());
            for (const auto s : calib_seeds_)
                calib.push_back(factory.realize(s));
            noise = calibrate_noise(cfg_.snr_db, factory.grid(), calib, cfg_.P_T);
        }
        std::vector<EquivalentChannelSet> sets;
        sets.reserve(eval_seeds_.size());
        for (const auto s : eval_seeds_) {
            sets.push_back(factory.realize(s));
            apply_noise(sets.back(), noise);
        }
        const double val = mean_rate(sets);
        record(d1, d2, val, trace);
        return val;
    }

  private:
    double mean_rate(const std::vector<EquivalentChannelSet> &sets) const {
        double acc = 0.0;
        for (std::size_t r = 0; r < sets.size(); ++r) {
            const auto caps = draw_capabilities(cfg_, eval_seeds_[r]);
            acc += inner_optimize(sets[r], cfg_.scheme, caps, cfg_.inner, cfg_.P_T).sum_rate;
            ++monitor_->inner_runs;
        }
        return acc / static_cast<double>(sets.size());
    }

    void record(double d1, double d2, double val, std::vector<TracePoint> *trace) const {
        monitor_->count_eval();
        if (trace != nullptr)
            trace->push_back({d1, d2, val});
    }

    ScenarioConfig cfg_;
    std::vector<std::uint64_t> eval_seeds_;
    std::vector<std::uint64_t> calib_seeds_;
    EvalMonitor *monitor_;
};

inline SearchResult drive_search(const ScenarioConfig &cfg, const SearchConfig &scfg,
                                 const SpacingObjective &objective, EvalMonitor &monitor, std::uint64_t seed) {
    SearchResult res;
    res.planar = cfg.kind == ArrayKind::planar;

    std::vector<TracePoint> trace;
    const double lo = cfg.delta_min();
    const double hi1 = cfg.delta_max();
    RngStream rng = RngStream(seed).fork(rng_label::search);

    if (!res.planar) {
        std::function<double(double)> g = [&](double d) { return objective(d, 0.0, &trace); };
        monitor.phase = SearchPhase::pso;
        const double delta0 = particle_swarm(g, lo, hi1, scfg, rng);
        monitor.phase = SearchPhase::bracket;
        const double dt = scfg.delta_tilde > 0.0 ? scfg.delta_tilde : 0.05 * (hi1 - lo);
        const Bracket br = swan_bracket(g, delta0, dt, lo, hi1);
        monitor.phase = SearchPhase::golden;
        const double mid = golden_section(g, br.L, br.R, scfg.bisection_tol);
        g(mid); // evaluate the returned point so the trace contains it
    } else {
        const double hi2 = cfg.delta2_max();
        std::function<double(const std::array<double, 2> &)> g2arr = [&](const std::array<double, 2> &x) {
            return objective(x[0], x[1], &trace);
        };
        monitor.phase = SearchPhase::pso;
        const auto start = particle_swarm_nd<2>(g2arr, {lo, lo}, {hi1, hi2}, scfg, rng);
        monitor.phase = SearchPhase::gradient;
        std::function<double(double, double)> g2 = [&](double a, double b) { return objective(a, b, &trace); };
        gradient_ascent_2d(g2, {start[0], start[1]}, scfg, {lo, hi1, lo, hi2});
    }

    res.trace = std::move(trace);
    res.g_star = -std::numeric_limits<double>::infinity();
    for (const auto &t : res.trace)
        if (t.g > res.g_star) {
            res.g_star = t.g;
            res.delta_star = t.delta1;
            res.delta2_star = t.delta2;
        }
    res.pso_evals = monitor.pso;
    res.bracket_evals = monitor.bracket;
    res.golden_evals = monitor.golden;
    res.gradient_evals = monitor.gradient;
    res.evaluations = monitor.evaluations();
    res.inner_runs = monitor.inner_runs;
    return res;
}

} // namespace detail

// Rate of one realization at a fixed spacing, under the same noise-map
// convention the searches use (calibration on calib_seeds at that spacing).
// This is the "in operation" cost unit: exactly one inner-optimization run.
inline double evaluate_realization(const ScenarioConfig &cfg, double delta1, double delta2,
                                   std::uint64_t real_seed, const std::vector<std::uint64_t> &calib_seeds) {
    EvalMonitor monitor;
    detail::SpacingObjective objective(cfg, {real_seed}, calib_seeds, monitor);
    return objective(delta1, delta2, nullptr);
}

// Spacing optimized against the ensemble-average rate over a frozen set of
// realizations (common random numbers across all probes).
inline SearchResult offline_optimize(const ScenarioConfig &cfg, const SearchConfig &scfg, std::uint64_t seed) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(scfg.ensemble_size));
    for (int r = 0; r < scfg.ensemble_size; ++r)
        seeds.push_back(realization_seed(seed, r));
    EvalMonitor monitor;
    detail::SpacingObjective objective(cfg, seeds, seeds, monitor);
    return detail::drive_search(cfg, scfg, objective, monitor, seed);
}

// Spacing re-optimized for one realization on a dense switchable array; the
// result carries the activation mask of the 2a-pitch dense grid.
inline SearchResult online_optimize(const ScenarioConfig &cfg, const SearchConfig &scfg, std::uint64_t real_seed,
                                    std::vector<std::uint64_t> calib_seeds = {}) {
    if (calib_seeds.empty())
        calib_seeds = {real_seed};
    EvalMonitor monitor;
    detail::SpacingObjective objective(cfg, {real_seed}, calib_seeds, monitor);
    SearchResult res = detail::drive_search(cfg, scfg, objective, monitor, real_seed);

    const double pitch = 2.0 * cfg.chu.a;
    const long rho = std::max<long>(1, std::lround(res.delta_star / pitch));
    res.delta_snapped = static_cast<double>(rho) * pitch;
    const int count = ArrayGeometry::axis_count(cfg.D1, res.delta_snapped);
    for (int m = 0; m < count; ++m)
        res.active_mask.push_back(static_cast<int>(m * rho));
    if (res.planar) {
        const long rho2 = std::max<long>(1, std::lround(res.delta2_star / pitch));
        const int count2 = ArrayGeometry::axis_count(cfg.D2 - cfg.chu.a, static_cast<double>(rho2) * pitch);
        for (int m = 0; m < count2; ++m)
            res.active_mask2.push_back(static_cast<int>(m * rho2));
    }
    return res;
}

} // namespace mbmimo

#endif
