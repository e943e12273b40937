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
// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the exit code is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mbmimo/mbmimo.hpp"

using namespace mbmimo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string &what, double seconds) {
    std::printf("[%s] criterion %2d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(), seconds);
    std::fflush(stdout);
    if (!pass)
        ++g_failures;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

MatrixXcd random_cmatrix(RngStream &rng, int r, int c) {
    MatrixXcd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
            M(i, j) = rng.next_cnormal(0.5);
    return M;
}

double mean_of(const std::vector<double> &xs) {
    double m = 0.0;
    for (double x : xs)
        m += x;
    return m / static_cast<double>(xs.size());
}

double stderr_of(const std::vector<double> &xs) {
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs)
        acc += (x - m) * (x - m);
    return std::sqrt(acc / (xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
}

double win_rate(const std::vector<double> &a, const std::vector<double> &b) {
    int wins = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        wins += a[i] >= b[i] * (1.0 - 1e-9) ? 1 : 0;
    return static_cast<double>(wins) / static_cast<double>(a.size());
}

const ChuParams kChu{0.0025, 50.0};

// ---------------------------------------------------------------------------
// 1. The two mutual-information forms agree to 1e-9 relative on 100 random
//    instances with K <= 4, N <= 8.
// ---------------------------------------------------------------------------
void criterion_1() {
    Timer t;
    RngStream rng(101);
    bool ok = true;
    for (int i = 0; i < 100; ++i) {
        const int K = 1 + static_cast<int>(rng.uniform_int(0, 3));
        const int N = 1 + static_cast<int>(rng.uniform_int(0, 7));
        const MatrixXcd H_tilde = random_cmatrix(rng, K, N);
        VectorXcd A(K);
        for (int k = 0; k < K; ++k)
            A(k) = cplx(rng.uniform(0.2, 1.5), rng.uniform(-0.7, 0.7));
        const MatrixXcd W = random_cmatrix(rng, N, K);
        const double sigma2 = rng.uniform(0.05, 2.0);
        const double colored = mutual_information(MatrixXcd(A.asDiagonal() * H_tilde), W, sigma2, A);
        const double whitened = mutual_information(H_tilde, W, sigma2);
        ok = ok && std::abs(colored - whitened) <= 1e-9 * std::max(std::abs(whitened), 1e-300);
    }
    ok = ok && t.seconds() < 10.0;
    report(1, ok, "colored vs normalized mutual information agree to 1e-9 over 100 instances", t.seconds());
}

// ---------------------------------------------------------------------------
// 2. Normalized-channel identity A^-1 H_eq = Z_RT (Z_T + R I)^-1 to 1e-10
//    relative on every synthesis.
// ---------------------------------------------------------------------------
void criterion_2() {
    Timer t;
    RngStream rng(202);
    bool ok = true;
    for (int i = 0; i < 50 && ok; ++i) {
        const double f = rng.uniform(1e9, 20e9);
        const double delta = rng.uniform(0.005, 0.04);
        const ArrayKind kind = rng.next_double() < 0.5 ? ArrayKind::colinear : ArrayKind::parallel;
        const ArrayGeometry geom = ArrayGeometry::linear(kind, delta, 0.08, kChu.a);
        const int K = 1 + static_cast<int>(rng.uniform_int(0, 3));
        const MatrixXcd Z_T = build_zt(f, geom, kChu);
        const MatrixXcd Z_R = build_zr(f, K, kChu);
        const MatrixXcd F = random_cmatrix(rng, K, geom.N);
        VectorXd d(K);
        for (int k = 0; k < K; ++k)
            d(k) = rng.uniform(50.0, 150.0);
        const MatrixXcd Z_RT = transimpedance(f, F, Z_T, d, 2.7, kChu);
        const LoadModel loads = LoadModel::matched(K, kChu.R_a, 50.0);
        const EquivalentChannel eq = equivalent_channel(Z_RT, Z_T, Z_R, loads);
        const MatrixXcd direct =
            Z_RT * (Z_T + 50.0 * MatrixXcd::Identity(geom.N, geom.N)).fullPivLu().inverse();
        const MatrixXcd via_A = eq.A_diag.cwiseInverse().asDiagonal() * eq.H_eq;
        ok = ok && (via_A - direct).norm() <= 1e-10 * direct.norm();
    }
    report(2, ok, "equivalent-channel identity holds to 1e-10 on every synthesis", t.seconds());
}

// ---------------------------------------------------------------------------
// 3. The general mutual-impedance expression reduces to the colinear /
//    parallel forms to 1e-12, and the planar index (delta_pq, beta) formulas
//    match the general expression for 100 random pairs.
// ---------------------------------------------------------------------------
void criterion_3() {
    Timer t;
    RngStream rng(303);
    bool ok = true;
    auto ladder = [](const cplx &jx) { return 1.0 / jx + 1.0 / (jx * jx) + 1.0 / (jx * jx * jx); };
    auto tail = [](const cplx &jx) { return 1.0 / (jx * jx) + 1.0 / (jx * jx * jx); };
    for (int i = 0; i < 100; ++i) {
        const double f = rng.uniform(1e9, 20e9);
        const double d = rng.uniform(0.005, 1.0);
        const double k0 = 2.0 * M_PI * f / speed_of_light;
        const cplx jx(0.0, k0 * d);
        const cplx zs = self_impedance(f, kChu);
        const double r = zs.real();

        const cplx col = mutual_impedance(f, kChu, {d, M_PI, 0.0}, zs, zs);
        const cplx col_ref = 3.0 * r * tail(jx) * std::exp(-jx);
        ok = ok && std::abs(col - col_ref) <= 1e-12 * std::abs(col_ref);

        const cplx par = mutual_impedance(f, kChu, {d, M_PI / 2.0, M_PI / 2.0}, zs, zs);
        const cplx par_ref = 1.5 * r * ladder(jx) * std::exp(-(jx - cplx(0.0, M_PI)));
        ok = ok && std::abs(par - par_ref) <= 1e-12 * std::abs(par_ref);
    }
    // planar pairs: index formulas against the general expression
    const ArrayGeometry pl = ArrayGeometry::planar(0.008, 0.011, 0.06, 0.05, kChu.a);
    for (int i = 0; i < 100; ++i) {
        RngStream prng(7000 + static_cast<std::uint64_t>(i));
        const int p = static_cast<int>(prng.uniform_int(0, static_cast<std::uint64_t>(pl.N - 1)));
        int q = static_cast<int>(prng.uniform_int(0, static_cast<std::uint64_t>(pl.N - 1)));
        if (q == p)
            q = (q + 1) % pl.N;
        const double f = prng.uniform(1e9, 20e9);
        const cplx zs = self_impedance(f, kChu);
        // index arithmetic of the planar formulas, evaluated independently
        const int rp = p / pl.N1, rq = q / pl.N1;
        const double dcol = ((p - q) + pl.N1 * (rq - rp)) * pl.delta1;
        const double drow = (rp - rq) * pl.delta2;
        const double dpq = std::sqrt(dcol * dcol + drow * drow);
        const double beta = std::atan2(std::abs(drow), std::abs(dcol));
        const double k0 = 2.0 * M_PI * f / speed_of_light;
        const cplx jx(0.0, k0 * dpq);
        const double sb = std::sin(beta), cb = std::cos(beta);
        const cplx ref =
            -3.0 * zs.real() * (0.5 * sb * sb * ladder(jx) - cb * cb * tail(jx)) * std::exp(-jx);
        const cplx got = mutual_impedance(f, kChu, pair_placement(pl, p, q), zs, zs);
        ok = ok && std::abs(got - ref) <= 1e-12 * std::abs(ref);
    }
    report(3, ok, "mutual-impedance reductions and planar index formulas agree to 1e-12", t.seconds());
}

// ---------------------------------------------------------------------------
// 4. Maximum radiation efficiency dominates 1e5 random Rayleigh quotients on
//    20 random systems; the eigenvector attains it within 1e-8; the diagonal
//    closed form R_a/(R_a+R) is recovered.
// ---------------------------------------------------------------------------
void criterion_4() {
    Timer t;
    RngStream rng(404);
    bool ok = true;
    for (int sys = 0; sys < 20 && ok; ++sys) {
        const int n = 4 + static_cast<int>(rng.uniform_int(0, 4));
        MatrixXd G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                G(i, j) = rng.next_normal();
        const MatrixXd A = G * G.transpose() + 0.05 * MatrixXd::Identity(n, n);
        MatrixXcd Z = A.cast<cplx>();
        Z += cplx(0.0, 1.0) * MatrixXd(G - G.transpose()).cast<cplx>();
        const double R = rng.uniform(5.0, 100.0);
        const double eta = max_radiation_efficiency(Z, R);
        const MatrixXd B = A + R * MatrixXd::Identity(n, n);
        for (int s = 0; s < 100000 && ok; ++s) {
            VectorXd x(n);
            for (int i = 0; i < n; ++i)
                x(i) = rng.next_normal();
            ok = ok && eta >= x.dot(A * x) / x.dot(B * x) - 1e-12;
        }
        const GeneralizedEigMax ge = generalized_eig_max(A, B);
        const double attained = ge.vector.dot(A * ge.vector) / ge.vector.dot(B * ge.vector);
        ok = ok && std::abs(attained - eta) <= 1e-8 * std::abs(eta);
    }
    const MatrixXcd Zd = kChu.R_a * MatrixXcd::Identity(6, 6);
    ok = ok && std::abs(max_radiation_efficiency(Zd, 50.0) - 50.0 / 100.0) < 1e-12;
    report(4, ok, "peak radiation efficiency dominates 1e5 random drive currents on 20 systems", t.seconds());
}

// ---------------------------------------------------------------------------
// 5. Water-filling: complementary slackness 1e-9, budget saturation
//    1e-8 * P_T, band kappa ratio, and the 3-entry brute-force match.
// ---------------------------------------------------------------------------
void criterion_5() {
    Timer t;
    bool ok = true;
    const SubcarrierGrid grid = build_grid(3, 3, 3.5e9, 17.5e9, 120e3, 480e3);
    const double P_T = 2.0;
    Windows full(4);
    for (auto &w : full)
        for (int i = 0; i < 6; ++i)
            w.push_back(i);

    RngStream rng(505);
    for (int trial = 0; trial < 25; ++trial) {
        EffectiveGains g;
        g.Lambda = MatrixXd::Zero(6, 4);
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 4; ++k)
                g.Lambda(i, k) = rng.next_double() < 0.2 ? 0.0 : rng.uniform(0.0, 4.0);
        if (!(g.Lambda.maxCoeff() > 0.0))
            continue;
        const MatrixXd P = water_fill(g, grid, PowerScheme::jpa(), full, P_T);
        ok = ok && std::abs(P.sum() - P_T) <= 1e-8 * P_T;
        double kappa_base = -1.0;
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 4; ++k)
                if (P(i, k) > 0.0)
                    kappa_base = (P(i, k) + 1.0 / g.Lambda(i, k)) / grid.entries[static_cast<std::size_t>(i)].B;
        for (int i = 0; i < 6; ++i)
            for (int k = 0; k < 4; ++k) {
                const double kappa_i = kappa_base * grid.entries[static_cast<std::size_t>(i)].B;
                if (P(i, k) > 0.0)
                    ok = ok && std::abs(kappa_i - 1.0 / g.Lambda(i, k) - P(i, k)) <= 1e-9;
                else if (g.Lambda(i, k) > 0.0)
                    ok = ok && kappa_i <= 1.0 / g.Lambda(i, k) + 1e-9;
            }
        ok = ok && std::abs((kappa_base * 480e3) / (kappa_base * 120e3) - 4.0) < 1e-12;
    }

    {
        // three entries, mixed bands, against the 1e-4 simplex grid
        const SubcarrierGrid g3 = build_grid(1, 2, 3.5e9, 17.5e9, 120e3, 480e3);
        EffectiveGains g;
        g.Lambda = MatrixXd::Zero(3, 1);
        g.Lambda(0, 0) = 2.0;
        g.Lambda(1, 0) = 1.0;
        g.Lambda(2, 0) = 0.5;
        Windows w(1);
        w[0] = {0, 1, 2};
        const MatrixXd P = water_fill(g, g3, PowerScheme::jpa(), w, P_T);
        const double step = 1e-4;
        double best = -1.0, b0 = 0, b1 = 0;
        for (double p0 = 0.0; p0 <= P_T + step / 2; p0 += step)
            for (double p1 = 0.0; p1 <= P_T - p0 + step / 2; p1 += step) {
                const double r = 120e3 * std::log2(1.0 + 2.0 * p0) + 480e3 * std::log2(1.0 + p1) +
                                 480e3 * std::log2(1.0 + 0.5 * (P_T - p0 - p1));
                if (r > best) {
                    best = r;
                    b0 = p0;
                    b1 = p1;
                }
            }
        ok = ok && std::abs(P(0, 0) - b0) <= 1e-3 && std::abs(P(1, 0) - b1) <= 1e-3 &&
             std::abs(P(2, 0) - (P_T - b0 - b1)) <= 1e-3;
    }
    ok = ok && t.seconds() < 5.0;
    report(5, ok, "water-filling KKT conditions, budget saturation and brute-force match", t.seconds());
}

// ---------------------------------------------------------------------------
// 6. Inner optimization: monotone rate trace on 50 seeded scenarios; the
//    K=2, M=2, N=2 optimum matches an exhaustive power grid within 0.5%.
// ---------------------------------------------------------------------------
void criterion_6() {
    Timer t;
    bool ok = true;

    ScenarioConfig cfg;
    cfg.kind = ArrayKind::colinear;
    cfg.D1 = 0.05;
    cfg.delta = 0.007;
    cfg.K = 4;
    cfg.M_L = cfg.M_H = 6;
    cfg.snr_db = 10.0;
    cfg.validate();
    const ChannelFactory factory(cfg, cfg.geometry());
    for (int s = 0; s < 50 && ok; ++s) {
        const std::uint64_t seed = realization_seed(606, s);
        const RealizedPoint pt = realize_point(factory, cfg, {seed});
        ScenarioConfig variant = cfg;
        variant.cap_case = static_cast<CapabilityCase>(1 + (s % 4));
        const auto caps = draw_capabilities(variant, seed);
        const PowerScheme scheme = s % 3 == 0   ? PowerScheme::jpa()
                                   : s % 3 == 1 ? PowerScheme::bwpa(1.0)
                                                : PowerScheme::cwpa();
        const AllocationState st = inner_optimize(pt.channels.front(), scheme, caps, cfg.inner, cfg.P_T);
        for (std::size_t i = 1; i < st.rate_trace.size(); ++i)
            ok = ok && st.rate_trace[i] >= st.rate_trace[i - 1] - 1e-9 * std::max(1.0, st.rate_trace[i - 1]);
    }

    for (std::uint64_t seed : {61ULL, 62ULL, 63ULL}) {
        EquivalentChannelSet ch;
        ch.grid = build_grid(1, 1, 3.5e9, 17.5e9, 120e3, 480e3);
        RngStream rng(seed);
        for (int i = 0; i < 2; ++i) {
            ch.H_tilde.push_back(random_cmatrix(rng, 2, 2));
            ch.A_diag.push_back(VectorXcd::Ones(2));
        }
        ch.sigma2.resize(2);
        ch.sigma2 << 1.0, 4.0;
        InnerOptions opts;
        opts.delta_R_rel = 1e-9;
        opts.max_iters = 300;
        std::vector<UserCapability> caps(2, UserCapability{2, 2, BandSet::both});
        const AllocationState st = inner_optimize(ch, PowerScheme::jpa(), caps, opts, 2.0);

        std::array<std::array<MatrixXcd, 2>, 2> G;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                G[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                    (ch.H_tilde[static_cast<std::size_t>(i)].row(k).adjoint() *
                     ch.H_tilde[static_cast<std::size_t>(i)].row(k)) /
                    ch.sigma2(i);
        auto band_rate = [&](int i, double pa, double pb) {
            const MatrixXcd M = MatrixXcd::Identity(2, 2) + pa * G[static_cast<std::size_t>(i)][0] +
                                pb * G[static_cast<std::size_t>(i)][1];
            return ch.grid.entries[static_cast<std::size_t>(i)].B *
                   std::log2((M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0)).real());
        };
        const double step = 2.0 / 200.0;
        double best = 0.0;
        for (double p00 = 0.0; p00 <= 2.0 + 1e-12; p00 += step)
            for (double p01 = 0.0; p01 <= 2.0 - p00 + 1e-12; p01 += step) {
                const double r0 = band_rate(0, p00, p01);
                for (double p10 = 0.0; p10 <= 2.0 - p00 - p01 + 1e-12; p10 += step)
                    for (double p11 = 0.0; p11 <= 2.0 - p00 - p01 - p10 + 1e-12; p11 += step)
                        best = std::max(best, r0 + band_rate(1, p10, p11));
            }
        ok = ok && st.sum_rate >= best * (1.0 - 0.005) && st.sum_rate <= best * (1.0 + 0.005);
    }
    ok = ok && t.seconds() < 120.0;
    report(6, ok, "inner optimization is monotone on 50 scenarios and matches the exhaustive grid", t.seconds());
}

// ---------------------------------------------------------------------------
// 7. Scheme ordering at desk scale: M_L = M_H = 10, K = 4, N = 8, 20 seeds.
// ---------------------------------------------------------------------------
void criterion_7() {
    Timer t;
    ScenarioConfig cfg;
    cfg.kind = ArrayKind::colinear;
    cfg.D1 = 0.05;
    cfg.delta = 0.007; // N = 8
    cfg.K = 4;
    cfg.M_L = cfg.M_H = 10;
    cfg.snr_db = 10.0;
    cfg.master_seed = 707;
    cfg.ensemble_size = 20;
    cfg.validate();

    const auto seeds = detail::point_seeds(cfg, 20);
    const ChannelFactory factory(cfg, cfg.geometry());
    const RealizedPoint pt = realize_point(factory, cfg, seeds);

    struct Variant {
        const char *name;
        PowerScheme scheme;
        CapabilityCase cap;
    };
    const std::vector<Variant> variants = {
        {"JPA1", PowerScheme::jpa(), CapabilityCase::case1},
        {"JPA2", PowerScheme::jpa(), CapabilityCase::case2},
        {"JPA3", PowerScheme::jpa(), CapabilityCase::case3},
        {"JPA4", PowerScheme::jpa(), CapabilityCase::case4},
        {"BWPA1", PowerScheme::bwpa(1.0), CapabilityCase::case1},
        {"CWPA", PowerScheme::cwpa(), CapabilityCase::case1},
    };
    std::vector<std::vector<double>> rates(variants.size(), std::vector<double>(seeds.size()));
    parallel_for(static_cast<int>(seeds.size()), resolve_threads(0), [&](int r) {
        for (std::size_t v = 0; v < variants.size(); ++v) {
            ScenarioConfig vc = cfg;
            vc.cap_case = variants[v].cap;
            const auto caps = draw_capabilities(vc, seeds[static_cast<std::size_t>(r)]);
            rates[v][static_cast<std::size_t>(r)] =
                inner_optimize(pt.channels[static_cast<std::size_t>(r)], variants[v].scheme, caps, cfg.inner, cfg.P_T)
                    .sum_rate;
        }
    });

    const auto &jpa1 = rates[0], &jpa2 = rates[1], &jpa3 = rates[2], &jpa4 = rates[3], &bwpa = rates[4],
               &cwpa = rates[5];
    bool ok = true;
    ok = ok && mean_of(jpa1) >= mean_of(bwpa) && win_rate(jpa1, bwpa) >= 0.95;
    ok = ok && mean_of(jpa1) >= mean_of(cwpa) && win_rate(jpa1, cwpa) >= 0.95;
    ok = ok && mean_of(bwpa) >= mean_of(cwpa) * (1.0 - 0.02); // ">= or ~" for the band split
    ok = ok && mean_of(jpa3) < mean_of(jpa1) && win_rate(jpa1, jpa3) >= 0.95;
    ok = ok && mean_of(jpa3) < mean_of(jpa2) && win_rate(jpa2, jpa3) >= 0.95;
    ok = ok && mean_of(jpa3) < mean_of(jpa4) && win_rate(jpa4, jpa3) >= 0.95;
    ok = ok && t.seconds() < 600.0;
    std::ostringstream what;
    what << "scheme ordering (Mbps): JPA1 " << mean_of(jpa1) / 1e6 << " >= BWPA " << mean_of(bwpa) / 1e6
         << " >= CWPA " << mean_of(cwpa) / 1e6 << "; JPA3 " << mean_of(jpa3) / 1e6 << " below cases 1/2/4";
    report(7, ok, what.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 8. Spacing shape: colinear D = 0.2, 15 spacings, 20 seeds; interior
//    maximum with both endpoints > 1 SE below the peak, and the colinear
//    peak at least the parallel peak under the shared noise floor.
// ---------------------------------------------------------------------------
void criterion_8() {
    Timer t;
    ScenarioConfig cfg;
    cfg.kind = ArrayKind::colinear;
    cfg.D1 = 0.2;
    cfg.delta = 0.02;
    cfg.K = 4;
    cfg.M_L = cfg.M_H = 4;
    cfg.snr_db = 10.0;
    cfg.master_seed = 808;
    cfg.ensemble_size = 20;
    cfg.validate();

    const auto seeds = detail::point_seeds(cfg, 20);
    std::vector<double> deltas;
    for (int i = 0; i < 15; ++i)
        deltas.push_back(0.005 + (0.06 - 0.005) * i / 14.0);

    std::vector<detail::SpacingPointResult> pts(deltas.size());
    parallel_for(static_cast<int>(deltas.size()), resolve_threads(0), [&](int i) {
        pts[static_cast<std::size_t>(i)] = detail::spacing_point(
            cfg, deltas[static_cast<std::size_t>(i)], 0.0, {ArrayKind::colinear, ArrayKind::parallel}, seeds);
    });

    std::vector<double> col_mean, col_se, par_mean;
    for (const auto &p : pts) {
        col_mean.push_back(mean_of(p.rates_per_kind[0]));
        col_se.push_back(stderr_of(p.rates_per_kind[0]));
        par_mean.push_back(mean_of(p.rates_per_kind[1]));
    }
    const auto imax = static_cast<std::size_t>(
        std::max_element(col_mean.begin(), col_mean.end()) - col_mean.begin());
    const double peak = col_mean[imax], se = col_se[imax];
    const double par_peak = *std::max_element(par_mean.begin(), par_mean.end());

    bool ok = imax > 0 && imax + 1 < col_mean.size();
    ok = ok && col_mean.front() < peak - se && col_mean.back() < peak - se;
    ok = ok && peak >= par_peak;
    ok = ok && t.seconds() < 900.0;
    std::ostringstream what;
    what << "spacing curve peaks at delta = " << deltas[imax] << " m (interior), colinear peak "
         << peak / 1e6 << " Mbps >= parallel " << par_peak / 1e6 << " Mbps";
    report(8, ok, what.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 9. Frequency response: band-averaged equivalent gain ordering and the
//    efficiency comparison at 1 GHz.
// ---------------------------------------------------------------------------
void criterion_9() {
    Timer t;
    ScenarioConfig cfg;
    cfg.kind = ArrayKind::colinear;
    cfg.D1 = 0.2;
    cfg.delta = 0.01; // N = 21
    cfg.K = 4;
    cfg.M_L = cfg.M_H = 4;
    cfg.master_seed = 909;
    cfg.validate();

    const int n_points = 39;
    SubcarrierGrid fgrid;
    fgrid.M_L = n_points;
    fgrid.M_H = 0;
    for (int i = 0; i < n_points; ++i)
        fgrid.entries.push_back({1e9 + (20e9 - 1e9) * i / (n_points - 1), cfg.B_L, Band::low});
    const auto seeds = detail::point_seeds(cfg, 20);

    auto band_avg_db = [&](ArrayKind kind, bool coupled, std::vector<double> *eta_out) {
        ScenarioConfig c = cfg;
        c.kind = kind;
        c.coupling = coupled;
        const ArrayGeometry geom = c.geometry();
        const ChannelFactory factory(c, geom, fgrid);
        std::vector<double> gain(static_cast<std::size_t>(n_points), 0.0);
        for (const auto s : seeds) {
            const EquivalentChannelSet set = factory.realize(s);
            for (int i = 0; i < n_points; ++i)
                gain[static_cast<std::size_t>(i)] +=
                    set.H_tilde[static_cast<std::size_t>(i)].squaredNorm() / (c.K * geom.N);
        }
        double acc = 0.0;
        for (int i = 0; i < n_points; ++i) {
            acc += 10.0 * std::log10(gain[static_cast<std::size_t>(i)] / static_cast<double>(seeds.size()));
            if (eta_out)
                eta_out->push_back(max_radiation_efficiency(factory.zt(i), c.R));
        }
        return acc / n_points;
    };

    std::vector<double> eta_col, eta_par, eta_unc;
    const double col = band_avg_db(ArrayKind::colinear, true, &eta_col);
    const double par = band_avg_db(ArrayKind::parallel, true, &eta_par);
    const double unc = band_avg_db(ArrayKind::colinear, false, &eta_unc);

    const bool col_gt_par = col > par;
    const bool par_gt_unc = par > unc;
    const bool eff_ok = eta_col.front() >= eta_unc.front() && eta_par.front() >= eta_unc.front();
    const bool ok = col_gt_par && par_gt_unc && eff_ok && t.seconds() < 600.0;
    std::ostringstream what;
    what << "band-averaged gain [dB]: colinear " << col << (col_gt_par ? " > " : " !> ") << "parallel " << par
         << (par_gt_unc ? " > " : " !> ") << "uncoupled " << unc << "; 1 GHz efficiency coupled "
         << eta_col.front() << "/" << eta_par.front() << (eff_ok ? " >= " : " !>= ") << "uncoupled "
         << eta_unc.front();
    report(9, ok, what.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 10. Offline vs online optimization with matched realizations, plus the
//     exact function-evaluation accounting.
// ---------------------------------------------------------------------------
void criterion_10() {
    Timer t;
    ScenarioConfig cfg;
    cfg.kind = ArrayKind::colinear;
    cfg.D1 = 0.05;
    cfg.delta = 0.01;
    cfg.K = 2;
    cfg.M_L = cfg.M_H = 4;
    cfg.snr_db = 10.0;
    cfg.master_seed = 1010;
    cfg.ensemble_size = 20;
    cfg.search.zeta = 6;
    cfg.search.I_PS = 5;
    cfg.search.bisection_tol = 1e-4;
    cfg.search.ensemble_size = 20;
    cfg.validate();

    const auto seeds = detail::point_seeds(cfg, 20);
    const SearchResult off = offline_optimize(cfg, cfg.search, cfg.master_seed);

    std::vector<double> offline_rates(seeds.size()), online_rates(seeds.size());
    std::vector<SearchResult> online(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), resolve_threads(0), [&](int r) {
        const auto i = static_cast<std::size_t>(r);
        offline_rates[i] = evaluate_realization(cfg, off.delta_star, 0.0, seeds[i], seeds);
        online[i] = online_optimize(cfg, cfg.search, seeds[i], seeds);
        online_rates[i] = online[i].g_star;
    });

    bool counts_ok = off.pso_evals == cfg.search.zeta * (1 + cfg.search.I_PS) &&
                     off.evaluations == off.pso_evals + off.bracket_evals + off.golden_evals &&
                     off.inner_runs == off.evaluations * 20;
    double ratio_sum = 0.0;
    for (const auto &res : online) {
        const long I_SB = res.bracket_evals - 2;
        const long I_BS = res.golden_evals;
        const long formula = 2 + cfg.search.zeta * (1 + cfg.search.I_PS) + I_SB + I_BS;
        counts_ok = counts_ok && res.evaluations == formula; // exact integer match
        counts_ok = counts_ok && res.inner_runs == res.evaluations;
        counts_ok = counts_ok && res.pso_evals == cfg.search.zeta * (1 + cfg.search.I_PS);
        ratio_sum += 1.0 / static_cast<double>(res.evaluations);
    }
    const bool means_ok = mean_of(online_rates) >= mean_of(offline_rates);
    const bool ok = counts_ok && means_ok && t.seconds() < 1800.0;
    std::ostringstream what;
    what << "online mean " << mean_of(online_rates) / 1e6 << " Mbps >= offline mean "
         << mean_of(offline_rates) / 1e6
         << " Mbps; evaluation counts match 2+zeta(1+I_PS)+I_SB+I_BS exactly (mean ratio "
         << ratio_sum / static_cast<double>(online.size()) << ")";
    report(10, ok, what.str(), t.seconds());
}

// ---------------------------------------------------------------------------
// 11. CLI determinism: identical config + seed give byte-identical CSVs.
// ---------------------------------------------------------------------------
std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_11() {
    Timer t;
    const std::string cli = MBMIMO_CLI_PATH;
    const fs::path cfg = fs::path(MBMIMO_CONFIG_DIR) / "desk.json";
    const fs::path base = fs::temp_directory_path() / "mbmimo_acceptance_c11";
    fs::remove_all(base);
    fs::create_directories(base);

    auto run = [&](const std::string &args) {
        const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    bool ok = true;
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"optimize --mode offline", "optimize.csv"},
        {"sweep-snr", "snr.csv"},
        {"compare-modes", "compare_modes.csv"},
    };
    for (std::size_t i = 0; i < cases.size() && ok; ++i) {
        const fs::path o1 = base / ("a" + std::to_string(i));
        const fs::path o2 = base / ("b" + std::to_string(i));
        ok = ok && run(cases[i].first + " --config " + cfg.string() + " --out " + o1.string() + " --seed 3 --threads 4");
        ok = ok && run(cases[i].first + " --config " + cfg.string() + " --out " + o2.string() + " --seed 3 --threads 1");
        const std::string f1 = slurp(o1 / cases[i].second);
        ok = ok && !f1.empty() && f1 == slurp(o2 / cases[i].second);
        ok = ok && slurp(o1 / "manifest.json") == slurp(o2 / "manifest.json");
    }
    report(11, ok, "repeated CLI runs with identical config and seed are byte-identical", t.seconds());
}

} // namespace

int main() {
    std::printf("mbmimo acceptance suite (version %s)\n", version);
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
