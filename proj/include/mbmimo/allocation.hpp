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
// Alternating joint subcarrier selection, carrier-window selection, power
// allocation and dual-uplink precoder update via block iterative
// water-filling. Users have one antenna each, so the dual-uplink precoders
// collapse to scalars sqrt(P) * (unit phase) and the objective depends on
// the powers alone.

#ifndef MBMIMO_ALLOCATION_HPP
#define MBMIMO_ALLOCATION_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>

#include "mbmimo/channel.hpp"
#include "mbmimo/common.hpp"
#include "mbmimo/numerics.hpp"

namespace mbmimo {

// Power budget structure: one common pool, a band-wise beta split, or a
// per-subcarrier cap of P_T / (M_L + M_H).
struct PowerScheme {
    enum class Kind { jpa, bwpa, cwpa };
    Kind kind = Kind::jpa;
    double beta = 1.0; // bwpa only: high band gets beta/(1+beta) of P_T

    static PowerScheme jpa() { return {Kind::jpa, 0.0}; }
    static PowerScheme bwpa(double beta) {
        if (!(beta >= 0.0))
            throw config_error("PowerScheme: beta must be nonnegative");
        return {Kind::bwpa, beta};
    }
    static PowerScheme cwpa() { return {Kind::cwpa, 0.0}; }
};

enum class BandSet { both, low_only, high_only };

// Per-user terminal capability: how many bands it can run at once and how
// many contiguous subcarriers per band it can handle.
struct UserCapability {
    int eta = 2;          // simultaneous bands, 1 or 2
    int n_window = 1;     // max contiguous subcarriers per band
    BandSet allowed = BandSet::both;

    void validate() const {
        if (eta != 1 && eta != 2)
            throw config_error("UserCapability: eta must be 1 or 2");
        if (n_window < 1)
            throw config_error("UserCapability: window size must be at least 1");
        if (eta == 2 && allowed != BandSet::both)
            throw config_error("UserCapability: eta=2 requires both bands allowed");
    }
};

// Carrier windows: per user, the sorted subcarrier indices it may occupy.
using Windows = std::vector<std::vector<int>>;

struct EffectiveGains {
    MatrixXd Lambda; // (M_L + M_H) x K, nonnegative
};

// Interference-plus-noise covariance seen by user k on subcarrier i in the
// dual uplink, with scalar precoders |w|^2 = P:
//   Z = sigma2 I + sum_{k' != k} P(k') h_{k'}^H h_{k'}.
inline MatrixXcd interference_matrix(const MatrixXcd &H_i, const VectorXd &P_i, int k, double sigma2) {
    const Eigen::Index N = H_i.cols();
    MatrixXcd Z = sigma2 * MatrixXcd::Identity(N, N);
    for (Eigen::Index k2 = 0; k2 < H_i.rows(); ++k2) {
        if (k2 == k || P_i(k2) <= 0.0)
            continue;
        Z.noalias() += P_i(k2) * (H_i.row(k2).adjoint() * H_i.row(k2));
    }
    return 0.5 * (Z + Z.adjoint());
}

// Whitened channel gain Lambda = h Z^-1 h^H, the single nonzero eigenvalue
// of the noise-absorbed rank-one channel.
inline double whitened_gain(const RowVectorXcd &h, const MatrixXcd &Z) {
    Eigen::LLT<MatrixXcd> llt(Z);
    if (llt.info() != Eigen::Success)
        throw numerical_error("whitened_gain: covariance is not positive definite");
    const VectorXcd x = llt.solve(h.adjoint());
    const double lam = (h * x)(0).real();
    return std::max(lam, 0.0);
}

// Alternative route through the eigendecomposition whitener
// h Q Delta^{-1/2}; kept for cross-checking the closed form.
inline double whitened_gain_eig(const RowVectorXcd &h, const MatrixXcd &Z) {
    EigenPair ep = hermitian_eig(Z);
    for (Eigen::Index i = 0; i < ep.values.size(); ++i)
        if (!(ep.values(i) > 0.0))
            throw numerical_error("whitened_gain_eig: covariance is not positive definite");
    const RowVectorXcd hdot = h * ep.vectors * ep.values.cwiseSqrt().cwiseInverse().asDiagonal();
    return hdot.squaredNorm();
}

namespace detail {

inline bool in_window(const Windows &windows, int i, int k) {
    const auto &w = windows[static_cast<std::size_t>(k)];
    return std::binary_search(w.begin(), w.end(), i);
}

struct PoolEntry {
    int i;
    int k;
};

// One water-filling pool: kappa_i = B_i * kappa_base with a single base
// level, allocated by bisection on the pool budget.
inline void fill_pool(const std::vector<PoolEntry> &pool, const MatrixXd &Lambda, const SubcarrierGrid &grid,
                      double budget, MatrixXd &P) {
    if (pool.empty() || budget <= 0.0)
        return;
    std::vector<WaterEntry> entries;
    entries.reserve(pool.size());
    for (const auto &e : pool)
        entries.push_back({grid.entries[static_cast<std::size_t>(e.i)].B, Lambda(e.i, e.k)});
    const double kappa = water_level(entries, budget);
    if (kappa <= 0.0)
        return;
    for (const auto &e : pool) {
        const double lam = Lambda(e.i, e.k);
        if (lam > 0.0)
            P(e.i, e.k) = std::max(grid.entries[static_cast<std::size_t>(e.i)].B * kappa - 1.0 / lam, 0.0);
    }
}

} // namespace detail

// KKT-optimal powers for fixed gains and windows under the scheme's budget
// structure. Entries outside a user's windows are exactly zero.
inline MatrixXd water_fill(const EffectiveGains &gains, const SubcarrierGrid &grid, const PowerScheme &scheme,
                           const Windows &windows, double P_budget) {
    if (!(P_budget > 0.0))
        throw domain_error("water_fill: power budget must be positive");
    const int M = grid.size();
    const int K = static_cast<int>(gains.Lambda.cols());
    MatrixXd P = MatrixXd::Zero(M, K);

    std::vector<detail::PoolEntry> low, high, all;
    std::vector<std::vector<detail::PoolEntry>> per_subcarrier(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i)
        for (int k = 0; k < K; ++k) {
            if (!detail::in_window(windows, i, k))
                continue;
            const detail::PoolEntry e{i, k};
            all.push_back(e);
            (grid.is_high(i) ? high : low).push_back(e);
            per_subcarrier[static_cast<std::size_t>(i)].push_back(e);
        }

    switch (scheme.kind) {
    case PowerScheme::Kind::jpa:
        detail::fill_pool(all, gains.Lambda, grid, P_budget, P);
        break;
    case PowerScheme::Kind::bwpa:
        detail::fill_pool(low, gains.Lambda, grid, P_budget / (1.0 + scheme.beta), P);
        detail::fill_pool(high, gains.Lambda, grid, scheme.beta * P_budget / (1.0 + scheme.beta), P);
        break;
    case PowerScheme::Kind::cwpa:
        for (int i = 0; i < M; ++i)
            detail::fill_pool(per_subcarrier[static_cast<std::size_t>(i)], gains.Lambda, grid,
                              P_budget / M, P);
        break;
    }
    return P;
}

// For each user, score every feasible contiguous window by the
// bandwidth-biased gain sum (bias = B_H/B_L on the high band, 1 on the low
// band) and keep the eta_k best-scoring bands' best windows. Ties go to the
// lowest starting index, and to the low band across bands.
inline Windows select_windows(const EffectiveGains &gains, const std::vector<UserCapability> &caps,
                              const SubcarrierGrid &grid) {
    const int K = static_cast<int>(gains.Lambda.cols());
    if (static_cast<int>(caps.size()) != K)
        throw domain_error("select_windows: one capability per user is required");
    const double eps_ratio = grid.bandwidth_ratio();
    Windows out(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const UserCapability &cap = caps[static_cast<std::size_t>(k)];
        cap.validate();
        struct Candidate {
            double score;
            int start;
            int len;
        };
        std::vector<Candidate> best_per_band;
        auto scan_band = [&](int first, int count, double bias) {
            if (count == 0)
                return;
            const int len = std::min(cap.n_window, count);
            std::optional<Candidate> best;
            for (int s = first; s + len <= first + count; ++s) {
                double score = 0.0;
                for (int i = s; i < s + len; ++i)
                    score += bias * gains.Lambda(i, k);
                if (!best || score > best->score)
                    best = Candidate{score, s, len};
            }
            if (best)
                best_per_band.push_back(*best);
        };
        if (cap.allowed != BandSet::high_only)
            scan_band(0, grid.M_L, 1.0);
        if (cap.allowed != BandSet::low_only)
            scan_band(grid.M_L, grid.M_H, eps_ratio);
        std::stable_sort(best_per_band.begin(), best_per_band.end(),
                         [](const Candidate &a, const Candidate &b) { return a.score > b.score; });
        const int take = std::min<int>(cap.eta, static_cast<int>(best_per_band.size()));
        auto &w = out[static_cast<std::size_t>(k)];
        for (int b = 0; b < take; ++b)
            for (int i = best_per_band[static_cast<std::size_t>(b)].start;
                 i < best_per_band[static_cast<std::size_t>(b)].start + best_per_band[static_cast<std::size_t>(b)].len; ++i)
                w.push_back(i);
        std::sort(w.begin(), w.end());
    }
    return out;
}

// Dual-uplink precoder phases. Single-antenna users make the left singular
// factor of the whitened channel a 1x1 unit phase; the canonical choice is
// +1, and zero-power entries keep phase 1 as well.
inline MatrixXcd update_precoders(const MatrixXd &P) {
    return MatrixXcd::Ones(P.rows(), P.cols());
}

// Exact objective: sum over subcarriers of
//   B_i log2 | I + sum_k P(i,k) h_{i,k}^H h_{i,k} / sigma2_i |   [bits/s].
inline double sum_rate(const EquivalentChannelSet &ch, const MatrixXd &P) {
    double rate = 0.0;
    for (int i = 0; i < ch.grid.size(); ++i) {
        const MatrixXcd &H = ch.H_tilde[static_cast<std::size_t>(i)];
        const Eigen::Index N = H.cols();
        MatrixXcd G = MatrixXcd::Identity(N, N);
        bool any = false;
        for (Eigen::Index k = 0; k < H.rows(); ++k) {
            if (P(i, k) <= 0.0)
                continue;
            G.noalias() += (P(i, k) / ch.sigma2(i)) * (H.row(k).adjoint() * H.row(k));
            any = true;
        }
        if (!any)
            continue;
        Eigen::LLT<MatrixXcd> llt(0.5 * (G + G.adjoint()));
        if (llt.info() != Eigen::Success)
            throw numerical_error("sum_rate: Gram matrix not positive definite");
        double logdet = 0.0;
        for (Eigen::Index n = 0; n < N; ++n)
            logdet += std::log(llt.matrixLLT()(n, n).real());
        rate += ch.grid.entries[static_cast<std::size_t>(i)].B * 2.0 * logdet / std::log(2.0);
    }
    return rate;
}

struct AllocationState {
    MatrixXd P;          // (M_L+M_H) x K powers [W]
    MatrixXcd w_phase;   // unit phases of the scalar dual-uplink precoders
    Windows windows;     // per-user allowed subcarriers
    double sum_rate = 0.0; // bits/s
    int iterations = 0;
    bool converged = false;
    std::vector<double> rate_trace; // objective after each iteration
};

struct InnerOptions {
    double delta_R_rel = 1e-4; // convergence threshold relative to the current rate
    int max_iters = 100;
    bool gauss_seidel = false; // per-user sweep instead of the default
                                // all-from-previous (Jacobi) update
};

namespace detail {

inline EffectiveGains compute_gains(const EquivalentChannelSet &ch, const MatrixXd &P) {
    const int M = ch.grid.size();
    const int K = ch.users();
    EffectiveGains g;
    g.Lambda = MatrixXd::Zero(M, K);
    for (int i = 0; i < M; ++i) {
        const MatrixXcd &H = ch.H_tilde[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k)
            g.Lambda(i, k) = whitened_gain(H.row(k), interference_matrix(H, P.row(i), k, ch.sigma2(i)));
    }
    return g;
}

} // namespace detail

// Alternating inner optimization: recompute whitened gains from the previous
// precoders, select windows, water-fill, update precoders, evaluate the
// exact objective; stop when the rate improvement falls under the threshold.
//
// The raw update can oscillate when several users concentrate in one band,
// so a candidate that lowers the exact rate is repaired in stages: reuse the
// previous windows, then average the powers (1/K new + (K-1)/K old), then
// keep the previous allocation outright. The reported rate sequence is
// therefore nondecreasing.
inline AllocationState inner_optimize(const EquivalentChannelSet &ch, const PowerScheme &scheme,
                                      const std::vector<UserCapability> &caps, const InnerOptions &opts,
                                      double P_T) {
    if (!(opts.delta_R_rel > 0.0))
        throw domain_error("inner_optimize: convergence threshold must be positive");
    const int M = ch.grid.size();
    const int K = ch.users();

    AllocationState st;
    st.P = MatrixXd::Zero(M, K);
    st.w_phase = MatrixXcd::Ones(M, K);

    double prev_rate = 0.0;
    Windows prev_windows;
    for (int it = 1; it <= opts.max_iters; ++it) {
        EffectiveGains gains = detail::compute_gains(ch, st.P);
        Windows cand_windows = select_windows(gains, caps, ch.grid);
        MatrixXd cand_P;
        if (!opts.gauss_seidel) {
            cand_P = water_fill(gains, ch.grid, scheme, cand_windows, P_T);
        } else {
            // per-user sweep: refresh one user's gains against the powers
            // updated so far, re-filling the pools after each refresh
            cand_P = st.P;
            for (int k = 0; k < K; ++k) {
                for (int i = 0; i < M; ++i) {
                    const MatrixXcd &H = ch.H_tilde[static_cast<std::size_t>(i)];
                    gains.Lambda(i, k) = whitened_gain(H.row(k), interference_matrix(H, cand_P.row(i), k, ch.sigma2(i)));
                }
                cand_P = water_fill(gains, ch.grid, scheme, cand_windows, P_T);
            }
        }
        double cand_rate = sum_rate(ch, cand_P);

        if (cand_rate < prev_rate && !prev_windows.empty()) {
            cand_windows = prev_windows;
            cand_P = water_fill(gains, ch.grid, scheme, cand_windows, P_T);
            cand_rate = sum_rate(ch, cand_P);
            if (cand_rate < prev_rate) {
                const MatrixXd avg = (cand_P + (K - 1) * st.P) / K;
                const double avg_rate = sum_rate(ch, avg);
                if (avg_rate >= prev_rate) {
                    cand_P = avg;
                    cand_rate = avg_rate;
                } else {
                    cand_P = st.P;
                    cand_rate = prev_rate;
                }
            }
        }

        st.P = cand_P;
        st.windows = cand_windows;
        st.w_phase = update_precoders(st.P);
        st.sum_rate = cand_rate;
        st.iterations = it;
        st.rate_trace.push_back(cand_rate);
        prev_windows = cand_windows;

        if (std::abs(cand_rate - prev_rate) < opts.delta_R_rel * std::max(cand_rate, 1e-300)) {
            st.converged = true;
            break;
        }
        prev_rate = cand_rate;
    }
    return st;
}

} // namespace mbmimo

#endif
