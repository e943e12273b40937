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
// Subcarrier grid, Rayleigh fading, transimpedance and the normalized
// equivalent channel of the coupled transmit array, plus the Gaussian
// mutual information used as objective and test oracle.

#ifndef MBMIMO_CHANNEL_HPP
#define MBMIMO_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/LU>

#include "mbmimo/antenna.hpp"
#include "mbmimo/common.hpp"
#include "mbmimo/numerics.hpp"

namespace mbmimo {

enum class Band { low, high };

struct SubcarrierGrid {
    struct Entry {
        double f = 0.0; // center frequency [Hz]
        double B = 0.0; // bandwidth [Hz]
        Band band = Band::low;
    };
    std::vector<Entry> entries; // low band first, then high band
    int M_L = 0;
    int M_H = 0;

    [[nodiscard]] int size() const { return static_cast<int>(entries.size()); }
    [[nodiscard]] bool is_high(int i) const { return entries[static_cast<std::size_t>(i)].band == Band::high; }

    // kappa/noise bias of high-band subcarriers relative to low-band ones.
    [[nodiscard]] double bandwidth_ratio() const {
        if (M_L == 0 || M_H == 0)
            return 1.0;
        return entries[static_cast<std::size_t>(M_L)].B / entries[0].B;
    }
};

// Contiguous subcarriers centered on each band's carrier. Index order is the
// common one: low band first.
inline SubcarrierGrid build_grid(int M_L, int M_H, double f_L, double f_H, double B_L, double B_H) {
    if (M_L < 0 || M_H < 0 || M_L + M_H < 1)
        throw config_error("build_grid: need a nonnegative count per band and at least one subcarrier");
    if ((M_L > 0 && !(B_L > 0.0)) || (M_H > 0 && !(B_H > 0.0)))
        throw config_error("build_grid: subcarrier bandwidths must be positive");
    SubcarrierGrid g;
    g.M_L = M_L;
    g.M_H = M_H;
    g.entries.reserve(static_cast<std::size_t>(M_L + M_H));
    for (int m = 0; m < M_L; ++m)
        g.entries.push_back({f_L + (m - (M_L - 1) / 2.0) * B_L, B_L, Band::low});
    for (int m = 0; m < M_H; ++m)
        g.entries.push_back({f_H + (m - (M_H - 1) / 2.0) * B_H, B_H, Band::high});
    for (const auto &e : g.entries)
        if (!(e.f > 0.0))
            throw config_error("build_grid: subcarrier frequencies must stay positive");
    if (M_L > 0 && M_H > 0) {
        const double low_edge = g.entries[static_cast<std::size_t>(M_L - 1)].f + B_L / 2.0;
        const double high_edge = g.entries[static_cast<std::size_t>(M_L)].f - B_H / 2.0;
        if (low_edge >= high_edge)
            throw config_error("build_grid: low and high bands overlap");
    }
    return g;
}

// One quasi-static fading block: an i.i.d. complex Gaussian K x N matrix per
// subcarrier, variance 1/2 per real dimension. Entry (i, k, n) depends only
// on (seed, i, k, n), so enlarging N extends a realization instead of
// reshuffling it; that is what makes spacing sweeps comparable under common
// random numbers.
struct FadingRealization {
    std::vector<MatrixXcd> F; // one K x N matrix per subcarrier
    std::uint64_t seed = 0;
    VectorXd d;         // per-user distance [m] (filled by the scenario layer)
    double gamma = 2.7; // path-loss exponent
};

namespace rng_label {
inline constexpr std::uint64_t fading = 0xFAD1D6;
inline constexpr std::uint64_t distance = 0xD157A2;
inline constexpr std::uint64_t capability = 0xCA9AB1;
inline constexpr std::uint64_t realization = 0x5EED00;
inline constexpr std::uint64_t search = 0x5EA2C4;
} // namespace rng_label

inline FadingRealization draw_fading(std::uint64_t seed, int K, int N, const SubcarrierGrid &grid) {
    if (K < 1 || N < 1)
        throw domain_error("draw_fading: K and N must be at least 1");
    FadingRealization out;
    out.seed = seed;
    out.F.reserve(static_cast<std::size_t>(grid.size()));
    const RngStream root = RngStream(seed).fork(rng_label::fading);
    for (int i = 0; i < grid.size(); ++i) {
        const RngStream si = root.fork(static_cast<std::uint64_t>(i));
        MatrixXcd F(K, N);
        for (int k = 0; k < K; ++k) {
            const RngStream sk = si.fork(static_cast<std::uint64_t>(k));
            for (int n = 0; n < N; ++n) {
                RngStream sn = sk.fork(static_cast<std::uint64_t>(n));
                F(k, n) = sn.next_cnormal(0.5);
            }
        }
        out.F.push_back(std::move(F));
    }
    return out;
}

// Transimpedance of the coupled downlink at one subcarrier:
//   Z_RT = (c / (2 pi f)) * Upsilon(f) * diag(d_k^{-gamma/2}) * F * Re{Z_T}^{1/2},
// with Upsilon = 2 pi f a / sqrt((2 pi f a)^2 + c^2) * sqrt(R_a) from the
// matched single-antenna receivers. Distances scale row-wise so identical
// d_k collapse to a common scalar.
inline double upsilon(double f, const ChuParams &p) {
    const double wa = 2.0 * M_PI * f * p.a;
    return wa / std::sqrt(wa * wa + speed_of_light * speed_of_light) * std::sqrt(p.R_a);
}

inline MatrixXcd transimpedance(double f, const MatrixXcd &F, const MatrixXcd &Z_T, const VectorXd &d,
                                double gamma, const ChuParams &params, const MatrixXd *sqrt_re_zt = nullptr) {
    if (F.rows() != d.size())
        throw domain_error("transimpedance: one distance per user row is required");
    for (Eigen::Index k = 0; k < d.size(); ++k)
        if (!(d(k) > 0.0))
            throw domain_error("transimpedance: distances must be positive");
    MatrixXd root;
    if (sqrt_re_zt == nullptr) {
        try {
            root = psd_sqrt(MatrixXd(Z_T.real()));
        } catch (const domain_error &) {
            throw numerical_error("transimpedance: Re{Z_T} is not positive semi-definite");
        }
        sqrt_re_zt = &root;
    }
    const double scale = speed_of_light / (2.0 * M_PI * f) * upsilon(f, params);
    VectorXd row = d.array().pow(-gamma / 2.0) * scale;
    return row.asDiagonal() * (F * (*sqrt_re_zt));
}

struct EquivalentChannel {
    MatrixXcd H_eq;   // load-referred channel
    VectorXcd A_diag; // noise-coloring diagonal R_L (R_L + Z_R)^-1
    MatrixXcd H_tilde; // normalized channel A^-1 H_eq = Z_RT (Z_T + R I)^-1
};

// Receiver termination and transmit source resistance.
struct LoadModel {
    VectorXd R_L; // per-user load [ohm]
    double R = 50.0; // source resistance [ohm]

    static LoadModel matched(int K, double R_a, double R_src) {
        LoadModel m;
        m.R_L = VectorXd::Constant(K, R_a);
        m.R = R_src;
        return m;
    }

    void validate() const {
        if (!(R > 0.0))
            throw domain_error("LoadModel: source resistance must be positive");
        for (Eigen::Index k = 0; k < R_L.size(); ++k)
            if (!(R_L(k) > 0.0))
                throw domain_error("LoadModel: load resistances must be positive");
    }
};

// Equivalent channel of the full two-port chain. Both algebraic routes to
// the normalized channel are evaluated and must agree to 1e-10 relative;
// a mismatch indicates a singular factor upstream.
inline EquivalentChannel equivalent_channel_with_inverse(const MatrixXcd &Z_RT, const MatrixXcd &ZT_plus_RI_inv,
                                                         const MatrixXcd &Z_R, const LoadModel &loads) {
    loads.validate();
    const Eigen::Index K = Z_RT.rows();
    if (Z_R.rows() != K || loads.R_L.size() != K || ZT_plus_RI_inv.rows() != Z_RT.cols())
        throw domain_error("equivalent_channel: dimension mismatch");
    const MatrixXcd H_tilde = Z_RT * ZT_plus_RI_inv;

    EquivalentChannel out;
    out.A_diag = VectorXcd(K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const cplx den = loads.R_L(k) + Z_R(k, k);
        if (std::abs(den) == 0.0)
            throw numerical_error("equivalent_channel: R_L + Z_R is singular");
        out.A_diag(k) = loads.R_L(k) / den;
    }
    out.H_eq = out.A_diag.asDiagonal() * H_tilde;
    const MatrixXcd via_A = out.A_diag.cwiseInverse().asDiagonal() * out.H_eq;
    if ((via_A - H_tilde).norm() > 1e-10 * std::max(H_tilde.norm(), 1e-300))
        throw numerical_error("equivalent_channel: normalized-channel identity failed");
    out.H_tilde = H_tilde;
    return out;
}

inline EquivalentChannel equivalent_channel(const MatrixXcd &Z_RT, const MatrixXcd &Z_T, const MatrixXcd &Z_R,
                                            const LoadModel &loads) {
    loads.validate();
    const Eigen::Index N = Z_RT.cols();
    if (Z_T.rows() != N || Z_T.cols() != N)
        throw domain_error("equivalent_channel: dimension mismatch");
    Eigen::FullPivLU<MatrixXcd> lu(Z_T + loads.R * MatrixXcd::Identity(N, N));
    if (!lu.isInvertible())
        throw numerical_error("equivalent_channel: Z_T + R I is singular");
    return equivalent_channel_with_inverse(Z_RT, lu.inverse(), Z_R, loads);
}

// Gaussian mutual information in bits/s/Hz:
//   log2 | I + A^-1 H W W^H H^H A^-H / sigma2 |.
// Pass an empty A for the identity (the standard whitened form).
inline double mutual_information(const MatrixXcd &H, const MatrixXcd &W, double sigma2,
                                 const VectorXcd &A_diag = VectorXcd()) {
    if (!(sigma2 > 0.0))
        throw domain_error("mutual_information: noise variance must be positive");
    MatrixXcd M = H * W;
    if (A_diag.size() != 0) {
        if (A_diag.size() != H.rows())
            throw domain_error("mutual_information: A dimension mismatch");
        M = A_diag.cwiseInverse().asDiagonal() * M;
    }
    const MatrixXcd G = M * M.adjoint() / sigma2;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (G + G.adjoint()));
    if (es.info() != Eigen::Success)
        throw numerical_error("mutual_information: eigensolver failed");
    const double lmax = es.eigenvalues().size() ? std::abs(es.eigenvalues().maxCoeff()) : 0.0;
    double bits = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam < -1e-9 * std::max(lmax, 1e-300))
            throw numerical_error("mutual_information: Gram matrix is indefinite beyond tolerance");
        bits += std::log2(1.0 + std::max(lam, 0.0));
    }
    return bits;
}

// Per-subcarrier normalized channels, noise variances and the retained
// noise-coloring diagonals of one realization.
struct EquivalentChannelSet {
    SubcarrierGrid grid;
    std::vector<MatrixXcd> H_tilde; // K x N per subcarrier
    std::vector<VectorXcd> A_diag;  // per subcarrier
    VectorXd sigma2;                // per subcarrier [W]

    [[nodiscard]] int users() const { return H_tilde.empty() ? 0 : static_cast<int>(H_tilde.front().rows()); }
    [[nodiscard]] int antennas() const { return H_tilde.empty() ? 0 : static_cast<int>(H_tilde.front().cols()); }
};

struct NoiseCalibration {
    double sigma2_L = 0.0;
    double sigma2_H = 0.0;
};

// Anchor the noise floor so that uniform per-subcarrier power meets the
// target average SNR on the low band:
//   (P_T / M) * mean ||h_{i,k}||^2 / sigma2_L = 10^(SNR/10),
// with sigma2_H tied by the bandwidth ratio. Falls back to the high band
// when no low-band subcarriers exist.
inline NoiseCalibration calibrate_noise(double target_snr_db, const SubcarrierGrid &grid,
                                        const std::vector<EquivalentChannelSet> &ensemble, double P_T) {
    if (ensemble.empty())
        throw config_error("calibrate_noise: ensemble must be non-empty");
    const Band anchor = grid.M_L > 0 ? Band::low : Band::high;
    double gain = 0.0;
    long count = 0;
    for (const auto &set : ensemble)
        for (int i = 0; i < grid.size(); ++i) {
            if (grid.entries[static_cast<std::size_t>(i)].band != anchor)
                continue;
            const MatrixXcd &H = set.H_tilde[static_cast<std::size_t>(i)];
            for (Eigen::Index k = 0; k < H.rows(); ++k) {
                gain += H.row(k).squaredNorm();
                ++count;
            }
        }
    if (count == 0 || !(gain > 0.0))
        throw config_error("calibrate_noise: ensemble mean channel gain is zero");
    gain /= static_cast<double>(count);
    const double snr = std::pow(10.0, target_snr_db / 10.0);
    const double anchored = (P_T / grid.size()) * gain / snr;
    NoiseCalibration out;
    const double ratio = grid.bandwidth_ratio();
    if (anchor == Band::low) {
        out.sigma2_L = anchored;
        out.sigma2_H = ratio * anchored;
    } else {
        out.sigma2_H = anchored;
        out.sigma2_L = anchored / ratio;
    }
    return out;
}

inline void apply_noise(EquivalentChannelSet &set, const NoiseCalibration &cal) {
    set.sigma2.resize(set.grid.size());
    for (int i = 0; i < set.grid.size(); ++i)
        set.sigma2(i) = set.grid.is_high(i) ? cal.sigma2_H : cal.sigma2_L;
}

} // namespace mbmimo

#endif
