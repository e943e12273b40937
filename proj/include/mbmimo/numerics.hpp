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

#ifndef MBMIMO_NUMERICS_HPP
#define MBMIMO_NUMERICS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mbmimo/common.hpp"

namespace mbmimo {

// ---------------------------------------------------------------------------
// Counter-based random stream (SplitMix64 core).
//
// A stream is a 64-bit key plus a draw counter; the n-th output is
// mix64(key + n*GOLDEN). Substreams are derived by hashing labels into the
// key, so streams with distinct label paths are statistically independent
// and every draw is reproducible bit-for-bit from (seed, labels, n).
// Gaussians use Box-Muller on 53-bit uniforms; the algorithm is fixed so
// that golden files stay portable.
// ---------------------------------------------------------------------------
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

    // Child stream for a labelled substream; the parent is not advanced.
    [[nodiscard]] RngStream fork(std::uint64_t label) const {
        RngStream child(0);
        child.key_ = mix64(key_ ^ mix64(label + 0x9E3779B97F4A7C15ULL));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
    }

    // Uniform in [0, 1), 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) { // inclusive bounds
        return lo + next_u64() % (hi - lo + 1);
    }

    // One Box-Muller pair, each N(0, 1).
    std::pair<double, double> next_normal_pair() {
        // u1 in (0, 1] so the log is finite
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    double next_normal() { return next_normal_pair().first; }

    // Circularly-symmetric complex Gaussian with the given variance per
    // real dimension.
    cplx next_cnormal(double var_per_dim) {
        const auto [x, y] = next_normal_pair();
        const double s = std::sqrt(var_per_dim);
        return {s * x, s * y};
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Dense Hermitian / symmetric eigen kernels. Tolerances are relative to the
// input norm throughout; impedances sit near 1e2 and channel gains near
// 1e-12, so absolute tolerances would be meaningless.
// ---------------------------------------------------------------------------

struct EigenPair {
    VectorXd values;   // descending
    MatrixXcd vectors; // unitary, columns match values
};

// Eigendecomposition of a Hermitian matrix; input may deviate from exact
// Hermitian symmetry by at most 1e-9 * ||A|| and is symmetrized internally.
inline EigenPair hermitian_eig(const MatrixXcd &A) {
    const double scale = A.norm();
    if ((A - A.adjoint()).norm() > 1e-9 * std::max(scale, 1e-300))
        throw domain_error("hermitian_eig: matrix is not Hermitian within tolerance");
    const MatrixXcd S = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(S);
    if (es.info() != Eigen::Success)
        throw numerical_error("hermitian_eig: eigensolver failed to converge");
    EigenPair out;
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

struct GeneralizedEigMax {
    double value = 0.0;
    VectorXd vector; // attains the generalized Rayleigh quotient maximum
};

// Largest lambda with A x = lambda B x for real symmetric A and symmetric
// positive definite B, via Cholesky reduction B = L L^T and a standard
// eigensolve of L^-1 A L^-T.
inline GeneralizedEigMax generalized_eig_max(const MatrixXd &A, const MatrixXd &B) {
    Eigen::LLT<MatrixXd> llt(0.5 * (B + B.transpose()));
    if (llt.info() != Eigen::Success)
        throw domain_error("generalized_eig_max: B is not positive definite");
    const MatrixXd L = llt.matrixL();
    MatrixXd C = L.triangularView<Eigen::Lower>().solve(0.5 * (A + A.transpose()));
    C = L.triangularView<Eigen::Lower>().solve(C.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (C + C.transpose()));
    if (es.info() != Eigen::Success)
        throw numerical_error("generalized_eig_max: eigensolver failed to converge");
    const Eigen::Index last = es.eigenvalues().size() - 1;
    GeneralizedEigMax out;
    out.value = es.eigenvalues()(last);
    out.vector = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(last));
    return out;
}

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-1e-9 * ||A||, 0) are rounding debris and are clamped to zero; anything
// more negative is rejected.
inline MatrixXcd psd_sqrt(const MatrixXcd &A) {
    EigenPair ep = hermitian_eig(A);
    const double lmax = ep.values.size() ? std::max(std::abs(ep.values(0)), std::abs(ep.values(ep.values.size() - 1))) : 0.0;
    VectorXd vals = ep.values;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < -1e-9 * lmax)
            throw domain_error("psd_sqrt: matrix has a negative eigenvalue beyond tolerance");
        vals(i) = std::sqrt(std::max(vals(i), 0.0));
    }
    return ep.vectors * vals.asDiagonal() * ep.vectors.adjoint();
}

// Real-symmetric overload.
inline MatrixXd psd_sqrt(const MatrixXd &A) {
    return psd_sqrt(MatrixXcd(A.cast<cplx>())).real();
}

// ---------------------------------------------------------------------------
// Water level solver: find kappa_base with
//     sum_i [B_i * kappa_base - 1/Lambda_i]^+  =  budget
// by bisection. Entries with Lambda <= 0 never receive power. Returns 0 when
// nothing is allocatable.
// ---------------------------------------------------------------------------
struct WaterEntry {
    double bandwidth; // weight multiplying kappa_base
    double gain;      // Lambda
};

inline double water_level(const std::vector<WaterEntry> &entries, double budget) {
    if (budget <= 0.0)
        throw domain_error("water_level: budget must be positive");
    bool any = false;
    for (const auto &e : entries)
        any = any || e.gain > 0.0;
    if (!any)
        return 0.0;

    auto allocated = [&](double kappa) {
        double s = 0.0;
        for (const auto &e : entries)
            if (e.gain > 0.0)
                s += std::max(e.bandwidth * kappa - 1.0 / e.gain, 0.0);
        return s;
    };

    double hi = 1.0;
    while (allocated(hi) < budget) {
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw numerical_error("water_level: failed to bracket the water level");
    }
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (allocated(mid) < budget)
            lo = mid;
        else
            hi = mid;
        if (std::abs(allocated(0.5 * (lo + hi)) - budget) <= 1e-10 * budget)
            break;
    }
    return 0.5 * (lo + hi);
}

} // namespace mbmimo

#endif
