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
// Lumped-circuit model of a minimum-scattering antenna element radiating in
// the lowest TM mode, pairwise mutual impedances for arbitrary in-plane
// orientations, and the coupled impedance matrices of colinear, parallel and
// rectangular planar arrays.

#ifndef MBMIMO_ANTENNA_HPP
#define MBMIMO_ANTENNA_HPP

#include <cmath>
#include <string>

#include "mbmimo/common.hpp"
#include "mbmimo/numerics.hpp"

namespace mbmimo {

// Element parameters: a sphere of radius `a` encloses the element; R_a is
// the equivalent resistance of the lumped model.
struct ChuParams {
    double a = 0.0025; // element radius [m]
    double R_a = 50.0; // equivalent resistance [ohm]

    void validate() const {
        if (!(a > 0.0))
            throw domain_error("ChuParams: element radius a must be positive");
        if (!(R_a > 0.0))
            throw domain_error("ChuParams: equivalent resistance R_a must be positive");
    }
};

enum class ArrayKind { colinear, parallel, planar };

inline const char *to_string(ArrayKind k) {
    switch (k) {
    case ArrayKind::colinear: return "colinear";
    case ArrayKind::parallel: return "parallel";
    default: return "planar";
    }
}

// Uniform array on a fixed aperture. For linear arrays the element count
// along the axis is N = floor(D/delta) + 1. The vertical planar dimension
// keeps (N2-1)*delta2 + a <= D2, so N2 = floor((D2-a)/delta2) + 1.
// Spacing below 2a would overlap the enclosing spheres and is rejected.
struct ArrayGeometry {
    ArrayKind kind = ArrayKind::colinear;
    double delta1 = 0.0; // element spacing [m]
    double delta2 = 0.0; // planar only: vertical spacing [m]
    double D1 = 0.0;     // aperture bound [m]
    double D2 = 0.0;     // planar only
    int N1 = 0;          // elements per row
    int N2 = 1;          // rows
    int N = 0;           // total element count

    static int axis_count(double D, double delta) {
        return static_cast<int>(std::floor(D / delta + 1e-9)) + 1;
    }

    static ArrayGeometry linear(ArrayKind kind, double delta, double D, double a) {
        if (kind == ArrayKind::planar)
            throw domain_error("ArrayGeometry::linear: kind must be colinear or parallel");
        if (!(delta >= 2.0 * a * (1.0 - 1e-12)))
            throw domain_error("ArrayGeometry: spacing below the 2a element diameter");
        if (!(delta <= D * (1.0 + 1e-12)))
            throw domain_error("ArrayGeometry: spacing exceeds the aperture bound D");
        ArrayGeometry g;
        g.kind = kind;
        g.delta1 = delta;
        g.D1 = D;
        g.N1 = axis_count(D, delta);
        g.N2 = 1;
        g.N = g.N1;
        return g;
    }

    static ArrayGeometry planar(double delta1, double delta2, double D1, double D2, double a) {
        if (!(delta1 >= 2.0 * a * (1.0 - 1e-12)) || !(delta2 >= 2.0 * a * (1.0 - 1e-12)))
            throw domain_error("ArrayGeometry: spacing below the 2a element diameter");
        if (!(delta1 <= D1 * (1.0 + 1e-12)))
            throw domain_error("ArrayGeometry: horizontal spacing exceeds D1");
        if (!(D2 - a > 0.0) || !(delta2 <= (D2 - a) * (1.0 + 1e-12)))
            throw domain_error("ArrayGeometry: vertical spacing exceeds D2 - a");
        ArrayGeometry g;
        g.kind = ArrayKind::planar;
        g.delta1 = delta1;
        g.delta2 = delta2;
        g.D1 = D1;
        g.D2 = D2;
        g.N1 = axis_count(D1, delta1);
        g.N2 = axis_count(D2 - a, delta2);
        g.N = g.N1 * g.N2;
        return g;
    }
};

// Separation and orientation angles of an element pair.
struct PairPlacement {
    double delta_pq = 0.0; // separation [m]
    double alpha = 0.0;    // orientation of element p [rad]
    double beta = 0.0;     // orientation of element q [rad]
};

// Self-impedance of one TM1 element,
//   Z(f) = [(c^2 + j 2 pi f c a - (2 pi f a)^2) / (j 2 pi f c a - (2 pi f a)^2)] R_a.
// Re{Z} = R_a u^2/(1+u^2) and Im{Z} = -R_a/(u(1+u^2)) with u = 2 pi f a / c.
inline cplx self_impedance(double f, const ChuParams &p) {
    p.validate();
    if (!(f > 0.0) || !std::isfinite(f))
        throw domain_error("self_impedance: frequency must be positive and finite");
    const double c = speed_of_light;
    const double wa = 2.0 * M_PI * f * p.a;
    const cplx num(c * c - wa * wa, wa * c);
    const cplx den(-wa * wa, wa * c);
    return num / den * p.R_a;
}

// Separation/orientation of the (p, q) pair under zero-based, row-major
// indexing with N1 elements per row.
inline PairPlacement pair_placement(const ArrayGeometry &geom, int p, int q) {
    if (p < 0 || q < 0 || p >= geom.N || q >= geom.N)
        throw domain_error("pair_placement: element index out of range");
    if (p == q)
        throw domain_error("pair_placement: self-pairs have no placement");
    PairPlacement out;
    switch (geom.kind) {
    case ArrayKind::colinear:
        out.delta_pq = std::abs(p - q) * geom.delta1;
        out.alpha = M_PI;
        out.beta = 0.0;
        break;
    case ArrayKind::parallel:
        out.delta_pq = std::abs(p - q) * geom.delta1;
        out.alpha = M_PI / 2.0;
        out.beta = M_PI / 2.0;
        break;
    case ArrayKind::planar: {
        const int rp = p / geom.N1, rq = q / geom.N1;
        const int dcol = (p - q) + geom.N1 * (rq - rp); // = col(p) - col(q)
        const int drow = rp - rq;
        const double dx = dcol * geom.delta1;
        const double dy = drow * geom.delta2;
        out.delta_pq = std::hypot(dx, dy);
        out.beta = std::atan2(std::abs(dy), std::abs(dx));
        out.alpha = M_PI - out.beta;
        break;
    }
    }
    return out;
}

// Mutual impedance of two TM1 elements with separation delta_pq and
// orientation angles (alpha, beta):
//   Z_pq = -3 sqrt(Re{Zp} Re{Zq}) [ (1/2) sin a sin b (1/(jx) + 1/(jx)^2 + 1/(jx)^3)
//                                   + cos a cos b (1/(jx)^2 + 1/(jx)^3) ] e^{-jx},
// with x = k0 delta_pq. Symmetric in (p, q).
inline cplx mutual_impedance(double f, const ChuParams &p, const PairPlacement &place, cplx Zp, cplx Zq) {
    if (!(place.delta_pq > 0.0))
        throw domain_error("mutual_impedance: separation must be positive");
    if (!(Zp.real() > 0.0) || !(Zq.real() > 0.0))
        throw domain_error("mutual_impedance: self-impedance real parts must be positive");
    const double k0 = 2.0 * M_PI * f / speed_of_light;
    const cplx jx(0.0, k0 * place.delta_pq);
    const cplx inv1 = 1.0 / jx;
    const cplx inv2 = inv1 * inv1;
    const cplx inv3 = inv2 * inv1;
    const cplx radial = 0.5 * std::sin(place.alpha) * std::sin(place.beta) * (inv1 + inv2 + inv3);
    const cplx axial = std::cos(place.alpha) * std::cos(place.beta) * (inv2 + inv3);
    return -3.0 * std::sqrt(Zp.real() * Zq.real()) * (radial + axial) * std::exp(-jx);
}

// Coupled transmit impedance matrix: self-impedances on the diagonal,
// pairwise mutual impedances elsewhere. Symmetric (not Hermitian) by
// construction.
inline MatrixXcd build_zt(double f, const ArrayGeometry &geom, const ChuParams &params) {
    const cplx zs = self_impedance(f, params);
    MatrixXcd Z(geom.N, geom.N);
    Z.setZero();
    Z.diagonal().setConstant(zs);
    for (int p = 0; p < geom.N; ++p)
        for (int q = p + 1; q < geom.N; ++q) {
            const cplx z = mutual_impedance(f, params, pair_placement(geom, p, q), zs, zs);
            Z(p, q) = z;
            Z(q, p) = z;
        }
    return Z;
}

// Receive-side impedance matrix: the user terminals are far apart, so only
// self-impedances remain.
inline MatrixXcd build_zr(double f, int K, const ChuParams &params) {
    if (K < 1)
        throw domain_error("build_zr: user count must be at least 1");
    MatrixXcd Z(K, K);
    Z.setZero();
    Z.diagonal().setConstant(self_impedance(f, params));
    return Z;
}

// Maximum radiation efficiency over drive currents: the largest generalized
// eigenvalue of {Re{Z_T}, Re{Z_T} + R I}, both real symmetric.
inline double max_radiation_efficiency(const MatrixXcd &Z_T, double R) {
    if (!(R > 0.0))
        throw domain_error("max_radiation_efficiency: source resistance must be positive");
    const MatrixXd A = Z_T.real();
    const MatrixXd B = A + R * MatrixXd::Identity(A.rows(), A.cols());
    GeneralizedEigMax ge;
    try {
        ge = generalized_eig_max(A, B);
    } catch (const domain_error &) {
        throw numerical_error("max_radiation_efficiency: Re{Z_T} + R I is not positive definite");
    }
    return ge.value;
}

} // namespace mbmimo

#endif
