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
// Scenario configuration (JSON, versioned schema), user-capability cases,
// per-realization channel synthesis and noise calibration. The per-(spacing,
// frequency) impedance artifacts are precomputed once per geometry and
// reused across fading realizations.

#ifndef MBMIMO_SCENARIO_HPP
#define MBMIMO_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbmimo/allocation.hpp"
#include "mbmimo/antenna.hpp"
#include "mbmimo/channel.hpp"
#include "mbmimo/common.hpp"

namespace mbmimo {

struct SearchConfig {
    double C1 = 0.8; // inertia
    double C2 = 2.0; // personal-best pull
    double C3 = 2.0; // global-best pull
    int zeta = 10;   // particles
    int I_PS = 15;   // swarm iterations
    double delta_tilde = 0.0;      // initial bracket step [m]; 0 = 5% of the domain
    double bisection_tol = 1e-4;   // final interval width [m]
    double ga_step = 0.1;          // gradient-ascent step as a fraction of the domain
    double ga_min_improvement = 0.0; // stop threshold [bits/s]; 0 = 1e-4 of current
    double fd_step = 1e-4;         // finite-difference step [m]
    int ensemble_size = 10;        // realizations averaged per objective evaluation

    void validate() const {
        if (zeta < 1)
            throw config_error("search.zeta: at least one particle is required");
        if (I_PS < 0)
            throw config_error("search.I_PS: iteration count must be nonnegative");
        if (!(bisection_tol > 0.0) || !(fd_step > 0.0))
            throw config_error("search: tolerances must be positive");
        if (ensemble_size < 1)
            throw config_error("search.ensemble_size: must be at least 1");
    }
};

enum class CapabilityCase { case1 = 1, case2 = 2, case3 = 3, case4 = 4 };

struct ScenarioConfig {
    // array
    ArrayKind kind = ArrayKind::colinear;
    double D1 = 0.2;    // aperture bound [m] (planar: horizontal)
    double D2 = 0.0;    // planar only
    double delta = 0.02; // base spacing [m]
    double delta2 = 0.0; // planar only
    ChuParams chu;
    double R = 50.0;     // source resistance [ohm]
    bool coupling = true;

    // bands
    double f_L = 3.5e9, f_H = 17.5e9;
    double B_L = 120e3, B_H = 480e3;
    int M_L = 40, M_H = 40;

    // users
    int K = 4;
    double d_min = 50.0, d_max = 150.0;
    double gamma = 2.7;
    CapabilityCase cap_case = CapabilityCase::case1;
    std::vector<UserCapability> explicit_caps; // overrides cap_case when non-empty

    // power + noise
    double P_T = 2.0;
    PowerScheme scheme = PowerScheme::jpa();
    double snr_db = 10.0;

    // optimization
    SearchConfig search;
    InnerOptions inner;

    // seeds
    std::uint64_t master_seed = 1;
    int ensemble_size = 20; // seeds per sweep point

    [[nodiscard]] SubcarrierGrid grid() const { return build_grid(M_L, M_H, f_L, f_H, B_L, B_H); }

    [[nodiscard]] ArrayGeometry geometry() const { return geometry_at(delta, delta2); }

    [[nodiscard]] ArrayGeometry geometry_at(double d1, double d2 = 0.0) const {
        if (kind == ArrayKind::planar)
            return ArrayGeometry::planar(d1, d2 > 0.0 ? d2 : d1, D1, D2, chu.a);
        return ArrayGeometry::linear(kind, d1, D1, chu.a);
    }

    [[nodiscard]] LoadModel loads() const { return LoadModel::matched(K, chu.R_a, R); }

    // search domain for the spacing variables
    [[nodiscard]] double delta_min() const { return 2.0 * chu.a; }
    [[nodiscard]] double delta_max() const { return D1; }
    [[nodiscard]] double delta2_max() const { return D2 - chu.a; }

    void validate() const {
        chu.validate();
        if (!(D1 > 0.0))
            throw config_error("array.D: aperture bound must be positive");
        if (kind == ArrayKind::planar && !(D2 > chu.a))
            throw config_error("array.D2: planar aperture must exceed the element radius");
        if (!(P_T > 0.0))
            throw config_error("power.P_T: transmit power must be positive");
        if (K < 1)
            throw config_error("users.K: at least one user is required");
        if (!(d_min > 0.0) || !(d_max >= d_min))
            throw config_error("users.distance: need 0 < d_min <= d_max");
        if (!(R > 0.0))
            throw config_error("array.R: source resistance must be positive");
        search.validate();
        (void)grid(); // validates the band plan
        (void)geometry();
    }
};

// ---------------------------------------------------------------------------
// Capability cases: 1) everyone dual-band; 2) single-band with 75% of the
// users pinned to the high band; 3) the mirror split; 4) 75% dual-band and
// the rest single-band with a free band choice. Window sizes are drawn
// uniformly from [1, M_L + M_H].
// ---------------------------------------------------------------------------
inline std::vector<UserCapability> draw_capabilities(const ScenarioConfig &cfg, std::uint64_t realization_seed) {
    if (!cfg.explicit_caps.empty()) {
        if (static_cast<int>(cfg.explicit_caps.size()) != cfg.K)
            throw config_error("users.capabilities: one entry per user is required");
        return cfg.explicit_caps;
    }
    const int M = cfg.M_L + cfg.M_H;
    RngStream s = RngStream(realization_seed).fork(rng_label::capability);
    std::vector<UserCapability> caps(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k)
        caps[static_cast<std::size_t>(k)].n_window =
            static_cast<int>(s.uniform_int(1, static_cast<std::uint64_t>(M)));
    const int three_quarters = static_cast<int>(std::lround(0.75 * cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        auto &c = caps[static_cast<std::size_t>(k)];
        switch (cfg.cap_case) {
        case CapabilityCase::case1:
            c.eta = 2;
            c.allowed = BandSet::both;
            break;
        case CapabilityCase::case2:
            c.eta = 1;
            c.allowed = k < three_quarters ? BandSet::high_only : BandSet::low_only;
            break;
        case CapabilityCase::case3:
            c.eta = 1;
            c.allowed = k < three_quarters ? BandSet::low_only : BandSet::high_only;
            break;
        case CapabilityCase::case4:
            if (k < three_quarters) {
                c.eta = 2;
                c.allowed = BandSet::both;
            } else {
                c.eta = 1;
                c.allowed = BandSet::both;
            }
            break;
        }
    }
    return caps;
}

// Seed of the r-th frozen realization of a scenario.
inline std::uint64_t realization_seed(std::uint64_t master, int r) {
    return RngStream(master).fork(rng_label::realization).fork(static_cast<std::uint64_t>(r)).next_u64();
}

inline VectorXd draw_distances(const ScenarioConfig &cfg, std::uint64_t seed) {
    RngStream s = RngStream(seed).fork(rng_label::distance);
    VectorXd d(cfg.K);
    for (int k = 0; k < cfg.K; ++k)
        d(k) = s.fork(static_cast<std::uint64_t>(k)).uniform(cfg.d_min, cfg.d_max);
    return d;
}

// ---------------------------------------------------------------------------
// Channel factory: impedance artifacts for one geometry, computed once and
// shared by all fading realizations at that spacing.
// ---------------------------------------------------------------------------
class ChannelFactory {
  public:
    ChannelFactory(const ScenarioConfig &cfg, const ArrayGeometry &geom)
        : ChannelFactory(cfg, geom, cfg.grid()) {}

    // Grid override, e.g. a frequency sweep treated as one subcarrier per
    // sample point.
    ChannelFactory(const ScenarioConfig &cfg, const ArrayGeometry &geom, SubcarrierGrid grid)
        : cfg_(cfg), geom_(geom), grid_(std::move(grid)) {
        loads_ = cfg.loads();
        const int M = grid_.size();
        zt_.reserve(static_cast<std::size_t>(M));
        sqrt_re_zt_.reserve(static_cast<std::size_t>(M));
        zt_ri_inv_.reserve(static_cast<std::size_t>(M));
        zr_.reserve(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) {
            const double f = grid_.entries[static_cast<std::size_t>(i)].f;
            MatrixXcd Zt = build_zt(f, geom, cfg.chu);
            if (!cfg.coupling) {
                const VectorXcd self = Zt.diagonal();
                Zt.setZero();
                Zt.diagonal() = self;
            }
            MatrixXd root;
            try {
                root = psd_sqrt(MatrixXd(Zt.real()));
            } catch (const domain_error &) {
                throw numerical_error("ChannelFactory: Re{Z_T} is not positive semi-definite");
            }
            Eigen::PartialPivLU<MatrixXcd> lu(Zt + cfg.R * MatrixXcd::Identity(geom.N, geom.N));
            zt_.push_back(std::move(Zt));
            sqrt_re_zt_.push_back(std::move(root));
            zt_ri_inv_.push_back(lu.inverse());
            zr_.push_back(build_zr(f, cfg.K, cfg.chu));
        }
    }

    [[nodiscard]] const ArrayGeometry &geometry() const { return geom_; }
    [[nodiscard]] const SubcarrierGrid &grid() const { return grid_; }
    [[nodiscard]] const MatrixXcd &zt(int i) const { return zt_[static_cast<std::size_t>(i)]; }

    // Synthesize the normalized equivalent channel of one realization.
    // Noise variances are left at zero until calibration assigns them.
    [[nodiscard]] EquivalentChannelSet realize(std::uint64_t seed) const {
        EquivalentChannelSet set;
        set.grid = grid_;
        FadingRealization fading = draw_fading(seed, cfg_.K, geom_.N, grid_);
        fading.d = draw_distances(cfg_, seed);
        fading.gamma = cfg_.gamma;
        const int M = grid_.size();
        set.H_tilde.reserve(static_cast<std::size_t>(M));
        set.A_diag.reserve(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) {
            const double f = grid_.entries[static_cast<std::size_t>(i)].f;
            const MatrixXcd Z_RT = transimpedance(f, fading.F[static_cast<std::size_t>(i)],
                                                  zt_[static_cast<std::size_t>(i)], fading.d, fading.gamma,
                                                  cfg_.chu, &sqrt_re_zt_[static_cast<std::size_t>(i)]);
            EquivalentChannel eq = equivalent_channel_with_inverse(Z_RT, zt_ri_inv_[static_cast<std::size_t>(i)],
                                                                   zr_[static_cast<std::size_t>(i)], loads_);
            set.H_tilde.push_back(std::move(eq.H_tilde));
            set.A_diag.push_back(std::move(eq.A_diag));
        }
        set.sigma2 = VectorXd::Zero(M);
        return set;
    }

  private:
    ScenarioConfig cfg_;
    ArrayGeometry geom_;
    SubcarrierGrid grid_;
    LoadModel loads_;
    std::vector<MatrixXcd> zt_;
    std::vector<MatrixXd> sqrt_re_zt_;
    std::vector<MatrixXcd> zt_ri_inv_;
    std::vector<MatrixXcd> zr_;
};

// Channels for a set of realization seeds with the noise floor calibrated on
// this very ensemble. The calibration is anchored once per evaluated
// configuration and is meant to be shared by every variant compared at it.
struct RealizedPoint {
    std::vector<EquivalentChannelSet> channels;
    NoiseCalibration noise;
};

inline RealizedPoint realize_point(const ChannelFactory &factory, const ScenarioConfig &cfg,
                                   const std::vector<std::uint64_t> &seeds) {
    RealizedPoint out;
    out.channels.reserve(seeds.size());
    for (const auto s : seeds)
        out.channels.push_back(factory.realize(s));
    out.noise = calibrate_noise(cfg.snr_db, factory.grid(), out.channels, cfg.P_T);
    for (auto &set : out.channels)
        apply_noise(set, out.noise);
    return out;
}

// ---------------------------------------------------------------------------
// JSON configuration. Unknown fields are rejected so typos cannot silently
// fall back to defaults; validation errors name the offending field.
// ---------------------------------------------------------------------------
namespace detail {

using nlohmann::json;

inline void require_keys(const json &j, const char *scope, std::initializer_list<const char *> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char *k : known)
            ok = ok || it.key() == k;
        if (!ok)
            throw config_error(std::string(scope) + "." + it.key() + ": unknown field");
    }
}

template <typename T>
T get_req(const json &j, const char *scope, const char *key) {
    if (!j.contains(key))
        throw config_error(std::string(scope) + "." + key + ": missing required field");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw config_error(std::string(scope) + "." + key + ": wrong type");
    }
}

template <typename T>
T get_opt(const json &j, const char *scope, const char *key, T fallback) {
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw config_error(std::string(scope) + "." + key + ": wrong type");
    }
}

inline ArrayKind parse_kind(const std::string &s) {
    if (s == "colinear")
        return ArrayKind::colinear;
    if (s == "parallel")
        return ArrayKind::parallel;
    if (s == "planar")
        return ArrayKind::planar;
    throw config_error("array.kind: expected colinear, parallel or planar");
}

inline PowerScheme parse_scheme(const std::string &s, double beta) {
    if (s == "JPA")
        return PowerScheme::jpa();
    if (s == "BWPA")
        return PowerScheme::bwpa(beta);
    if (s == "CWPA")
        return PowerScheme::cwpa();
    throw config_error("power.scheme: expected JPA, BWPA or CWPA");
}

} // namespace detail

inline nlohmann::json paper_preset_json() {
    return nlohmann::json{
        {"array", {{"kind", "colinear"}, {"D", 0.2}, {"a", 0.0025}, {"R_a", 50.0}, {"R", 50.0}, {"delta", 0.02}, {"coupling", true}}},
        {"bands", {{"f_L", 3.5e9}, {"f_H", 17.5e9}, {"B_L", 120e3}, {"B_H", 480e3}, {"M_L", 40}, {"M_H", 40}}},
        {"users", {{"K", 4}, {"d_min", 50.0}, {"d_max", 150.0}, {"gamma", 2.7}, {"capability_case", 1}}},
        {"power", {{"P_T", 2.0}, {"scheme", "JPA"}, {"beta", 1.0}}},
        {"snr_db", 10.0},
        {"seeds", {{"master", 1}, {"ensemble_size", 20}}},
    };
}

inline ScenarioConfig parse_scenario(const nlohmann::json &input) {
    using detail::get_opt;
    using detail::get_req;
    nlohmann::json j = input;
    if (j.contains("preset")) {
        const auto name = j.at("preset").get<std::string>();
        if (name != "paper")
            throw config_error("preset: unknown preset '" + name + "'");
        nlohmann::json merged = paper_preset_json();
        j.erase("preset");
        merged.merge_patch(j);
        j = merged;
    }
    detail::require_keys(j, "config",
                         {"version", "array", "bands", "users", "power", "snr_db", "search", "inner", "seeds", "experiment"});

    ScenarioConfig cfg;
    if (!j.contains("array"))
        throw config_error("array: missing required section");
    {
        const auto &a = j.at("array");
        detail::require_keys(a, "array", {"kind", "D", "D1", "D2", "a", "R_a", "R", "delta", "delta2", "coupling"});
        cfg.kind = detail::parse_kind(get_req<std::string>(a, "array", "kind"));
        if (a.contains("D1"))
            cfg.D1 = get_req<double>(a, "array", "D1");
        else
            cfg.D1 = get_req<double>(a, "array", "D");
        cfg.D2 = get_opt<double>(a, "array", "D2", cfg.kind == ArrayKind::planar ? cfg.D1 : 0.0);
        cfg.chu.a = get_req<double>(a, "array", "a");
        cfg.chu.R_a = get_opt<double>(a, "array", "R_a", 50.0);
        cfg.R = get_opt<double>(a, "array", "R", 50.0);
        cfg.delta = get_opt<double>(a, "array", "delta", 0.02);
        cfg.delta2 = get_opt<double>(a, "array", "delta2", cfg.delta);
        cfg.coupling = get_opt<bool>(a, "array", "coupling", true);
    }
    if (!j.contains("bands"))
        throw config_error("bands: missing required section");
    {
        const auto &b = j.at("bands");
        detail::require_keys(b, "bands", {"f_L", "f_H", "B_L", "B_H", "M_L", "M_H"});
        cfg.f_L = get_req<double>(b, "bands", "f_L");
        cfg.f_H = get_req<double>(b, "bands", "f_H");
        cfg.B_L = get_req<double>(b, "bands", "B_L");
        cfg.B_H = get_req<double>(b, "bands", "B_H");
        cfg.M_L = get_req<int>(b, "bands", "M_L");
        cfg.M_H = get_req<int>(b, "bands", "M_H");
    }
    if (!j.contains("users"))
        throw config_error("users: missing required section");
    {
        const auto &u = j.at("users");
        detail::require_keys(u, "users", {"K", "d_min", "d_max", "gamma", "capability_case", "capabilities"});
        cfg.K = get_req<int>(u, "users", "K");
        cfg.d_min = get_opt<double>(u, "users", "d_min", 50.0);
        cfg.d_max = get_opt<double>(u, "users", "d_max", 150.0);
        cfg.gamma = get_opt<double>(u, "users", "gamma", 2.7);
        const int c = get_opt<int>(u, "users", "capability_case", 1);
        if (c < 1 || c > 4)
            throw config_error("users.capability_case: expected 1..4");
        cfg.cap_case = static_cast<CapabilityCase>(c);
        if (u.contains("capabilities")) {
            for (const auto &e : u.at("capabilities")) {
                UserCapability cap;
                cap.eta = detail::get_req<int>(e, "users.capabilities", "eta");
                cap.n_window = detail::get_req<int>(e, "users.capabilities", "n_window");
                const auto bands = detail::get_opt<std::string>(e, "users.capabilities", "bands", "both");
                cap.allowed = bands == "low" ? BandSet::low_only : bands == "high" ? BandSet::high_only : BandSet::both;
                cap.validate();
                cfg.explicit_caps.push_back(cap);
            }
        }
    }
    if (!j.contains("power"))
        throw config_error("power: missing required section");
    {
        const auto &p = j.at("power");
        detail::require_keys(p, "power", {"P_T", "scheme", "beta"});
        cfg.P_T = get_req<double>(p, "power", "P_T");
        cfg.scheme = detail::parse_scheme(get_opt<std::string>(p, "power", "scheme", "JPA"),
                                          get_opt<double>(p, "power", "beta", 1.0));
    }
    cfg.snr_db = get_opt<double>(j, "config", "snr_db", 10.0);
    if (j.contains("search")) {
        const auto &s = j.at("search");
        detail::require_keys(s, "search",
                             {"C1", "C2", "C3", "zeta", "I_PS", "delta_tilde", "bisection_tol", "ga_step",
                              "ga_min_improvement", "fd_step", "ensemble_size"});
        cfg.search.C1 = get_opt<double>(s, "search", "C1", 0.8);
        cfg.search.C2 = get_opt<double>(s, "search", "C2", 2.0);
        cfg.search.C3 = get_opt<double>(s, "search", "C3", 2.0);
        cfg.search.zeta = get_opt<int>(s, "search", "zeta", 10);
        cfg.search.I_PS = get_opt<int>(s, "search", "I_PS", 15);
        cfg.search.delta_tilde = get_opt<double>(s, "search", "delta_tilde", 0.0);
        cfg.search.bisection_tol = get_opt<double>(s, "search", "bisection_tol", 1e-4);
        cfg.search.ga_step = get_opt<double>(s, "search", "ga_step", 0.1);
        cfg.search.ga_min_improvement = get_opt<double>(s, "search", "ga_min_improvement", 0.0);
        cfg.search.fd_step = get_opt<double>(s, "search", "fd_step", 1e-4);
        cfg.search.ensemble_size = get_opt<int>(s, "search", "ensemble_size", 10);
    }
    if (j.contains("inner")) {
        const auto &s = j.at("inner");
        detail::require_keys(s, "inner", {"delta_R_rel", "max_iters", "schedule"});
        cfg.inner.delta_R_rel = get_opt<double>(s, "inner", "delta_R_rel", 1e-4);
        cfg.inner.max_iters = get_opt<int>(s, "inner", "max_iters", 100);
        cfg.inner.gauss_seidel = get_opt<std::string>(s, "inner", "schedule", "jacobi") == "gauss_seidel";
    }
    if (j.contains("seeds")) {
        const auto &s = j.at("seeds");
        detail::require_keys(s, "seeds", {"master", "ensemble_size"});
        cfg.master_seed = get_opt<std::uint64_t>(s, "seeds", "master", 1);
        cfg.ensemble_size = get_opt<int>(s, "seeds", "ensemble_size", 20);
    }
    cfg.validate();
    return cfg;
}

inline nlohmann::json load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw config_error("config: parse error in '" + path + "': " + e.what());
    }
    return j;
}

// Resolved configuration echoed into the run manifest.
inline nlohmann::json scenario_to_json(const ScenarioConfig &cfg) {
    nlohmann::json j;
    j["array"] = {{"kind", to_string(cfg.kind)}, {"D", cfg.D1}, {"D2", cfg.D2}, {"a", cfg.chu.a},
                  {"R_a", cfg.chu.R_a}, {"R", cfg.R}, {"delta", cfg.delta}, {"delta2", cfg.delta2},
                  {"coupling", cfg.coupling}};
    j["bands"] = {{"f_L", cfg.f_L}, {"f_H", cfg.f_H}, {"B_L", cfg.B_L}, {"B_H", cfg.B_H},
                  {"M_L", cfg.M_L}, {"M_H", cfg.M_H}};
    j["users"] = {{"K", cfg.K}, {"d_min", cfg.d_min}, {"d_max", cfg.d_max}, {"gamma", cfg.gamma},
                  {"capability_case", static_cast<int>(cfg.cap_case)}};
    const char *scheme = cfg.scheme.kind == PowerScheme::Kind::jpa    ? "JPA"
                         : cfg.scheme.kind == PowerScheme::Kind::bwpa ? "BWPA"
                                                                      : "CWPA";
    j["power"] = {{"P_T", cfg.P_T}, {"scheme", scheme}, {"beta", cfg.scheme.beta}};
    j["snr_db"] = cfg.snr_db;
    j["search"] = {{"C1", cfg.search.C1}, {"C2", cfg.search.C2}, {"C3", cfg.search.C3},
                   {"zeta", cfg.search.zeta}, {"I_PS", cfg.search.I_PS},
                   {"delta_tilde", cfg.search.delta_tilde}, {"bisection_tol", cfg.search.bisection_tol},
                   {"ga_step", cfg.search.ga_step}, {"ga_min_improvement", cfg.search.ga_min_improvement},
                   {"fd_step", cfg.search.fd_step}, {"ensemble_size", cfg.search.ensemble_size}};
    j["inner"] = {{"delta_R_rel", cfg.inner.delta_R_rel}, {"max_iters", cfg.inner.max_iters},
                  {"schedule", cfg.inner.gauss_seidel ? "gauss_seidel" : "jacobi"}};
    j["seeds"] = {{"master", cfg.master_seed}, {"ensemble_size", cfg.ensemble_size}};
    return j;
}

} // namespace mbmimo

#endif
