// Planar point-vortex system: the parallel-filament reduction. Classical RK4
// with a per-step collision guard; the rotating regular polygon (with optional
// center) and the translating pair serve as exact regression targets.
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vfil/errors.hpp"
#include "vfil/field.hpp"

namespace vfil {

struct PointVortexState {
    double t = 0.0;
    std::vector<cplx> z;
    std::vector<double> gamma;

    void check_shape() const {
        if (z.empty() || z.size() != gamma.size())
            throw std::invalid_argument("PointVortexState: positions/circulations mismatch");
        for (double g : gamma)
            if (g == 0.0) throw std::invalid_argument("PointVortexState: circulations must be nonzero");
    }
};

struct PVInvariants {
    double hamiltonian = 0.0;  // -sum_{j<k} G_j G_k log|z_j - z_k|
    cplx momentum{0.0, 0.0};   // sum_j G_j z_j
    double angular = 0.0;      // sum_j G_j |z_j|^2
};

// dz_j/dt = i sum_{k != j} G_k (z_j - z_k) / |z_j - z_k|^2
inline std::vector<cplx> pv_rhs(const PointVortexState& s, double collision_eps = 1e-9) {
    s.check_shape();
    const std::size_t n = s.z.size();
    std::vector<cplx> v(n, cplx{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const cplx d = s.z[j] - s.z[k];
            const double d2 = std::norm(d);
            if (d2 < collision_eps * collision_eps) throw collision_error(s.t, j, k);
            v[j] += s.gamma[k] * d / d2;
        }
        v[j] *= kImag;
    }
    return v;
}

inline PVInvariants pv_invariants(const PointVortexState& s) {
    s.check_shape();
    PVInvariants inv;
    for (std::size_t j = 0; j < s.z.size(); ++j) {
        inv.momentum += s.gamma[j] * s.z[j];
        inv.angular += s.gamma[j] * std::norm(s.z[j]);
        for (std::size_t k = j + 1; k < s.z.size(); ++k)
            inv.hamiltonian -= s.gamma[j] * s.gamma[k] * std::log(std::abs(s.z[j] - s.z[k]));
    }
    return inv;
}

// Fixed-step RK4; stores every frame including the initial one.
inline std::vector<PointVortexState> integrate_pv(const PointVortexState& s0, double T, double dt,
                                                  double collision_eps = 1e-9) {
    s0.check_shape();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_pv: dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("integrate_pv: T must be at least dt");

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    std::vector<PointVortexState> traj;
    traj.reserve(steps + 1);
    traj.push_back(s0);

    PointVortexState s = s0;
    const std::size_t n = s.z.size();
    for (std::size_t step = 0; step < steps; ++step) {
        const auto k1 = pv_rhs(s, collision_eps);
        PointVortexState tmp = s;
        for (std::size_t j = 0; j < n; ++j) tmp.z[j] = s.z[j] + 0.5 * dt * k1[j];
        tmp.t = s.t + 0.5 * dt;
        const auto k2 = pv_rhs(tmp, collision_eps);
        for (std::size_t j = 0; j < n; ++j) tmp.z[j] = s.z[j] + 0.5 * dt * k2[j];
        const auto k3 = pv_rhs(tmp, collision_eps);
        for (std::size_t j = 0; j < n; ++j) tmp.z[j] = s.z[j] + dt * k3[j];
        tmp.t = s.t + dt;
        const auto k4 = pv_rhs(tmp, collision_eps);
        for (std::size_t j = 0; j < n; ++j)
            s.z[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        s.t = s0.t + static_cast<double>(step + 1) * dt;
        traj.push_back(s);
    }
    return traj;
}

// Regular N-gon on |z| = rho with unit circulations, optionally with a central
// vortex of circulation center_gamma. With rho == 1 the configuration rotates
// exactly at angular velocity (N-1)/2 + center_gamma.
inline PointVortexState regular_polygon(int n_corners, std::optional<double> center_gamma = {},
                                        double rho = 1.0, double phase = 0.0) {
    if (n_corners < 2) throw std::invalid_argument("regular_polygon: need at least 2 corners");
    PointVortexState s;
    for (int j = 0; j < n_corners; ++j) {
        const double ang = phase + 2.0 * std::numbers::pi * j / n_corners;
        s.z.push_back(rho * cplx{std::cos(ang), std::sin(ang)});
        s.gamma.push_back(1.0);
    }
    if (center_gamma) {
        s.z.push_back(cplx{0.0, 0.0});
        s.gamma.push_back(*center_gamma);
    }
    return s;
}

}  // namespace vfil
