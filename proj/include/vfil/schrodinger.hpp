// Spectral free propagator and Strang split-step solvers for the filament
// equations:
//
//   pair:       i dPsi/dt + Psi_ss - 1/Re(Psi)                    = 0
//   polygonal:  i dPsi/dt + Psi_ss + w Psi/|Psi|^2                = 0
//   bm:         i dPhi/dt + Phi_ss + w Phi/|Phi|^2 (1 - |Phi|^2)  = 0
//   full:       i dPsi_j/dt + d_j Psi_j'' + sum_k g_k (Psi_j - Psi_k)/|Psi_j - Psi_k|^2 = 0
//
// Periodic spectral boxes want fields that settle to a constant at the edges,
// so each reduced kind evolves a deviation variable:
//   pair:       xi  with Psi = (1 - i t) + xi
//   polygonal:  eta with Psi = rho e^{i(theta + w t)} (1 + eta)
//   bm:         chi with Phi = 1 + chi
// The full system stores the fields raw (symmetric data is edge-compatible).
// Each reduced nonlinear substep is an exact pointwise solve; the full-system
// substep is one RK4 step of the vortex interaction at every sigma.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfil/cutoff.hpp"
#include "vfil/errors.hpp"
#include "vfil/fft.hpp"
#include "vfil/field.hpp"
#include "vfil/grid.hpp"
#include "vfil/profile.hpp"

namespace vfil {

struct EquationKind {
    enum class Tag { pair, polygonal, bm, full_kmd };

    Tag tag = Tag::pair;
    double omega = 0.0;
    double rho = 1.0;
    double theta = 0.0;
    std::vector<double> gamma;       // full system: circulations (all nonzero)
    std::vector<double> dispersion;  // full system: coefficient of Psi_j''
    double center_gamma = 0.0;       // full system: circulation of a filament pinned at the
                                     // origin (the symmetry ansatz keeps it there); 0 = absent

    static EquationKind pair() { return {}; }
    static EquationKind polygonal(double omega, double rho = 1.0, double theta = 0.0) {
        EquationKind k;
        k.tag = Tag::polygonal;
        k.omega = omega;
        k.rho = rho;
        k.theta = theta;
        return k;
    }
    static EquationKind bm(double omega) {
        EquationKind k;
        k.tag = Tag::bm;
        k.omega = omega;
        return k;
    }
    // Standard normalization: dispersion coefficient of filament j equals its circulation.
    static EquationKind full_kmd(std::vector<double> circulations, double center_gamma = 0.0) {
        auto dispersion = circulations;
        return full_kmd(std::move(circulations), std::move(dispersion), center_gamma);
    }
    static EquationKind full_kmd(std::vector<double> circulations, std::vector<double> dispersion,
                                 double center_gamma = 0.0) {
        EquationKind k;
        k.tag = Tag::full_kmd;
        k.gamma = std::move(circulations);
        k.dispersion = std::move(dispersion);
        k.center_gamma = center_gamma;
        if (k.gamma.empty() || k.gamma.size() != k.dispersion.size())
            throw std::invalid_argument("EquationKind: circulation/dispersion size mismatch");
        for (double g : k.gamma)
            if (g == 0.0) throw std::invalid_argument("EquationKind: circulations must be nonzero");
        return k;
    }
    // The rescaled anti-parallel pair system: dispersion (+1, -1), interaction (2, -2).
    static EquationKind kmd_pair_rescaled() { return full_kmd({2.0, -2.0}, {1.0, -1.0}); }

    std::size_t fields() const { return tag == Tag::full_kmd ? gamma.size() : 1; }

    std::string background_description() const {
        switch (tag) {
            case Tag::pair: return "pair: Psi = (1 - i t) + xi";
            case Tag::polygonal: return "polygonal: Psi = rho e^{i(theta + omega t)} (1 + eta)";
            case Tag::bm: return "bm: Phi = 1 + chi";
            case Tag::full_kmd: return "full: fields stored raw";
        }
        return {};
    }
};

inline ComplexField free_propagate(const ComplexField& f, double t, double dispersion = 1.0) {
    if (!f.all_finite()) throw std::invalid_argument("free_propagate: non-finite input");
    Fft fft(f.grid.n);
    std::vector<cplx> a = f.values;
    fft.forward(a);
    for (std::size_t m = 0; m < a.size(); ++m) {
        const double k = wavenumber(f.grid, m);
        a[m] *= std::polar(1.0, -dispersion * k * k * t);
    }
    fft.inverse(a);
    return ComplexField(f.grid, std::move(a));
}

struct DispersionCheck {
    double constant = 0.0;          // max over samples of sqrt(t) ||e^{it dss} f||_inf / ||f||_L1
    bool wraparound_warning = false;
};

inline DispersionCheck dispersion_check(const ComplexField& f, std::span<const double> t_samples) {
    double l1 = 0.0;
    for (const auto& z : f.values) l1 += std::abs(z);
    l1 *= f.grid.h();
    if (!(l1 > 0.0)) throw std::invalid_argument("dispersion_check: zero input");
    DispersionCheck out;
    for (double t : t_samples) {
        if (!(t > 0.0)) throw std::invalid_argument("dispersion_check: t samples must be positive");
        if (std::sqrt(t) > 0.1 * f.grid.L) out.wraparound_warning = true;
        const double peak = linf_norm(free_propagate(f, t));
        out.constant = std::max(out.constant, std::sqrt(t) * peak / l1);
    }
    return out;
}

namespace detail {

inline void check_floor(double value, double floor_eps, double t, double sigma) {
    if (value < floor_eps) throw near_collision_error(t, sigma);
}

}  // namespace detail

// Advance the nonlinear part by dt in the deviation variables. Exact closed
// forms for the reduced kinds (the conserved pointwise quantity makes the
// substep a shift or phase rotation); one RK4 step per sigma for the full
// system. t_now is used only for error reporting.
inline void nonlinear_substep(std::vector<ComplexField>& fields, const EquationKind& kind, double dt,
                              double t_now, double floor_eps = 1e-6) {
    switch (kind.tag) {
        case EquationKind::Tag::pair: {
            auto& f = fields[0];
            for (std::size_t j = 0; j < f.size(); ++j) {
                const double den = 1.0 + f[j].real();
                detail::check_floor(den, floor_eps, t_now, f.grid.sigma(j));
                f[j] -= kImag * dt * (1.0 / den - 1.0);
            }
            break;
        }
        case EquationKind::Tag::polygonal: {
            auto& f = fields[0];
            const double rho2 = kind.rho * kind.rho;
            for (std::size_t j = 0; j < f.size(); ++j) {
                const cplx phi = 1.0 + f[j];
                const double a2 = std::norm(phi);
                detail::check_floor(kind.rho * std::sqrt(a2), floor_eps, t_now, f.grid.sigma(j));
                f[j] = phi * std::polar(1.0, kind.omega * dt * (1.0 / (rho2 * a2) - 1.0)) - 1.0;
            }
            break;
        }
        case EquationKind::Tag::bm: {
            auto& f = fields[0];
            for (std::size_t j = 0; j < f.size(); ++j) {
                const cplx phi = 1.0 + f[j];
                const double a2 = std::norm(phi);
                detail::check_floor(std::sqrt(a2), floor_eps, t_now, f.grid.sigma(j));
                f[j] = phi * std::polar(1.0, kind.omega * dt * (1.0 - a2) / a2) - 1.0;
            }
            break;
        }
        case EquationKind::Tag::full_kmd: {
            const std::size_t nf = kind.fields();
            const std::size_t n = fields[0].size();
            std::vector<cplx> z(nf), k1(nf), k2(nf), k3(nf), k4(nf), tmp(nf);
            auto rhs = [&](const std::vector<cplx>& zz, std::vector<cplx>& out, double sigma) {
                for (std::size_t a = 0; a < nf; ++a) {
                    cplx acc{0.0, 0.0};
                    for (std::size_t b = 0; b < nf; ++b) {
                        if (a == b) continue;
                        const cplx d = zz[a] - zz[b];
                        const double d2 = std::norm(d);
                        detail::check_floor(std::sqrt(d2), floor_eps, t_now, sigma);
                        acc += kind.gamma[b] * d / d2;
                    }
                    if (kind.center_gamma != 0.0) {
                        const double d2 = std::norm(zz[a]);
                        detail::check_floor(std::sqrt(d2), floor_eps, t_now, sigma);
                        acc += kind.center_gamma * zz[a] / d2;
                    }
                    out[a] = kImag * acc;
                }
            };
            for (std::size_t j = 0; j < n; ++j) {
                const double sigma = fields[0].grid.sigma(j);
                for (std::size_t a = 0; a < nf; ++a) z[a] = fields[a][j];
                rhs(z, k1, sigma);
                for (std::size_t a = 0; a < nf; ++a) tmp[a] = z[a] + 0.5 * dt * k1[a];
                rhs(tmp, k2, sigma);
                for (std::size_t a = 0; a < nf; ++a) tmp[a] = z[a] + 0.5 * dt * k2[a];
                rhs(tmp, k3, sigma);
                for (std::size_t a = 0; a < nf; ++a) tmp[a] = z[a] + dt * k3[a];
                rhs(tmp, k4, sigma);
                for (std::size_t a = 0; a < nf; ++a)
                    fields[a][j] = z[a] + dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
            }
            break;
        }
    }
}

struct EvolutionRun {
    EquationKind kind;
    SpatialGrid grid;
    double dt = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::vector<double> times;
    std::vector<std::vector<ComplexField>> frames;  // frames[i][filament], deviation variables
    std::string background;

    // Reconstruct the physical field of one filament at stored frame i.
    ComplexField psi(std::size_t i, std::size_t filament = 0) const {
        const ComplexField& f = frames[i][filament];
        ComplexField out = f;
        const double t = times[i];
        switch (kind.tag) {
            case EquationKind::Tag::pair: {
                const cplx bg{1.0, -t};
                for (auto& z : out.values) z += bg;
                break;
            }
            case EquationKind::Tag::polygonal: {
                const cplx frame_factor = kind.rho * std::polar(1.0, kind.theta + kind.omega * t);
                for (auto& z : out.values) z = frame_factor * (1.0 + z);
                break;
            }
            case EquationKind::Tag::bm: {
                for (auto& z : out.values) z += 1.0;
                break;
            }
            case EquationKind::Tag::full_kmd:
                break;
        }
        return out;
    }
};

namespace detail {

inline void check_edges(const std::vector<ComplexField>& fields, const EquationKind& kind,
                        double edge_tol, double t) {
    for (const auto& f : fields) {
        double v;
        if (kind.tag == EquationKind::Tag::full_kmd)
            v = std::abs(f.values.front() - f.values.back());
        else
            v = std::max(std::abs(f.values.front()), std::abs(f.values.back()));
        if (v > edge_tol) throw box_size_error(t, v);
    }
}

}  // namespace detail

struct EvolveOptions {
    double floor_eps = 1e-6;
    double edge_tol = 1e-8;
    std::size_t frame_stride = 1;
};

inline EvolutionRun split_step_evolve(std::vector<ComplexField> init, const EquationKind& kind,
                                      double t_start, double t_end, double dt,
                                      const EvolveOptions& opt = {}) {
    if (init.size() != kind.fields())
        throw std::invalid_argument("split_step_evolve: field count does not match kind");
    if (t_end == t_start) throw std::invalid_argument("split_step_evolve: empty time interval");
    if (!(dt > 0.0)) throw std::invalid_argument("split_step_evolve: dt must be positive");

    const SpatialGrid grid = init[0].grid;
    auto steps = static_cast<std::size_t>(std::llround(std::abs(t_end - t_start) / dt));
    if (steps == 0) steps = 1;
    // Signed step: backward evolution is the same scheme with dt < 0.
    const double dt_eff = (t_end - t_start) / static_cast<double>(steps);

    EvolutionRun run;
    run.kind = kind;
    run.grid = grid;
    run.dt = dt_eff;
    run.t_start = t_start;
    run.t_end = t_end;
    run.background = kind.background_description();

    detail::check_edges(init, kind, opt.edge_tol, t_start);
    run.times.push_back(t_start);
    run.frames.push_back(init);

    Fft fft(grid.n);
    std::vector<double> k2(grid.n);
    for (std::size_t m = 0; m < grid.n; ++m) {
        const double k = wavenumber(grid, m);
        k2[m] = k * k;
    }

    std::vector<ComplexField> fields = std::move(init);
    double t = t_start;
    for (std::size_t step = 0; step < steps; ++step) {
        nonlinear_substep(fields, kind, 0.5 * dt_eff, t, opt.floor_eps);
        for (std::size_t a = 0; a < fields.size(); ++a) {
            const double disp =
                (kind.tag == EquationKind::Tag::full_kmd) ? kind.dispersion[a] : 1.0;
            fft.forward(fields[a].values);
            for (std::size_t m = 0; m < grid.n; ++m)
                fields[a].values[m] *= std::polar(1.0, -disp * k2[m] * dt_eff);
            fft.inverse(fields[a].values);
        }
        t = t_start + static_cast<double>(step + 1) * dt_eff;
        nonlinear_substep(fields, kind, 0.5 * dt_eff, t, opt.floor_eps);
        if ((step + 1) % opt.frame_stride == 0 || step + 1 == steps) {
            detail::check_edges(fields, kind, opt.edge_tol, t);
            run.times.push_back(t);
            run.frames.push_back(fields);
        }
    }
    return run;
}

// Deviation-variable initial data for a self-similar start at time t:
// xi (pair) or eta (polygonal) equals H(t,sigma)/(1 + psi(alpha|sigma|)) - 1.
inline ComplexField self_similar_deviation(const ProfileSolution& prof, double t,
                                           const SpatialGrid& grid) {
    ProfileInterpolant interp(prof);
    ComplexField out(grid);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double sigma = grid.sigma(j);
        const HValue hv = interp.eval(t, sigma);
        const double g = 1.0 / (1.0 + cutoff_psi(prof.alpha * std::abs(sigma)));
        out[j] = hv.h * g - 1.0;
    }
    return out;
}

// Evolve the full symmetric system (N corners, optional center) and the
// reduced single equation side by side; return the largest pointwise
// discrepancy |Psi_j - e^{i (j-1) 2 pi / N} Psi_reduced| over stored frames.
inline double full_kmd_symmetry_check(const ComplexField& phi0, int n_corners,
                                      std::optional<double> center_gamma, double T, double dt,
                                      const EvolveOptions& opt = {}) {
    if (n_corners < 1) throw std::invalid_argument("full_kmd_symmetry_check: need n_corners >= 1");
    const SpatialGrid grid = phi0.grid;
    const double omega = omega_from(n_corners, center_gamma.value_or(0.0));

    std::vector<double> circulations(static_cast<std::size_t>(n_corners), 1.0);
    std::vector<ComplexField> init;
    std::vector<cplx> roots;
    for (int j = 0; j < n_corners; ++j) {
        const double ang = 2.0 * std::numbers::pi * j / n_corners;
        const cplx rot = std::polar(1.0, ang);
        roots.push_back(rot);
        ComplexField f = phi0;
        for (auto& z : f.values) z *= rot;
        init.push_back(std::move(f));
    }

    EvolutionRun full = split_step_evolve(
        init, EquationKind::full_kmd(circulations, center_gamma.value_or(0.0)), 0.0, T, dt, opt);

    ComplexField eta0 = phi0;
    for (auto& z : eta0.values) z -= 1.0;
    EvolutionRun reduced =
        split_step_evolve({eta0}, EquationKind::polygonal(omega), 0.0, T, dt, opt);

    double worst = 0.0;
    for (std::size_t i = 0; i < full.times.size(); ++i) {
        const ComplexField psi1 = reduced.psi(i);
        for (std::size_t a = 0; a < roots.size(); ++a) {
            const ComplexField& pj = full.frames[i][a];
            for (std::size_t s = 0; s < grid.n; ++s)
                worst = std::max(worst, std::abs(pj[s] - roots[a] * psi1[s]));
        }
    }
    return worst;
}

// E(Phi) = int |dPhi|^2 + omega int (-ln|Phi|^2 + |Phi|^2 - 1), trapezoid over the box.
inline double energy_bm(const ComplexField& phi, double omega) {
    const ComplexField dphi = spectral_derivative(phi);
    const double h = phi.grid.h();
    double grad = 0.0, pot = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) {
        grad += std::norm(dphi[j]);
        if (omega != 0.0) {
            const double a2 = std::norm(phi[j]);
            if (!(a2 > 0.0)) throw std::domain_error("energy_bm: |Phi| vanishes at a node");
            pot += -std::log(a2) + a2 - 1.0;
        }
    }
    return h * grad + omega * h * pot;
}

struct ScalingFit {
    double slope = 0.0;
    double prefactor = 0.0;
};

// Least-squares fit of log(separation) against log(t).
inline ScalingFit fit_power_law(std::span<const double> times, std::span<const double> separations) {
    if (times.size() != separations.size() || times.size() < 2)
        throw std::invalid_argument("fit_power_law: need >= 2 matching samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(separations[i] > 0.0))
            throw validity_error("fit_power_law: non-positive separation inside the window");
        const double x = std::log(times[i]);
        const double y = std::log(separations[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    ScalingFit fit;
    if (denom == 0.0) throw std::invalid_argument("fit_power_law: degenerate time samples");
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.prefactor = std::exp((sy - fit.slope * sx) / n);
    return fit;
}

// Pair-run filament separation at sigma = 0 is 2 Re Psi1; its fitted exponent
// for a self-similar collision is 1/2 with prefactor 2.
inline ScalingFit collision_scaling_fit(const EvolutionRun& run) {
    if (run.kind.tag != EquationKind::Tag::pair)
        throw std::invalid_argument("collision_scaling_fit: pair-kind run required");
    const std::size_t c = run.grid.center_index();
    std::vector<double> seps;
    seps.reserve(run.times.size());
    for (std::size_t i = 0; i < run.times.size(); ++i)
        seps.push_back(2.0 * run.psi(i)[c].real());
    return fit_power_law(run.times, seps);
}

}  // namespace vfil
