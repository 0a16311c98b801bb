// Construction of the colliding perturbation r by Picard iteration on the
// mild-solution operator
//
//   A(r)(t) = -i int_0^t e^{i (t-s) dss} [ S(r)(s) ] ds,
//
// with S = a(r) + b in pair mode and S = omega * a~(r) + b in polygonal mode:
//
//   a(r)  = 1/(Re r + Re H g) - 1 - g / Re H,                 g = 1/(1 + psi(alpha|sigma|))
//   a~(r) = -1/conj(r + H g) + r + H g + g / conj(H)
//   b     = -2 H_sigma g' - H g''
//
// Where psi vanishes (alpha|sigma| <= 1) the sources are evaluated in their
// algebraically cancelled forms, so a(0) = -1 and a~(0) = H hold exactly there.
//
// The time integral runs over the graded mesh s_k = t (k/M)^2 which clusters
// nodes near s = 0 where the sources peak. Each Fourier mode is integrated by
// product quadrature: the transformed source is taken piecewise linear in s and
// integrated against e^{i k^2 s} in closed form, so arbitrarily fast propagator
// phases cost no accuracy. (A plain weighted sum of propagated sources would
// need M to resolve k_max^2 t radians of phase; the product rule does not.)
//
// Iterates live on the dyadic ladder t_j = t0 2^{-j}, j = 0..J, linearly
// interpolated in t where the quadrature needs intermediate sources. The
// horizon t0 is found by bisection on the joint predicate: convergence, all
// observed ratios <= target, unit-ball membership, and the pointwise bound
// ||r(t)||_{Linf(I)} < sqrt(t)/4.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vfil/cutoff.hpp"
#include "vfil/errors.hpp"
#include "vfil/fft.hpp"
#include "vfil/field.hpp"
#include "vfil/params.hpp"
#include "vfil/profile.hpp"
#include "vfil/quadrature.hpp"
#include "vfil/xnorm.hpp"

namespace vfil {

struct SourceField {
    enum class Kind { a_pair, a_tilde_polygonal, b };
    Kind kind = Kind::a_pair;
    double t = 0.0;
    ComplexField values;
};

namespace detail {

// Per-grid cutoff row: psi, g = 1/(1+psi), analytic g', g'', and region masks.
struct CutoffRow {
    std::vector<double> psi, g, g1, g2, alpha_abs_sigma;
    std::vector<bool> in_i;  // alpha |sigma| < 1/2

    CutoffRow(const SpatialGrid& grid, double alpha) {
        psi.resize(grid.n);
        g.resize(grid.n);
        g1.resize(grid.n);
        g2.resize(grid.n);
        alpha_abs_sigma.resize(grid.n);
        in_i.resize(grid.n);
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double sigma = grid.sigma(j);
            const CutoffProfile c = cutoff_profile(alpha, sigma);
            psi[j] = c.psi;
            g[j] = c.g;
            g1[j] = c.g_d1;
            g2[j] = c.g_d2;
            alpha_abs_sigma[j] = alpha * std::abs(sigma);
            in_i[j] = alpha_abs_sigma[j] < 0.5;
        }
    }
};

// H(s, sigma) and dH/dsigma on the whole grid; s = 0 uses the analytic limit
// H(0, sigma) = alpha|sigma|, H_sigma(0, sigma) = alpha sgn(sigma).
struct HRow {
    std::vector<cplx> h, h_sigma;
};

inline HRow h_row(const ProfileInterpolant& interp, double s, const SpatialGrid& grid) {
    HRow row;
    row.h.resize(grid.n);
    row.h_sigma.resize(grid.n);
    const double alpha = interp.alpha();
    if (s == 0.0) {
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double sigma = grid.sigma(j);
            row.h[j] = alpha * std::abs(sigma);
            row.h_sigma[j] = sigma == 0.0 ? alpha : alpha * (sigma > 0.0 ? 1.0 : -1.0);
        }
        return row;
    }
    for (std::size_t j = 0; j < grid.n; ++j) {
        const HValue hv = interp.eval(s, grid.sigma(j));
        row.h[j] = hv.h;
        row.h_sigma[j] = hv.h_sigma;
    }
    return row;
}

}  // namespace detail

// Floor scale for denominators: on I they must stay above
// floor_scale * (sqrt(t) + alpha |sigma|), off I above floor_scale / 32.
inline constexpr double kSourceFloorScale = 1e-3;

inline SourceField source_a(const ComplexField& r_frame, double t, const ProfileSolution& prof,
                            double alpha) {
    const ProfileInterpolant interp(prof);
    const detail::CutoffRow cut(r_frame.grid, alpha);
    const detail::HRow hrow = detail::h_row(interp, t, r_frame.grid);
    SourceField out{SourceField::Kind::a_pair, t, ComplexField(r_frame.grid)};
    const double rt = std::sqrt(t);
    for (std::size_t j = 0; j < r_frame.size(); ++j) {
        const double re_r = r_frame[j].real();
        const double re_h = hrow.h[j].real();
        const double den = re_r + re_h * cut.g[j];
        const double floor =
            cut.in_i[j] ? kSourceFloorScale * (rt + cut.alpha_abs_sigma[j]) : kSourceFloorScale / 32.0;
        if (den < floor) throw ball_violation_error(t, r_frame.grid.sigma(j), den);
        if (cut.psi[j] == 0.0) {
            // a = -Re(r) / ((Re r + Re H) Re H) - 1; exact -1 at r = 0.
            out.values[j] = (re_r == 0.0) ? cplx{-1.0, 0.0} : cplx{-re_r / (den * re_h) - 1.0, 0.0};
        } else {
            out.values[j] = cplx{1.0 / den - 1.0 - cut.g[j] / re_h, 0.0};
        }
    }
    return out;
}

inline SourceField source_a_tilde(const ComplexField& r_frame, double t, const ProfileSolution& prof,
                                  double alpha) {
    const ProfileInterpolant interp(prof);
    const detail::CutoffRow cut(r_frame.grid, alpha);
    const detail::HRow hrow = detail::h_row(interp, t, r_frame.grid);
    SourceField out{SourceField::Kind::a_tilde_polygonal, t, ComplexField(r_frame.grid)};
    const double rt = std::sqrt(t);
    for (std::size_t j = 0; j < r_frame.size(); ++j) {
        const cplx r = r_frame[j];
        const cplx hg = hrow.h[j] * cut.g[j];
        const cplx den = r + hg;
        const double floor =
            cut.in_i[j] ? kSourceFloorScale * (rt + cut.alpha_abs_sigma[j]) : kSourceFloorScale / 32.0;
        if (std::abs(den) < floor) throw ball_violation_error(t, r_frame.grid.sigma(j), std::abs(den));
        if (cut.psi[j] == 0.0) {
            // a~ = conj(r) / (conj(r + H) conj H) + r + H; exact H at r = 0.
            out.values[j] = (r == cplx{0.0, 0.0})
                                ? hrow.h[j]
                                : std::conj(r) / (std::conj(den) * std::conj(hrow.h[j])) + r + hrow.h[j];
        } else {
            out.values[j] =
                -1.0 / std::conj(den) + r + hg + cut.g[j] / std::conj(hrow.h[j]);
        }
    }
    return out;
}

inline SourceField source_b(double t, const ProfileSolution& prof, double alpha,
                            const SpatialGrid& grid) {
    if (t < 0.0) throw std::domain_error("source_b: t must be nonnegative");
    const ProfileInterpolant interp(prof);
    const detail::CutoffRow cut(grid, alpha);
    const detail::HRow hrow = detail::h_row(interp, t, grid);
    SourceField out{SourceField::Kind::b, t, ComplexField(grid)};
    for (std::size_t j = 0; j < grid.n; ++j) {
        if (cut.g1[j] == 0.0 && cut.g2[j] == 0.0) {
            out.values[j] = cplx{0.0, 0.0};  // identically zero where the cutoff is flat
            continue;
        }
        out.values[j] = -2.0 * hrow.h_sigma[j] * cut.g1[j] - hrow.h[j] * cut.g2[j];
    }
    return out;
}

// Graded quadrature mesh on (0, t]: s_k = t (k/M)^2, k = 0..M.
inline std::vector<double> graded_mesh(double t, std::size_t m_panels) {
    if (!(t > 0.0)) throw std::invalid_argument("graded_mesh: t must be positive");
    if (m_panels < 2) throw std::invalid_argument("graded_mesh: need at least 2 panels");
    std::vector<double> s(m_panels + 1);
    for (std::size_t k = 0; k <= m_panels; ++k) {
        const double lam = static_cast<double>(k) / static_cast<double>(m_panels);
        s[k] = t * lam * lam;
    }
    s.back() = t;
    return s;
}

namespace detail {

// int_0^1 e^{i z u} (1 - u) du  and  int_0^1 e^{i z u} u du.
inline void panel_weights(double z, cplx& w0, cplx& w1) {
    if (std::abs(z) < 0.5) {
        const cplx iz{0.0, z};
        cplx term{1.0, 0.0};
        cplx s{0.0, 0.0}, u{0.0, 0.0};
        double fact = 1.0;
        for (int n = 0; n <= 10; ++n) {
            fact *= static_cast<double>(n + 1);  // (n+1)!
            s += term / fact;
            u += term * static_cast<double>(n + 1) / (fact * static_cast<double>(n + 2));
            term *= iz;
        }
        w1 = u;
        w0 = s - u;
        return;
    }
    const cplx iz{0.0, z};
    const cplx eiz = std::polar(1.0, z);
    const cplx s = (eiz - 1.0) / iz;
    const cplx u = (eiz * (iz - 1.0) + 1.0) / (iz * iz);
    w1 = u;
    w0 = s - u;
}

}  // namespace detail

// A(t) = -i int_0^t e^{i(t-s) dss} S(s) ds with the sources sampled on the
// graded mesh; per-mode product integration (piecewise-linear source in s
// against the exact propagator phase).
inline ComplexField apply_duhamel(const std::vector<ComplexField>& sources,
                                  std::span<const double> mesh, const Fft& fft) {
    if (sources.size() != mesh.size())
        throw std::invalid_argument("apply_duhamel: sources/mesh size mismatch");
    if (sources.size() < 3) throw std::invalid_argument("apply_duhamel: mesh too short");
    const SpatialGrid grid = sources[0].grid;
    const double t = mesh.back();

    std::vector<double> k2(grid.n);
    for (std::size_t m = 0; m < grid.n; ++m) {
        const double k = wavenumber(grid, m);
        k2[m] = k * k;
    }

    std::vector<cplx> acc(grid.n, cplx{0.0, 0.0});
    std::vector<cplx> f_lo = sources[0].values;
    fft.forward(f_lo);
    std::vector<cplx> f_hi;
    for (std::size_t seg = 0; seg + 1 < mesh.size(); ++seg) {
        f_hi = sources[seg + 1].values;
        fft.forward(f_hi);
        const double s0 = mesh[seg];
        const double ds = mesh[seg + 1] - mesh[seg];
        for (std::size_t m = 0; m < grid.n; ++m) {
            cplx w0, w1;
            detail::panel_weights(k2[m] * ds, w0, w1);
            acc[m] += std::polar(ds, k2[m] * s0) * (f_lo[m] * w0 + f_hi[m] * w1);
        }
        f_lo.swap(f_hi);
    }
    for (std::size_t m = 0; m < grid.n; ++m)
        acc[m] *= -kImag * std::polar(1.0, -k2[m] * t);
    fft.inverse(acc);
    return ComplexField(grid, std::move(acc));
}

struct FixedPointOptions {
    std::size_t mesh_panels = 256;   // M
    std::size_t ladder_levels = 8;   // J: frames at t0 2^{-j}, j = 0..J
    double tol = 1e-8;               // successive X-norm distance
    std::size_t max_iter = 48;
    double ratio_target = 0.5;
    bool quadrature_check = true;    // compare the b-integral at M vs M/2
};

struct FixedPointResult {
    PerturbationTrajectory r;
    XNormReport report;
    std::vector<double> ratios;      // successive-update X-norm ratios
    std::size_t iterations = 0;
    double t0 = 0.0;
    bool converged = false;
    bool ratios_ok = false;          // all ratios <= ratio_target
    bool ball_ok = false;            // ||r||_X <= 1
    bool sup_bound_ok = false;       // ||r(t)||_{Linf(I)} < sqrt(t)/4 framewise
    double quad_self_error = 0.0;    // b-integral change under mesh halving
    std::string failure;             // empty when all of the above hold
};

namespace detail {

struct LadderWorkspace {
    std::vector<double> times;                    // ascending dyadic ladder
    std::vector<std::vector<double>> meshes;      // graded mesh per ladder time
    ProfileInterpolant interp;
    CutoffRow cut;
    Fft fft;
    double alpha;

    LadderWorkspace(const ProfileSolution& prof, const SpatialGrid& grid, double t0,
                    const FixedPointOptions& opt)
        : interp(prof), cut(grid, prof.alpha), fft(grid.n), alpha(prof.alpha) {
        for (std::size_t j = 0; j <= opt.ladder_levels; ++j)
            times.push_back(t0 * std::pow(0.5, static_cast<double>(opt.ladder_levels - j)));
        for (double t : times) meshes.push_back(graded_mesh(t, opt.mesh_panels));
    }
};

// Linear interpolation of ladder frames in t; below the lowest level the frame
// scales linearly down to r(0) = 0.
inline ComplexField interp_frame(const std::vector<double>& times,
                                 const std::vector<ComplexField>& frames, double s) {
    if (s <= 0.0) {
        ComplexField zero = frames[0];
        for (auto& z : zero.values) z = cplx{0.0, 0.0};
        return zero;
    }
    if (s <= times.front()) {
        const double lam = s / times.front();
        ComplexField out = frames[0];
        for (auto& z : out.values) z *= lam;
        return out;
    }
    std::size_t hi = 1;
    while (hi < times.size() && times[hi] < s) ++hi;
    if (hi >= times.size()) return frames.back();
    const double lam = (s - times[hi - 1]) / (times[hi] - times[hi - 1]);
    ComplexField out = frames[hi - 1];
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = (1.0 - lam) * frames[hi - 1][j] + lam * frames[hi][j];
    return out;
}

// Fused source row S(s) = a(r(s)) + b(s) (pair) or omega a~(r(s)) + b(s)
// (polygonal), evaluated without intermediate SourceField allocations.
inline ComplexField source_row(const LadderWorkspace& ws, const SpatialGrid& grid,
                               const ComplexField& r_s, double s, ProfileMode mode, double omega) {
    const HRow hrow = h_row(ws.interp, s, grid);
    ComplexField out(grid);
    const double rt = std::sqrt(s);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const CutoffRow& cut = ws.cut;
        cplx b{0.0, 0.0};
        if (cut.g1[j] != 0.0 || cut.g2[j] != 0.0)
            b = -2.0 * hrow.h_sigma[j] * cut.g1[j] - hrow.h[j] * cut.g2[j];
        const double floor = cut.in_i[j] ? kSourceFloorScale * (rt + cut.alpha_abs_sigma[j])
                                         : kSourceFloorScale / 32.0;
        if (mode == ProfileMode::pair) {
            const double re_r = r_s[j].real();
            const double re_h = hrow.h[j].real();
            const double den = re_r + re_h * cut.g[j];
            if (den < floor) throw ball_violation_error(s, grid.sigma(j), den);
            cplx a;
            if (cut.psi[j] == 0.0)
                a = (re_r == 0.0) ? cplx{-1.0, 0.0} : cplx{-re_r / (den * re_h) - 1.0, 0.0};
            else
                a = cplx{1.0 / den - 1.0 - cut.g[j] / re_h, 0.0};
            out[j] = a + b;
        } else {
            const cplx r = r_s[j];
            const cplx hg = hrow.h[j] * cut.g[j];
            const cplx den = r + hg;
            if (std::abs(den) < floor) throw ball_violation_error(s, grid.sigma(j), std::abs(den));
            cplx a;
            if (cut.psi[j] == 0.0)
                a = (r == cplx{0.0, 0.0})
                        ? hrow.h[j]
                        : std::conj(r) / (std::conj(den) * std::conj(hrow.h[j])) + r + hrow.h[j];
            else
                a = -1.0 / std::conj(den) + r + hg + cut.g[j] / std::conj(hrow.h[j]);
            out[j] = omega * a + b;
        }
    }
    return out;
}

inline PerturbationTrajectory apply_fixed_point_map(const LadderWorkspace& ws,
                                                    const SpatialGrid& grid,
                                                    const PerturbationTrajectory& r,
                                                    ProfileMode mode, double omega) {
    PerturbationTrajectory out;
    out.times = ws.times;
    out.alpha = r.alpha;
    out.gamma = r.gamma;
    for (std::size_t i = 0; i < ws.times.size(); ++i) {
        const auto& mesh = ws.meshes[i];
        std::vector<ComplexField> sources;
        sources.reserve(mesh.size());
        for (double s : mesh)
            sources.push_back(source_row(ws, grid, interp_frame(r.times, r.frames, s), s, mode, omega));
        out.frames.push_back(apply_duhamel(sources, mesh, ws.fft));
    }
    return out;
}

}  // namespace detail

// One Picard run at fixed t0 = params.t0. Never throws on predicate failures;
// inspect the flags (solve_r wraps this with the spec'd error behavior).
inline FixedPointResult fixed_point_run(const ProfileSolution& prof, const ModelParams& params,
                                        ProfileMode mode, const SpatialGrid& grid,
                                        const FixedPointOptions& opt = {}) {
    params.validate(mode == ProfileMode::polygonal);
    const double omega = mode == ProfileMode::polygonal ? params.omega : 0.0;

    FixedPointResult res;
    res.t0 = params.t0;
    detail::LadderWorkspace ws(prof, grid, params.t0, opt);

    PerturbationTrajectory r;
    r.times = ws.times;
    r.alpha = params.alpha;
    r.gamma = params.gamma;
    for (std::size_t i = 0; i < ws.times.size(); ++i) r.frames.emplace_back(grid);

    try {
        double prev_dist = -1.0;
        for (std::size_t it = 1; it <= opt.max_iter; ++it) {
            PerturbationTrajectory next = detail::apply_fixed_point_map(ws, grid, r, mode, omega);
            const double dist = x_norm(trajectory_difference(next, r), params.alpha, params.gamma).total;
            r = std::move(next);
            res.iterations = it;
            if (prev_dist > 0.0) res.ratios.push_back(dist / prev_dist);
            prev_dist = dist;
            if (dist < opt.tol) {
                res.converged = true;
                break;
            }
        }
    } catch (const ball_violation_error& e) {
        res.failure = e.what();
        res.r = std::move(r);
        return res;
    }

    res.report = x_norm(r, params.alpha, params.gamma);
    r.report = res.report;

    res.ratios_ok = true;
    for (double q : res.ratios)
        if (!(q <= opt.ratio_target)) res.ratios_ok = false;
    res.ball_ok = res.report.total <= 1.0;
    res.sup_bound_ok = true;
    const double half_i = 0.5 / params.alpha;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        if (!(linf_within(r.frames[i], half_i) < 0.25 * std::sqrt(r.times[i])))
            res.sup_bound_ok = false;

    if (opt.quadrature_check && res.converged) {
        // Mesh-halving self test on the pure b-integral at t0 (even-index
        // subsampling of the graded mesh is exactly the M/2 mesh).
        const auto& mesh = ws.meshes.back();
        std::vector<ComplexField> bsrc;
        bsrc.reserve(mesh.size());
        for (double s : mesh) bsrc.push_back(source_b(s, prof, params.alpha, grid).values);
        const ComplexField fine = apply_duhamel(bsrc, mesh, ws.fft);
        std::vector<double> half_mesh;
        std::vector<ComplexField> half_src;
        for (std::size_t k = 0; k < mesh.size(); k += 2) {
            half_mesh.push_back(mesh[k]);
            half_src.push_back(bsrc[k]);
        }
        const ComplexField coarse = apply_duhamel(half_src, half_mesh, ws.fft);
        res.quad_self_error = l2_norm(fine - coarse);
        const double scale = std::max(1.0, l2_norm(fine));
        if (res.quad_self_error > 1e-3 * scale)
            throw quadrature_error("apply_duhamel: graded mesh too coarse (self-convergence " +
                                   std::to_string(res.quad_self_error) + ")");
    }

    if (!res.converged)
        res.failure = "no convergence in " + std::to_string(opt.max_iter) + " iterations";
    else if (!res.ratios_ok)
        res.failure = "contraction ratio above target";
    else if (!res.ball_ok)
        res.failure = "X-norm ball violated: total = " + std::to_string(res.report.total);
    else if (!res.sup_bound_ok)
        res.failure = "pointwise bound sqrt(t)/4 violated on I";

    res.r = std::move(r);
    return res;
}

// Spec'd error behavior: throws when the run fails to contract or leaves the
// admissible ball.
inline FixedPointResult solve_r(const ProfileSolution& prof, const ModelParams& params,
                                ProfileMode mode, const SpatialGrid& grid,
                                const FixedPointOptions& opt = {}) {
    FixedPointResult res = fixed_point_run(prof, params, mode, grid, opt);
    if (!res.converged) {
        const double last = res.ratios.empty() ? 1.0 : res.ratios.back();
        if (last >= 1.0) throw no_contraction_error(last, params.t0);
        throw convergence_error("solve_r: " + res.failure, last);
    }
    if (!res.ball_ok || !res.sup_bound_ok) throw validity_error("solve_r: " + res.failure);
    return res;
}

// ||A(r1) - A(r2)||_X / ||r1 - r2||_X. The b-source cancels in the difference:
//   a(r1) - a(r2)   =  Re(r2 - r1) / (D1 D2),       D_i = Re r_i + Re H g
//   a~(r1) - a~(r2) =  conj(r1 - r2) / (conj D1 conj D2) + (r1 - r2)
inline double contraction_probe(const PerturbationTrajectory& r1, const PerturbationTrajectory& r2,
                                const ProfileSolution& prof, const ModelParams& params,
                                ProfileMode mode, const FixedPointOptions& opt = {}) {
    r1.check_shape();
    r2.check_shape();
    if (r1.times != r2.times) throw std::invalid_argument("contraction_probe: ladder mismatch");
    const SpatialGrid grid = r1.frames[0].grid;
    const double denom_norm = x_norm(trajectory_difference(r1, r2), params.alpha, params.gamma).total;
    if (denom_norm == 0.0) throw std::invalid_argument("contraction_probe: r1 == r2");

    detail::LadderWorkspace ws(prof, grid, r1.times.back(), opt);
    const double omega = mode == ProfileMode::polygonal ? params.omega : 0.0;

    PerturbationTrajectory diff;
    diff.times = ws.times;
    diff.alpha = params.alpha;
    diff.gamma = params.gamma;
    for (std::size_t i = 0; i < ws.times.size(); ++i) {
        const auto& mesh = ws.meshes[i];
        std::vector<ComplexField> sources;
        sources.reserve(mesh.size());
        for (double s : mesh) {
            const ComplexField f1 = detail::interp_frame(r1.times, r1.frames, s);
            const ComplexField f2 = detail::interp_frame(r2.times, r2.frames, s);
            const detail::HRow hrow = detail::h_row(ws.interp, s, grid);
            ComplexField c(grid);
            const double rt = std::sqrt(s);
            for (std::size_t j = 0; j < grid.n; ++j) {
                const double floor = ws.cut.in_i[j]
                                         ? kSourceFloorScale * (rt + ws.cut.alpha_abs_sigma[j])
                                         : kSourceFloorScale / 32.0;
                if (mode == ProfileMode::pair) {
                    const double num = f2[j].real() - f1[j].real();
                    if (num == 0.0) {
                        c[j] = cplx{0.0, 0.0};  // identical arguments contribute nothing
                        continue;
                    }
                    const double d1 = f1[j].real() + hrow.h[j].real() * ws.cut.g[j];
                    const double d2 = f2[j].real() + hrow.h[j].real() * ws.cut.g[j];
                    if (d1 < floor || d2 < floor)
                        throw ball_violation_error(s, grid.sigma(j), std::min(d1, d2));
                    c[j] = cplx{num / (d1 * d2), 0.0};
                } else {
                    const cplx dr = f1[j] - f2[j];
                    if (dr == cplx{0.0, 0.0}) {
                        c[j] = cplx{0.0, 0.0};
                        continue;
                    }
                    const cplx d1 = f1[j] + hrow.h[j] * ws.cut.g[j];
                    const cplx d2 = f2[j] + hrow.h[j] * ws.cut.g[j];
                    if (std::abs(d1) < floor || std::abs(d2) < floor)
                        throw ball_violation_error(s, grid.sigma(j), std::min(std::abs(d1), std::abs(d2)));
                    c[j] = omega * (std::conj(dr) / (std::conj(d1) * std::conj(d2)) + dr);
                }
            }
            sources.push_back(std::move(c));
        }
        diff.frames.push_back(apply_duhamel(sources, mesh, ws.fft));
    }
    return x_norm(diff, params.alpha, params.gamma).total / denom_norm;
}

struct BisectionResult {
    double t0 = 0.0;
    FixedPointResult fixed_point;
    std::vector<double> tried;  // every t0 the search evaluated
};

// Largest t0 (within the bisection resolution) whose run satisfies the joint
// predicate. A cheap two-iteration pre-run rejects hopeless horizons before
// the full solve is attempted.
inline BisectionResult bisect_t0(const ProfileSolution& prof, ModelParams params, ProfileMode mode,
                                 const SpatialGrid& grid, const FixedPointOptions& opt = {},
                                 double t0_start = 0.25, std::size_t refine_steps = 5) {
    BisectionResult out;
    auto passes = [&](double t0, FixedPointResult* keep) -> bool {
        params.t0 = t0;
        out.tried.push_back(t0);
        FixedPointOptions probe_opt = opt;
        probe_opt.max_iter = 2;
        probe_opt.tol = 0.0;  // always runs both iterations
        probe_opt.quadrature_check = false;
        try {
            FixedPointResult probe = fixed_point_run(prof, params, mode, grid, probe_opt);
            if (!probe.failure.empty() && !probe.ball_ok) return false;
            if (!probe.ratios.empty() && probe.ratios.front() > opt.ratio_target) return false;
            if (!probe.sup_bound_ok) return false;
        } catch (const std::runtime_error&) {
            return false;
        }
        try {
            FixedPointResult full = fixed_point_run(prof, params, mode, grid, opt);
            const bool ok = full.failure.empty();
            if (ok && keep) *keep = std::move(full);
            return ok;
        } catch (const std::runtime_error&) {
            return false;
        }
    };

    double hi = t0_start;  // known-failing upper end once the loop advances
    double lo = t0_start;
    FixedPointResult best;
    bool found = false;
    for (int k = 0; k < 64 && !found; ++k) {
        if (passes(lo, &best)) {
            found = true;
            break;
        }
        hi = lo;
        lo *= 0.0625;  // shrink by 16 until the predicate first holds
    }
    if (!found) throw convergence_error("bisect_t0: no admissible horizon found", 1.0);

    if (lo < t0_start) {
        for (std::size_t k = 0; k < refine_steps; ++k) {
            const double mid = std::sqrt(lo * hi);  // geometric midpoint
            FixedPointResult cand;
            if (passes(mid, &cand)) {
                lo = mid;
                best = std::move(cand);
            } else {
                hi = mid;
            }
        }
    }
    out.t0 = lo;
    out.fixed_point = std::move(best);
    return out;
}

// Assembled deviation field xi(t) = r(t) + H(t) g - 1, the split-step state
// whose reconstruction is Psi = (1 - i t) + xi (pair) or
// Psi = rho e^{i(theta + omega t)} (1 + xi) (polygonal).
inline ComplexField deviation_from_r(const ComplexField& r, double t, const ProfileSolution& prof) {
    const ProfileInterpolant interp(prof);
    ComplexField out = r;
    for (std::size_t j = 0; j < out.size(); ++j) {
        const double sigma = out.grid.sigma(j);
        const double g = 1.0 / (1.0 + cutoff_psi(prof.alpha * std::abs(sigma)));
        out[j] += interp.eval(t, sigma).h * g - 1.0;
    }
    return out;
}

}  // namespace vfil
