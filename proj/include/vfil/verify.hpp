// Runnable inequality suite. Every explicit-constant bound is asserted exactly
// as stated with a small round-off allowance (tol_report); bounds whose
// constant C the theory leaves symbolic are reported as measured constants and
// never asserted against an invented threshold (uniformity of the measured C
// across a declared parameter sweep is asserted instead).
//
// margin convention: for an upper bound lhs <= rhs, margin = rhs - lhs at the
// worst node; for a lower bound lhs >= rhs, margin = lhs - rhs. A check passes
// when margin >= -tol_report.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vfil/cutoff.hpp"
#include "vfil/duhamel.hpp"
#include "vfil/field.hpp"
#include "vfil/profile.hpp"
#include "vfil/xnorm.hpp"

namespace vfil {

struct BoundCheck {
    std::string id;
    double lhs_max = 0.0;             // worst measured side (or measured C for symbolic bounds)
    double rhs_min_or_budget = 0.0;   // bound at the worst node (or the uniformity budget)
    double margin = 0.0;
    bool passed = false;
    bool symbolic = false;            // measured-C report; always passes
    bool premise_violated = false;    // hypothesis of the bound failed, not its conclusion
    bool uniformity = true;           // symbolic: include in the sweep uniformity assertion
    std::size_t nodes_checked = 0;
    std::string note;
};

inline constexpr double kTolReport = 1e-9;

namespace detail {

struct WorstTracker {
    double margin = std::numeric_limits<double>::infinity();
    double lhs = 0.0, rhs = 0.0;
    std::size_t count = 0;

    void upper(double lhs_v, double rhs_v) {  // require lhs <= rhs
        ++count;
        if (rhs_v - lhs_v < margin) {
            margin = rhs_v - lhs_v;
            lhs = lhs_v;
            rhs = rhs_v;
        }
    }
    void lower(double lhs_v, double rhs_v) {  // require lhs >= rhs
        ++count;
        if (lhs_v - rhs_v < margin) {
            margin = lhs_v - rhs_v;
            lhs = lhs_v;
            rhs = rhs_v;
        }
    }
    BoundCheck done(std::string id, double tol) const {
        BoundCheck c;
        c.id = std::move(id);
        c.lhs_max = lhs;
        c.rhs_min_or_budget = rhs;
        c.margin = margin;
        c.nodes_checked = count;
        c.passed = margin >= -tol;
        return c;
    }
};

inline BoundCheck measured_constant(std::string id, double c_value, std::size_t count,
                                    bool uniformity = true, std::string note = {}) {
    BoundCheck c;
    c.id = std::move(id);
    c.lhs_max = c_value;
    c.rhs_min_or_budget = 0.0;
    c.margin = c_value;
    c.symbolic = true;
    c.passed = true;
    c.uniformity = uniformity;
    c.nodes_checked = count;
    c.note = std::move(note);
    return c;
}

}  // namespace detail

// Node-wise bounds on the converged profile u:
//   |u - 1 - alpha|x||  <=  min(1, |x|) alpha/4
//   |u|                 <=  1 + 5 alpha |x| / 4
//   Re u                >=  1 + 3 alpha |x| / 4
//   |u'|                <=  2 alpha          (centered differences, two nodes next to 0 excluded)
//   |u''|               <=  alpha / 4
inline std::vector<BoundCheck> check_profile_bounds(const ProfileSolution& sol,
                                                    double tol_report = kTolReport) {
    if (!sol.converged) throw std::invalid_argument("check_profile_bounds: profile not converged");
    const double a = sol.alpha;
    const RadialGrid& g = sol.grid;
    const double h = g.spacing();

    detail::WorstTracker dev, upper, lower, grad, curv;
    for (std::size_t i = 0; i < g.m(); ++i) {
        const double x = g.nodes[i];
        dev.upper(std::abs(sol.u[i] - 1.0 - a * x), std::min(1.0, x) * a / 4.0);
        upper.upper(std::abs(sol.u[i]), 1.0 + 1.25 * a * x);
        lower.lower(sol.u[i].real(), 1.0 + 0.75 * a * x);
    }
    for (std::size_t i = 3; i + 1 < g.m(); ++i) {
        grad.upper(std::abs(sol.u[i + 1] - sol.u[i - 1]) / (2.0 * h), 2.0 * a);
        curv.upper(std::abs(sol.u[i + 1] - 2.0 * sol.u[i] + sol.u[i - 1]) / (h * h), a / 4.0);
    }
    return {dev.done("profile-deviation", tol_report), upper.done("profile-upper", tol_report),
            lower.done("profile-lower", tol_report), grad.done("profile-gradient", tol_report),
            curv.done("profile-curvature", tol_report)};
}

// Bounds on H(t, sigma) = sqrt(t) u(sigma/sqrt(t)) over a (t, sigma) sample set:
//   |H - sqrt(t) - alpha|sigma||  <=  (alpha/4) min(sqrt(t), |sigma|)
//   Re H                         >=  (sqrt(t) + alpha|sigma|) / 2
//   |H_sigma|                    <=  2 alpha
//   |H_sigma_sigma|              <=  (alpha/4) t^{-1/2}
inline std::vector<BoundCheck> check_H_bounds(const ProfileSolution& sol,
                                              std::span<const double> t_samples,
                                              std::span<const double> sigma_samples,
                                              double tol_report = kTolReport) {
    const double a = sol.alpha;
    const ProfileInterpolant interp(sol);
    detail::WorstTracker dev, lower, grad, curv;
    for (double t : t_samples) {
        if (!(t > 0.0 && t < 1.0))
            throw std::invalid_argument("check_H_bounds: t samples must lie in (0,1)");
        const double rt = std::sqrt(t);
        for (double sigma : sigma_samples) {
            const HValue hv = interp.eval(t, sigma);
            dev.upper(std::abs(hv.h - rt - a * std::abs(sigma)),
                      0.25 * a * std::min(rt, std::abs(sigma)));
            lower.lower(hv.h.real(), 0.5 * (rt + a * std::abs(sigma)));
            grad.upper(std::abs(hv.h_sigma), 2.0 * a);
            curv.upper(std::abs(hv.h_sigma2), 0.25 * a / rt);
        }
    }
    return {dev.done("H-deviation", tol_report), lower.done("H-lower", tol_report),
            grad.done("H-gradient", tol_report), curv.done("H-curvature", tol_report)};
}

// Denominator floors on every stored frame/node:
//   base (r-free):   Re H g >= (sqrt(t)+alpha|sigma|)/2 on I,  >= 1/3 off I
//   with r:          Re r + Re H g >= (sqrt(t)+alpha|sigma|)/4 on I,  >= 1/32 off I
// The with-r bounds presuppose ||r(t)||_{Linf(I)} < sqrt(t)/4; frames breaking
// that premise mark the corresponding checks premise_violated.
inline std::vector<BoundCheck> check_denominator_bounds(const PerturbationTrajectory& traj,
                                                        const ProfileSolution& sol, double alpha,
                                                        double tol_report = kTolReport) {
    traj.check_shape();
    const ProfileInterpolant interp(sol);
    const SpatialGrid grid = traj.frames[0].grid;
    const detail::CutoffRow cut(grid, alpha);

    detail::WorstTracker near_base, far_base, near_r, far_r;
    bool premise_ok = true;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        if (!(t > 0.0)) continue;
        const double rt = std::sqrt(t);
        if (!(linf_within(traj.frames[i], 0.5 / alpha) < 0.25 * rt)) premise_ok = false;
        const detail::HRow hrow = detail::h_row(interp, t, grid);
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double base = hrow.h[j].real() * cut.g[j];
            const double with_r = traj.frames[i][j].real() + base;
            if (cut.in_i[j]) {
                near_base.lower(base, 0.5 * (rt + cut.alpha_abs_sigma[j]));
                near_r.lower(with_r, 0.25 * (rt + cut.alpha_abs_sigma[j]));
            } else {
                far_base.lower(base, 1.0 / 3.0);
                far_r.lower(with_r, 1.0 / 32.0);
            }
        }
    }
    BoundCheck nb = near_base.done("den-near-base", tol_report);
    BoundCheck fb = far_base.done("den-far-base", tol_report);
    BoundCheck nr = near_r.done("den-near", tol_report);
    BoundCheck fr = far_r.done("den-far", tol_report);
    if (!premise_ok) {
        nr.premise_violated = true;
        fr.premise_violated = true;
        nr.note = "premise violated: ||r||_{Linf(I)} >= sqrt(t)/4";
        fr.note = nr.note;
    }
    return {nb, fb, nr, fr};
}

// Lower bounds on the assembled field Re Psi = Re r + Re H g (pair) or
// |r + H g| (polygonal, scaled by rho):
//   >= (sqrt(t)+alpha|sigma|)/4 where alpha|sigma| <= 1/2, >= 1/32 elsewhere.
inline std::vector<BoundCheck> check_assembled_lower_bounds(const PerturbationTrajectory& traj,
                                                            const ProfileSolution& sol, double alpha,
                                                            ProfileMode mode,
                                                            double tol_report = kTolReport) {
    traj.check_shape();
    const ProfileInterpolant interp(sol);
    const SpatialGrid grid = traj.frames[0].grid;
    const detail::CutoffRow cut(grid, alpha);
    detail::WorstTracker near, far;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        if (!(t > 0.0)) continue;
        const double rt = std::sqrt(t);
        const detail::HRow hrow = detail::h_row(interp, t, grid);
        for (std::size_t j = 0; j < grid.n; ++j) {
            const cplx total = traj.frames[i][j] + hrow.h[j] * cut.g[j];
            const double value = mode == ProfileMode::pair ? total.real() : std::abs(total);
            if (cut.alpha_abs_sigma[j] <= 0.5)
                near.lower(value, 0.25 * (rt + cut.alpha_abs_sigma[j]));
            else
                far.lower(value, 1.0 / 32.0);
        }
    }
    return {near.done("psi-lower-near", tol_report), far.done("psi-lower-far", tol_report)};
}

// Source estimates for one alpha. Explicit: b vanishes identically on
// alpha|sigma| <= 1, and the r-free sources reduce exactly on the flat-cutoff
// region (a(0) = -1, a~(0) = H). Symbolic: measured constants of the L2/L1
// envelopes, reported for the sweep aggregator.
inline std::vector<BoundCheck> check_source_bounds(const ProfileSolution& sol,
                                                   const SpatialGrid& grid,
                                                   std::span<const double> s_samples,
                                                   double tol_report = kTolReport) {
    const double a = sol.alpha;
    std::vector<BoundCheck> out;
    const detail::CutoffRow cut(grid, a);
    const ComplexField zero(grid);

    detail::WorstTracker b_support, a0_near, apol_near;
    double c_bl2 = 0.0, c_al2 = 0.0, c_al1 = 0.0, c_afar = 0.0, c_gradb = 0.0;
    double c_apol_l2 = 0.0, c_apol_far = 0.0;
    std::size_t n_samples = 0;
    const ProfileInterpolant interp(sol);
    for (double s : s_samples) {
        ++n_samples;
        const SourceField b = source_b(s, sol, a, grid);
        const SourceField a0 = source_a(zero, s, sol, a);
        const SourceField apol = source_a_tilde(zero, s, sol, a);
        const detail::HRow hrow = detail::h_row(interp, s, grid);

        double l1_near = 0.0;
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double aas = cut.alpha_abs_sigma[j];
            if (aas <= 1.0) {
                b_support.upper(std::abs(b.values[j]), 0.0);
                a0_near.upper(std::abs(a0.values[j] + 1.0), 0.0);
                apol_near.upper(std::abs(apol.values[j] - hrow.h[j]), 0.0);
                l1_near += std::abs(a0.values[j]) * grid.h();
            } else {
                const double envelope = a / (1.0 + cut.psi[j]);
                c_afar = std::max(c_afar, std::abs(a0.values[j]) / envelope);
                const double envelope_pol = a * a / ((1.0 + cut.psi[j]) * (1.0 + cut.psi[j])) +
                                            a / (1.0 + cut.psi[j]);
                c_apol_far = std::max(c_apol_far, std::abs(apol.values[j]) / envelope_pol);
            }
        }
        c_al1 = std::max(c_al1, l1_near * std::sqrt(a));
        if (s > 0.0) {
            c_bl2 = std::max(c_bl2, l2_norm(b.values) / std::pow(a, 1.5));
            c_al2 = std::max(c_al2, l2_norm(a0.values) /
                                        (std::sqrt(a) + std::pow(s, -0.25) / std::sqrt(a)));
            c_apol_l2 = std::max(c_apol_l2, l2_norm(apol.values) /
                                                (std::pow(a, 1.5) + std::pow(s, -0.25) / std::sqrt(a)));
            const ComplexField db = spectral_derivative(b.values);
            double acc = 0.0;
            for (std::size_t j = 0; j < grid.n; ++j)
                if (!cut.in_i[j]) acc += std::norm(db[j]);
            c_gradb = std::max(c_gradb, std::sqrt(grid.h() * acc) /
                                            (std::pow(a, 2.5) + std::pow(a, 1.5) / std::sqrt(s)));
        }
    }
    out.push_back(b_support.done("b-support", 0.0));  // exact identity, no slack
    out.push_back(a0_near.done("a-near-identity", 0.0));
    out.push_back(apol_near.done("apol-near-identity", tol_report));
    out.push_back(detail::measured_constant("b-l2", c_bl2, n_samples));
    out.push_back(detail::measured_constant("a-l2", c_al2, n_samples));
    out.push_back(detail::measured_constant("a-l1-near", c_al1, n_samples));
    out.push_back(detail::measured_constant("a-far", c_afar, n_samples));
    out.push_back(detail::measured_constant("grad-b-l2", c_gradb, n_samples));
    // the alpha^{3/2} envelope of the polygonal L2 bound is a ball worst case;
    // r = 0 samples decay like alpha^{-1/2}, so C falls like alpha^{-2} and a
    // uniformity assertion would measure the slack, not the bound
    out.push_back(detail::measured_constant("apol-l2", c_apol_l2, n_samples, false,
                                            "r = 0 sample; envelope is ball worst-case"));
    out.push_back(detail::measured_constant("apol-far", c_apol_far, n_samples));
    return out;
}

// Uniformity of each measured constant across a sweep (one result set per
// swept alpha): max C / min C must stay below the budget.
inline std::vector<BoundCheck> uniformity_checks(const std::vector<std::vector<BoundCheck>>& sweeps,
                                                 double budget = 10.0) {
    std::vector<BoundCheck> out;
    if (sweeps.empty()) return out;
    for (const BoundCheck& ref : sweeps.front()) {
        if (!ref.symbolic || !ref.uniformity) continue;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& sweep : sweeps)
            for (const BoundCheck& c : sweep)
                if (c.id == ref.id) {
                    lo = std::min(lo, c.lhs_max);
                    hi = std::max(hi, c.lhs_max);
                }
        BoundCheck u;
        u.id = "uniformity:" + ref.id;
        u.lhs_max = (lo > 0.0) ? hi / lo : 1.0;
        u.rhs_min_or_budget = budget;
        u.margin = u.rhs_min_or_budget - u.lhs_max;
        u.passed = u.margin >= 0.0;
        u.nodes_checked = sweeps.size();
        out.push_back(u);
    }
    return out;
}

inline bool explicit_failures(std::span<const BoundCheck> checks) {
    for (const auto& c : checks)
        if (!c.symbolic && !c.passed && !c.premise_violated) return true;
    return false;
}

}  // namespace vfil
