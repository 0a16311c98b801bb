// The weighted space-time norm controlling the perturbation r:
//
//   ||r|| = sup_t ||r||_{Linf((0,t),L2)} / t^(3/4)
//         + sup_t ||dr||_{Linf((0,t),L2)} / t^gamma
//         + sup_t 8 ||r||_{Linf((0,t) x I)} / t^(1/2),      I = (-1/(2 alpha), 1/(2 alpha))
//
// evaluated discretely: L2 by the periodic trapezoid sum, Linf by the node max,
// the inner Linf-in-time by a running max over stored frames, the outer sup over
// stored frame times. Each component is reported separately; the total is their sum.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "vfil/fft.hpp"
#include "vfil/field.hpp"

namespace vfil {

struct XNormReport {
    double l2_component = 0.0;
    double grad_component = 0.0;
    double local_component = 0.0;
    double total = 0.0;
    double gamma = 0.0;
};

// Time-indexed frames of a perturbation field r on (0, t0]. A frame at t == 0
// is admissible only when it vanishes identically.
struct PerturbationTrajectory {
    std::vector<double> times;
    std::vector<ComplexField> frames;
    double alpha = 0.0;
    double gamma = 0.0;
    XNormReport report;

    std::size_t size() const { return frames.size(); }

    void check_shape() const {
        if (frames.empty()) throw std::invalid_argument("PerturbationTrajectory: no frames");
        if (times.size() != frames.size())
            throw std::invalid_argument("PerturbationTrajectory: times/frames size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw std::invalid_argument("PerturbationTrajectory: times must increase strictly");
    }
};

inline XNormReport x_norm(const PerturbationTrajectory& traj, double alpha, double gamma) {
    traj.check_shape();
    if (!(alpha > 0.0)) throw std::invalid_argument("x_norm: alpha must be positive");
    if (!(gamma > 0.0 && gamma < 0.25)) throw std::invalid_argument("x_norm: gamma must lie in (0, 1/4)");

    const double half_i = 0.5 / alpha;
    XNormReport rep;
    rep.gamma = gamma;

    double run_l2 = 0.0, run_grad = 0.0, run_loc = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double t = traj.times[i];
        const ComplexField& r = traj.frames[i];
        if (!r.all_finite()) throw std::invalid_argument("x_norm: non-finite frame");
        const double l2 = l2_norm(r);
        if (t <= 0.0) {
            if (l2 > 0.0)
                throw std::domain_error("x_norm: nonzero frame at t = 0 (weights diverge)");
            continue;
        }
        run_l2 = std::max(run_l2, l2);
        run_grad = std::max(run_grad, l2_norm(spectral_derivative(r)));
        run_loc = std::max(run_loc, linf_within(r, half_i));
        rep.l2_component = std::max(rep.l2_component, run_l2 / std::pow(t, 0.75));
        rep.grad_component = std::max(rep.grad_component, run_grad / std::pow(t, gamma));
        rep.local_component = std::max(rep.local_component, 8.0 * run_loc / std::sqrt(t));
    }
    rep.total = rep.l2_component + rep.grad_component + rep.local_component;
    return rep;
}

// Frame-wise difference a - b (matching times required).
inline PerturbationTrajectory trajectory_difference(const PerturbationTrajectory& a,
                                                    const PerturbationTrajectory& b) {
    a.check_shape();
    b.check_shape();
    if (a.times != b.times)
        throw std::invalid_argument("trajectory_difference: frame times differ");
    PerturbationTrajectory d;
    d.times = a.times;
    d.alpha = a.alpha;
    d.gamma = a.gamma;
    d.frames.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d.frames.push_back(a.frames[i] - b.frames[i]);
    return d;
}

}  // namespace vfil
