// Exception types shared across the toolkit.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vfil {

// Two point vortices (or filament slices) closer than collision_eps.
struct collision_error : std::runtime_error {
    double t;
    std::size_t first, second;
    collision_error(double time, std::size_t a, std::size_t b)
        : std::runtime_error("point-vortex collision at t=" + std::to_string(time) +
                             " between vortices " + std::to_string(a) + " and " + std::to_string(b)),
          t(time), first(a), second(b) {}
};

// A nonlinear denominator dropped below its floor during evolution.
struct near_collision_error : std::runtime_error {
    double t, sigma;
    near_collision_error(double time, double s)
        : std::runtime_error("near-collision abort at t=" + std::to_string(time) +
                             ", sigma=" + std::to_string(s)),
          t(time), sigma(s) {}
};

// Evolved field does not decay at the periodic box edge.
struct box_size_error : std::runtime_error {
    double t, edge_value;
    box_size_error(double time, double v)
        : std::runtime_error("field at box edge " + std::to_string(v) +
                             " exceeds edge tolerance at t=" + std::to_string(time)),
          t(time), edge_value(v) {}
};

// Fixed-point iteration did not reach its tolerance.
struct convergence_error : std::runtime_error {
    double last_ratio;
    convergence_error(const std::string& msg, double ratio)
        : std::runtime_error(msg), last_ratio(ratio) {}
};

// Observed iteration ratio >= 1 (no contraction).
struct no_contraction_error : std::runtime_error {
    double ratio, t0;
    no_contraction_error(double r, double horizon)
        : std::runtime_error("no contraction observed: ratio=" + std::to_string(r) +
                             " at t0=" + std::to_string(horizon)),
          ratio(r), t0(horizon) {}
};

// A result violates a structural bound it is required to satisfy.
struct validity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature self-consistency check failed (mesh too coarse).
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A source denominator left the admissible region.
struct ball_violation_error : std::runtime_error {
    double t, sigma;
    ball_violation_error(double time, double s, double den)
        : std::runtime_error("source denominator " + std::to_string(den) +
                             " below floor at t=" + std::to_string(time) + ", sigma=" + std::to_string(s)),
          t(time), sigma(s) {}
};

}  // namespace vfil
