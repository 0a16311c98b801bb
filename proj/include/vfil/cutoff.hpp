// The smooth cutoff pair phi/psi that renormalizes the self-similar profile so
// the filaments become parallel at infinity.
//
//   phi(tau) = q(tau-1) / (q(tau-1) + q(2-tau)),  q(x) = exp(-1/x) for x > 0, else 0
//   psi(tau) = tau * phi(tau)
//
// phi == 0 on [0,1], phi == 1 on [2,inf), strictly increasing in between and
// C-infinity everywhere. The transition is pinned to this explicit q so every
// downstream number is reproducible. Analytic first and second derivatives are
// provided because the b-source needs exact derivatives of 1/(1 + psi(a|sigma|)).
#pragma once

#include <cmath>
#include <stdexcept>

namespace vfil {

namespace detail {

inline double bump_q(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double bump_q1(double x) { return x > 0.0 ? bump_q(x) / (x * x) : 0.0; }
inline double bump_q2(double x) {
    return x > 0.0 ? bump_q(x) * (1.0 - 2.0 * x) / (x * x * x * x) : 0.0;
}

}  // namespace detail

inline double cutoff_phi(double tau) {
    if (tau < 0.0) throw std::domain_error("cutoff_phi: tau must be nonnegative");
    if (tau <= 1.0) return 0.0;
    if (tau >= 2.0) return 1.0;
    const double a = detail::bump_q(tau - 1.0);
    const double b = detail::bump_q(2.0 - tau);
    return a / (a + b);
}

inline double cutoff_phi_d1(double tau) {
    if (tau < 0.0) throw std::domain_error("cutoff_phi_d1: tau must be nonnegative");
    if (tau <= 1.0 || tau >= 2.0) return 0.0;
    const double a = detail::bump_q(tau - 1.0), b = detail::bump_q(2.0 - tau);
    const double a1 = detail::bump_q1(tau - 1.0), b1 = -detail::bump_q1(2.0 - tau);
    const double s = a + b;
    return (a1 * b - a * b1) / (s * s);
}

inline double cutoff_phi_d2(double tau) {
    if (tau < 0.0) throw std::domain_error("cutoff_phi_d2: tau must be nonnegative");
    if (tau <= 1.0 || tau >= 2.0) return 0.0;
    const double a = detail::bump_q(tau - 1.0), b = detail::bump_q(2.0 - tau);
    const double a1 = detail::bump_q1(tau - 1.0), b1 = -detail::bump_q1(2.0 - tau);
    const double a2 = detail::bump_q2(tau - 1.0), b2 = detail::bump_q2(2.0 - tau);
    const double s = a + b;
    return (a2 * b - a * b2) / (s * s) - 2.0 * (a1 * b - a * b1) * (a1 + b1) / (s * s * s);
}

inline double cutoff_psi(double tau) {
    if (tau < 0.0) throw std::domain_error("cutoff_psi: tau must be nonnegative");
    return tau * cutoff_phi(tau);
}

inline double cutoff_psi_d1(double tau) { return cutoff_phi(tau) + tau * cutoff_phi_d1(tau); }

inline double cutoff_psi_d2(double tau) {
    return 2.0 * cutoff_phi_d1(tau) + tau * cutoff_phi_d2(tau);
}

// g(sigma) = 1 / (1 + psi(alpha |sigma|)) and its first two sigma-derivatives,
// all analytic. g' and g'' vanish identically on alpha|sigma| <= 1.
struct CutoffProfile {
    double psi;    // psi(alpha |sigma|)
    double g;      // 1 / (1 + psi)
    double g_d1;   // d/dsigma of g
    double g_d2;   // d^2/dsigma^2 of g
};

inline CutoffProfile cutoff_profile(double alpha, double sigma) {
    const double tau = alpha * std::abs(sigma);
    const double sgn = sigma >= 0.0 ? 1.0 : -1.0;
    const double p = cutoff_psi(tau);
    const double p1 = cutoff_psi_d1(tau);
    const double p2 = cutoff_psi_d2(tau);
    const double den = 1.0 + p;
    CutoffProfile out;
    out.psi = p;
    out.g = 1.0 / den;
    out.g_d1 = -alpha * sgn * p1 / (den * den);
    out.g_d2 = -alpha * alpha * p2 / (den * den) + 2.0 * alpha * alpha * p1 * p1 / (den * den * den);
    return out;
}

}  // namespace vfil
