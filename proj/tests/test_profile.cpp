#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "vfil/profile.hpp"

using namespace vfil;

namespace {

ModelParams params_with_alpha(double alpha, double omega = 0.0) {
    ModelParams p;
    p.alpha = alpha;
    p.omega = omega;
    return p;
}

}  // namespace

TEST_CASE("couple_u: zero w gives the straight profile 1 + alpha x", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 2001);
    std::vector<cplx> w(g.m(), cplx{0.0, 0.0});
    const auto u = couple_u(g, w, 10.0);
    CHECK(u[0] == cplx{1.0, 0.0});
    for (std::size_t i = 0; i < g.m(); ++i)
        CHECK(std::abs(u[i] - (1.0 + 10.0 * g.nodes[i])) < 1e-12);
}

TEST_CASE("couple_u: closed-form tail oracle for w = min(z^2, 1)", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 16001);
    std::vector<cplx> w(g.m());
    for (std::size_t i = 0; i < g.m(); ++i)
        w[i] = std::min(g.nodes[i] * g.nodes[i], 1.0);
    const auto u = couple_u(g, w, 10.0);
    // u(1) = 1 + (10 + int_1^inf z^-2 dz) = 12; the pinned tail w(X)/X is exact
    // for this w, so only quadrature error remains.
    const std::size_t i1 = 400;  // x = 1
    CHECK(g.nodes[i1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(std::abs(u[i1] - 12.0) < 1e-5);
    CHECK(u[0] == cplx{1.0, 0.0});
}

TEST_CASE("couple_u rejects w(0) != 0", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(1.0, 9);
    std::vector<cplx> w(g.m(), cplx{0.1, 0.0});
    CHECK_THROWS_AS(couple_u(g, w, 10.0), std::invalid_argument);
}

TEST_CASE("apply_P with omega = 0 returns e^{ix^2/4} - 1 exactly", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 4001);
    std::vector<cplx> w(g.m(), cplx{0.0, 0.0});
    const auto out = apply_P(g, w, params_with_alpha(20.0), ProfileMode::polygonal);
    for (std::size_t i = 0; i < g.m(); ++i) {
        const double x = g.nodes[i];
        CHECK(std::abs(out[i] - (std::polar(1.0, 0.25 * x * x) - 1.0)) < 1e-13);
    }
    // that iterate has ||w|| ~= 2 and |||x|^-1 w'|| ~= 1/2, so membership needs alpha >= 10
    const EMembership em20 = e_membership(g, out, 20.0);
    CHECK(em20.sup_w > 1.99);
    CHECK(em20.sup_w <= 2.0 + 1e-9);
    CHECK(em20.sup_ratio == Catch::Approx(0.5).margin(5e-3));
    CHECK(em20.member);
    const EMembership em9 = e_membership(g, out, 9.0);
    CHECK_FALSE(em9.member);
}

TEST_CASE("pair first iterate agrees with an 8x refined quadrature", "[profile]") {
    const RadialGrid coarse = RadialGrid::uniform(40.0, 16001);
    const RadialGrid fine = RadialGrid::uniform(40.0, 128001);
    std::vector<cplx> w0c(coarse.m(), cplx{0.0, 0.0});
    std::vector<cplx> w0f(fine.m(), cplx{0.0, 0.0});
    const auto wc = apply_P(coarse, w0c, params_with_alpha(20.0), ProfileMode::pair);
    const auto wf = apply_P(fine, w0f, params_with_alpha(20.0), ProfileMode::pair);
    double err = 0.0;
    for (std::size_t i = 0; i < coarse.m(); ++i)
        err = std::max(err, std::abs(wc[i] - wf[8 * i]));
    CHECK(err < 1e-6);
}

TEST_CASE("solve_profile pair at alpha = 20", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 16001);
    const ProfileSolution sol = solve_profile(params_with_alpha(20.0), ProfileMode::pair, g, 1e-10);
    CHECK(sol.converged);
    CHECK(sol.contraction_ratio < 1.0);
    CHECK(sol.final_update < 1e-8);
    CHECK(sol.w[0] == cplx{0.0, 0.0});
    CHECK(sol.u[0] == cplx{1.0, 0.0});
    // w'(0) = 0: the first sample is O(h^2)
    CHECK(std::abs(sol.w[1]) < 20.0 * g.spacing() * g.spacing());
    for (std::size_t i = 0; i < g.m(); ++i)
        CHECK(sol.u[i].real() >= 1.0 + 0.75 * 20.0 * g.nodes[i] - 1e-9);
    CHECK(profile_residual(sol) < 1e-5);
}

TEST_CASE("solve_profile polygonal: explicit fixed point at omega = 0", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 16001);
    const ProfileSolution sol =
        solve_profile(params_with_alpha(20.0), ProfileMode::polygonal, g, 1e-10);
    CHECK(sol.converged);
    CHECK(sol.iterations <= 2);
    for (std::size_t i = 0; i < g.m(); i += 100) {
        const double x = g.nodes[i];
        CHECK(std::abs(sol.w[i] - (std::polar(1.0, 0.25 * x * x) - 1.0)) < 1e-12);
    }
    CHECK(profile_residual(sol) < 1e-6);
    for (std::size_t i = 0; i < g.m(); ++i) CHECK(std::abs(sol.u[i]) >= 1.0 - 1e-9);
}

TEST_CASE("solve_profile below the empirical threshold reports failure", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(20.0, 2001);
    CHECK_THROWS(solve_profile(params_with_alpha(0.1), ProfileMode::pair, g, 1e-10, 24));
}

TEST_CASE("residual of the straight surrogate profile", "[profile]") {
    // u = 1 + 19|x|, w = 0: residual(x) = |i + 0 - 2/(1 + 19x)|; at x = 1 that is
    // |i - 0.1| = sqrt(1.01).
    const RadialGrid g = RadialGrid::uniform(4.0, 4001);
    ProfileSolution sol;
    sol.mode = ProfileMode::pair;
    sol.alpha = 19.0;
    sol.grid = g;
    sol.w.assign(g.m(), cplx{0.0, 0.0});
    sol.u = couple_u(g, sol.w, 19.0);
    sol.converged = true;
    const auto res = profile_residual_nodes(sol);
    const std::size_t i1 = 1000;  // x = 1
    CHECK(g.nodes[i1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(res[i1] == Catch::Approx(std::sqrt(1.01)).margin(1e-9));
}

TEST_CASE("residual decreases under grid refinement", "[profile]") {
    const ProfileSolution sa =
        solve_profile(params_with_alpha(20.0), ProfileMode::pair, RadialGrid::uniform(40.0, 4001), 1e-11);
    const ProfileSolution sb =
        solve_profile(params_with_alpha(20.0), ProfileMode::pair, RadialGrid::uniform(40.0, 8001), 1e-11);
    CHECK(profile_residual(sb) < profile_residual(sa) / 2.0);
}

TEST_CASE("eval_H scaling, bounds, and flags", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 8001);
    const ProfileSolution sol = solve_profile(params_with_alpha(20.0), ProfileMode::pair, g, 1e-10);

    const HValue at0 = eval_H(sol, 1.0, 0.0);
    CHECK(std::abs(at0.h - cplx{1.0, 0.0}) < 1e-14);  // H(1, 0) = u(0) = 1
    CHECK(at0.corner);

    for (double t : {0.09, 0.25, 0.64}) {
        const HValue hv = eval_H(sol, t, 0.0);
        CHECK(std::abs(hv.h - std::sqrt(t)) < 1e-14);
    }

    // large-sigma deviation bound at t = 0.25, alpha = 20
    for (double sigma : {0.5, 3.0, 10.0}) {
        const HValue hv = eval_H(sol, 0.25, sigma);
        const double lhs = std::abs(hv.h - (std::sqrt(0.25) + 20.0 * sigma));
        CHECK(lhs <= 5.0 * std::min(std::sqrt(0.25), sigma) + 1e-9);
    }

    const HValue far = eval_H(sol, 0.01, 30.0);  // x = 300 > X_max
    CHECK(far.asymptotic);
    CHECK(std::abs(far.h_sigma - cplx{20.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(eval_H(sol, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eval_H(sol, -1.0, 1.0), std::domain_error);
}

TEST_CASE("fixed point certificate via apply_P", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 8001);
    const ProfileSolution sol =
        solve_profile(params_with_alpha(20.0), ProfileMode::polygonal, g, 1e-10);
    ModelParams p = params_with_alpha(20.0);
    const auto once = apply_P(g, sol.w, p, ProfileMode::polygonal);
    double cert = 0.0;
    for (std::size_t i = 0; i < g.m(); ++i) cert = std::max(cert, std::abs(once[i] - sol.w[i]));
    CHECK(cert < 1e-8);
    CHECK(cert == Catch::Approx(sol.final_update).margin(1e-12));
}

TEST_CASE("asymptotic slope of the profile", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 8001);
    ModelParams p;
    p.alpha = 20.0;
    const ProfileSolution sol = solve_profile(p, ProfileMode::pair, g, 1e-10);
    const double x = g.x_max();
    CHECK(std::abs(sol.u.back() / x - p.alpha) <= (1.0 + p.alpha / 4.0) / x);
}

TEST_CASE("polygonal omega = 1 profile converges with valid membership", "[profile]") {
    const RadialGrid g = RadialGrid::uniform(40.0, 16001);
    const ProfileSolution sol =
        solve_profile(params_with_alpha(20.0, 1.0), ProfileMode::polygonal, g, 1e-10);
    CHECK(sol.converged);
    CHECK(sol.contraction_ratio < 1.0);
    const EMembership em = e_membership(g, sol.w, 20.0);
    CHECK(em.member);
    for (std::size_t i = 0; i < g.m(); ++i) CHECK(std::abs(sol.u[i]) >= 1.0 - 1e-9);
    CHECK(profile_residual(sol) < 1e-5);
}
