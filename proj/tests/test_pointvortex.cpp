#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "vfil/params.hpp"
#include "vfil/pointvortex.hpp"

using namespace vfil;

TEST_CASE("pv_rhs on the unit polygon: velocity i omega z", "[pointvortex]") {
    const PointVortexState s = regular_polygon(3);
    const auto v = pv_rhs(s);
    const double omega = omega_from(3, 0.0);  // = 1
    CHECK(omega == 1.0);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(v[j] - kImag * omega * s.z[j]) < 1e-14);

    // the same velocity by the raw neighbor sum
    cplx acc{0.0, 0.0};
    for (std::size_t k = 1; k < 3; ++k) {
        const cplx d = s.z[0] - s.z[k];
        acc += d / std::norm(d);
    }
    CHECK(std::abs(acc - 1.0 / std::conj(s.z[0])) < 1e-14);
}

TEST_CASE("pv_rhs for the two-vortex antiparallel pair", "[pointvortex]") {
    PointVortexState s;
    s.z = {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    s.gamma = {1.0, -1.0};
    const auto v = pv_rhs(s);
    CHECK(std::abs(v[0] - cplx{0.0, -0.5}) < 1e-15);
    CHECK(std::abs(v[1] - cplx{0.0, -0.5}) < 1e-15);  // the pair translates rigidly
}

TEST_CASE("central vortex of a polygon stays put", "[pointvortex]") {
    const PointVortexState s = regular_polygon(5, 2.0);
    const auto v = pv_rhs(s);
    CHECK(std::abs(v.back()) < 1e-14);
}

TEST_CASE("unit-polygon interaction identity for N = 2..8", "[pointvortex]") {
    for (int n = 2; n <= 8; ++n) {
        const PointVortexState s = regular_polygon(n);
        for (int j = 0; j < n; ++j) {
            cplx acc{0.0, 0.0};
            for (int k = 0; k < n; ++k) {
                if (k == j) continue;
                const cplx d = s.z[j] - s.z[k];
                acc += d / std::norm(d);
            }
            const cplx expect = 0.5 * (n - 1) / std::conj(s.z[j]);
            CHECK(std::abs(acc - expect) < 1e-12);
        }
    }
}

TEST_CASE("pv_rhs equivariance under rotation and translation", "[pointvortex]") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    PointVortexState s;
    for (int j = 0; j < 5; ++j) {
        s.z.push_back({u(rng), u(rng)});
        s.gamma.push_back(j % 2 ? 1.5 : -0.7);
    }
    const auto v = pv_rhs(s);

    const cplx rot = std::polar(1.0, 0.83);
    PointVortexState sr = s;
    for (auto& z : sr.z) z *= rot;
    const auto vr = pv_rhs(sr);
    for (std::size_t j = 0; j < s.z.size(); ++j) CHECK(std::abs(vr[j] - rot * v[j]) < 1e-12);

    const cplx shift{0.4, -1.1};
    PointVortexState st = s;
    for (auto& z : st.z) z += shift;
    const auto vt = pv_rhs(st);
    for (std::size_t j = 0; j < s.z.size(); ++j) CHECK(std::abs(vt[j] - v[j]) < 1e-12);
}

TEST_CASE("rotating polygon regression, N = 4", "[pointvortex]") {
    const PointVortexState s0 = regular_polygon(4);
    const double omega = omega_from(4, 0.0);  // = 1.5
    const auto traj = integrate_pv(s0, 1.0, 1e-3);
    const auto& last = traj.back();
    CHECK(last.t == Catch::Approx(1.0).margin(1e-12));
    double err = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
        err = std::max(err, std::abs(last.z[j] - std::polar(1.0, omega * last.t) * s0.z[j]));
    CHECK(err < 1e-8);
}

TEST_CASE("stationary polygon with canceling center", "[pointvortex]") {
    const PointVortexState s0 = regular_polygon(3, -1.0);  // omega = (3-1)/2 - 1 = 0
    const auto traj = integrate_pv(s0, 1.0, 1e-3);
    double err = 0.0;
    for (std::size_t j = 0; j < s0.z.size(); ++j)
        err = std::max(err, std::abs(traj.back().z[j] - s0.z[j]));
    CHECK(err < 1e-10);
}

TEST_CASE("invariants drift below 1e-8 over T = 1", "[pointvortex]") {
    PointVortexState s0;
    s0.z = {cplx{1.2, 0.1}, cplx{-0.8, 0.4}, cplx{0.2, -1.0}};
    s0.gamma = {1.0, 0.5, -0.8};
    const auto traj = integrate_pv(s0, 1.0, 1e-3);
    const PVInvariants a = pv_invariants(traj.front());
    const PVInvariants b = pv_invariants(traj.back());
    const double scale = std::max({std::abs(a.hamiltonian), std::abs(a.angular), 1.0});
    CHECK(std::abs(a.hamiltonian - b.hamiltonian) / scale < 1e-8);
    CHECK(std::abs(a.momentum - b.momentum) / scale < 1e-8);
    CHECK(std::abs(a.angular - b.angular) / scale < 1e-8);
}

TEST_CASE("collision guard triggers with the offending pair", "[pointvortex]") {
    PointVortexState s;
    s.z = {cplx{0.0, 0.0}, cplx{1e-12, 0.0}, cplx{1.0, 0.0}};
    s.gamma = {1.0, 1.0, 1.0};
    try {
        (void)pv_rhs(s);
        FAIL("expected collision_error");
    } catch (const collision_error& e) {
        CHECK(e.first == 0);
        CHECK(e.second == 1);
    }
}

TEST_CASE("integrate_pv validates arguments", "[pointvortex]") {
    const PointVortexState s0 = regular_polygon(3);
    CHECK_THROWS_AS(integrate_pv(s0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_pv(s0, 1e-4, 1e-3), std::invalid_argument);
}
