#include <catch_amalgamated.hpp>

#include <complex>
#include <random>
#include <vector>

#include "vfil/quadrature.hpp"

using namespace vfil;
using cplx = std::complex<double>;

namespace {
std::vector<double> uniform_nodes(double a, double b, std::size_t m) {
    std::vector<double> x(m);
    for (std::size_t i = 0; i < m; ++i)
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(m - 1);
    return x;
}
}  // namespace

TEST_CASE("trapezoid basic values", "[quadrature]") {
    const auto x = uniform_nodes(0.0, 2.0, 17);
    std::vector<double> ones(x.size(), 1.0);
    CHECK(trapezoid<double>(x, ones) == Catch::Approx(2.0).epsilon(1e-15));

    const auto xu = uniform_nodes(0.0, 1.0, 9);
    std::vector<double> lin(xu.begin(), xu.end());
    CHECK(trapezoid<double>(xu, lin) == Catch::Approx(0.5).epsilon(1e-15));

    // x^2 on [0,1] with m = 1001 against the antiderivative.
    const auto xq = uniform_nodes(0.0, 1.0, 1001);
    std::vector<double> sq(xq.size());
    for (std::size_t i = 0; i < xq.size(); ++i) sq[i] = xq[i] * xq[i];
    CHECK(std::abs(trapezoid<double>(xq, sq) - 1.0 / 3.0) < 1e-6);
}

TEST_CASE("trapezoid rejects degenerate input", "[quadrature]") {
    std::vector<double> x{0.0};
    std::vector<double> f{1.0};
    CHECK_THROWS_AS(trapezoid<double>(x, f), std::invalid_argument);
    std::vector<double> x2{0.0, 1.0};
    std::vector<double> f1{1.0};
    CHECK_THROWS_AS(trapezoid<double>(x2, f1), std::invalid_argument);
}

TEST_CASE("trapezoid is linear and conjugation-equivariant", "[quadrature]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto x = uniform_nodes(0.0, 3.0, 57);
    std::vector<cplx> f(x.size()), g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        f[i] = {u(rng), u(rng)};
        g[i] = {u(rng), u(rng)};
    }
    const cplx a{0.7, -0.2}, b{-1.3, 0.4};
    std::vector<cplx> combo(x.size()), conj_f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        combo[i] = a * f[i] + b * g[i];
        conj_f[i] = std::conj(f[i]);
    }
    const cplx lhs = trapezoid<cplx>(x, combo);
    const cplx rhs = a * trapezoid<cplx>(x, f) + b * trapezoid<cplx>(x, g);
    CHECK(std::abs(lhs - rhs) < 1e-14);
    CHECK(std::abs(trapezoid<cplx>(x, conj_f) - std::conj(trapezoid<cplx>(x, f))) < 1e-15);
}

TEST_CASE("cumulative trapezoid endpoint matches the plain rule", "[quadrature]") {
    const auto x = uniform_nodes(0.0, 1.0, 33);
    std::vector<double> f(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) f[i] = std::cos(3.0 * x[i]);
    const auto cum = cumulative_trapezoid<double>(x, f);
    CHECK(cum.front() == 0.0);
    CHECK(cum.back() == Catch::Approx(trapezoid<double>(x, f)).epsilon(1e-14));
}
