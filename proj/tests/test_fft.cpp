#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "vfil/fft.hpp"
#include "vfil/schrodinger.hpp"

using namespace vfil;

namespace {
ComplexField random_field(const SpatialGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ComplexField f(g);
    for (auto& z : f.values) z = {u(rng), u(rng)};
    return f;
}
}  // namespace

TEST_CASE("fft round trip and Parseval", "[fft]") {
    const SpatialGrid g(10.0, 256);
    const ComplexField f = random_field(g, 11);
    Fft fft(g.n);
    auto a = f.values;
    fft.forward(a);
    double spec = 0.0;
    for (const auto& z : a) spec += std::norm(z);
    double phys = 0.0;
    for (const auto& z : f.values) phys += std::norm(z);
    CHECK(spec / static_cast<double>(g.n) == Catch::Approx(phys).epsilon(1e-13));
    fft.inverse(a);
    double err = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) err = std::max(err, std::abs(a[i] - f[i]));
    CHECK(err < 1e-13);
}

TEST_CASE("free propagator: identity at t = 0 and exact single modes", "[fft]") {
    const SpatialGrid g(10.0, 128);
    const ComplexField f = random_field(g, 5);
    const ComplexField f0 = free_propagate(f, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(f0[i] - f[i]) < 1e-14);

    const double k = wavenumber(g, 5);
    ComplexField mode(g);
    for (std::size_t j = 0; j < g.n; ++j) mode[j] = std::polar(1.0, k * g.sigma(j));
    const double t = 0.37;
    const ComplexField out = free_propagate(mode, t);
    for (std::size_t j = 0; j < g.n; ++j) {
        const cplx expect = std::polar(1.0, k * g.sigma(j) - k * k * t);
        CHECK(std::abs(out[j] - expect) < 1e-12);
    }
}

TEST_CASE("free propagator matches the closed-form Gaussian evolution", "[fft]") {
    const SpatialGrid g(80.0, 4096);
    ComplexField f(g);
    for (std::size_t j = 0; j < g.n; ++j) {
        const double s = g.sigma(j);
        f[j] = std::exp(-s * s);
    }
    const double t = 0.1;
    const ComplexField out = free_propagate(f, t);
    const cplx denom = 1.0 + 4.0 * kImag * t;
    double err = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        const double s = g.sigma(j);
        const cplx expect = std::exp(-s * s / denom) / std::sqrt(denom);
        err = std::max(err, std::abs(out[j] - expect));
    }
    CHECK(err < 1e-8);
}

TEST_CASE("free propagator conserves the discrete L2 norm", "[fft]") {
    const SpatialGrid g(40.0, 512);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> tail(0.0, 5.0);
    for (int rep = 0; rep < 8; ++rep) {
        const ComplexField f = random_field(g, 100 + rep);
        const double n0 = l2_norm(f);
        const double t = tail(rng);
        CHECK(std::abs(l2_norm(free_propagate(f, t)) - n0) / n0 < 1e-13);
    }
}

TEST_CASE("spectral derivative is exact on band-limited data", "[fft]") {
    const SpatialGrid g(2.0 * std::numbers::pi, 64);
    ComplexField f(g);
    for (std::size_t j = 0; j < g.n; ++j) f[j] = std::sin(3.0 * g.sigma(j));
    const ComplexField d = spectral_derivative(f);
    for (std::size_t j = 0; j < g.n; ++j)
        CHECK(std::abs(d[j] - 3.0 * std::cos(3.0 * g.sigma(j))) < 1e-11);
}
