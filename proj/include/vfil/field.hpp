// Complex-valued fields on a periodic spatial grid, with the discrete norms
// used throughout: L2 by the periodic trapezoid sum, Linf by the node max.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "vfil/grid.hpp"

namespace vfil {

using cplx = std::complex<double>;

inline constexpr cplx kImag{0.0, 1.0};

struct ComplexField {
    SpatialGrid grid;
    std::vector<cplx> values;

    ComplexField() = default;
    explicit ComplexField(const SpatialGrid& g) : grid(g), values(g.n, cplx{0.0, 0.0}) {}
    ComplexField(const SpatialGrid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.n)
            throw std::invalid_argument("ComplexField: value count must match grid size");
    }

    std::size_t size() const { return values.size(); }
    cplx& operator[](std::size_t i) { return values[i]; }
    const cplx& operator[](std::size_t i) const { return values[i]; }

    bool all_finite() const {
        for (const auto& z : values)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

inline ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field sum: grid mismatch");
    ComplexField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

inline ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("field difference: grid mismatch");
    ComplexField out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
    return out;
}

inline ComplexField operator*(cplx s, const ComplexField& f) {
    ComplexField out = f;
    for (auto& z : out.values) z *= s;
    return out;
}

// Periodic trapezoid L2 norm: sqrt(h * sum |f_j|^2).
inline double l2_norm(const ComplexField& f) {
    double acc = 0.0;
    for (const auto& z : f.values) acc += std::norm(z);
    return std::sqrt(f.grid.h() * acc);
}

inline double linf_norm(const ComplexField& f) {
    double m = 0.0;
    for (const auto& z : f.values) m = std::max(m, std::abs(z));
    return m;
}

// Max over grid nodes strictly inside (-half_width, half_width).
inline double linf_within(const ComplexField& f, double half_width) {
    double m = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        if (std::abs(f.grid.sigma(j)) < half_width) m = std::max(m, std::abs(f[j]));
    return m;
}

}  // namespace vfil
