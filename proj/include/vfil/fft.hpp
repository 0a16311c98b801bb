// Radix-2 complex FFT. Grid sizes are powers of two by construction, so a
// hand-rolled iterative transform keeps the library header-only and the
// output bit-reproducible run to run.
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vfil/field.hpp"
#include "vfil/grid.hpp"

namespace vfil {

class Fft {
  public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Fft: size must be a power of two >= 2");
        std::size_t lg = 0;
        while ((std::size_t{1} << lg) < n) ++lg;
        rev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < lg; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (lg - 1 - b);
            rev_[i] = r;
        }
        w_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            w_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    // In place, unnormalized.
    void forward(std::vector<cplx>& a) const { transform(a, false); }
    // In place, includes the 1/n factor.
    void inverse(std::vector<cplx>& a) const { transform(a, true); }

  private:
    void transform(std::vector<cplx>& a, bool inv) const {
        if (a.size() != n_) throw std::invalid_argument("Fft: buffer size mismatch");
        for (std::size_t i = 0; i < n_; ++i)
            if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t step = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    cplx w = w_[j * step];
                    if (inv) w = std::conj(w);
                    const cplx u = a[i + j];
                    const cplx v = a[i + j + len / 2] * w;
                    a[i + j] = u + v;
                    a[i + j + len / 2] = u - v;
                }
            }
        }
        if (inv) {
            const double s = 1.0 / static_cast<double>(n_);
            for (auto& z : a) z *= s;
        }
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<cplx> w_;
};

// Periodic wavenumber of mode index m: 2*pi/L * {0, 1, ..., n/2-1, -n/2, ..., -1}.
inline double wavenumber(const SpatialGrid& g, std::size_t m) {
    const double base = 2.0 * std::numbers::pi / g.L;
    const double idx = (m < g.n / 2) ? static_cast<double>(m)
                                     : static_cast<double>(m) - static_cast<double>(g.n);
    return base * idx;
}

inline ComplexField spectral_derivative(const ComplexField& f) {
    Fft fft(f.grid.n);
    std::vector<cplx> a = f.values;
    fft.forward(a);
    for (std::size_t m = 0; m < a.size(); ++m) a[m] *= kImag * wavenumber(f.grid, m);
    fft.inverse(a);
    return ComplexField(f.grid, std::move(a));
}

}  // namespace vfil
