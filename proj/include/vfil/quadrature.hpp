// Composite trapezoid primitives on sampled nodes (uniform or graded).
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace vfil {

// Composite trapezoid of f over the nodes x. Exact for affine integrands.
template <class T>
T trapezoid(std::span<const double> x, std::span<const T> f) {
    if (x.size() != f.size()) throw std::invalid_argument("trapezoid: node/value size mismatch");
    if (x.size() < 2) throw std::invalid_argument("trapezoid: need at least 2 nodes");
    T acc{};
    for (std::size_t i = 1; i < x.size(); ++i)
        acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return acc;
}

// Running integral F(x_i) = int_{x_0}^{x_i} f, F[0] = 0.
template <class T>
std::vector<T> cumulative_trapezoid(std::span<const double> x, std::span<const T> f) {
    if (x.size() != f.size())
        throw std::invalid_argument("cumulative_trapezoid: node/value size mismatch");
    if (x.size() < 2) throw std::invalid_argument("cumulative_trapezoid: need at least 2 nodes");
    std::vector<T> out(x.size());
    out[0] = T{};
    for (std::size_t i = 1; i < x.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return out;
}

}  // namespace vfil
