// Spatial and radial grids.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vfil {

// Uniform periodic grid for sigma in [-L/2, L/2). n is a power of two so the
// spectral transforms stay radix-2.
struct SpatialGrid {
    double L = 0.0;
    std::size_t n = 0;

    SpatialGrid() = default;
    SpatialGrid(double length, std::size_t points) : L(length), n(points) {
        if (!(L > 0.0)) throw std::invalid_argument("SpatialGrid: L must be positive");
        if (n < 8 || (n & (n - 1)) != 0)
            throw std::invalid_argument("SpatialGrid: n must be a power of two >= 8");
    }

    double h() const { return L / static_cast<double>(n); }
    double sigma(std::size_t j) const { return -0.5 * L + h() * static_cast<double>(j); }
    // Index of the sigma = 0 node.
    std::size_t center_index() const { return n / 2; }

    bool operator==(const SpatialGrid&) const = default;
};

// Radial nodes on [0, X_max], strictly increasing, first node exactly 0.
struct RadialGrid {
    std::vector<double> nodes;

    RadialGrid() = default;
    explicit RadialGrid(std::vector<double> pts) : nodes(std::move(pts)) { validate(); }

    static RadialGrid uniform(double x_max, std::size_t m) {
        if (m < 4 || !(x_max > 0.0))
            throw std::invalid_argument("RadialGrid: need m >= 4 and X_max > 0");
        std::vector<double> pts(m);
        const double h = x_max / static_cast<double>(m - 1);
        for (std::size_t i = 0; i < m; ++i) pts[i] = h * static_cast<double>(i);
        pts.back() = x_max;
        return RadialGrid(std::move(pts));
    }

    std::size_t m() const { return nodes.size(); }
    double x_max() const { return nodes.back(); }
    // Spacing of the first interval; grids built by uniform() are equispaced.
    double spacing() const { return nodes[1] - nodes[0]; }

    void validate() const {
        if (nodes.size() < 4) throw std::invalid_argument("RadialGrid: need at least 4 nodes");
        if (nodes.front() != 0.0) throw std::invalid_argument("RadialGrid: first node must be 0");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1]))
                throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
    }
};

}  // namespace vfil
