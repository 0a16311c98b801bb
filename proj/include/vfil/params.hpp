// Model parameters shared by the profile, evolution, and fixed-point stages.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

namespace vfil {

inline double omega_from(int filament_count, double center_gamma) {
    return 0.5 * (filament_count - 1) + center_gamma;
}

// alpha is kept real and positive in the whole pipeline; the complex-alpha
// generality of the underlying theory enters only through the validity check
// alpha >= 1 (|alpha| <= Re(alpha)^2) required for polygonal profile runs.
struct ModelParams {
    double alpha = 20.0;
    double omega = 0.0;
    std::optional<int> filament_count;    // N
    std::optional<double> center_gamma;   // circulation of the central filament
    double rho = 1.0;
    double theta = 0.0;
    double t0 = 0.5;
    double gamma = 0.125;                 // time exponent of the gradient component, in (0, 1/4)

    void validate(bool polygonal_profile = false) const {
        if (!(alpha > 0.0)) throw std::invalid_argument("ModelParams: alpha must be positive");
        if (!(t0 > 0.0 && t0 < 1.0)) throw std::invalid_argument("ModelParams: t0 must lie in (0,1)");
        if (!(gamma > 0.0 && gamma < 0.25))
            throw std::invalid_argument("ModelParams: gamma must lie in (0, 1/4)");
        if (!(rho > 0.0)) throw std::invalid_argument("ModelParams: rho must be positive");
        if (filament_count && center_gamma) {
            const double expected = omega_from(*filament_count, *center_gamma);
            if (std::abs(omega - expected) > 1e-12)
                throw std::invalid_argument("ModelParams: omega must equal (N-1)/2 + Gamma0");
        }
        if (polygonal_profile && !(alpha >= 1.0))
            throw std::invalid_argument(
                "ModelParams: polygonal profile requires alpha >= 1 (alpha <= alpha^2)");
    }
};

}  // namespace vfil
