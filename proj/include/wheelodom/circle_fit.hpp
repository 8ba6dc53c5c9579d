#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "wheelodom/errors.hpp"

namespace wheelodom {

struct CircleFit {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
};

// Algebraic least-squares circle fit (Kasa). Minimizes the sum of squared
// algebraic distances x^2 + y^2 + A x + B y + C, which reduces to a 2x2
// linear system in the centroid-centered coordinates. Closed form, no
// iteration, exact when the points lie exactly on a circle.
//
// Throws FitDegenerateError for fewer than 3 points or (near-)collinear
// points, where no circle is determined.
inline CircleFit fit_circle_kasa(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n != ys.size()) throw ValidationError("circle fit: x/y size mismatch");
    if (n < 3) throw FitDegenerateError("circle fit requires at least 3 points");

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    // Centered second and third moments.
    double suu = 0.0, svv = 0.0, suv = 0.0;
    double suuu = 0.0, svvv = 0.0, suvv = 0.0, svuu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = xs[i] - mean_x;
        const double v = ys[i] - mean_y;
        suu += u * u;
        svv += v * v;
        suv += u * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }

    const double det = suu * svv - suv * suv;
    const double scale = suu + svv;
    if (det <= 1e-12 * scale * scale)
        throw FitDegenerateError("circle fit degenerate: points are collinear or coincident");

    const double rhs_u = 0.5 * (suuu + suvv);
    const double rhs_v = 0.5 * (svvv + svuu);
    const double uc = (rhs_u * svv - rhs_v * suv) / det;
    const double vc = (rhs_v * suu - rhs_u * suv) / det;

    CircleFit fit;
    fit.center_x = uc + mean_x;
    fit.center_y = vc + mean_y;
    fit.radius = std::sqrt(uc * uc + vc * vc + scale / static_cast<double>(n));
    return fit;
}

}  // namespace wheelodom
