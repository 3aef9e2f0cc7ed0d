#pragma once

// Integration over the open 2-simplex against the Aitchison measure.
//
// Chart: t = log(y1 / y2). Then dlambda_2 = dt / sqrt(2), and the improper
// integral over the real line is taken on [-T, T] with T doubled until the
// newly added tail slabs contribute less than tol / 10.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "egr/error.hpp"

namespace growth {

struct QuadratureOptions {
    double initial_half_width = 8.0;
    // Largest |t| reached is initial_half_width * 2^max_doublings; keep it
    // below ~700 so both coordinates stay representable.
    int max_doublings = 6;
    unsigned max_depth = 20;
};

/// Integral of f(y1, y2) over the open 2-simplex with respect to the
/// Aitchison measure. f receives y1 and y2 computed separately, so neither
/// loses precision near the vertices. tol is an absolute tolerance.
template <class F>
double aitchison_quadrature(F&& f, double tol, const QuadratureOptions& opt = {}) {
    using boost::math::quadrature::gauss_kronrod;
    detail::require(tol > 0.0, ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
    auto g = [&](double t) {
        const double y1 = 1.0 / (1.0 + std::exp(-t));
        const double y2 = 1.0 / (1.0 + std::exp(t));
        return f(y1, y2) / std::sqrt(2.0);
    };
    auto piece = [&](double a, double b) {
        double err = 0.0;
        const double v = gauss_kronrod<double, 61>::integrate(g, a, b, opt.max_depth, 1e-14, &err);
        if (!std::isfinite(v)) throw Error(ErrorCode::QuadratureFailure, "integrand is not finite");
        return v;
    };

    double T = opt.initial_half_width;
    // The core interval is split at zero and at +-T/2 so a peak away from the
    // origin is still resolved by the adaptive refinement.
    double total = piece(-T, -T / 2) + piece(-T / 2, 0.0) + piece(0.0, T / 2) + piece(T / 2, T);
    for (int k = 0; k < opt.max_doublings; ++k) {
        const double tail = piece(-2 * T, -T) + piece(T, 2 * T);
        total += tail;
        T *= 2;
        if (std::abs(tail) < tol / 10) return total;
    }
    throw Error(ErrorCode::QuadratureFailure, "tail contribution did not fall below tolerance");
}

}  // namespace growth
