#pragma once

// Numerical check of the Laplace-type relation
//   int_0^inf e^{-t/z} F_{1,1}^{(alpha+1)}(t) dt = z F_{1,1}^{(alpha)}(z)
// on the positive real axis.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mlf/numeric.hpp"
#include "mlf/quadrature.hpp"
#include "mlf/series.hpp"

namespace mlf {

/// Relative residual |lhs - rhs| / |rhs| of the relation, z > 0 real.
///
/// The left integral is cut at the first doubling point T where the integrand
/// has fallen 45 nats below the largest value seen so far.
inline double laplace_residual(double alpha, double z, double tol = 1e-9)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw DomainError("laplace_residual: z must be real and positive");
    const Params inner(1.0, 1.0, alpha + 1.0);
    const Params outer(1.0, 1.0, alpha);
    constexpr double series_tol = 1e-15;

    auto log_integrand = [&](double t) { return -t / z + eval_series(inner, t, series_tol).value.log_abs(); };

    double running_max = log_integrand(0.0);
    double cut = z;
    for (;;) {
        const double v = log_integrand(cut);
        running_max = std::max(running_max, v);
        if (v < running_max - 45.0)
            break;
        cut *= 2.0;
        if (!std::isfinite(cut))
            throw DomainError("laplace_residual: integrand does not decay");
    }

    // Refine the scale so the quadrature sees values of order one.
    constexpr int panels = 32;
    std::vector<double> bp(panels + 1);
    for (int i = 0; i <= panels; ++i) {
        bp[i] = cut * i / panels;
        running_max = std::max(running_max, log_integrand(bp[i]));
    }
    const double scale = running_max;

    auto integrand = [&](double t) { return std::exp(log_integrand(t) - scale); };
    QuadratureOptions opts;
    opts.rel_tol = tol;
    const QuadratureResult q = integrate_adaptive(integrand, std::span<const double>(bp), opts);

    const ScaledComplex lhs = ScaledComplex(q.value) * ScaledComplex::from_log(Complex(scale, 0.0));
    const ScaledComplex rhs = eval_series(outer, z, series_tol).value * z;
    return relative_deviation(lhs, rhs);
}

} // namespace mlf
