#pragma once

// Growth-order estimate: least-squares slope of ln ln F(r) against ln r.

#include <cmath>
#include <span>
#include <vector>

#include "mlf/numeric.hpp"
#include "mlf/series.hpp"

namespace mlf {

struct OrderEstimate {
    double slope = 0.0;
    /// 1 / (a alpha), the exact order.
    double reference = 0.0;
    std::vector<double> log_log_values;
};

inline OrderEstimate estimate_order(const Params& p, std::span<const double> radii, double tol = 1e-15)
{
    if (radii.size() < 2)
        throw UsageError("estimate_order: need at least two radii");
    std::vector<double> xs, ys;
    for (double r : radii) {
        if (!(r > 1.0) || !std::isfinite(r))
            throw UsageError("estimate_order: radii must be finite and > 1");
        const EvalResult f = eval_series(p, r, tol);
        if (f.failed())
            throw DomainError("estimate_order: series did not converge at r = " + std::to_string(r));
        const double log_f = f.value.log_abs();
        if (!(log_f > 0.0))
            throw DomainError("estimate_order: F(r) <= 1 at r = " + std::to_string(r));
        xs.push_back(std::log(r));
        ys.push_back(std::log(log_f));
    }
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0))
        throw DomainError("estimate_order: degenerate fit (all radii equal)");
    return {sxy / sxx, 1.0 / p.a_alpha(), ys};
}

} // namespace mlf
