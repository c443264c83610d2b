#pragma once

// Globally adaptive composite Gauss-Legendre quadrature for complex-valued
// integrands. Each panel is integrated with a 10-point Gauss-Legendre rule and
// again as two half panels; the difference is the panel's error estimate and
// the panel with the largest estimate is bisected next.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <utility>

#include "mlf/errors.hpp"

namespace mlf {

struct QuadratureOptions {
    double rel_tol = 1e-10;
    /// Absolute error floor; the engine stops once error <= max(rel_tol * |Q|, abs_tol).
    double abs_tol = 0.0;
    int max_subdivisions = 20000;
};

struct QuadratureResult {
    std::complex<double> value;
    double error = 0.0;
    long long evaluations = 0;
};

namespace detail {

template <int N>
struct GaussLegendreRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};
};

// Nodes and weights on [-1, 1] by Newton iteration on P_N.
template <int N>
GaussLegendreRule<N> make_gauss_legendre()
{
    GaussLegendreRule<N> rule;
    for (int i = 0; i < N; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = N * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline const GaussLegendreRule<10>& gauss_legendre_10()
{
    static const GaussLegendreRule<10> rule = make_gauss_legendre<10>();
    return rule;
}

template <class F>
std::complex<double> gauss_panel(F& f, double lo, double hi)
{
    const auto& rule = gauss_legendre_10();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    std::complex<double> sum = 0.0;
    for (int i = 0; i < 10; ++i)
        sum += rule.weights[i] * std::complex<double>(f(mid + half * rule.nodes[i]));
    return sum * half;
}

struct Panel {
    double lo, hi;
    std::complex<double> coarse;  // one rule over [lo, hi]
    std::complex<double> left, right;
    double error;

    std::complex<double> fine() const { return left + right; }
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel make_panel(F& f, double lo, double hi, std::complex<double> coarse)
{
    const double mid = 0.5 * (lo + hi);
    Panel p{lo, hi, coarse, gauss_panel(f, lo, mid), gauss_panel(f, mid, hi), 0.0};
    p.error = std::abs(p.coarse - p.fine());
    return p;
}

} // namespace detail

/// Integrates f over the finite interval split at the given breakpoints
/// (ascending, at least two). Throws QuadratureError on non-convergence.
template <class F>
QuadratureResult integrate_adaptive(F f, std::span<const double> breakpoints, const QuadratureOptions& opts = {})
{
    if (breakpoints.size() < 2)
        throw UsageError("integrate_adaptive: need at least two breakpoints");

    std::priority_queue<detail::Panel> queue;
    long long evals = 0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double lo = breakpoints[i], hi = breakpoints[i + 1];
        if (!(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw UsageError("integrate_adaptive: breakpoints must be finite and ascending");
        if (hi == lo)
            continue;
        queue.push(detail::make_panel(f, lo, hi, detail::gauss_panel(f, lo, hi)));
        evals += 30;
    }
    if (queue.empty())
        return {0.0, 0.0, 0};

    auto totals = [&queue] {
        // priority_queue does not expose iteration; copy is cheap relative to the integrand.
        auto copy = queue;
        std::complex<double> v = 0.0;
        double e = 0.0;
        while (!copy.empty()) {
            v += copy.top().fine();
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };

    auto [value, error] = totals();
    int splits = 0;
    while (error > std::max(opts.rel_tol * std::abs(value), opts.abs_tol)) {
        if (splits >= opts.max_subdivisions) {
            char msg[96];
            std::snprintf(msg, sizeof msg, "integrate_adaptive: subdivision limit reached (error %.3g of %.3g)", error,
                          std::abs(value));
            throw QuadratureError(msg, value, error);
        }
        detail::Panel worst = queue.top();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            throw QuadratureError("integrate_adaptive: panel below resolution", value, error);
        }
        queue.pop();
        detail::Panel l = detail::make_panel(f, worst.lo, mid, worst.left);
        detail::Panel r = detail::make_panel(f, mid, worst.hi, worst.right);
        evals += 40;
        value += l.fine() + r.fine() - worst.fine();
        error += l.error + r.error - worst.error;
        queue.push(l);
        queue.push(r);
        ++splits;
        if (splits % 512 == 0)
            std::tie(value, error) = totals();
    }
    std::tie(value, error) = totals();
    return {value, error, evals};
}

/// Integrates f over [lo, hi]; hi may be +infinity, handled by t = lo + u / (1 - u).
template <class F>
QuadratureResult integrate_adaptive(F f, double lo, double hi, const QuadratureOptions& opts = {})
{
    if (std::isinf(hi)) {
        if (hi < 0.0 || !std::isfinite(lo))
            throw UsageError("integrate_adaptive: only [finite, +inf) is supported");
        auto mapped = [&f, lo](double u) -> std::complex<double> {
            const double w = 1.0 - u;
            return std::complex<double>(f(lo + u / w)) / (w * w);
        };
        const std::array<double, 2> bp{0.0, 1.0};
        return integrate_adaptive(mapped, std::span<const double>(bp), opts);
    }
    const std::array<double, 2> bp{lo, hi};
    return integrate_adaptive(f, std::span<const double>(bp), opts);
}

} // namespace mlf
