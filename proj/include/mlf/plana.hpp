#pragma once

// Evaluation of F through the Abel-Plana identity
//
//   sum_{n>=0} f(n) = int_0^inf f(t) dt + f(0)/2 + i int_0^inf (f(it) - f(-it)) / (e^{2 pi t} - 1) dt
//
// with f(t) = z^t / Gamma(a t + b)^alpha. The route shares nothing with the
// series except lgamma, which makes it a usable cross-check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "mlf/asymptotics.hpp"
#include "mlf/numeric.hpp"
#include "mlf/quadrature.hpp"
#include "mlf/series.hpp"

namespace mlf {

/// log f(t) = t Log z - alpha log_gamma(a t + b).
inline Complex log_integrand(const Params& p, Complex z, Complex t)
{
    if (z == Complex(0.0, 0.0))
        throw DomainError("log_integrand: z must be non-zero");
    return t * std::log(z) - p.alpha() * log_gamma(p.a() * t + p.b());
}

/// 2 pi - |arg z| - a alpha pi / 2. The vertical integrand decays like
/// e^{-margin t}; the identity needs margin > 0.
inline double plana_convergence_margin(const Params& p, Complex z)
{
    return two_pi - std::abs(std::arg(z)) - 0.5 * p.a_alpha() * pi;
}

inline constexpr double plana_min_margin = 0.1;

/// The three pieces of the identity, each in scaled form.
struct PlanaTerms {
    ScaledComplex main;      ///< int_0^inf f(t) dt
    ScaledComplex half_f0;   ///< f(0) / 2
    ScaledComplex vertical;  ///< i int_0^inf (f(it) - f(-it)) / (e^{2 pi t} - 1) dt
    std::int64_t evaluations = 0;
    double log_abs_error = -std::numeric_limits<double>::infinity();

    ScaledComplex total() const { return main + half_f0 + vertical; }
    ScaledComplex boundary() const { return half_f0 + vertical; }
};

namespace detail {

inline double log_sum_exp(double x, double y)
{
    if (x == -std::numeric_limits<double>::infinity())
        return y;
    if (y == -std::numeric_limits<double>::infinity())
        return x;
    const double m = std::max(x, y);
    return m + std::log(std::exp(x - m) + std::exp(y - m));
}

// psi(x) by central difference of lgamma; accurate to ~1e-9, enough for the t = 0 patch.
inline double digamma_fd(double x)
{
    const double h = std::min(1e-5, 0.5 * x);
    return (log_gamma(x + h) - log_gamma(x - h)) / (2.0 * h);
}

// log(e^{2 pi t} - 1) for t > 0.
inline double log_bose_denominator(double t)
{
    const double u = two_pi * t;
    return u < 20.0 ? std::log(std::expm1(u)) : u + std::log1p(-std::exp(-u));
}

struct MainIntegral {
    ScaledComplex value;
    std::int64_t evaluations = 0;
    double log_abs_error = -std::numeric_limits<double>::infinity();
};

inline MainIntegral plana_main_integral(const Params& p, Complex z, double tol)
{
    const double log_abs_z = std::log(std::abs(z));
    const double a = p.a(), b = p.b(), alpha = p.alpha();
    auto g = [&](double t) { return t * log_abs_z - alpha * log_gamma(a * t + b); };
    auto slope = [&](double t) {
        const double h = 1e-4 * (1.0 + t);
        return g(t + h) - g(t);
    };

    // Peak of |f| on the real axis; g is concave.
    double t_peak = 0.0;
    if (slope(0.0) > 0.0) {
        double lo = 0.0;
        double hi = std::max(1.0, 2.0 * peak_index(p, z));
        while (slope(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
        }
        for (int i = 0; i < 200 && hi - lo > 1e-9 * (1.0 + hi); ++i) {
            const double mid = 0.5 * (lo + hi);
            (slope(mid) > 0.0 ? lo : hi) = mid;
        }
        t_peak = 0.5 * (lo + hi);
    }
    const double g_peak = g(t_peak);

    // Cut where |f| has fallen 50 nats; on the left the cut also pays for the length skipped.
    const double upper_level = g_peak - 50.0;
    double step = 1.0;
    while (g(t_peak + step) > upper_level)
        step *= 2.0;
    double lo = t_peak + 0.5 * step, hi = t_peak + step;
    if (step == 1.0)
        lo = t_peak;
    for (int i = 0; i < 200 && hi - lo > 1e-9 * (1.0 + hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > upper_level ? lo : hi) = mid;
    }
    const double t_hi = hi;

    double t_lo = 0.0;
    const double lower_level = g_peak - 50.0 - std::log1p(t_peak);
    if (g(0.0) < lower_level) {
        double l = 0.0, h = t_peak;
        for (int i = 0; i < 200 && h - l > 1e-9 * (1.0 + h); ++i) {
            const double mid = 0.5 * (l + h);
            (g(mid) < lower_level ? l : h) = mid;
        }
        t_lo = l;
    }

    // Initial panels: a tenth of the decay length, and short enough to hold
    // about half an oscillation of z^t.
    const double theta = std::abs(std::arg(z));
    double width = std::max((t_hi - t_peak) / 10.0, 1e-3);
    if (theta > 0.0)
        width = std::min(width, 3.0 / theta);
    const double span = t_hi - t_lo;
    const int panels = int(std::clamp(std::ceil(span / width), 8.0, 4000.0));

    std::vector<double> bp;
    bp.reserve(panels + 3);
    for (int i = 0; i <= panels; ++i)
        bp.push_back(t_lo + span * i / panels);
    bp.back() = t_hi;
    const double re_t0 = saddle_point(p, z).real();
    for (double extra : {t_peak, re_t0})
        if (extra > t_lo && extra < t_hi)
            bp.push_back(extra);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    // Evaluated relative to the largest series term, which sits within one unit
    // of t_peak, so |integrand| <= ~1 and the huge common factor stays out of the quadrature.
    const SeriesAnchor anchor = series_anchor(p, z);
    const Complex log_z = std::log(z);
    auto integrand = [&](double t) { return std::exp(log_term_relative(p, log_z, anchor, t)); };
    // The relative log-terms carry rounding of order eps * |(t - n_ref) Log z|;
    // asking for less than that only exhausts the subdivision budget.
    const double reach = std::max(std::abs(t_hi - double(anchor.index)), std::abs(t_lo - double(anchor.index)));
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * reach * (std::abs(log_z) + 1.0);
    // Oscillation can make |Q| much smaller than int |f|; the absolute accuracy
    // is bounded by the rounding floor times int |f|, so size that first.
    auto modulus = [&](double t) { return std::exp(log_term_relative(p, log_z, anchor, t).real()); };
    QuadratureOptions rough;
    rough.rel_tol = 1e-3;
    const QuadratureResult mass = integrate_adaptive(modulus, std::span<const double>(bp), rough);
    const double floor_rel = std::max(noise, 64.0 * std::numeric_limits<double>::epsilon());
    QuadratureOptions opts;
    opts.rel_tol = std::max(0.1 * tol, noise);
    opts.abs_tol = std::max(1e-4 * tol, floor_rel * std::abs(mass.value));
    const QuadratureResult q = integrate_adaptive(integrand, std::span<const double>(bp), opts);

    MainIntegral out;
    out.value = ScaledComplex(q.value) * ScaledComplex::from_log(anchor.log_term);
    out.evaluations = mass.evaluations + q.evaluations;
    out.log_abs_error = std::log(q.error) + anchor.log_term.real();
    return out;
}

struct VerticalIntegral {
    ScaledComplex value;  // including the leading factor i
    std::int64_t evaluations = 0;
    double log_abs_error = -std::numeric_limits<double>::infinity();
};

// `log_abs_target` is ln of the magnitude the result will be compared against;
// absolute accuracy below tol * e^{log_abs_target} is not pursued.
inline VerticalIntegral plana_vertical_integral(const Params& p, Complex z, double tol, double log_abs_target)
{
    const double a = p.a(), b = p.b(), alpha = p.alpha();
    const Complex log_f0 = log_integrand(p, z, 0.0);
    auto envelope = [&](double t) {
        const double up = log_integrand(p, z, Complex(0.0, t)).real();
        const double down = log_integrand(p, z, Complex(0.0, -t)).real();
        return std::max(up, down) - log_bose_denominator(t);
    };

    // Scale and truncation point from a coarse scan of the envelope.
    constexpr double scan_step = 0.25;
    double scale = log_f0.real();
    double prev = envelope(scan_step);
    scale = std::max(scale, prev);
    double t_end = scan_step;
    for (double t = 2 * scan_step;; t += scan_step) {
        const double e = envelope(t);
        scale = std::max(scale, e);
        if (t >= 1.0 && e < scale - 50.0 && e < prev) {
            t_end = t;
            break;
        }
        if (t > 1e6)
            throw QuadratureError("plana: vertical integrand does not decay", 0.0,
                                  std::numeric_limits<double>::infinity());
        prev = e;
    }

    const Complex dlog_f0 = std::log(z) - a * alpha * digamma_fd(b);
    const Complex limit_at_zero = Complex(0.0, 1.0) * std::exp(log_f0 - scale) * dlog_f0 / pi;
    auto integrand = [&](double t) -> Complex {
        if (t < 1e-7)
            return limit_at_zero;
        const double denom = log_bose_denominator(t);
        return std::exp(log_integrand(p, z, Complex(0.0, t)) - scale - denom) -
               std::exp(log_integrand(p, z, Complex(0.0, -t)) - scale - denom);
    };

    std::vector<double> bp;
    const int panels = int(std::ceil(t_end));
    for (int i = 0; i <= panels; ++i)
        bp.push_back(t_end * i / panels);

    QuadratureOptions opts;
    opts.rel_tol = 0.1 * tol;
    opts.abs_tol = std::min(0.1 * tol * std::exp(std::min(log_abs_target - scale, 690.0)), 1e300);
    const QuadratureResult q = integrate_adaptive(integrand, std::span<const double>(bp), opts);

    VerticalIntegral out;
    out.value = ScaledComplex(Complex(0.0, 1.0) * q.value, scale);
    out.evaluations = q.evaluations + 4 * std::int64_t(t_end / scan_step);
    out.log_abs_error = std::log(q.error) + scale;
    return out;
}

} // namespace detail

/// f(0)/2 plus the vertical Plana integral, accurate relative to their own size.
inline PlanaTerms plana_boundary_terms(const Params& p, Complex z, double tol = 1e-10)
{
    if (z == Complex(0.0, 0.0))
        throw DomainError("plana: z must be non-zero");
    if (plana_convergence_margin(p, z) <= plana_min_margin)
        throw SectorError("plana: |arg z| + a alpha pi / 2 too close to 2 pi; the vertical integral diverges");
    PlanaTerms out;
    out.half_f0 = ScaledComplex::from_log(log_integrand(p, z, 0.0)) * 0.5;
    // First pass sizes the vertical term; the second resolves it relative to that size.
    auto rough = detail::plana_vertical_integral(p, z, 1e-3, out.half_f0.log_abs());
    const double target = detail::log_sum_exp(out.half_f0.log_abs(), rough.value.log_abs());
    auto v = detail::plana_vertical_integral(p, z, tol, target);
    out.vertical = v.value;
    out.evaluations = rough.evaluations + v.evaluations;
    out.log_abs_error = v.log_abs_error;
    return out;
}

/// All three terms of the identity.
inline PlanaTerms plana_terms(const Params& p, Complex z, double tol = 1e-10)
{
    if (z == Complex(0.0, 0.0))
        throw DomainError("plana: z must be non-zero");
    if (plana_convergence_margin(p, z) <= plana_min_margin)
        throw SectorError("plana: |arg z| + a alpha pi / 2 too close to 2 pi; the vertical integral diverges");
    PlanaTerms out;
    const detail::MainIntegral m = detail::plana_main_integral(p, z, tol);
    out.main = m.value;
    out.half_f0 = ScaledComplex::from_log(log_integrand(p, z, 0.0)) * 0.5;
    const double target = (out.main + out.half_f0).log_abs();
    const detail::VerticalIntegral v = detail::plana_vertical_integral(p, z, tol, target);
    out.vertical = v.value;
    out.evaluations = m.evaluations + v.evaluations;
    out.log_abs_error = detail::log_sum_exp(m.log_abs_error, v.log_abs_error);
    return out;
}

/// F(z) through the Plana identity. Requires plana_convergence_margin > 0.1.
inline EvalResult eval_plana(const Params& p, Complex z, double tol = 1e-10)
{
    if (!(tol > 0.0 && tol < 1.0))
        throw UsageError("eval_plana: tol must lie in (0, 1)");
    const PlanaTerms terms = plana_terms(p, z, tol);
    EvalResult out;
    out.value = terms.total();
    out.method = Method::Plana;
    out.work = std::max<std::int64_t>(1, terms.evaluations);
    out.err_estimate = out.value.is_zero() ? std::numeric_limits<double>::infinity()
                                           : std::exp(terms.log_abs_error - out.value.log_abs());
    return out;
}

} // namespace mlf
