#pragma once

// Direct summation of F_{a,b}^{(alpha)}(z) = sum_n z^n / Gamma(a n + b)^alpha in the
// log domain.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>

#include "mlf/numeric.hpp"

namespace mlf {

enum class Method { Series, Plana, Asymptotic };

constexpr std::string_view to_string(Method m)
{
    switch (m) {
    case Method::Series:
        return "series";
    case Method::Plana:
        return "plana";
    case Method::Asymptotic:
        return "asymptotic";
    }
    return "?";
}

/// A value of F together with how it was obtained.
struct EvalResult {
    ScaledComplex value;
    Method method = Method::Series;
    /// Terms summed, or integrand evaluations for quadrature.
    std::int64_t work = 1;
    /// Relative error estimate; +inf signals that the method gave up.
    double err_estimate = 0.0;

    bool failed() const { return !std::isfinite(err_estimate); }
};

/// a^{-1} |z|^{1/(a alpha)}: where the moduli of the summands peak.
inline double peak_index(const Params& p, Complex z)
{
    if (z == Complex(0.0, 0.0))
        return 0.0;
    return std::exp(std::log(std::abs(z)) / p.a_alpha()) / p.a();
}

/// log of the n-th summand, n Log z - alpha log_gamma(a n + b).
inline Complex log_series_term(const Params& p, Complex log_z, double n)
{
    return n * log_z - p.alpha() * log_gamma(p.a() * n + p.b());
}

inline constexpr std::int64_t series_term_cap = 10'000'000;

namespace detail {

// ln|n-th summand|; concave in n.
inline double log_term_modulus(const Params& p, double log_abs_z, double n)
{
    return n * log_abs_z - p.alpha() * log_gamma(p.a() * n + p.b());
}

// Integer argmax of the concave modulus profile.
inline std::int64_t discrete_peak(const Params& p, double log_abs_z)
{
    auto rising = [&](std::int64_t n) {
        return log_term_modulus(p, log_abs_z, double(n + 1)) > log_term_modulus(p, log_abs_z, double(n));
    };
    if (!rising(0))
        return 0;
    std::int64_t lo = 0;
    const double guess = std::exp(log_abs_z / p.a_alpha()) / p.a();
    std::int64_t hi = std::max<std::int64_t>(2, std::int64_t(std::min(2.0 * guess + 8.0, 1e15)));
    while (rising(hi)) {
        lo = hi;
        hi *= 2;
    }
    // rising(lo) && !rising(hi)
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (rising(mid) ? lo : hi) = mid;
    }
    return hi;
}

} // namespace detail

/// The largest summand in modulus: its index and log. Series and Plana evaluation
/// both express their terms relative to it, so the large common factor is
/// rounded once and identically on both routes.
struct SeriesAnchor {
    std::int64_t index = 0;
    Complex log_term;
};

inline SeriesAnchor series_anchor(const Params& p, Complex z)
{
    const Complex log_z = std::log(z);
    SeriesAnchor out;
    out.index = detail::discrete_peak(p, log_z.real());
    out.log_term = log_series_term(p, log_z, double(out.index));
    return out;
}

/// log(term at t) - anchor.log_term, accurate for |t - anchor.index| small
/// compared with the anchor index. t may be fractional.
inline Complex log_term_relative(const Params& p, Complex log_z, const SeriesAnchor& anchor, double t)
{
    const double ref = double(anchor.index);
    const double x = p.a() * ref + p.b();
    return (t - ref) * log_z - p.alpha() * log_gamma_difference(x, p.a() * (t - ref));
}

/// Sums the series from the first non-negligible term until past the peak and
/// the summands have dropped ln(1/tol) + 5 nats below the largest one.
///
/// Terms before the peak whose modulus is below max * tol * e^{-5} / (n_peak + 1)
/// are skipped: together they cannot move the result by more than tol * e^{-5}
/// of the largest term.
inline EvalResult eval_series(const Params& p, Complex z, double tol = 1e-15)
{
    if (!(tol > 0.0 && tol < 1.0))
        throw UsageError("eval_series: tol must lie in (0, 1)");

    EvalResult out;
    out.method = Method::Series;
    if (z == Complex(0.0, 0.0)) {
        out.value = ScaledComplex::from_log(Complex(-p.alpha() * log_gamma(p.b()), 0.0));
        out.work = 1;
        out.err_estimate = 0.0;
        return out;
    }

    const Complex log_z = std::log(z);
    const double log_abs_z = log_z.real();
    const double drop = 5.0 - std::log(tol);
    const SeriesAnchor anchor = series_anchor(p, z);
    const std::int64_t n_peak = anchor.index;
    const double peak_modulus = detail::log_term_modulus(p, log_abs_z, double(n_peak));

    std::int64_t n_start = 0;
    const double head_floor = peak_modulus - drop - std::log1p(double(n_peak));
    if (detail::log_term_modulus(p, log_abs_z, 0.0) < head_floor) {
        std::int64_t lo = 0, hi = n_peak;  // modulus(lo) < floor <= modulus(hi)
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            (detail::log_term_modulus(p, log_abs_z, double(mid)) < head_floor ? lo : hi) = mid;
        }
        n_start = hi;
    }

    const double stop_after = std::max(peak_index(p, z), double(n_peak));
    LogSumAccumulator acc;
    Complex last = 0.0;
    std::int64_t n = n_start;
    bool capped = false;
    for (;; ++n) {
        if (acc.count() >= series_term_cap) {
            capped = true;
            break;
        }
        last = log_term_relative(p, log_z, anchor, double(n));
        acc.add(last);
        if (double(n) > stop_after && last.real() - acc.max_log_real() < -drop)
            break;
    }

    out.value = acc.value() * ScaledComplex::from_log(anchor.log_term);
    out.work = acc.count();
    if (capped) {
        out.err_estimate = std::numeric_limits<double>::infinity();
    } else if (out.value.is_zero()) {
        out.err_estimate = 0.0;
    } else {
        out.err_estimate = std::exp(last.real() + anchor.log_term.real() - out.value.log_abs());
    }
    return out;
}

} // namespace mlf
