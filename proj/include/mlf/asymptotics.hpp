#pragma once

// Large-|z| behaviour of F_{a,b}^{(alpha)}: the sectors where the saddle-point
// asymptotic is valid, the saddle location, and the leading-order value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string_view>

#include "mlf/numeric.hpp"
#include "mlf/series.hpp"

namespace mlf {

enum class SectorCase {
    Small,        ///< a alpha < 2
    Middle,       ///< 2 <= a alpha < 4
    RealAxisOnly, ///< a alpha >= 4
};

constexpr std::string_view to_string(SectorCase c)
{
    switch (c) {
    case SectorCase::Small:
        return "small";
    case SectorCase::Middle:
        return "middle";
    case SectorCase::RealAxisOnly:
        return "real-axis-only";
    }
    return "?";
}

struct SectorClassification {
    /// Largest admissible |arg z| in radians; never negative.
    double max_arg = 0.0;
    SectorCase case_index = SectorCase::Small;
};

/// |arg z| <= a alpha pi / 2 - eps          for a alpha < 2,
/// |arg z| <= (2 - a alpha / 2) pi - eps    for 2 <= a alpha < 4,
/// arg z == 0                               for a alpha >= 4.
inline SectorClassification classify_sector(const Params& p, double eps)
{
    if (!(eps >= 0.0))
        throw UsageError("classify_sector: eps must be non-negative");
    const double k = p.a_alpha();
    if (k < 2.0)
        return {std::max(0.0, 0.5 * k * pi - eps), SectorCase::Small};
    if (k < 4.0)
        return {std::max(0.0, (2.0 - 0.5 * k) * pi - eps), SectorCase::Middle};
    return {0.0, SectorCase::RealAxisOnly};
}

inline bool in_sector(const Params& p, Complex z, double eps)
{
    return std::abs(std::arg(z)) <= classify_sector(p, eps).max_arg;
}

/// t0 = a^{-1} z^{1/(a alpha)} + (1 - 2b) / (2a), principal branch.
inline Complex saddle_point(const Params& p, Complex z)
{
    if (z == Complex(0.0, 0.0))
        throw DomainError("saddle_point: z must be non-zero");
    const Complex root = std::exp(std::log(z) / p.a_alpha());
    return root / p.a() + (1.0 - 2.0 * p.b()) / (2.0 * p.a());
}

/// Leading-order asymptotic
///   F ~ (1 / (a sqrt(alpha))) (2 pi)^{(1 - alpha)/2} z^{(alpha - 2 b alpha + 1)/(2 a alpha)} e^{alpha z^{1/(a alpha)}}
/// assembled in the log domain. Sector membership is not checked.
inline EvalResult eval_asymptotic(const Params& p, Complex z)
{
    if (z == Complex(0.0, 0.0))
        throw DomainError("eval_asymptotic: z must be non-zero");
    const double a = p.a(), b = p.b(), alpha = p.alpha();
    const double k = p.a_alpha();
    const Complex log_z = std::log(z);

    // The special-casing keeps a = b = alpha = 1 exactly equal to e^z.
    const Complex root = (k == 1.0) ? z : std::exp(log_z / k);
    const double power = (alpha - 2.0 * b * alpha + 1.0) / (2.0 * k);
    const double prefactor = -std::log(a) - 0.5 * std::log(alpha) + 0.5 * (1.0 - alpha) * ln_two_pi;

    Complex log_value = alpha * root;
    if (prefactor != 0.0)
        log_value += prefactor;
    if (power != 0.0)
        log_value += power * log_z;

    EvalResult out;
    out.value = ScaledComplex::from_log(log_value);
    out.method = Method::Asymptotic;
    out.work = 1;
    out.err_estimate = std::exp(-log_z.real() / k);
    return out;
}

} // namespace mlf
