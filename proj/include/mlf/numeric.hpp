#pragma once

// Shared numeric substrate: complex log-Gamma, the overflow-safe ScaledComplex
// representation and compensated log-domain accumulation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "mlf/errors.hpp"

namespace mlf {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double ln_two_pi = 1.8378770664093454835606594728112;

/// The parameter triple (a, b, alpha) of F_{a,b}^{(alpha)}. All three strictly positive.
class Params {
public:
    Params(double a, double b, double alpha) : a_(a), b_(b), alpha_(alpha)
    {
        if (!(a > 0.0) || !(b > 0.0) || !(alpha > 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
            !std::isfinite(alpha))
            throw DomainError("parameters a, b, alpha must be finite and positive");
    }

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double alpha() const noexcept { return alpha_; }
    /// a * alpha; the function has order 1 / (a * alpha).
    double a_alpha() const noexcept { return a_ * alpha_; }

    friend bool operator==(const Params&, const Params&) = default;

private:
    double a_;
    double b_;
    double alpha_;
};

namespace detail {

// B_{2k} / (2k (2k - 1)) for k = 1..10.
inline constexpr std::array<double, 10> stirling_coefficients = {
    1.0 / 12.0,          -1.0 / 360.0,         1.0 / 1260.0,     -1.0 / 1680.0,
    1.0 / 1188.0,        -691.0 / 360360.0,    1.0 / 156.0,      -3617.0 / 122400.0,
    43867.0 / 244188.0,  -174611.0 / 125400.0,
};

inline constexpr double stirling_min_modulus = 15.0;

// Stirling series; caller guarantees |z| >= stirling_min_modulus and Re z > 0.
inline Complex stirling_lgamma(Complex z)
{
    const Complex inv = 1.0 / z;
    const Complex inv2 = inv * inv;
    Complex corr = stirling_coefficients.back();
    for (auto it = stirling_coefficients.rbegin() + 1; it != stirling_coefficients.rend(); ++it)
        corr = corr * inv2 + *it;
    corr *= inv;
    return (z - 0.5) * std::log(z) - z + 0.5 * ln_two_pi + corr;
}

// Principal log of sin(pi z), stable for large |Im z|.
inline Complex log_sin_pi(Complex z)
{
    const double y = z.imag();
    if (std::abs(y) <= 30.0)
        return std::log(std::sin(pi * z));
    if (y < 0.0)
        return std::conj(log_sin_pi(std::conj(z)));
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}); the last factor is 1 to double precision.
    double im = 0.5 * pi - pi * z.real();
    im = std::remainder(im, two_pi);
    if (im <= -pi)
        im += two_pi;
    return {pi * y - std::numbers::ln2, im};
}

} // namespace detail

/// Principal (continuous) log-Gamma on the plane cut along the negative real axis.
///
/// Stirling series with Bernoulli corrections after shifting |z| past 15 through
/// Gamma(z+1) = z Gamma(z); reflection for Re z < 0.5. Real for real z > 0.
inline Complex log_gamma(Complex z)
{
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::nearbyint(z.real()))
        throw DomainError("log_gamma: pole at non-positive integer " + std::to_string(z.real()));

    if (z.real() < 0.5) {
        const double branch = std::copysign(two_pi, z.imag()) * std::floor(0.5 * z.real() + 0.25);
        return Complex(std::log(pi), branch) - detail::log_sin_pi(z) - log_gamma(1.0 - z);
    }

    if (std::abs(z) >= detail::stirling_min_modulus)
        return detail::stirling_lgamma(z);

    // Shift upward. log of the product is taken once for the modulus; the phases
    // are summed individually so the branch stays continuous.
    Complex product = 1.0;
    double phase = 0.0;
    Complex w = z;
    while (std::abs(w) < detail::stirling_min_modulus) {
        product *= w;
        phase += std::arg(w);
        w += 1.0;
    }
    return detail::stirling_lgamma(w) - Complex(std::log(std::abs(product)), phase);
}

inline double log_gamma(double x)
{
    if (x == 1.0 || x == 2.0)
        return 0.0;
    return log_gamma(Complex(x, 0.0)).real();
}

/// log_gamma(x + d) - log_gamma(x) for real x > 0, x + d > 0.
///
/// For large arguments the Stirling terms are differenced analytically, so the
/// result keeps its accuracy when both log-Gamma values are ~1e8 and d is small.
inline double log_gamma_difference(double x, double d)
{
    const double y = x + d;
    if (std::min(x, y) < detail::stirling_min_modulus)
        return log_gamma(y) - log_gamma(x);
    auto corr = [](double v) {
        const double inv2 = 1.0 / (v * v);
        double c = detail::stirling_coefficients.back();
        for (auto it = detail::stirling_coefficients.rbegin() + 1; it != detail::stirling_coefficients.rend(); ++it)
            c = c * inv2 + *it;
        return c / v;
    };
    return (x - 0.5) * std::log1p(d / x) + d * std::log(y) - d + (corr(y) - corr(x));
}

/// A complex value stored as mantissa * e^{log_scale}, with |mantissa| in [1, e)
/// or mantissa == 0 (then log_scale == 0).
class ScaledComplex {
public:
    ScaledComplex() = default;

    ScaledComplex(Complex mantissa, double log_scale) : mantissa_(mantissa), log_scale_(log_scale)
    {
        normalize();
    }

    explicit ScaledComplex(Complex value) : ScaledComplex(value, 0.0) {}

    /// e^w without forming e^w.
    static ScaledComplex from_log(Complex w)
    {
        const double whole = std::floor(w.real());
        ScaledComplex out;
        out.mantissa_ = std::polar(std::exp(w.real() - whole), w.imag());
        out.log_scale_ = whole;
        out.normalize();
        return out;
    }

    Complex mantissa() const noexcept { return mantissa_; }
    double log_scale() const noexcept { return log_scale_; }
    bool is_zero() const noexcept { return mantissa_ == Complex(0.0, 0.0); }

    /// ln|value|; -inf for zero.
    double log_abs() const
    {
        if (is_zero())
            return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(mantissa_)) + log_scale_;
    }

    /// Principal log of the value.
    Complex log() const { return {log_abs(), std::arg(mantissa_)}; }

    /// Plain double-precision value; overflows to inf or underflows to 0 when out of range.
    Complex to_complex() const
    {
        if (is_zero())
            return 0.0;
        const double s = std::exp(log_scale_);
        if (std::isinf(s) || s == 0.0)
            return std::polar(std::exp(log_abs()), std::arg(mantissa_));
        return mantissa_ * s;
    }

    /// True when to_complex() is finite and not flushed to zero.
    bool representable() const
    {
        if (is_zero())
            return true;
        const double l = log_abs();
        return l < 709.0 && l > -708.0;
    }

    ScaledComplex conj() const
    {
        ScaledComplex out = *this;
        out.mantissa_ = std::conj(mantissa_);
        return out;
    }

    ScaledComplex operator-() const
    {
        ScaledComplex out = *this;
        out.mantissa_ = -mantissa_;
        return out;
    }

    friend ScaledComplex operator*(const ScaledComplex& x, const ScaledComplex& y)
    {
        return ScaledComplex(x.mantissa_ * y.mantissa_, x.log_scale_ + y.log_scale_);
    }

    friend ScaledComplex operator/(const ScaledComplex& x, const ScaledComplex& y)
    {
        if (y.is_zero())
            throw DomainError("ScaledComplex: division by zero");
        return ScaledComplex(x.mantissa_ / y.mantissa_, x.log_scale_ - y.log_scale_);
    }

    friend ScaledComplex operator+(const ScaledComplex& x, const ScaledComplex& y)
    {
        if (x.is_zero())
            return y;
        if (y.is_zero())
            return x;
        const double s = std::max(x.log_scale_, y.log_scale_);
        return ScaledComplex(x.mantissa_ * std::exp(x.log_scale_ - s) + y.mantissa_ * std::exp(y.log_scale_ - s),
                             s);
    }

    friend ScaledComplex operator-(const ScaledComplex& x, const ScaledComplex& y) { return x + (-y); }

    friend ScaledComplex operator*(const ScaledComplex& x, double k) { return x * ScaledComplex(Complex(k, 0.0)); }
    friend ScaledComplex operator*(const ScaledComplex& x, Complex k) { return x * ScaledComplex(k); }

    friend bool operator==(const ScaledComplex&, const ScaledComplex&) = default;

private:
    void normalize()
    {
        if (mantissa_ == Complex(0.0, 0.0)) {
            mantissa_ = 0.0;
            log_scale_ = 0.0;
            return;
        }
        const double m = std::abs(mantissa_);
        if (!std::isfinite(m) || !std::isfinite(log_scale_))
            return;
        if (m >= 1.0 && m < std::numbers::e)
            return;
        const double k = std::floor(std::log(m));
        mantissa_ *= std::exp(-k);
        log_scale_ += k;
        // exp/log rounding can leave |mantissa| a hair outside the window.
        for (int guard = 0; guard < 4; ++guard) {
            const double mm = std::abs(mantissa_);
            if (mm >= std::numbers::e) {
                mantissa_ /= std::numbers::e;
                log_scale_ += 1.0;
            } else if (mm < 1.0) {
                mantissa_ *= std::numbers::e;
                log_scale_ -= 1.0;
            } else {
                break;
            }
        }
    }

    Complex mantissa_{0.0, 0.0};
    double log_scale_ = 0.0;
};

inline ScaledComplex scaled_from_log(Complex w) { return ScaledComplex::from_log(w); }

/// |approx / reference - 1|, computed without leaving the scaled representation.
inline double relative_deviation(const ScaledComplex& approx, const ScaledComplex& reference)
{
    if (reference.is_zero())
        return approx.is_zero() ? 0.0 : std::numeric_limits<double>::infinity();
    const ScaledComplex ratio = approx / reference;
    if (ratio.log_abs() > 700.0)
        return std::numeric_limits<double>::infinity();
    return std::abs(ratio.to_complex() - 1.0);
}

namespace detail {

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x)
    {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }

    void scale(double k)
    {
        sum *= k;
        comp *= k;
    }
};

} // namespace detail

/// Sum of e^{term_i} given in log form: e^M * sum e^{term_i - M}, M = max Re(term_i),
/// with compensated summation of the real and imaginary parts.
inline ScaledComplex accumulate_log_terms(std::span<const Complex> terms)
{
    if (terms.empty())
        throw UsageError("accumulate_log_terms: empty term sequence");
    double peak = -std::numeric_limits<double>::infinity();
    for (const Complex& t : terms)
        peak = std::max(peak, t.real());
    detail::Kahan re, im;
    for (const Complex& t : terms) {
        const Complex v = std::exp(t - peak);
        re.add(v.real());
        im.add(v.imag());
    }
    return ScaledComplex::from_log(Complex(peak, 0.0)) * ScaledComplex(Complex(re.sum, im.sum));
}

/// Streaming variant of accumulate_log_terms for sequences too long to store.
///
/// Terms are accumulated relative to a reference exponent that is raised only when
/// a new term exceeds it by more than rescale_gap nats.
class LogSumAccumulator {
public:
    void add(Complex log_term)
    {
        if (count_ == 0) {
            reference_ = log_term.real();
        } else if (log_term.real() > reference_ + rescale_gap) {
            const double k = std::exp(reference_ - log_term.real());
            re_.scale(k);
            im_.scale(k);
            reference_ = log_term.real();
        }
        const Complex v = std::exp(log_term - reference_);
        re_.add(v.real());
        im_.add(v.imag());
        max_real_ = std::max(max_real_, log_term.real());
        ++count_;
    }

    ScaledComplex value() const
    {
        if (count_ == 0)
            return {};
        return ScaledComplex::from_log(Complex(reference_, 0.0)) * ScaledComplex(Complex(re_.sum, im_.sum));
    }

    /// Largest Re(log term) seen so far.
    double max_log_real() const noexcept { return max_real_; }
    long long count() const noexcept { return count_; }

private:
    static constexpr double rescale_gap = 300.0;

    detail::Kahan re_, im_;
    double reference_ = 0.0;
    double max_real_ = -std::numeric_limits<double>::infinity();
    long long count_ = 0;
};

} // namespace mlf
