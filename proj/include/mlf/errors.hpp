#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace mlf {

/// Input outside the mathematical domain of an operation (pole, z <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed request: empty input, ill-formed hypothesis, bad flag value.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The Plana integrals do not converge for this argument of z.
class SectorError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature hit its subdivision limit. Carries the best estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, std::complex<double> estimate, double error)
        : std::runtime_error(what), estimate_(estimate), error_(error) {}

    std::complex<double> estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    std::complex<double> estimate_;
    double error_;
};

} // namespace mlf
