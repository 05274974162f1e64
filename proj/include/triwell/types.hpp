#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace triwell {

using cplx = std::complex<double>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs of an operation was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The r = 1 coefficient formulas are singular (second root, gamma -> 0).
class DegenerateCoefficients : public Error {
public:
    using Error::Error;
};

/// An iterative solver failed to reach its tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A requested parameter lies outside the region where a solution exists.
class OutOfRange : public Error {
public:
    using Error::Error;
};

/// The c-norm of a mode is too small to divide by.
class NormTooSmall : public Error {
public:
    using Error::Error;
};

/// Parameters of the three-well model
///   -psi'' - [(1+i gamma) d(x+b) + big_gamma d(x) + (1-i gamma) d(x-b)] psi = -k^2 psi.
struct SystemParams {
    double gamma = 0.0;     ///< gain/loss strength of the outer wells
    double b = 1.0;         ///< half-spacing: outer wells sit at -b and +b
    double big_gamma = 1.0; ///< strength of the middle well

    /// Throws InvalidArgument unless b > 0, big_gamma > 0 and gamma >= 0 (all finite).
    void validate() const {
        if (!std::isfinite(gamma) || !std::isfinite(b) || !std::isfinite(big_gamma))
            throw InvalidArgument("SystemParams: non-finite parameter");
        if (!(b > 0.0))
            throw InvalidArgument("SystemParams: b must be positive");
        if (!(big_gamma > 0.0))
            throw InvalidArgument("SystemParams: big_gamma must be positive");
        if (!(gamma >= 0.0))
            throw InvalidArgument("SystemParams: gamma must be non-negative");
    }

    SystemParams with_gamma(double g) const { return {g, b, big_gamma}; }
    SystemParams with_b(double bb) const { return {gamma, bb, big_gamma}; }
};

/// Bound-state eigenvalue parameter k (energy -k^2), restricted to Re(k) > 0.
class ComplexK {
public:
    ComplexK(double re, double im = 0.0) : ComplexK(cplx(re, im)) {}

    explicit ComplexK(cplx k) : value_(k) {
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
            throw InvalidArgument("ComplexK: non-finite value");
        if (!(k.real() > 0.0))
            throw InvalidArgument("ComplexK: Re(k) must be positive");
    }

    double re() const { return value_.real(); }
    double im() const { return value_.imag(); }
    cplx value() const { return value_; }
    bool is_real(double tol = 0.0) const { return std::abs(value_.imag()) <= tol; }

    friend bool operator==(const ComplexK&, const ComplexK&) = default;

private:
    cplx value_;
};

/// One eigenmode. Coefficients are stored unnormalized (r = 1 except for the
/// gamma -> 0 limit of the second mode); the c-norm is kept alongside.
struct Mode {
    ComplexK k{0.5};
    cplx r{1.0};
    cplx rho1{};
    cplx rho2{};
    cplx a_coef{}; ///< amplitude of exp(k x) for x < -b
    cplx b_coef{}; ///< amplitude of exp(-k x) for x > b
    cplx c_norm{}; ///< integral of psi(x)^2 over the real line
};

} // namespace triwell
