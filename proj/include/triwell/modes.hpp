#pragma once

#include <cmath>
#include <complex>

#include <boost/math/tools/roots.hpp>

#include "triwell/secular.hpp"
#include "triwell/types.hpp"
#include "triwell/wavefunction.hpp"

namespace triwell {

/// Below this gamma the second mode is built from its analytic gamma -> 0 limit.
inline constexpr double kDegenerateGamma = 1e-6;

namespace detail {

inline void fill_outer_coefficients(Mode& m, double b) {
    const cplx e = std::exp(2.0 * m.k.value() * b);
    m.a_coef = m.r * (1.0 + e) + m.rho1 * (1.0 - e);
    m.b_coef = m.r * (1.0 + e) + m.rho2 * (e - 1.0);
}

} // namespace detail

/// Root of exp(-2kb) + 2k - 1 in (0, 1/2): the gamma-independent second
/// eigenvalue of the hermitian (gamma = 0) problem. Exists for b > 1.
inline double second_eigenvalue_gamma0(double b) {
    if (!(b > 1.0))
        throw InvalidArgument("second_eigenvalue_gamma0: requires b > 1");
    auto f = [b](double k) { return second_factor(k, b); };
    // f(0) = 0 and f'(0) = 2 - 2b < 0, so the nontrivial root is bracketed
    // between the minimum at k = log(b)/(2b) and 1/2.
    const double lo = std::log(b) / (2.0 * b);
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    auto [a, c] = boost::math::tools::toms748_solve(f, lo, 0.5, tol, iters);
    return 0.5 * (a + c);
}

/// Coefficients for a root k with r = 1 (explicit closed-form rho1, rho2).
inline Mode mode_coefficients(ComplexK kk, const SystemParams& p) {
    p.validate();
    const cplx k = kk.value();
    if (scaled_residual(k, p, 0) > kRootTolerance)
        throw InvalidArgument("mode_coefficients: k is not a root of the secular equation");
    if (p.gamma < kDegenerateGamma && std::abs(second_factor(k, p.b)) < 1e-6)
        throw DegenerateCoefficients(
            "mode_coefficients: second mode at gamma ~ 0; use mode_coefficients_gamma0");

    const cplx kappa(1.0, p.gamma);
    const cplx kappa_c = std::conj(kappa);
    const cplx e = std::exp(-2.0 * k * p.b);
    const cplx den1 = kappa * e - kappa + 2.0 * k;
    const cplx den2 = kappa_c * e - kappa_c + 2.0 * k;
    if (den1 == cplx(0.0) || den2 == cplx(0.0))
        throw DegenerateCoefficients("mode_coefficients: vanishing denominator");

    Mode m;
    m.k = kk;
    m.r = 1.0;
    m.rho1 = -(kappa * e + kappa - 2.0 * k) / den1;
    m.rho2 = (kappa_c * e + kappa_c - 2.0 * k) / den2;
    detail::fill_outer_coefficients(m, p.b);
    m.c_norm = PiecewiseWavefunction(m, p).c_norm();
    return m;
}

/// gamma -> 0 limit of gamma * (r, rho1, rho2) for the second mode:
/// -i (1 - 2 k2) / k2 * (0, 1, 1).
inline Mode mode_coefficients_gamma0(ComplexK k2, const SystemParams& p) {
    p.validate();
    if (p.gamma >= kDegenerateGamma)
        throw InvalidArgument("mode_coefficients_gamma0: requires gamma below the degeneracy threshold");
    const cplx k = k2.value();
    if (std::abs(second_factor(k, p.b)) > kRootTolerance)
        throw InvalidArgument("mode_coefficients_gamma0: k does not solve exp(-2kb) + 2k - 1 = 0");

    Mode m;
    m.k = k2;
    m.r = 0.0;
    m.rho1 = cplx(0.0, -1.0) * (1.0 - 2.0 * k) / k;
    m.rho2 = m.rho1;
    detail::fill_outer_coefficients(m, p.b);
    m.c_norm = PiecewiseWavefunction(m, p).c_norm();
    return m;
}

/// Picks the limit branch where the explicit formulas degenerate.
inline Mode mode_for_root(ComplexK k, const SystemParams& p) {
    if (p.gamma < kDegenerateGamma && std::abs(second_factor(k.value(), p.b)) < 1e-6)
        return mode_coefficients_gamma0(k, p);
    return mode_coefficients(k, p);
}

/// ||M v|| / (||M|| ||v||) with v = (r, rho1, rho2).
inline double null_space_residual(const Mode& m, const SystemParams& p) {
    const Matrix3c mat = build_matrix(m.k, p);
    const Eigen::Vector3cd v(m.r, m.rho1, m.rho2);
    return (mat * v).norm() / (mat.norm() * v.norm());
}

} // namespace triwell
