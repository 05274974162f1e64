#pragma once

#include <cmath>
#include <complex>

#include "triwell/types.hpp"

namespace triwell {

enum class Region { Left, InnerLeft, InnerRight, Right };

namespace detail {

// exp(z) - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// Integral of exp(s x) over [x1, x2].
inline cplx integrate_exp(cplx s, double x1, double x2) {
    const double len = x2 - x1;
    if (s == cplx(0.0)) return len;
    const cplx z = s * len;
    if (std::abs(z) < 1e-8) return std::exp(s * x1) * len * (1.0 + 0.5 * z);
    return std::exp(s * x1) * expm1(z) / s;
}

} // namespace detail

/// Psi(x) of a mode: exponential tails outside [-b, b], hyperbolic inside.
class PiecewiseWavefunction {
public:
    PiecewiseWavefunction(Mode mode, SystemParams params) : mode_(mode), params_(params) {
        params_.validate();
        psi_left_ = branch_value(Region::InnerLeft, -params_.b);
        psi_right_ = branch_value(Region::InnerRight, params_.b);
    }

    static Region region_of(double x, double b) {
        if (x < -b) return Region::Left;
        if (x < 0.0) return Region::InnerLeft;
        if (x < b) return Region::InnerRight;
        return Region::Right;
    }

    cplx operator()(double x) const { return branch_value(region_of(x, params_.b), x); }

    /// Value of a given branch's formula at x, whether or not x lies in that region.
    cplx branch_value(Region region, double x) const {
        const cplx k = mode_.k.value();
        switch (region) {
        case Region::Left:
            return psi_left_ * std::exp(k * (x + params_.b));
        case Region::InnerLeft:
            return 2.0 * (mode_.r * std::cosh(k * x) + mode_.rho1 * std::sinh(k * x));
        case Region::InnerRight:
            return 2.0 * (mode_.r * std::cosh(k * x) + mode_.rho2 * std::sinh(k * x));
        case Region::Right:
            return psi_right_ * std::exp(-k * (x - params_.b));
        }
        return {};
    }

    cplx branch_derivative(Region region, double x) const {
        const cplx k = mode_.k.value();
        switch (region) {
        case Region::Left:
            return k * branch_value(region, x);
        case Region::InnerLeft:
            return 2.0 * k * (mode_.r * std::sinh(k * x) + mode_.rho1 * std::cosh(k * x));
        case Region::InnerRight:
            return 2.0 * k * (mode_.r * std::sinh(k * x) + mode_.rho2 * std::cosh(k * x));
        case Region::Right:
            return -k * branch_value(region, x);
        }
        return {};
    }

    /// Closed-form integral of psi^2 (no conjugation) over the real line.
    cplx c_norm() const {
        const cplx k = mode_.k.value();
        const double b = params_.b;
        cplx total = (psi_left_ * psi_left_ + psi_right_ * psi_right_) / (2.0 * k);
        total += inner_c_integral(mode_.r + mode_.rho1, mode_.r - mode_.rho1, -b, 0.0);
        total += inner_c_integral(mode_.r + mode_.rho2, mode_.r - mode_.rho2, 0.0, b);
        return total;
    }

    /// Closed-form integral of |psi|^2 over the real line.
    double l2_norm_squared() const {
        const double kr = mode_.k.re();
        const double b = params_.b;
        double total = (std::norm(psi_left_) + std::norm(psi_right_)) / (2.0 * kr);
        total += inner_l2_integral(mode_.r + mode_.rho1, mode_.r - mode_.rho1, -b, 0.0);
        total += inner_l2_integral(mode_.r + mode_.rho2, mode_.r - mode_.rho2, 0.0, b);
        return total;
    }

    const Mode& mode() const { return mode_; }
    const SystemParams& params() const { return params_; }

private:
    // psi = alpha e^{kx} + beta e^{-kx} on [x1, x2]
    cplx inner_c_integral(cplx alpha, cplx beta, double x1, double x2) const {
        const cplx k = mode_.k.value();
        return alpha * alpha * detail::integrate_exp(2.0 * k, x1, x2) +
               beta * beta * detail::integrate_exp(-2.0 * k, x1, x2) +
               2.0 * alpha * beta * (x2 - x1);
    }

    double inner_l2_integral(cplx alpha, cplx beta, double x1, double x2) const {
        const cplx k = mode_.k.value();
        const double kr = k.real();
        const double q = k.imag();
        const double grow = std::norm(alpha) * detail::integrate_exp(2.0 * kr, x1, x2).real();
        const double decay = std::norm(beta) * detail::integrate_exp(-2.0 * kr, x1, x2).real();
        const cplx cross = alpha * std::conj(beta) * detail::integrate_exp(cplx(0.0, 2.0 * q), x1, x2);
        return grow + decay + 2.0 * cross.real();
    }

    Mode mode_;
    SystemParams params_;
    cplx psi_left_{};
    cplx psi_right_{};
};

inline cplx eval_wavefunction(const Mode& m, const SystemParams& p, double x) {
    return PiecewiseWavefunction(m, p)(x);
}

inline cplx c_norm(const Mode& m, const SystemParams& p) {
    if (!(m.k.re() > 0.0)) throw InvalidArgument("c_norm: requires Re(k) > 0");
    return PiecewiseWavefunction(m, p).c_norm();
}

inline double l2_norm_squared(const Mode& m, const SystemParams& p) {
    return PiecewiseWavefunction(m, p).l2_norm_squared();
}

/// c-norm divided by the L2 norm; independent of the mode's overall scale.
inline cplx relative_c_norm(const Mode& m, const SystemParams& p) {
    const PiecewiseWavefunction wf(m, p);
    return wf.c_norm() / wf.l2_norm_squared();
}

} // namespace triwell
