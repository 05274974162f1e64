#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "triwell/types.hpp"

namespace triwell {

using Matrix3c = Eigen::Matrix3cd;

/// Scaled secular residual a k must meet to be accepted as an eigenvalue.
inline constexpr double kRootTolerance = 1e-10;

/// Matching-condition matrix acting on (r, rho1, rho2). Rows: jump at -b,
/// jump at +b, jump at 0.
inline Matrix3c build_matrix(ComplexK kk, const SystemParams& p) {
    p.validate();
    const cplx k = kk.value();
    const cplx kappa(1.0, p.gamma);
    const cplx kappa_c = std::conj(kappa);
    const cplx e = std::exp(-2.0 * k * p.b);

    Matrix3c m;
    m << kappa * e + kappa - 2.0 * k, kappa * e - kappa + 2.0 * k, 0.0,
        kappa_c * e + kappa_c - 2.0 * k, 0.0, -kappa_c * e + kappa_c - 2.0 * k,
        -p.big_gamma, k, -k;
    if (!m.allFinite())
        throw InvalidArgument("build_matrix: non-finite entry");
    return m;
}

namespace detail {

template <class T>
T secular_closed_form(T k, const SystemParams& p) {
    const double g2 = p.gamma * p.gamma;
    const T e2 = std::exp(-2.0 * k * p.b);
    const T e4 = e2 * e2;
    const T km = 2.0 * k - 1.0;
    return p.big_gamma * (e4 * (1.0 + g2) - 2.0 * e2 * (g2 - 2.0 * k + 1.0) + g2 + km * km) +
           2.0 * k * (e4 * (1.0 + g2) - g2 - km * km);
}

// The determinant regrouped as sum_j c_j(k) exp(-2 j k b), j = 0, 1, 2, with
// each c_j a cubic in k. Derivatives in k follow from Leibniz' rule.
struct ExpPolySum {
    std::array<std::array<double, 4>, 3> c{};
};

inline ExpPolySum secular_terms(const SystemParams& p) {
    const double s = 1.0 + p.gamma * p.gamma;
    const double G = p.big_gamma;
    ExpPolySum t;
    t.c[0] = {G * s, -4.0 * G - 2.0 * s, 4.0 * G + 8.0, -8.0};
    t.c[1] = {-2.0 * G * s, 4.0 * G, 0.0, 0.0};
    t.c[2] = {G * s, 2.0 * s, 0.0, 0.0};
    return t;
}

// d/d(gamma^2) of the coefficients.
inline ExpPolySum secular_terms_dg2(const SystemParams& p) {
    const double G = p.big_gamma;
    ExpPolySum t;
    t.c[0] = {G, -2.0, 0.0, 0.0};
    t.c[1] = {-2.0 * G, 0.0, 0.0, 0.0};
    t.c[2] = {G, 2.0, 0.0, 0.0};
    return t;
}

// d/dGamma of the coefficients.
inline ExpPolySum secular_terms_dbig_gamma(const SystemParams& p) {
    const double s = 1.0 + p.gamma * p.gamma;
    ExpPolySum t;
    t.c[0] = {s, -4.0, 4.0, 0.0};
    t.c[1] = {-2.0 * s, 4.0, 0.0, 0.0};
    t.c[2] = {s, 0.0, 0.0, 0.0};
    return t;
}

template <class T>
T poly_derivative(const std::array<double, 4>& a, int m, T k) {
    T acc = 0.0;
    for (int i = 3; i >= m; --i) {
        double falling = 1.0;
        for (int q = 0; q < m; ++q) falling *= static_cast<double>(i - q);
        acc = acc * k + a[i] * falling;
    }
    return acc;
}

inline double poly_derivative_abs(const std::array<double, 4>& a, int m, double k_abs) {
    double acc = 0.0;
    for (int i = 3; i >= m; --i) {
        double falling = 1.0;
        for (int q = 0; q < m; ++q) falling *= static_cast<double>(i - q);
        acc = acc * k_abs + std::abs(a[i]) * falling;
    }
    return acc;
}

inline double binomial(int n, int m) {
    double r = 1.0;
    for (int i = 1; i <= m; ++i) r = r * (n - m + i) / i;
    return r;
}

inline double ipow(double x, int p) {
    double r = 1.0;
    for (int i = 0; i < p; ++i) r *= x;
    return r;
}

/// order-th k-derivative of sum_j c_j(k) exp(-2jkb); with d_db the b-partial of it.
template <class T>
T eval_terms(const ExpPolySum& s, T k, double b, int order, bool d_db = false) {
    T total = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double lam = -2.0 * j; // exponent is lam * k * b
        const T ex = std::exp(lam * k * b);
        T inner = 0.0;
        for (int m = 0; m <= order; ++m) {
            const int pw = order - m;
            T factor;
            if (!d_db) {
                factor = ipow(lam * b, pw);
            } else {
                factor = lam * k * ipow(lam * b, pw);
                if (pw > 0) factor += static_cast<double>(pw) * lam * ipow(lam * b, pw - 1);
            }
            inner += binomial(order, m) * poly_derivative(s.c[j], m, k) * factor;
        }
        total += ex * inner;
    }
    return total;
}

/// Sum of magnitudes of the individual contributions in eval_terms.
template <class T>
double eval_terms_scale(const ExpPolySum& s, T k, double b, int order) {
    const double ka = std::abs(k);
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
        const double lam = -2.0 * j;
        const double ex = std::abs(std::exp(lam * k * b));
        double inner = 0.0;
        for (int m = 0; m <= order; ++m)
            inner += binomial(order, m) * poly_derivative_abs(s.c[j], m, ka) *
                     std::abs(ipow(lam * b, order - m));
        total += ex * inner;
    }
    return total;
}

} // namespace detail

/// The secular determinant det M(k) in closed form.
inline cplx secular_det(ComplexK k, const SystemParams& p) {
    p.validate();
    return detail::secular_closed_form(k.value(), p);
}

/// Real-axis form; real-valued for real k.
inline double secular_det(double k, const SystemParams& p) {
    p.validate();
    if (!(k > 0.0)) throw InvalidArgument("secular_det: k must be positive");
    return detail::secular_closed_form(k, p);
}

/// Closed-form k-derivative of order 0..3 (order 0 reproduces secular_det).
template <class T>
T secular_derivative(T k, const SystemParams& p, int order) {
    if (order < 0 || order > 3)
        throw InvalidArgument("secular_derivative: order must be in [0, 3]");
    return detail::eval_terms(detail::secular_terms(p), k, p.b, order);
}

/// First or second k-derivative of the secular determinant.
inline cplx secular_det_derivs(ComplexK k, const SystemParams& p, int order) {
    p.validate();
    if (order != 1 && order != 2)
        throw InvalidArgument("secular_det_derivs: order must be 1 or 2");
    return secular_derivative(k.value(), p, order);
}

inline double secular_det_derivs(double k, const SystemParams& p, int order) {
    p.validate();
    if (order != 1 && order != 2)
        throw InvalidArgument("secular_det_derivs: order must be 1 or 2");
    if (!(k > 0.0)) throw InvalidArgument("secular_det_derivs: k must be positive");
    return secular_derivative(k, p, order);
}

/// Magnitude scale of the order-th derivative: the sum of |terms|. Residuals
/// divided by this are relative to the size of the cancelling contributions.
template <class T>
double secular_scale(T k, const SystemParams& p, int order = 0) {
    return detail::eval_terms_scale(detail::secular_terms(p), k, p.b, order);
}

template <class T>
double scaled_residual(T k, const SystemParams& p, int order = 0) {
    const double s = secular_scale(k, p, order);
    const double v = std::abs(secular_derivative(k, p, order));
    return s > 0.0 ? v / s : v;
}

/// Partials of the order-th k-derivative with respect to gamma, b and Gamma.
template <class T>
T secular_partial_gamma(T k, const SystemParams& p, int order) {
    return 2.0 * p.gamma * detail::eval_terms(detail::secular_terms_dg2(p), k, p.b, order);
}

template <class T>
T secular_partial_b(T k, const SystemParams& p, int order) {
    return detail::eval_terms(detail::secular_terms(p), k, p.b, order, true);
}

template <class T>
T secular_partial_big_gamma(T k, const SystemParams& p, int order) {
    return detail::eval_terms(detail::secular_terms_dbig_gamma(p), k, p.b, order);
}

/// The gamma = 0 factorized determinant,
/// (e + 2k - 1) * (Gamma (e + 2k - 1) + 2k (e - 2k + 1)), e = exp(-2kb).
template <class T>
T secular_det_gamma0_factorized(T k, double b, double big_gamma) {
    const T e = std::exp(-2.0 * k * b);
    const T f1 = e + 2.0 * k - 1.0;
    return f1 * (big_gamma * f1 + 2.0 * k * (e - 2.0 * k + 1.0));
}

/// First factor of the gamma = 0 determinant; its root is the second eigenvalue.
template <class T>
T second_factor(T k, double b) {
    return std::exp(-2.0 * k * b) + 2.0 * k - 1.0;
}

} // namespace triwell
