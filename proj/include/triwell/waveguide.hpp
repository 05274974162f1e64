#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "triwell/types.hpp"

namespace triwell {

/// Physical description of one guide on a substrate. Lengths in micrometres.
struct WaveguideSpec {
    double n0 = 0.0;            ///< background refractive index
    double delta_n = 0.0;       ///< real index contrast
    double delta_n_prime = 0.0; ///< imaginary index contrast (gain/loss)
    double lambda0 = 0.0;       ///< vacuum wavelength
    double a = 0.0;             ///< guide width
};

/// Scales of the dimensionless model derived from a WaveguideSpec.
struct ModelScales {
    double ell = 0.0;   ///< (2 n0 dn k0^2)^(-1/2), um
    double big_l = 0.0; ///< ell^2 / a, um; the unit of the model coordinate
    double gamma = 0.0; ///< dn' / dn
    double k0 = 0.0;    ///< 2 pi / lambda0, 1/um
    std::vector<std::string> warnings;
};

/// Largest |dn~| / n0 for which the first-order expansion of n^2 is accepted silently.
inline constexpr double kSmallContrast = 0.1;

/// Throws InvalidArgument on hard violations; returns soft warnings.
inline std::vector<std::string> validate(const WaveguideSpec& s) {
    for (double v : {s.n0, s.delta_n, s.delta_n_prime, s.lambda0, s.a})
        if (!std::isfinite(v)) throw InvalidArgument("WaveguideSpec: non-finite field");
    if (!(s.n0 > 0.0)) throw InvalidArgument("WaveguideSpec: n0 must be positive");
    if (!(s.delta_n > 0.0)) throw InvalidArgument("WaveguideSpec: delta_n must be positive");
    if (!(s.lambda0 > 0.0)) throw InvalidArgument("WaveguideSpec: lambda0 must be positive");
    if (!(s.a > 0.0)) throw InvalidArgument("WaveguideSpec: a must be positive");
    std::vector<std::string> warnings;
    if (std::hypot(s.delta_n, s.delta_n_prime) / s.n0 >= kSmallContrast)
        warnings.emplace_back("index contrast is not small compared to n0; first-order mapping is inaccurate");
    return warnings;
}

/// Maps a guide to the model in which the outer-well strength is unity.
inline ModelScales to_model(const WaveguideSpec& s) {
    ModelScales m;
    m.warnings = validate(s);
    m.k0 = 2.0 * std::numbers::pi / s.lambda0;
    m.ell = 1.0 / std::sqrt(2.0 * s.n0 * s.delta_n * m.k0 * m.k0);
    m.big_l = m.ell * m.ell / s.a;
    m.gamma = s.delta_n_prime / s.delta_n;
    return m;
}

/// Middle-well strength of a central guide with real contrast delta_n_mid (same
/// width), relative to the outer guides' delta_n.
inline double middle_strength(double delta_n_mid, double delta_n) {
    if (!(delta_n_mid > 0.0) || !(delta_n > 0.0))
        throw InvalidArgument("middle_strength: contrasts must be positive");
    return delta_n_mid / delta_n;
}

/// Propagation constant from k^2 = L^2 (beta^2 - n0^2 k0^2), Re(beta) > 0.
inline cplx beta_from_k(cplx k, const ModelScales& sc, double n0) {
    if (!(sc.big_l > 0.0) || !(sc.k0 > 0.0) || !(n0 > 0.0))
        throw InvalidArgument("beta_from_k: invalid scales");
    const cplx beta = std::sqrt(k * k / (sc.big_l * sc.big_l) + n0 * n0 * sc.k0 * sc.k0);
    return beta.real() < 0.0 ? -beta : beta;
}

/// Inverse of beta_from_k on the branch Re(k) >= 0.
inline cplx k_from_beta(cplx beta, const ModelScales& sc, double n0) {
    if (!(sc.big_l > 0.0) || !(sc.k0 > 0.0) || !(n0 > 0.0))
        throw InvalidArgument("k_from_beta: invalid scales");
    const cplx k = sc.big_l * std::sqrt(beta * beta - n0 * n0 * sc.k0 * sc.k0);
    return k.real() < 0.0 ? -k : k;
}

/// Model coordinate (e.g. well half-spacing b) to micrometres.
inline double physical_separation(double b_model, const ModelScales& sc) {
    if (!(b_model >= 0.0)) throw InvalidArgument("physical_separation: b must be non-negative");
    return sc.big_l * b_model;
}

} // namespace triwell
