#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "triwell/types.hpp"
#include "triwell/wavefunction.hpp"

namespace triwell {

/// Modes whose |c-norm| falls below this cannot be propagated.
inline constexpr double kMinCNorm = 1e-12;

enum class Well { Left, Middle, Right };

struct GaussianInWell {
    Well which = Well::Left;
    double width = 1.0; ///< psi0(x) = exp(-(x - x_well)^2 / (2 width^2))
};

struct CoefficientVector {
    std::array<cplx, 3> c{};
};

struct InitialCondition {
    std::variant<GaussianInWell, CoefficientVector> kind;
    std::string description;

    static InitialCondition gaussian(Well which, double width = 1.0) {
        static constexpr const char* names[] = {"left", "middle", "right"};
        return {GaussianInWell{which, width},
                std::string("gaussian in ") + names[static_cast<int>(which)] + " well, width " +
                    std::to_string(width)};
    }

    static InitialCondition coefficients(std::array<cplx, 3> c) {
        return {CoefficientVector{c}, "explicit mode coefficients"};
    }

    void validate() const {
        if (const auto* g = std::get_if<GaussianInWell>(&kind)) {
            if (!(g->width > 0.0) || !std::isfinite(g->width))
                throw InvalidArgument("InitialCondition: Gaussian width must be positive");
        } else {
            const auto& c = std::get<CoefficientVector>(kind).c;
            if (std::all_of(c.begin(), c.end(), [](cplx v) { return v == cplx(0.0); }))
                throw InvalidArgument("InitialCondition: coefficient vector is zero");
        }
    }
};

inline double well_position(Well w, const SystemParams& p) {
    switch (w) {
    case Well::Left: return -p.b;
    case Well::Middle: return 0.0;
    case Well::Right: return p.b;
    }
    return 0.0;
}

namespace detail {

inline void require_norms(std::span<const Mode> modes) {
    for (const auto& m : modes)
        if (!(std::abs(m.c_norm) >= kMinCNorm))
            throw NormTooSmall("mode c-norm below " + std::to_string(kMinCNorm) + ": too close to the EP3");
}

// Integral over [lo, hi], split at the kinks -b, 0, b.
template <class F>
cplx integrate_piecewise(F&& f, double lo, double hi, double b) {
    std::vector<double> cuts{lo};
    for (double c : {-b, 0.0, b})
        if (c > lo && c < hi) cuts.push_back(c);
    cuts.push_back(hi);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double re = GK::integrate([&](double x) { return f(x).real(); }, cuts[i], cuts[i + 1], 15, 1e-13);
        const double im = GK::integrate([&](double x) { return f(x).imag(); }, cuts[i], cuts[i + 1], 15, 1e-13);
        total += cplx(re, im);
    }
    return total;
}

} // namespace detail

/// c-inner products <psi~_i | f> = int psi_i(x) f(x) dx over [lo, hi].
template <class F>
std::array<cplx, 3> project_function(F&& f, std::span<const Mode, 3> modes, const SystemParams& p, double lo,
                                     double hi) {
    std::array<cplx, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const PiecewiseWavefunction wf(modes[i], p);
        out[i] = detail::integrate_piecewise([&](double x) { return wf(x) * f(x); }, lo, hi, p.b);
    }
    return out;
}

/// Expansion coefficients c_i = <psi~_i | psi(t=0)> of an initial condition.
/// Explicit coefficient vectors are passed through unchanged.
inline std::array<cplx, 3> project_initial(const InitialCondition& ic, std::span<const Mode, 3> modes,
                                           const SystemParams& p) {
    ic.validate();
    p.validate();
    detail::require_norms(modes);
    if (const auto* cv = std::get_if<CoefficientVector>(&ic.kind)) return cv->c;

    const auto& g = std::get<GaussianInWell>(ic.kind);
    const double x0 = well_position(g.which, p);
    const double w = g.width;
    auto gauss = [x0, w](double x) {
        const double u = (x - x0) / w;
        return cplx(std::exp(-0.5 * u * u), 0.0);
    };
    return project_function(gauss, modes, p, x0 - 12.0 * w, x0 + 12.0 * w);
}

/// Rectangular grid of |psi(t, x)|^2, row-major in t.
struct IntensityField {
    std::vector<double> t_grid;
    std::vector<double> x_grid;
    std::vector<double> values;
    SystemParams params;

    double at(std::size_t it, std::size_t ix) const { return values[it * x_grid.size() + ix]; }
    double max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
};

/// psi(t, x) = sum_i c_i psi_i(x) exp(i k_i^2 t) / <psi~_i|psi_i>, row-major in t.
inline std::vector<cplx> evolve_amplitude(std::span<const Mode> modes, std::span<const cplx> coeffs,
                                          const SystemParams& p, std::span<const double> t_grid,
                                          std::span<const double> x_grid) {
    p.validate();
    if (modes.size() != coeffs.size() || modes.empty())
        throw InvalidArgument("evolve: need one coefficient per mode");
    if (t_grid.empty() || x_grid.empty()) throw InvalidArgument("evolve: empty grid");
    detail::require_norms(modes);

    const std::size_t nm = modes.size();
    std::vector<cplx> spatial(nm * x_grid.size());
    for (std::size_t i = 0; i < nm; ++i) {
        const PiecewiseWavefunction wf(modes[i], p);
        const cplx w = coeffs[i] / modes[i].c_norm;
        for (std::size_t ix = 0; ix < x_grid.size(); ++ix) spatial[i * x_grid.size() + ix] = w * wf(x_grid[ix]);
    }
    std::vector<cplx> out(t_grid.size() * x_grid.size());
    std::vector<cplx> phase(nm);
    for (std::size_t it = 0; it < t_grid.size(); ++it) {
        for (std::size_t i = 0; i < nm; ++i) {
            const cplx k = modes[i].k.value();
            phase[i] = std::exp(cplx(0.0, 1.0) * k * k * t_grid[it]);
        }
        for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < nm; ++i) acc += phase[i] * spatial[i * x_grid.size() + ix];
            out[it * x_grid.size() + ix] = acc;
        }
    }
    return out;
}

inline IntensityField evolve(std::span<const Mode> modes, std::span<const cplx> coeffs, const SystemParams& p,
                             std::span<const double> t_grid, std::span<const double> x_grid) {
    const auto amp = evolve_amplitude(modes, coeffs, p, t_grid, x_grid);
    IntensityField field;
    field.t_grid.assign(t_grid.begin(), t_grid.end());
    field.x_grid.assign(x_grid.begin(), x_grid.end());
    field.params = p;
    field.values.reserve(amp.size());
    for (const cplx& a : amp) field.values.push_back(std::norm(a));
    return field;
}

/// 2 pi / min |k_i^2 - k_j^2|: the slowest pairwise beat. A repeat-time
/// diagnostic only; the k_i^2 are generally incommensurate.
inline double beat_period(std::span<const Mode> modes) {
    if (modes.size() < 2) throw InvalidArgument("beat_period: need at least two modes");
    double min_gap = std::numeric_limits<double>::infinity();
    for (const auto& m : modes)
        if (m.k.im() != 0.0) throw InvalidArgument("beat_period: non-real eigenvalue");
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            const double ki = modes[i].k.re(), kj = modes[j].k.re();
            min_gap = std::min(min_gap, std::abs(ki * ki - kj * kj));
        }
    if (!(min_gap > 0.0)) throw InvalidArgument("beat_period: degenerate eigenvalues");
    return 2.0 * std::numbers::pi / min_gap;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

/// x in [-b - 10, b + 10], 601 points.
inline std::vector<double> default_x_grid(const SystemParams& p) { return linspace(-p.b - 10.0, p.b + 10.0, 601); }

/// t in [0, 3 * beat period], 601 points.
inline std::vector<double> default_t_grid(double beat) { return linspace(0.0, 3.0 * beat, 601); }

} // namespace triwell
