#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "triwell/secular.hpp"
#include "triwell/types.hpp"

namespace triwell {

/// Third-order coalescence (gamma, b, k) at fixed Gamma.
struct EP3Solution {
    double big_gamma = 0.0;
    double gamma = 0.0;
    double b = 0.0;
    double k = 0.0;
    std::array<double, 3> condition_residuals{}; ///< scaled |f|, |f'|, |f''|
    int iterations = 0;

    SystemParams params() const { return {gamma, b, big_gamma}; }
};

struct Ep3Guess {
    double gamma;
    double b;
    double k;
};

/// EP3s exist for Gamma strictly between these bounds. At the lower end the
/// family runs off to gamma -> 0, b -> infinity; at the upper end k -> 0.
inline constexpr double kEp3BigGammaMin = 1.0;
inline constexpr double kEp3BigGammaMax = 1.3748337152767062;

/// Acceptance threshold on every scaled condition residual.
inline constexpr double kEp3Tolerance = 1e-9;

/// Starting point used at Gamma = 1.002.
inline constexpr Ep3Guess kEp3AnchorGuess{0.06, 6.2, 0.5};
inline constexpr double kEp3AnchorBigGamma = 1.002;

/// NonConvergence carrying the last iterate.
class Ep3NonConvergence : public NonConvergence {
public:
    Ep3NonConvergence(const std::string& what, EP3Solution last) : NonConvergence(what), last_(last) {}
    const EP3Solution& last_iterate() const { return last_; }

private:
    EP3Solution last_;
};

namespace detail {

template <int N>
using VecN = Eigen::Matrix<double, N, 1>;

template <int N>
struct NewtonOutcome {
    VecN<N> x;
    VecN<N> scaled; // per-equation scaled residuals at x
    int iterations = 0;
};

// Damped Newton for N equations in N unknowns. `eval` fills the residual, its
// scales and the Jacobian; it returns false for an inadmissible x. Steps are
// halved until the scaled residual norm decreases.
template <int N>
using SystemN = std::function<bool(const VecN<N>&, VecN<N>&, VecN<N>&, Eigen::Matrix<double, N, N>&)>;

template <int N>
NewtonOutcome<N> damped_newton(const SystemN<N>& eval, VecN<N> x, int max_iter) {
    VecN<N> f, s;
    Eigen::Matrix<double, N, N> jac;
    if (!eval(x, f, s, jac)) throw InvalidArgument("damped_newton: inadmissible starting point");
    auto merit = [](const VecN<N>& fv, const VecN<N>& sv) { return fv.cwiseQuotient(sv).squaredNorm(); };
    double m = merit(f, s);
    int it = 0;
    for (; it < max_iter; ++it) {
        if (f.cwiseQuotient(s).cwiseAbs().maxCoeff() <= 1e-15) break;
        const VecN<N> dx = jac.fullPivLu().solve(-f);
        if (!dx.allFinite()) break;
        double lambda = 1.0;
        bool accepted = false;
        VecN<N> fn, sn;
        Eigen::Matrix<double, N, N> jn;
        while (lambda > 1e-12) {
            const VecN<N> xn = x + lambda * dx;
            if (eval(xn, fn, sn, jn) && merit(fn, sn) < m) {
                x = xn;
                f = fn;
                s = sn;
                jac = jn;
                m = merit(fn, sn);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
        if ((lambda * dx).norm() <= 1e-15 * (1.0 + x.norm())) {
            ++it;
            break;
        }
    }
    return {x, f.cwiseQuotient(s).cwiseAbs(), it};
}

using System3 = SystemN<3>;

// Equations f, f', f'' at real k.
inline void condition_values(const SystemParams& p, double k, Eigen::Vector3d& f, Eigen::Vector3d& s) {
    for (int n = 0; n < 3; ++n) {
        f(n) = secular_derivative(k, p, n);
        s(n) = std::max(secular_scale(k, p, n), 1e-300);
    }
}

inline EP3Solution solve_ep3_fixed_big_gamma(double big_gamma, Ep3Guess guess, int max_iter = 200) {
    System3 eval = [big_gamma](const Eigen::Vector3d& x, Eigen::Vector3d& f, Eigen::Vector3d& s,
                               Eigen::Matrix3d& jac) {
        const double g = x(0), b = x(1), k = x(2);
        if (!(b > 0.0) || !(k > 0.0) || !std::isfinite(g)) return false;
        const SystemParams p{std::abs(g), b, big_gamma};
        condition_values(p, k, f, s);
        const double sign = g < 0.0 ? -1.0 : 1.0;
        for (int n = 0; n < 3; ++n) {
            jac(n, 0) = sign * secular_partial_gamma(k, p, n);
            jac(n, 1) = secular_partial_b(k, p, n);
            jac(n, 2) = secular_derivative(k, p, n + 1);
        }
        return f.allFinite() && jac.allFinite();
    };
    const auto out = damped_newton<3>(eval, Eigen::Vector3d(guess.gamma, guess.b, guess.k), max_iter);
    EP3Solution sol;
    sol.big_gamma = big_gamma;
    sol.gamma = std::abs(out.x(0));
    sol.b = out.x(1);
    sol.k = out.x(2);
    sol.condition_residuals = {out.scaled(0), out.scaled(1), out.scaled(2)};
    sol.iterations = out.iterations;
    return sol;
}

struct FamilyPoint {
    double gamma, b, big_gamma, k;
};

// Point of the EP3 family at prescribed k, solving for (gamma, b, Gamma).
inline std::optional<FamilyPoint> family_point_at_k(double k, const FamilyPoint& guess) {
    System3 eval = [k](const Eigen::Vector3d& x, Eigen::Vector3d& f, Eigen::Vector3d& s, Eigen::Matrix3d& jac) {
        const double g = x(0), b = x(1), big = x(2);
        if (!(b > 0.0) || !(big > 0.0) || !std::isfinite(g)) return false;
        const SystemParams p{std::abs(g), b, big};
        condition_values(p, k, f, s);
        const double sign = g < 0.0 ? -1.0 : 1.0;
        for (int n = 0; n < 3; ++n) {
            jac(n, 0) = sign * secular_partial_gamma(k, p, n);
            jac(n, 1) = secular_partial_b(k, p, n);
            jac(n, 2) = secular_partial_big_gamma(k, p, n);
        }
        return f.allFinite() && jac.allFinite();
    };
    try {
        const auto out = damped_newton<3>(eval, Eigen::Vector3d(guess.gamma, guess.b, guess.big_gamma), 100);
        if (out.scaled.maxCoeff() > kEp3Tolerance) return std::nullopt;
        return FamilyPoint{std::abs(out.x(0)), out.x(1), out.x(2), k};
    } catch (const InvalidArgument&) {
        return std::nullopt;
    }
}

inline void check_big_gamma_range(double big_gamma) {
    if (!std::isfinite(big_gamma) || !(big_gamma > kEp3BigGammaMin) || !(big_gamma < kEp3BigGammaMax))
        throw OutOfRange("EP3 exists only for " + std::to_string(kEp3BigGammaMin) + " < Gamma < " +
                         std::to_string(kEp3BigGammaMax));
}

} // namespace detail

/// Solves f = f' = f'' = 0 (f the secular function on real k) for (gamma, b, k)
/// at fixed Gamma by damped Newton with the analytic Jacobian.
inline EP3Solution find_ep3(double big_gamma, Ep3Guess guess) {
    detail::check_big_gamma_range(big_gamma);
    if (!std::isfinite(guess.gamma) || !std::isfinite(guess.b) || !std::isfinite(guess.k))
        throw InvalidArgument("find_ep3: non-finite guess");
    if (!(guess.b > 0.0) || !(guess.k > 0.0))
        throw InvalidArgument("find_ep3: guess needs b > 0 and k > 0");
    const EP3Solution sol = detail::solve_ep3_fixed_big_gamma(big_gamma, guess);
    const double worst = *std::max_element(sol.condition_residuals.begin(), sol.condition_residuals.end());
    if (!(worst <= kEp3Tolerance))
        throw Ep3NonConvergence("find_ep3: no convergence (scaled residual " + std::to_string(worst) + ")", sol);
    return sol;
}

/// Starting guess for any admissible Gamma. Converges the anchor solution at
/// Gamma = 1.002, then walks along the EP3 family parametrized by k (which is
/// monotone along it) until Gamma is bracketed, and interpolates.
inline Ep3Guess default_ep3_guess(double big_gamma) {
    detail::check_big_gamma_range(big_gamma);
    const EP3Solution anchor = detail::solve_ep3_fixed_big_gamma(kEp3AnchorBigGamma, kEp3AnchorGuess);
    if (std::abs(big_gamma - kEp3AnchorBigGamma) < 1e-12) return kEp3AnchorGuess;

    const bool upward = big_gamma > kEp3AnchorBigGamma; // Gamma grows as k decreases
    detail::FamilyPoint prev{anchor.gamma, anchor.b, anchor.big_gamma, anchor.k};
    double h = 0.005;
    for (int guard = 0; guard < 10000; ++guard) {
        const double room = upward ? prev.k : 0.5 - prev.k;
        const double step = std::min(h, 0.25 * room);
        if (step < 1e-12) break;
        const double k_next = upward ? prev.k - step : prev.k + step;
        const auto next = detail::family_point_at_k(k_next, prev);
        if (!next) {
            h *= 0.5;
            continue;
        }
        const bool crossed = upward ? next->big_gamma >= big_gamma : next->big_gamma <= big_gamma;
        if (crossed) {
            const double t = (big_gamma - prev.big_gamma) / (next->big_gamma - prev.big_gamma);
            return {prev.gamma + t * (next->gamma - prev.gamma), prev.b + t * (next->b - prev.b),
                    prev.k + t * (next->k - prev.k)};
        }
        prev = *next;
        h = std::min(0.005, 1.5 * h);
    }
    throw NonConvergence("default_ep3_guess: family continuation did not reach Gamma");
}

inline EP3Solution find_ep3(double big_gamma) { return find_ep3(big_gamma, default_ep3_guess(big_gamma)); }

struct Ep3Family {
    std::vector<EP3Solution> solutions;
    bool gamma_increasing = true; ///< gamma_EP3 strictly increasing in Gamma
    bool b_decreasing = true;     ///< b_EP3 strictly decreasing in Gamma
    std::optional<std::string> failure;
    std::optional<double> failed_big_gamma;
};

/// EP3s on an evenly spaced Gamma grid of `points` values (endpoints included),
/// each seeded from the previous ones. Stops at the first failure and keeps
/// what converged.
inline Ep3Family trace_ep3_family(double big_gamma_lo, double big_gamma_hi, int points) {
    if (points < 1) throw InvalidArgument("trace_ep3_family: need at least one point");
    if (points > 1 && !(big_gamma_hi > big_gamma_lo))
        throw InvalidArgument("trace_ep3_family: empty Gamma range");
    Ep3Family fam;
    for (int i = 0; i < points; ++i) {
        const double big = points == 1 ? big_gamma_lo
                                        : big_gamma_lo + (big_gamma_hi - big_gamma_lo) * i / (points - 1);
        try {
            const auto& s = fam.solutions;
            std::optional<EP3Solution> sol;
            if (s.size() >= 2) {
                const auto& a = s[s.size() - 2];
                const auto& c = s.back();
                const double t = (big - c.big_gamma) / (c.big_gamma - a.big_gamma);
                try {
                    sol = find_ep3(big, {c.gamma + t * (c.gamma - a.gamma), c.b + t * (c.b - a.b),
                                         c.k + t * (c.k - a.k)});
                } catch (const NonConvergence&) {
                } catch (const InvalidArgument&) {
                }
            } else if (s.size() == 1) {
                try {
                    sol = find_ep3(big, {s.back().gamma, s.back().b, s.back().k});
                } catch (const NonConvergence&) {
                }
            }
            if (!sol) sol = find_ep3(big);
            fam.solutions.push_back(*sol);
        } catch (const Error& e) {
            fam.failure = e.what();
            fam.failed_big_gamma = big;
            break;
        }
    }
    for (std::size_t i = 1; i < fam.solutions.size(); ++i) {
        if (!(fam.solutions[i].gamma > fam.solutions[i - 1].gamma)) fam.gamma_increasing = false;
        if (!(fam.solutions[i].b < fam.solutions[i - 1].b)) fam.b_decreasing = false;
    }
    return fam;
}

/// Point on the symmetric approach to an EP3: gamma = gamma_EP3 - delta, with b
/// re-tuned so that the inflection point of f is itself a root. Along this path
/// the three real eigenvalues stay real and merge as delta -> 0.
struct ApproachPoint {
    SystemParams params;
    double inflection_k = 0.0;
};

inline ApproachPoint centered_approach(const EP3Solution& ep3, double delta) {
    if (!(delta >= 0.0) || !(delta < ep3.gamma))
        throw InvalidArgument("centered_approach: need 0 <= delta < gamma_EP3");
    if (delta == 0.0) return {ep3.params(), ep3.k};

    auto solve_at = [&](double d, double b0, double k0) -> std::optional<std::pair<double, double>> {
        const double g = ep3.gamma - d;
        detail::SystemN<2> eval = [&](const Eigen::Vector2d& x, Eigen::Vector2d& f, Eigen::Vector2d& s, Eigen::Matrix2d& jac) {
            const double b = x(0), k = x(1);
            if (!(b > 0.0) || !(k > 0.0)) return false;
            const SystemParams p{g, b, ep3.big_gamma};
            f(0) = secular_derivative(k, p, 0);
            f(1) = secular_derivative(k, p, 2);
            s(0) = std::max(secular_scale(k, p, 0), 1e-300);
            s(1) = std::max(secular_scale(k, p, 2), 1e-300);
            jac(0, 0) = secular_partial_b(k, p, 0);
            jac(0, 1) = secular_derivative(k, p, 1);
            jac(1, 0) = secular_partial_b(k, p, 2);
            jac(1, 1) = secular_derivative(k, p, 3);
            return f.allFinite() && jac.allFinite();
        };
        const auto out = detail::damped_newton<2>(eval, Eigen::Vector2d(b0, k0), 100);
        if (out.scaled.maxCoeff() > 1e-12) return std::nullopt;
        return std::make_pair(out.x(0), out.x(1));
    };

    // geometric march outward from the EP3
    std::vector<double> deltas{delta};
    while (deltas.back() > 1e-9 * std::max(ep3.gamma, 1e-3)) deltas.push_back(deltas.back() / 2.0);
    std::reverse(deltas.begin(), deltas.end());
    double b = ep3.b, k = ep3.k;
    for (double d : deltas) {
        const auto sol = solve_at(d, b, k);
        if (!sol) throw NonConvergence("centered_approach: re-tuning b failed");
        b = sol->first;
        k = sol->second;
    }
    return {SystemParams{ep3.gamma - delta, b, ep3.big_gamma}, k};
}

} // namespace triwell
