#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include "triwell/secular.hpp"
#include "triwell/types.hpp"

namespace triwell {

/// Roots closer than this are reported as near-degenerate.
inline constexpr double kNearDegenerate = 1e-8;

struct RealRootOptions {
    double k_max = 0.0; ///< upper end of the scan; <= 0 selects max(1, Gamma)
    double k_min = 1e-6;
    double step = 1e-4;
};

/// All real roots in (k_min, k_max), ascending: sign-change scan followed by
/// bracketed refinement.
inline std::vector<double> find_real_roots(const SystemParams& p, RealRootOptions opt = {}) {
    p.validate();
    const double k_max = opt.k_max > 0.0 ? opt.k_max : std::max(1.0, p.big_gamma);
    if (!(opt.step > 0.0) || !(opt.k_min > 0.0) || !(k_max > opt.k_min))
        throw InvalidArgument("find_real_roots: invalid scan interval");

    auto f = [&p](double k) { return detail::secular_closed_form(k, p); };
    const auto n = static_cast<std::size_t>(std::ceil((k_max - opt.k_min) / opt.step));
    std::vector<double> roots;

    double k_prev = opt.k_min;
    double f_prev = f(k_prev);
    for (std::size_t i = 1; i <= n; ++i) {
        const double k = std::min(k_max, opt.k_min + static_cast<double>(i) * opt.step);
        const double fk = f(k);
        if (f_prev == 0.0) {
            roots.push_back(k_prev);
        } else if (fk != 0.0 && std::signbit(fk) != std::signbit(f_prev)) {
            boost::math::tools::eps_tolerance<double> tol(52);
            std::uintmax_t iters = 200;
            const auto [lo, hi] = boost::math::tools::toms748_solve(f, k_prev, k, f_prev, fk, tol, iters);
            roots.push_back(0.5 * (lo + hi));
        }
        k_prev = k;
        f_prev = fk;
    }
    if (f_prev == 0.0) roots.push_back(k_prev);
    return roots;
}

/// Decoupled-well eigenvalues Gamma/2 and (1 +- i gamma)/2, the natural Newton seeds.
inline std::vector<cplx> decoupled_seeds(const SystemParams& p) {
    return {cplx(0.5 * p.big_gamma, 0.0), cplx(0.5, 0.5 * p.gamma), cplx(0.5, -0.5 * p.gamma)};
}

struct SeedFailure {
    cplx seed;
    std::string reason;
};

struct ComplexRootReport {
    std::vector<ComplexK> roots;
    std::vector<SeedFailure> failures;
};

namespace detail {

inline bool contains_root(const std::vector<ComplexK>& roots, cplx k) {
    return std::any_of(roots.begin(), roots.end(), [&](const ComplexK& r) {
        return std::abs(r.value() - k) <= kNearDegenerate * std::max(1.0, std::abs(k));
    });
}

// Damped Newton on the complex secular function. Returns false on failure.
inline bool newton_complex(const SystemParams& p, cplx seed, cplx& out, std::string& why) {
    cplx k = seed;
    cplx fk = secular_derivative(k, p, 0);
    for (int it = 0; it < 100; ++it) {
        const cplx d = secular_derivative(k, p, 1);
        if (d == cplx(0.0)) {
            why = "zero derivative";
            return false;
        }
        cplx step = fk / d;
        double lambda = 1.0;
        cplx k_new = k - step;
        cplx f_new = secular_derivative(k_new, p, 0);
        while (std::abs(f_new) > std::abs(fk) && lambda > 1e-6) {
            lambda *= 0.5;
            k_new = k - lambda * step;
            f_new = secular_derivative(k_new, p, 0);
        }
        const double dk = std::abs(k_new - k);
        k = k_new;
        fk = f_new;
        if (dk <= 4e-16 * std::max(1.0, std::abs(k)) || fk == cplx(0.0)) break;
    }
    if (!(k.real() > 0.0)) {
        why = "converged to Re(k) <= 0";
        return false;
    }
    if (std::abs(k) < 1e-6) {
        why = "converged to the trivial zero at k = 0";
        return false;
    }
    if (scaled_residual(k, p, 0) > kRootTolerance) {
        why = "no convergence within 100 iterations";
        return false;
    }
    // snap numerically real roots onto the axis
    if (std::abs(k.imag()) <= 1e-10 * std::abs(k) &&
        scaled_residual(cplx(k.real(), 0.0), p, 0) <= kRootTolerance)
        k = cplx(k.real(), 0.0);
    out = k;
    return true;
}

} // namespace detail

/// Newton iteration from each seed; converged roots are deduplicated and
/// non-real roots are completed by their conjugates.
inline ComplexRootReport find_complex_roots(const SystemParams& p, std::span<const cplx> seeds) {
    p.validate();
    if (seeds.empty()) throw InvalidArgument("find_complex_roots: no seeds");
    ComplexRootReport rep;
    for (const cplx& s : seeds) {
        cplx k;
        std::string why;
        if (!detail::newton_complex(p, s, k, why)) {
            rep.failures.push_back({s, why});
            continue;
        }
        if (!detail::contains_root(rep.roots, k)) rep.roots.emplace_back(k);
        if (k.imag() != 0.0 && !detail::contains_root(rep.roots, std::conj(k)))
            rep.roots.emplace_back(std::conj(k));
    }
    return rep;
}

inline ComplexRootReport find_complex_roots(const SystemParams& p) {
    const auto seeds = decoupled_seeds(p);
    return find_complex_roots(p, seeds);
}

struct SpectrumResult {
    SystemParams params;
    std::vector<ComplexK> roots;   ///< descending Re(k), then descending Im(k)
    std::vector<double> residuals; ///< scaled secular residual per root
    bool near_degenerate = false;
    std::vector<int> branch_ids;   ///< branch labels, filled by sweeps
    bool tracking_ambiguous = false;

    std::size_t real_count() const {
        return static_cast<std::size_t>(
            std::count_if(roots.begin(), roots.end(), [](const ComplexK& k) { return k.im() == 0.0; }));
    }
};

namespace detail {

inline SpectrumResult assemble_spectrum(const SystemParams& p, std::vector<ComplexK> roots) {
    std::sort(roots.begin(), roots.end(), [](const ComplexK& a, const ComplexK& b) {
        if (a.re() != b.re()) return a.re() > b.re();
        return a.im() > b.im();
    });
    SpectrumResult res;
    res.params = p;
    for (const auto& k : roots) res.residuals.push_back(scaled_residual(k.value(), p, 0));
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i].value() - roots[j].value()) <= kNearDegenerate)
                res.near_degenerate = true;
    res.roots = std::move(roots);
    return res;
}

inline std::vector<ComplexK> merge_roots(const std::vector<double>& real_roots,
                                         const std::vector<ComplexK>& complex_roots) {
    std::vector<ComplexK> all;
    for (double k : real_roots) all.emplace_back(k);
    for (const auto& k : complex_roots)
        if (k.im() != 0.0 && !contains_root(all, k.value())) all.push_back(k);
    return all;
}

} // namespace detail

/// Real roots from the scan together with complex roots grown from the given
/// seeds (decoupled-limit seeds when none are given).
inline SpectrumResult solve_spectrum(const SystemParams& p, std::span<const cplx> seeds = {},
                                     RealRootOptions opt = {}) {
    const auto real_roots = find_real_roots(p, opt);
    const auto defaults = decoupled_seeds(p);
    const auto rep = find_complex_roots(p, seeds.empty() ? std::span<const cplx>(defaults) : seeds);
    return detail::assemble_spectrum(p, detail::merge_roots(real_roots, rep.roots));
}

/// Spectra along an ascending gamma grid. Each step is seeded from the previous
/// roots (nudged off the real axis so pairs can leave it) and branch labels are
/// carried over by nearest-neighbour matching.
inline std::vector<SpectrumResult> sweep_gamma(const SystemParams& p0, std::span<const double> gamma_grid,
                                               RealRootOptions opt = {}) {
    if (gamma_grid.empty()) throw InvalidArgument("sweep_gamma: empty grid");
    for (std::size_t i = 1; i < gamma_grid.size(); ++i)
        if (!(gamma_grid[i] > gamma_grid[i - 1]))
            throw InvalidArgument("sweep_gamma: grid must be strictly ascending");

    std::vector<SpectrumResult> out;
    int next_id = 0;
    for (std::size_t s = 0; s < gamma_grid.size(); ++s) {
        const SystemParams p = p0.with_gamma(gamma_grid[s]);
        SpectrumResult cur;
        if (s == 0) {
            cur = solve_spectrum(p, {}, opt);
            for (std::size_t i = 0; i < cur.roots.size(); ++i) cur.branch_ids.push_back(next_id++);
        } else {
            const SpectrumResult& prev = out.back();
            std::vector<cplx> seeds;
            for (const auto& k : prev.roots) {
                seeds.push_back(k.value());
                if (k.im() == 0.0) {
                    seeds.push_back(k.value() + cplx(0.0, 1e-4));
                    seeds.push_back(k.value() - cplx(0.0, 1e-4));
                }
            }
            for (const auto& s0 : decoupled_seeds(p)) seeds.push_back(s0);
            cur = solve_spectrum(p, seeds, opt);

            // greedy matching by increasing distance
            struct Pair {
                double d;
                std::size_t i, j;
            };
            std::vector<Pair> pairs;
            for (std::size_t i = 0; i < prev.roots.size(); ++i)
                for (std::size_t j = 0; j < cur.roots.size(); ++j)
                    pairs.push_back({std::abs(prev.roots[i].value() - cur.roots[j].value()), i, j});
            std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
            cur.branch_ids.assign(cur.roots.size(), -1);
            std::vector<bool> used(prev.roots.size(), false);
            for (const auto& pr : pairs) {
                if (used[pr.i] || cur.branch_ids[pr.j] >= 0) continue;
                used[pr.i] = true;
                cur.branch_ids[pr.j] = prev.branch_ids[pr.i];
            }
            for (auto& id : cur.branch_ids)
                if (id < 0) id = next_id++;
        }
        cur.tracking_ambiguous = cur.near_degenerate;
        out.push_back(std::move(cur));
    }
    return out;
}

} // namespace triwell
