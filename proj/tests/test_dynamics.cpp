#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"

using namespace triwell;

namespace {

const SystemParams kTriple{0.0, 6.1, 1.002};
const SystemParams kNearEp3{0.065, 6.2075, 1.002};

std::span<const Mode, 3> three(const std::vector<Mode>& m) { return std::span<const Mode, 3>(m.data(), 3); }

// time indices of the local maxima of the x-maximum envelope
std::vector<std::size_t> envelope_peaks(const IntensityField& f) {
    std::vector<double> env(f.t_grid.size(), 0.0);
    for (std::size_t it = 0; it < f.t_grid.size(); ++it)
        for (std::size_t ix = 0; ix < f.x_grid.size(); ++ix) env[it] = std::max(env[it], f.at(it, ix));
    std::vector<std::size_t> peaks;
    for (std::size_t it = 1; it + 1 < env.size(); ++it)
        if (env[it] > env[it - 1] && env[it] >= env[it + 1]) peaks.push_back(it);
    return peaks;
}

IntensityField gaussian_run(const SystemParams& p, Well w, std::span<const double> t, std::span<const double> x) {
    const auto modes = oracle::real_modes(p);
    const auto c = project_initial(InitialCondition::gaussian(w), three(modes), p);
    return evolve(modes, c, p, t, x);
}

} // namespace

TEST(Project, CoefficientVectorPassesThrough) {
    const auto modes = oracle::real_modes(kTriple);
    const std::array<cplx, 3> c{cplx(1), cplx(0), cplx(0)};
    EXPECT_EQ(project_initial(InitialCondition::coefficients(c), three(modes), kTriple), c);
}

TEST(Project, ModeProjectsOntoItself) {
    const SystemParams p{0.03, 6.1, 1.002};
    const auto modes = oracle::real_modes(p);
    const PiecewiseWavefunction w0(modes[0], p);
    const auto c = project_function([&](double x) { return w0(x); }, three(modes), p, -40 * p.b, 40 * p.b);
    EXPECT_LT(std::abs(c[0] / modes[0].c_norm - 1.0), 1e-8);
    EXPECT_LT(std::abs(c[1] / modes[1].c_norm), 1e-8);
    EXPECT_LT(std::abs(c[2] / modes[2].c_norm), 1e-8);
}

TEST(Project, GaussianMatchesQuadratureOracle) {
    const SystemParams p{0.03, 6.1, 1.002};
    const auto modes = oracle::real_modes(p);
    const auto c = project_initial(InitialCondition::gaussian(Well::Left, 0.7), three(modes), p);
    for (int i = 0; i < 3; ++i) {
        const PiecewiseWavefunction wf(modes[i], p);
        const cplx ref = oracle::integrate(
            [&](double x) { return wf(x) * std::exp(-0.5 * (x + p.b) * (x + p.b) / 0.49); }, -60, 60, p.b);
        EXPECT_LT(std::abs(c[i] - ref), 1e-8 * std::abs(ref)) << i;
    }
}

TEST(Project, HermitianLeftRightMirror) {
    const auto modes = oracle::real_modes(kTriple);
    const auto left = project_initial(InitialCondition::gaussian(Well::Left), three(modes), kTriple);
    const auto right = project_initial(InitialCondition::gaussian(Well::Right), three(modes), kTriple);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(left[i]), std::abs(right[i]), 1e-10);
    // the two outer-pair modes pick up comparable weight from the left well
    EXPECT_NEAR(std::abs(left[0]) / std::abs(left[2]), 1.0, 0.1);
    // the middle-well Gaussian does not excite the odd mode
    const auto mid = project_initial(InitialCondition::gaussian(Well::Middle), three(modes), kTriple);
    EXPECT_LT(std::abs(mid[1]), 1e-12);
}

TEST(Project, Validation) {
    const auto modes = oracle::real_modes(kTriple);
    EXPECT_THROW(project_initial(InitialCondition::gaussian(Well::Left, 0.0), three(modes), kTriple), InvalidArgument);
    EXPECT_THROW(project_initial(InitialCondition::coefficients({}), three(modes), kTriple), InvalidArgument);
    auto tiny = modes;
    tiny[1].c_norm = 1e-13;
    EXPECT_THROW(project_initial(InitialCondition::gaussian(Well::Left), three(tiny), kTriple), NormTooSmall);
}

TEST(Evolve, SingleModeIsStationary) {
    const SystemParams p{0.03, 6.1, 1.002};
    const auto modes = oracle::real_modes(p);
    const std::vector<cplx> c{cplx(0), cplx(1), cplx(0)};
    const auto t = linspace(0, 5000, 101);
    const auto x = linspace(-15, 15, 61);
    const auto f = evolve(modes, c, p, t, x);
    for (std::size_t ix = 0; ix < x.size(); ++ix) {
        double lo = f.at(0, ix), hi = lo;
        for (std::size_t it = 0; it < t.size(); ++it) {
            lo = std::min(lo, f.at(it, ix));
            hi = std::max(hi, f.at(it, ix));
        }
        EXPECT_LE(hi - lo, 1e-10 * std::max(hi, 1e-300));
    }
}

TEST(Evolve, HermitianNormConserved) {
    const auto modes = oracle::real_modes(kTriple);
    const auto c = project_initial(InitialCondition::gaussian(Well::Left), three(modes), kTriple);
    std::array<PiecewiseWavefunction, 3> wf{PiecewiseWavefunction(modes[0], kTriple),
                                            PiecewiseWavefunction(modes[1], kTriple),
                                            PiecewiseWavefunction(modes[2], kTriple)};
    auto norm_at = [&](double t) {
        auto psi = [&](double x) {
            cplx acc = 0.0;
            for (int i = 0; i < 3; ++i) {
                const double k = modes[i].k.re();
                acc += c[i] * wf[i](x) / modes[i].c_norm * std::exp(cplx(0, k * k * t));
            }
            return cplx(std::norm(acc));
        };
        return oracle::integrate(psi, -40 * kTriple.b, 40 * kTriple.b, kTriple.b).real();
    };
    const double n0 = norm_at(0.0);
    for (double t : {17.0, 101.0, 333.3}) EXPECT_NEAR(norm_at(t), n0, 1e-8 * n0) << t;
}

TEST(Evolve, BoundedForRealSpectrum) {
    const SystemParams p{0.05, 6.1, 1.002};
    const auto modes = oracle::real_modes(p);
    const auto c = project_initial(InitialCondition::gaussian(Well::Right), three(modes), p);
    const auto x = linspace(-10, 10, 41);
    const auto f = evolve(modes, c, p, linspace(0, 2e5, 401), x);
    for (std::size_t ix = 0; ix < x.size(); ++ix) {
        double bound = 0.0;
        for (int i = 0; i < 3; ++i) bound += std::abs(c[i] / modes[i].c_norm * eval_wavefunction(modes[i], p, x[ix]));
        for (std::size_t it = 0; it < f.t_grid.size(); ++it) EXPECT_LE(f.at(it, ix), bound * bound * (1 + 1e-12));
    }
}

TEST(Evolve, LinearInCoefficients) {
    const SystemParams p{0.04, 6.1, 1.002};
    const auto modes = oracle::real_modes(p);
    oracle::Rng rng(99);
    const auto t = linspace(0, 300, 13);
    const auto x = linspace(-12, 12, 17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> u(3), v(3), w(3);
        const cplx a(rng.uniform(-2, 2), rng.uniform(-2, 2));
        for (int i = 0; i < 3; ++i) {
            u[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
            v[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
            w[i] = a * u[i] + v[i];
        }
        const auto pu = evolve_amplitude(modes, u, p, t, x);
        const auto pv = evolve_amplitude(modes, v, p, t, x);
        const auto pw = evolve_amplitude(modes, w, p, t, x);
        for (std::size_t i = 0; i < pw.size(); ++i)
            EXPECT_LE(std::abs(pw[i] - (a * pu[i] + pv[i])), 1e-10 * (1 + std::abs(pw[i])));
    }
}

TEST(Evolve, NearEp3PeakFarAboveHermitian) {
    auto peak = [](const SystemParams& p) {
        const auto modes = oracle::real_modes(p);
        const auto c = project_initial(InitialCondition::gaussian(Well::Left), three(modes), p);
        const double beat = beat_period(modes);
        return evolve(modes, c, p, default_t_grid(beat), default_x_grid(p)).max();
    };
    const double herm = peak(kTriple), mid = peak(kTriple.with_gamma(0.06)), near = peak(kNearEp3);
    EXPECT_GT(mid, herm);
    EXPECT_GE(near / herm, 1e2);
}

TEST(Evolve, NearEp3PatternIndependentOfInitialCondition) {
    const EP3Solution s = find_ep3(1.002);
    const SystemParams p = centered_approach(s, 1e-4).params;
    const auto modes = oracle::real_modes(p);
    ASSERT_EQ(modes.size(), 3u);
    const auto t = default_t_grid(beat_period(modes));
    const auto x = default_x_grid(p);
    const auto pa = envelope_peaks(gaussian_run(p, Well::Left, t, x));
    const auto pb = envelope_peaks(gaussian_run(p, Well::Middle, t, x));
    ASSERT_FALSE(pa.empty());
    ASSERT_EQ(pa.size(), pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i)
        EXPECT_LE(std::abs(static_cast<long>(pa[i]) - static_cast<long>(pb[i])), 1) << i;
}

TEST(Evolve, GridAndNormChecks) {
    const auto modes = oracle::real_modes(kTriple);
    const std::vector<cplx> c{1, 0, 0};
    const std::vector<double> empty, one{0.0};
    EXPECT_THROW(evolve(modes, c, kTriple, empty, one), InvalidArgument);
    EXPECT_THROW(evolve(modes, c, kTriple, one, empty), InvalidArgument);
    EXPECT_THROW(evolve(modes, std::vector<cplx>{1, 0}, kTriple, one, one), InvalidArgument);
    auto tiny = modes;
    tiny[0].c_norm = 5e-13;
    EXPECT_THROW(evolve(tiny, c, kTriple, one, one), NormTooSmall);
    const auto f = evolve(modes, c, kTriple, one, one);
    EXPECT_EQ(f.values.size(), 1u);
    EXPECT_GE(f.values[0], 0.0);
}

TEST(Beat, EqualSpacing) {
    std::vector<Mode> modes(3);
    const double d = 0.01;
    for (int i = 0; i < 3; ++i) modes[i].k = ComplexK(std::sqrt(0.25 + i * d));
    EXPECT_NEAR(beat_period(modes), 2 * std::numbers::pi / d, 1e-9);
}

TEST(Beat, GrowsTowardEp3) {
    const std::vector<double> grid{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06};
    double prev = 0.0;
    for (double g : grid) {
        const double bp = beat_period(oracle::real_modes(kTriple.with_gamma(g)));
        EXPECT_GT(bp, prev) << g;
        prev = bp;
    }
    const EP3Solution s = find_ep3(1.002);
    prev = 0.0;
    for (double d : {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}) {
        const double bp = beat_period(oracle::real_modes(centered_approach(s, d).params));
        EXPECT_GT(bp, prev) << d;
        prev = bp;
    }
    const double herm = beat_period(oracle::real_modes(kTriple));
    EXPECT_GT(beat_period(oracle::real_modes(kTriple.with_gamma(0.06))), 2 * herm);
}

TEST(Beat, Errors) {
    std::vector<Mode> modes = oracle::real_modes(kTriple);
    EXPECT_THROW(beat_period(std::span<const Mode>(modes.data(), 1)), InvalidArgument);
    modes[0].k = ComplexK(0.5, 0.01);
    EXPECT_THROW(beat_period(modes), InvalidArgument);
}

TEST(Grids, Defaults) {
    const auto x = default_x_grid(kTriple);
    EXPECT_EQ(x.size(), 601u);
    EXPECT_DOUBLE_EQ(x.front(), -16.1);
    EXPECT_DOUBLE_EQ(x.back(), 16.1);
    const auto t = default_t_grid(10.0);
    EXPECT_EQ(t.size(), 601u);
    EXPECT_DOUBLE_EQ(t.back(), 30.0);
    EXPECT_EQ(linspace(1, 2, 1), std::vector<double>{1.0});
    EXPECT_TRUE(linspace(1, 2, 0).empty());
}
