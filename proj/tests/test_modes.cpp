#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace triwell;

namespace {

const SystemParams kTriple{0.0, 6.1, 1.002};

double k2_at(const SystemParams& p) { return find_real_roots(p).at(1); }

} // namespace

TEST(ModeCoefficients, HermitianLargestRootIsSymmetric) {
    const double k1 = find_real_roots(kTriple).back();
    const Mode m = mode_coefficients(k1, kTriple);
    EXPECT_EQ(m.r, cplx(1.0));
    EXPECT_NEAR(m.rho1.imag(), 0.0, 1e-15);
    EXPECT_NEAR(m.rho2.imag(), 0.0, 1e-15);
    EXPECT_NEAR((m.rho1 + m.rho2).real(), 0.0, 1e-12);
}

TEST(ModeCoefficients, NullSpaceResidualForAllRoots) {
    const SystemParams p{0.02, 6.1, 1.002};
    const auto roots = find_real_roots(p);
    ASSERT_EQ(roots.size(), 3u);
    for (double k : roots) EXPECT_LE(null_space_residual(mode_coefficients(k, p), p), 1e-10) << k;
}

TEST(ModeCoefficients, ComplexRootsToo) {
    const SystemParams p{0.1, 6.1, 1.002};
    for (const auto& k : solve_spectrum(p).roots) EXPECT_LE(null_space_residual(mode_coefficients(k, p), p), 1e-10);
}

TEST(ModeCoefficients, OuterAmplitudesMatchInnerBranches) {
    const SystemParams p{0.04, 5.0, 1.05};
    for (double k : find_real_roots(p)) {
        const Mode m = mode_coefficients(k, p);
        const PiecewiseWavefunction wf(m, p);
        EXPECT_LT(std::abs(m.a_coef * std::exp(-k * p.b) - wf.branch_value(Region::InnerLeft, -p.b)), 1e-10);
        EXPECT_LT(std::abs(m.b_coef * std::exp(-k * p.b) - wf.branch_value(Region::InnerRight, p.b)), 1e-10);
    }
}

TEST(ModeCoefficients, NotARootThrows) {
    EXPECT_THROW(mode_coefficients(0.3, kTriple), InvalidArgument);
}

TEST(ModeCoefficients, DegenerateSecondModeThrows) {
    const double k2 = second_eigenvalue_gamma0(6.1);
    EXPECT_THROW(mode_coefficients(k2, kTriple), DegenerateCoefficients);
    EXPECT_THROW(mode_coefficients(k2, kTriple.with_gamma(5e-7)), DegenerateCoefficients);
    EXPECT_NO_THROW(mode_for_root(k2, kTriple));
}

TEST(ModeCoefficients, NearEp3ModesNearlyEqual) {
    const SystemParams p{0.065, 6.2075, 1.002};
    const auto modes = oracle::real_modes(p);
    ASSERT_EQ(modes.size(), 3u);
    for (std::size_t i = 1; i < 3; ++i) {
        EXPECT_LT(std::abs(modes[i].rho1 - modes[0].rho1), 0.01 * std::abs(modes[0].rho1));
        EXPECT_LT(std::abs(modes[i].rho2 - modes[0].rho2), 0.01 * std::abs(modes[0].rho2));
    }
    // pointwise the modes still differ by several percent at this distance
    for (double x : {-p.b, -0.5 * p.b, p.b}) {
        const double ref = std::abs(eval_wavefunction(modes[0], p, x));
        for (std::size_t i = 1; i < 3; ++i)
            EXPECT_LT(std::abs(eval_wavefunction(modes[i], p, x) - eval_wavefunction(modes[0], p, x)), 0.15 * ref);
    }
}

TEST(ModeGamma0, LimitVector) {
    const double k2 = second_eigenvalue_gamma0(6.1);
    const Mode m = mode_coefficients_gamma0(k2, kTriple);
    EXPECT_EQ(m.r, cplx(0.0));
    EXPECT_EQ(m.rho1, m.rho2);
    EXPECT_EQ(m.rho1.real(), 0.0);
    EXPECT_NEAR(m.rho1.imag(), -(1 - 2 * k2) / k2, 1e-15);
    EXPECT_LE(null_space_residual(m, kTriple), 1e-12);
}

TEST(ModeGamma0, LimitFromSmallGammaExtrapolation) {
    // gamma * rho(gamma) is linear in gamma to leading order; one Richardson
    // step cancels it
    const double k2 = second_eigenvalue_gamma0(6.1);
    const Mode lim = mode_coefficients_gamma0(k2, kTriple);
    auto scaled = [&](double g) {
        const SystemParams p = kTriple.with_gamma(g);
        const Mode m = mode_coefficients(k2_at(p), p);
        return std::array<cplx, 3>{g * m.r, g * m.rho1, g * m.rho2};
    };
    const auto a = scaled(1e-4), b = scaled(5e-5);
    const std::array<cplx, 3> want{lim.r, lim.rho1, lim.rho2};
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(2.0 * b[i] - a[i] - want[i]), 1e-6) << i;
}

TEST(ModeGamma0, BIdentityAndRejection) {
    const double k2 = second_eigenvalue_gamma0(6.1);
    EXPECT_NEAR(-std::log(1 - 2 * k2) / (2 * k2), kTriple.b, 1e-12);
    EXPECT_THROW(mode_coefficients_gamma0(0.45, kTriple), InvalidArgument);
    EXPECT_THROW(mode_coefficients_gamma0(k2, kTriple.with_gamma(0.01)), InvalidArgument);
}

TEST(ModeGamma0, ExpansionAtFixedSecondRoot) {
    // with k held at the gamma = 0 root the expansion is exact
    const double k2 = second_eigenvalue_gamma0(6.1);
    for (double g : {1e-3, 1e-4}) {
        const SystemParams p = kTriple.with_gamma(g);
        const Mode m = mode_coefficients(k2, p);
        const cplx lead(0.0, -(1 - 2 * k2) / (g * k2));
        EXPECT_NEAR((m.rho1 - lead).real(), (1 - k2) / k2, 1e-10);
        EXPECT_NEAR((m.rho2 - lead).real(), -(1 - k2) / k2, 1e-10);
        EXPECT_NEAR(std::abs(m.rho1 - m.rho2), 2 * (1 - k2) / k2, 1e-10);
    }
}

TEST(ModeGamma0, ExpansionAtShiftedRoot) {
    // the gamma-dependent root shift adds a small constant to the O(1) term
    const double k2 = second_eigenvalue_gamma0(6.1);
    for (double g : {1e-3, 1e-4, 1e-5}) {
        const SystemParams p = kTriple.with_gamma(g);
        const Mode m = mode_coefficients(k2_at(p), p);
        const cplx lead(0.0, -(1 - 2 * k2) / (g * k2));
        EXPECT_NEAR((m.rho1 - lead).real(), (1 - k2) / k2, 1e-3);
        EXPECT_NEAR((m.rho2 - lead).real(), -(1 - k2) / k2, 1e-3);
        EXPECT_NEAR((m.rho1 - lead).imag(), 0.0, 0.05 * g);
    }
}

TEST(ModePhase, PsiAtOriginRealPositive) {
    const SystemParams p{0.03, 6.1, 1.002};
    for (const Mode& m : oracle::real_modes(p)) {
        const cplx v = eval_wavefunction(m, p, 0.0);
        EXPECT_EQ(v, 2.0 * m.r);
        EXPECT_GT(v.real(), 0.0);
        EXPECT_EQ(v.imag(), 0.0);
    }
}
