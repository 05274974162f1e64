// Walks the spectrum toward the EP3 at Gamma = 1.002 and prints what happens:
// three real eigenvalues at b = 6.1, their coalescence at the tuned b, and
// the growth of the beat period and of the intensity as the c-norms vanish.

#include <cstdio>
#include <vector>

#include "triwell/triwell.hpp"

using namespace triwell;

namespace {

std::vector<Mode> real_modes(const SystemParams& p) {
    const auto roots = find_real_roots(p);
    std::vector<Mode> m;
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) m.push_back(mode_for_root(*it, p));
    return m;
}

double peak_intensity(const SystemParams& p, const std::vector<Mode>& modes) {
    const auto c = project_initial(InitialCondition::gaussian(Well::Left), std::span<const Mode, 3>(modes.data(), 3), p);
    return evolve(modes, c, p, default_t_grid(beat_period(modes)), default_x_grid(p)).max();
}

} // namespace

int main() {
    const SystemParams base{0.0, 6.1, 1.002};
    std::printf("gamma sweep at b = %.4g, Gamma = %.4g\n", base.b, base.big_gamma);
    std::printf("%8s %12s %12s %12s %12s\n", "gamma", "k1", "k2", "k3", "beat");
    std::vector<double> grid;
    for (int i = 0; i <= 6; ++i) grid.push_back(0.01 * i);
    for (const auto& s : sweep_gamma(base, grid)) {
        std::printf("%8.3f", s.params.gamma);
        for (const auto& k : s.roots) std::printf(" %12.8f", k.re());
        std::printf(" %12.2f\n", beat_period(real_modes(s.params)));
    }

    const EP3Solution ep3 = find_ep3(1.002, kEp3AnchorGuess);
    std::printf("\nEP3: gamma = %.6f  b = %.6f  k = %.6f  (%d Newton steps)\n", ep3.gamma, ep3.b, ep3.k,
                ep3.iterations);

    std::printf("\napproach with b re-tuned\n%10s %10s %12s %12s %12s\n", "delta", "b", "spread", "|c-norm|", "peak");
    for (double d : {1e-2, 1e-3, 1e-4}) {
        const auto a = centered_approach(ep3, d);
        const auto modes = real_modes(a.params);
        const double spread = modes.front().k.re() - modes.back().k.re();
        std::printf("%10.0e %10.6f %12.4e %12.4e %12.4e\n", d, a.params.b, spread, std::abs(modes[1].c_norm),
                    peak_intensity(a.params, modes));
    }

    std::printf("\nEP3 family\n%8s %10s %10s %10s\n", "Gamma", "gamma", "b", "k");
    const Ep3Family fam = trace_ep3_family(1.002, 1.11, 7);
    for (const auto& s : fam.solutions) std::printf("%8.4f %10.6f %10.6f %10.6f\n", s.big_gamma, s.gamma, s.b, s.k);
    return 0;
}
