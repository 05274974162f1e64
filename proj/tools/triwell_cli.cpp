// triwell: command-line front end for the three-well model.
//
//   triwell spectrum  --b 6.1 --big-gamma 1.002 --gamma 0:0.06:0.01
//   triwell modes     --gamma 0.02 --b 6.1 --big-gamma 1.002
//   triwell evolve    --gamma 0.06 --b 6.1 --big-gamma 1.002 --ic left
//   triwell find-ep3  --big-gamma 1.002 [--trace 1.002:1.11:20]
//   triwell waveguide --n0 3.3 --delta-n 1e-3 --lambda0 1.55 --a 5
//
// Exit codes: 0 ok, 2 usage or invalid input, 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "triwell/triwell.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace triwell;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    std::string format = "csv";
    std::string out = ".";
    bool quiet = false;
    std::string config;
};

struct ModelOpts {
    double b = 0.0;
    double big_gamma = 0.0;
};

struct SpectrumOpts {
    ModelOpts m;
    std::string gamma;
    double k_max = 0.0;
};

struct ModesOpts {
    ModelOpts m;
    double gamma = 0.0;
    std::string x;
    bool c_normalize = false;
};

struct EvolveOpts {
    ModelOpts m;
    double gamma = 0.0;
    std::string ic = "left";
    double width = 1.0;
    std::string coeffs;
    std::string coeffs_im;
    std::string t;
    std::string x;
};

struct Ep3Opts {
    std::optional<double> big_gamma;
    std::string guess;
    std::string guess_json;
    std::string trace;
};

struct WaveguideOpts {
    WaveguideSpec spec;
    std::optional<double> k;
    double k_im = 0.0;
    std::optional<double> big_gamma;
    std::optional<double> delta_n_mid;
    std::optional<double> b;
};

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json params_json(const SystemParams& p) { return {{"gamma", p.gamma}, {"b", p.b}, {"big_gamma", p.big_gamma}}; }

class Output {
public:
    explicit Output(const Globals& g) : g_(g), dir_(g.out) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw InvalidArgument("cannot create output directory " + dir_.string());
    }

    bool json_format() const { return g_.format == "json"; }

    fs::path write(const std::string& name, const std::string& content) const {
        const fs::path p = dir_ / name;
        io::write_atomic(p, content);
        if (!g_.quiet) std::cout << "wrote " << p.string() << '\n';
        return p;
    }

    fs::path write_json(const std::string& name, const json& j) const { return write(name, j.dump(2) + "\n"); }

    void note(const std::string& s) const {
        if (!g_.quiet) std::cout << s << '\n';
    }

private:
    const Globals& g_;
    fs::path dir_;
};

std::vector<double> split_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InvalidArgument(what + ": not a number list: '" + s + "'");
        }
    }
    return out;
}

std::vector<double> grid_or(const std::string& text, std::vector<double> fallback) {
    return text.empty() ? fallback : io::parse_range(text);
}

std::vector<Mode> modes_for(const SystemParams& p, SpectrumResult& sp) {
    sp = solve_spectrum(p);
    for (double r : sp.residuals)
        if (!(r <= kRootTolerance)) throw NonConvergence("root refinement failed (residual " + io::fmt(r) + ")");
    std::vector<Mode> modes;
    for (const auto& k : sp.roots) modes.push_back(mode_for_root(k, p));
    return modes;
}

int cmd_spectrum(const SpectrumOpts& o, const Output& out) {
    const auto grid = io::parse_range(o.gamma);
    const SystemParams p0{grid.front(), o.m.b, o.m.big_gamma};
    p0.validate();
    RealRootOptions opt;
    opt.k_max = o.k_max;
    const auto sweep = sweep_gamma(p0, grid, opt);

    io::CsvWriter csv({"gamma", "root_index", "re_k", "im_k", "residual"});
    json rows = json::array();
    std::size_t n = 0;
    for (const auto& s : sweep) {
        for (std::size_t i = 0; i < s.roots.size(); ++i) {
            if (!(s.residuals[i] <= kRootTolerance))
                throw NonConvergence("root at gamma=" + io::fmt(s.params.gamma) + " failed to converge");
            csv.row({s.params.gamma, static_cast<double>(i), s.roots[i].re(), s.roots[i].im(), s.residuals[i]});
            rows.push_back({{"gamma", s.params.gamma}, {"root_index", i}, {"re_k", s.roots[i].re()},
                            {"im_k", s.roots[i].im()}, {"residual", s.residuals[i]}, {"branch", s.branch_ids[i]},
                            {"near_degenerate", s.near_degenerate}});
            ++n;
        }
    }
    if (out.json_format())
        out.write_json("spectrum.json", {{"b", o.m.b}, {"big_gamma", o.m.big_gamma}, {"rows", rows}});
    else
        out.write("spectrum.csv", csv.str());
    out.note("spectrum: " + std::to_string(grid.size()) + " gamma points, " + std::to_string(n) + " roots");
    return kExitOk;
}

int cmd_modes(const ModesOpts& o, const Output& out) {
    const SystemParams p{o.gamma, o.m.b, o.m.big_gamma};
    p.validate();
    const auto x = grid_or(o.x, default_x_grid(p));
    SpectrumResult sp;
    const auto modes = modes_for(p, sp);

    json meta = {{"params", params_json(p)}, {"normalization", o.c_normalize ? "c-norm" : "r=1"}};
    json list = json::array();
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode& m = modes[i];
        cplx scale = 1.0;
        if (o.c_normalize) {
            if (!(std::abs(m.c_norm) >= kMinCNorm)) throw NormTooSmall("mode " + std::to_string(i) + ": c-norm too small");
            scale = 1.0 / std::sqrt(m.c_norm);
        }
        const PiecewiseWavefunction wf(m, p);
        io::CsvWriter csv({"x", "re_psi", "im_psi"});
        json jx = json::array(), jre = json::array(), jim = json::array();
        for (double xi : x) {
            const cplx v = scale * wf(xi);
            csv.row({xi, v.real(), v.imag()});
            jx.push_back(xi);
            jre.push_back(v.real());
            jim.push_back(v.imag());
        }
        const std::string stem = "mode_" + std::to_string(i);
        if (out.json_format())
            out.write_json(stem + ".json", {{"x", jx}, {"re_psi", jre}, {"im_psi", jim}});
        else
            out.write(stem + ".csv", csv.str());
        list.push_back({{"index", i}, {"k", cjson(m.k.value())}, {"c_norm", cjson(m.c_norm)},
                        {"r", cjson(m.r)}, {"rho1", cjson(m.rho1)}, {"rho2", cjson(m.rho2)},
                        {"a_coef", cjson(m.a_coef)}, {"b_coef", cjson(m.b_coef)},
                        {"gamma0_limit", m.r == cplx(0.0)}});
    }
    meta["modes"] = list;
    out.write_json("modes.json", meta);
    return kExitOk;
}

InitialCondition parse_ic(const EvolveOpts& o) {
    if (o.ic == "left") return InitialCondition::gaussian(Well::Left, o.width);
    if (o.ic == "middle") return InitialCondition::gaussian(Well::Middle, o.width);
    if (o.ic == "right") return InitialCondition::gaussian(Well::Right, o.width);
    if (o.ic == "coeffs") {
        const auto re = split_numbers(o.coeffs, "--coeffs");
        const auto im = o.coeffs_im.empty() ? std::vector<double>(3, 0.0) : split_numbers(o.coeffs_im, "--coeffs-im");
        if (re.size() != 3 || im.size() != 3) throw InvalidArgument("--coeffs needs three comma-separated values");
        return InitialCondition::coefficients({cplx(re[0], im[0]), cplx(re[1], im[1]), cplx(re[2], im[2])});
    }
    throw InvalidArgument("--ic must be left, middle, right or coeffs");
}

int cmd_evolve(const EvolveOpts& o, const Output& out) {
    const SystemParams p{o.gamma, o.m.b, o.m.big_gamma};
    p.validate();
    const InitialCondition ic = parse_ic(o);
    ic.validate();
    SpectrumResult sp;
    const auto modes = modes_for(p, sp);
    if (modes.size() != 3)
        throw NonConvergence("evolve: expected three eigenvalues, found " + std::to_string(modes.size()));

    std::optional<double> beat;
    if (sp.real_count() == 3) beat = beat_period(modes);
    if (!beat && o.t.empty()) throw InvalidArgument("evolve: spectrum is not real; supply --t");
    const auto t = grid_or(o.t, beat ? default_t_grid(*beat) : std::vector<double>{});
    const auto x = grid_or(o.x, default_x_grid(p));

    const auto c = project_initial(ic, std::span<const Mode, 3>(modes.data(), 3), p);
    const auto field = evolve(modes, c, p, t, x);

    if (out.json_format()) {
        json rows = json::array();
        for (std::size_t it = 0; it < t.size(); ++it)
            rows.push_back(std::vector<double>(field.values.begin() + it * x.size(),
                                               field.values.begin() + (it + 1) * x.size()));
        out.write_json("intensity.json", {{"t", t}, {"x", x}, {"intensity", rows}});
    } else {
        io::CsvWriter csv({"t", "x", "intensity"});
        for (std::size_t it = 0; it < t.size(); ++it)
            for (std::size_t ix = 0; ix < x.size(); ++ix) csv.row({t[it], x[ix], field.at(it, ix)});
        out.write("intensity.csv", csv.str());
    }

    json meta = {{"params", params_json(p)}, {"initial_condition", ic.description},
                 {"beat_period", beat ? json(*beat) : json(nullptr)}, {"peak_intensity", field.max()},
                 {"t_points", t.size()}, {"x_points", x.size()}};
    json eig = json::array(), coef = json::array(), norms = json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        eig.push_back(cjson(modes[i].k.value()));
        coef.push_back(cjson(c[i]));
        norms.push_back(cjson(modes[i].c_norm));
    }
    meta["eigenvalues"] = eig;
    meta["coefficients"] = coef;
    meta["c_norms"] = norms;
    out.write_json("evolve_meta.json", meta);
    if (beat) out.note("beat period " + io::fmt(*beat));
    return kExitOk;
}

json ep3_json(const EP3Solution& s) {
    return {{"big_gamma", s.big_gamma}, {"gamma", s.gamma},   {"b", s.b}, {"k", s.k},
            {"condition_residuals", s.condition_residuals}, {"iterations", s.iterations}};
}

int cmd_find_ep3(Ep3Opts o, const Output& out) {
    std::optional<Ep3Guess> guess;
    if (!o.guess_json.empty()) {
        std::ifstream f(o.guess_json);
        if (!f) throw InvalidArgument("cannot read " + o.guess_json);
        json j;
        try {
            f >> j;
            guess = Ep3Guess{j.at("gamma").get<double>(), j.at("b").get<double>(), j.at("k").get<double>()};
            if (!o.big_gamma && j.contains("big_gamma")) o.big_gamma = j.at("big_gamma").get<double>();
        } catch (const json::exception& e) {
            throw InvalidArgument(o.guess_json + ": " + e.what());
        }
    }
    if (!o.guess.empty()) {
        const auto v = split_numbers(o.guess, "--guess");
        if (v.size() != 3) throw InvalidArgument("--guess needs gamma,b,k");
        guess = Ep3Guess{v[0], v[1], v[2]};
    }

    std::optional<std::vector<double>> trace;
    if (!o.trace.empty()) {
        const auto f = split_numbers([&] {
            std::string s = o.trace;
            std::replace(s.begin(), s.end(), ':', ',');
            return s;
        }(), "--trace");
        if (f.size() != 3 || f[2] < 1 || f[2] != std::floor(f[2]))
            throw InvalidArgument("--trace needs LO:HI:N with N a positive integer");
        trace = f;
        if (!o.big_gamma) o.big_gamma = f[0];
    }
    if (!o.big_gamma) throw InvalidArgument("find-ep3: --big-gamma is required");

    EP3Solution sol;
    try {
        sol = guess ? find_ep3(*o.big_gamma, *guess) : find_ep3(*o.big_gamma);
    } catch (const Ep3NonConvergence& e) {
        std::cerr << "last iterate: " << ep3_json(e.last_iterate()).dump() << '\n';
        throw;
    }
    json result = ep3_json(sol);

    int code = kExitOk;
    if (trace) {
        const auto& f = *trace;
        const Ep3Family fam = trace_ep3_family(f[0], f[1], static_cast<int>(f[2]));
        io::CsvWriter csv({"big_gamma", "gamma", "b", "k", "iterations", "max_residual"});
        json rows = json::array();
        for (const auto& s : fam.solutions) {
            const double worst = *std::max_element(s.condition_residuals.begin(), s.condition_residuals.end());
            csv.row({s.big_gamma, s.gamma, s.b, s.k, static_cast<double>(s.iterations), worst});
            rows.push_back(ep3_json(s));
        }
        if (out.json_format())
            out.write_json("ep3_family.json", rows);
        else
            out.write("ep3_family.csv", csv.str());
        result["trace"] = {{"points", fam.solutions.size()},
                           {"gamma_increasing", fam.gamma_increasing},
                           {"b_decreasing", fam.b_decreasing}};
        if (fam.failure) {
            result["trace"]["failure"] = *fam.failure;
            result["trace"]["failed_big_gamma"] = *fam.failed_big_gamma;
            std::cerr << "error: trace stopped at Gamma=" << io::fmt(*fam.failed_big_gamma) << ": " << *fam.failure
                      << '\n';
            code = kExitNumerical;
        }
    }
    out.write_json("ep3.json", result);
    out.note("EP3 at Gamma=" + io::fmt(sol.big_gamma) + ": gamma=" + io::fmt(sol.gamma) + " b=" + io::fmt(sol.b) +
             " k=" + io::fmt(sol.k));
    return code;
}

int cmd_waveguide(const WaveguideOpts& o, const Output& out) {
    const ModelScales sc = to_model(o.spec);
    for (const auto& w : sc.warnings) std::cerr << "warning: " << w << '\n';
    json j = {{"ell", sc.ell}, {"big_l", sc.big_l}, {"gamma", sc.gamma}, {"k0", sc.k0}, {"warnings", sc.warnings}};
    if (o.k) {
        const cplx k(*o.k, o.k_im);
        j["k"] = cjson(k);
        j["beta"] = cjson(beta_from_k(k, sc, o.spec.n0));
    }
    if (o.big_gamma && o.delta_n_mid) throw InvalidArgument("give either --big-gamma or --delta-n-mid, not both");
    if (o.big_gamma) j["big_gamma"] = *o.big_gamma;
    if (o.delta_n_mid) j["big_gamma"] = middle_strength(*o.delta_n_mid, o.spec.delta_n);
    if (o.b) {
        j["b"] = *o.b;
        j["separation"] = physical_separation(*o.b, sc);
    }
    out.write_json("waveguide.json", j);
    out.note("ell=" + io::fmt(sc.ell) + " um, L=" + io::fmt(sc.big_l) + " um, gamma=" + io::fmt(sc.gamma));
    return kExitOk;
}

const std::vector<std::string> kSubcommands{"spectrum", "modes", "evolve", "find-ep3", "waveguide"};
const std::vector<std::string> kFlagKeys{"quiet", "c-normalize"};

// Config entries become "--key=value" tokens placed right after the
// subcommand, so anything given on the command line (parsed later) wins.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> tokens;
    for (const auto& [key, value] : io::parse_config_file(path)) {
        if (key == "config") continue;
        if (std::find(kFlagKeys.begin(), kFlagKeys.end(), key) != kFlagKeys.end()) {
            if (value == "true" || value == "1" || value == "yes") tokens.push_back("--" + key);
            else if (value != "false" && value != "0" && value != "no")
                throw InvalidArgument("config: " + key + " expects true or false");
        } else {
            tokens.push_back("--" + key + "=" + value);
        }
    }
    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
    });
    const auto at = sub == args.end() ? args.end() : sub + 1;
    args.insert(at, tokens.begin(), tokens.end());
    return args;
}

void add_model(CLI::App* sc, ModelOpts& m) {
    sc->add_option("--b", m.b, "outer-well half-spacing")->required();
    sc->add_option("--big-gamma", m.big_gamma, "middle-well strength")->required();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-well gain/loss model: spectra, modes, dynamics, EP3 search, waveguide mapping"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    Globals g;
    app.add_option("--format", g.format, "tabular output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", g.out, "output directory");
    app.add_flag("--quiet", g.quiet, "no progress messages on stdout");
    app.add_option("--config", g.config, "key=value file; command-line flags take precedence");

    SpectrumOpts so;
    auto* spectrum = app.add_subcommand("spectrum", "eigenvalues over a gamma grid");
    add_model(spectrum, so.m);
    spectrum->add_option("--gamma", so.gamma, "gamma grid, start:stop:step or a single value")->required();
    spectrum->add_option("--k-max", so.k_max, "upper end of the real-root scan");

    ModesOpts mo;
    auto* modes = app.add_subcommand("modes", "piecewise wave functions of all modes");
    add_model(modes, mo.m);
    modes->add_option("--gamma", mo.gamma, "gain/loss strength")->required();
    modes->add_option("--x", mo.x, "x grid, start:stop:step");
    modes->add_flag("--c-normalize", mo.c_normalize, "divide each mode by the square root of its c-norm");

    EvolveOpts eo;
    auto* evolve_cmd = app.add_subcommand("evolve", "intensity of a three-mode superposition");
    add_model(evolve_cmd, eo.m);
    evolve_cmd->add_option("--gamma", eo.gamma, "gain/loss strength")->required();
    evolve_cmd->add_option("--ic", eo.ic, "left, middle, right (Gaussian in that well) or coeffs");
    evolve_cmd->add_option("--width", eo.width, "Gaussian width");
    evolve_cmd->add_option("--coeffs", eo.coeffs, "c1,c2,c3 real parts (with --ic coeffs)");
    evolve_cmd->add_option("--coeffs-im", eo.coeffs_im, "c1,c2,c3 imaginary parts");
    evolve_cmd->add_option("--t", eo.t, "t grid, start:stop:step (default: 3 beat periods)");
    evolve_cmd->add_option("--x", eo.x, "x grid, start:stop:step");

    Ep3Opts po;
    auto* ep3 = app.add_subcommand("find-ep3", "locate the third-order exceptional point");
    ep3->add_option("--big-gamma", po.big_gamma, "middle-well strength");
    ep3->add_option("--guess", po.guess, "starting point gamma,b,k");
    ep3->add_option("--guess-json", po.guess_json, "starting point from a previous ep3.json");
    ep3->add_option("--trace", po.trace, "also trace the family over LO:HI:N (N points)");

    WaveguideOpts wo;
    auto* wg = app.add_subcommand("waveguide", "map a physical guide onto the model");
    wg->add_option("--n0", wo.spec.n0, "background index")->required();
    wg->add_option("--delta-n", wo.spec.delta_n, "real index contrast")->required();
    wg->add_option("--delta-n-prime", wo.spec.delta_n_prime, "imaginary index contrast");
    wg->add_option("--lambda0", wo.spec.lambda0, "vacuum wavelength in um")->required();
    wg->add_option("--a", wo.spec.a, "guide width in um")->required();
    wg->add_option("--k", wo.k, "model eigenvalue (real part) to convert to beta");
    wg->add_option("--k-im", wo.k_im, "imaginary part of --k");
    wg->add_option("--big-gamma", wo.big_gamma, "middle-well strength");
    wg->add_option("--delta-n-mid", wo.delta_n_mid, "real contrast of the middle guide");
    wg->add_option("--b", wo.b, "model half-spacing to convert to um");

    for (auto* sc : app.get_subcommands({})) sc->fallthrough();

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const Output out(g);
        if (spectrum->parsed()) return cmd_spectrum(so, out);
        if (modes->parsed()) return cmd_modes(mo, out);
        if (evolve_cmd->parsed()) return cmd_evolve(eo, out);
        if (ep3->parsed()) return cmd_find_ep3(po, out);
        if (wg->parsed()) return cmd_waveguide(wo, out);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const OutOfRange& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
