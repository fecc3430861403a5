#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbl/profile.hpp"
#include "nbl/scheme.hpp"
#include "nbl/simulate.hpp"
#include "nbl/symbol.hpp"

namespace fs = std::filesystem;
using namespace nbl;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CommonOpts {
    std::string scheme;
    double a = -1.0;
    double lambda = 0.4;
    std::string out_dir = ".";
};

void add_common(CLI::App* app, CommonOpts& c) {
    app->add_option("--scheme", c.scheme, "builtin name or scheme file path")->required();
    app->add_option("--a", c.a, "transport velocity (builtin schemes)");
    app->add_option("--lambda", c.lambda, "CFL ratio dt/dx (builtin schemes)");
    app->add_option("--out", c.out_dir, "output directory (env BL_OUT_DIR overrides)");
}

SchemeSpec resolve_scheme(const CommonOpts& c) {
    for (const auto& name : builtin_names())
        if (name == c.scheme) return builtin_scheme(builtin_from_name(c.scheme), c.a, c.lambda);
    if (!fs::exists(c.scheme))
        throw scheme_error("scheme '" + c.scheme + "' is neither a builtin nor a readable file");
    return load_scheme_file(c.scheme);
}

fs::path out_dir(const CommonOpts& c) {
    const char* env = std::getenv("BL_OUT_DIR");
    fs::path dir = env && *env ? fs::path(env) : fs::path(c.out_dir);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_csv(const fs::path& p, const std::string& header) {
    std::ofstream f(p);
    if (!f) throw scheme_error("cannot open " + p.string() + " for writing");
    f << header << "\n";
    return f;
}

ScalarFn make_initial(const std::string& sel, int n_cells) {
    if (sel == "gaussian_bump")
        return [](double x) { return std::exp(-100.0 * (x - 0.5) * (x - 0.5)); };
    if (sel == "constant") return [](double) { return 1.0; };
    if (sel == "linear") return [](double x) { return x; };
    if (sel == "sine") return [](double x) { return std::sin(2.0 * M_PI * x); };
    // Otherwise a sampled-values file: one value per line, interpreted as
    // the cell averages of a piecewise-constant function on the run grid.
    std::ifstream f(sel);
    if (!f) throw scheme_error("initial condition '" + sel + "' is not a builtin or a file");
    auto vals = std::make_shared<std::vector<double>>();
    double v;
    while (f >> v) vals->push_back(v);
    if (vals->empty()) throw scheme_error("initial data file " + sel + " is empty");
    if (n_cells > 0 && static_cast<int>(vals->size()) != n_cells)
        throw scheme_error("initial data file has " + std::to_string(vals->size()) +
                           " samples; expected one per cell");
    return [vals](double x) {
        if (x < 0.0 || vals->empty()) return 0.0;
        auto idx = static_cast<size_t>(x * static_cast<double>(vals->size()));
        if (idx >= vals->size()) idx = vals->size() - 1;
        return (*vals)[idx];
    };
}

int cmd_analyze(const CommonOpts& c, int n_samples) {
    const auto spec = resolve_scheme(c);
    const auto dir = out_dir(c);
    const auto an = analyze_symbol(spec);

    {
        auto f = open_csv(dir / "circle_scan.csv", "theta,abs_A_sq,re_A,im_A");
        for (int i = 0; i < n_samples; ++i) {
            const double th = 2.0 * M_PI * i / n_samples;
            const cplx v = amplification(spec, std::polar(1.0, th));
            f << fmt(th) << "," << fmt(std::norm(v)) << "," << fmt(v.real()) << ","
              << fmt(v.imag()) << "\n";
        }
    }
    {
        auto f = open_csv(dir / "stability_curve.csv", "eta,re_neg_lambda_A,im_neg_lambda_A");
        for (int i = 0; i < n_samples; ++i) {
            const double eta = 2.0 * M_PI * i / n_samples;
            const cplx v = -spec.lambda * amplification(spec, std::polar(1.0, eta));
            f << fmt(eta) << "," << fmt(v.real()) << "," << fmt(v.imag()) << "\n";
        }
    }
    {
        auto f = open_csv(dir / "disk_roots.csv", "re_z,im_z,multiplicity");
        if (an.assumption4_ok)
            for (const auto& dr : an.disk)
                f << fmt(dr.z.real()) << "," << fmt(dr.z.imag()) << "," << dr.multiplicity
                  << "\n";
    }

    std::cout << "scheme: " << c.scheme << "  a = " << spec.a << "  lambda = " << spec.lambda
              << "\n";
    std::cout << "circle roots of A:";
    for (const auto& cr : an.circle)
        std::cout << "  theta = " << cr.theta << (cr.simple ? " (simple)" : " (multiple)");
    std::cout << "\n";
    std::cout << "Cauchy stability: " << verdict_name(an.cauchy.verdict)
              << "  (max modulus " << an.cauchy.worst_modulus << " at eta = "
              << an.cauchy.worst_eta << ")\n";
    if (an.assumption4_ok) {
        std::cout << "roots in the open disk (without 0): " << an.disk_count_poly
                  << "  contour count: " << an.disk_count_contour
                  << "  expected: " << an.disk_count_expected << "\n";
    } else {
        std::cout << "circle root structure violates the dissipativity assumption; disk "
                     "census skipped\n";
    }
    return 0;
}

int cmd_profile(const CommonOpts& c, long horizon) {
    const auto spec = resolve_scheme(c);
    const auto dir = out_dir(c);
    auto prof = build_profile(spec, disk_roots(spec));
    build_corrector(spec, prof);
    auto f = open_csv(dir / "profile.csv", "j,w,w_tilde");
    for (long j = 0; j <= horizon; ++j)
        f << j << "," << fmt(prof.evaluate_w(j)) << "," << fmt(prof.evaluate_corrector(j))
          << "\n";
    std::cout << "decay rate rho = " << prof.decay_rate << ", numerical horizon "
              << prof.horizon() << " cells\n";
    return 0;
}

BoundaryLayerProfile profile_or_trivial(const SchemeSpec& spec) {
    try {
        auto prof = build_profile(spec, disk_roots(spec));
        build_corrector(spec, prof);
        return prof;
    } catch (const numerical_error&) {
        BoundaryLayerProfile trivial;
        trivial.c_num = TraceSet::trivial;
        trivial.r = spec.r;
        return trivial;
    }
}

int cmd_simulate(const CommonOpts& c, int cells, double tfinal,
                 const std::vector<double>& snapshots, const std::string& initial,
                 bool force_unstable) {
    const auto spec = resolve_scheme(c);
    const auto dir = out_dir(c);
    const auto diag = cauchy_stability(spec);
    if (diag.verdict == Verdict::unstable && !force_unstable) {
        std::cerr << "scheme is Cauchy unstable (max modulus " << diag.worst_modulus
                  << "); pass --force-unstable to run anyway\n";
        return 1;
    }
    const auto u0 = make_initial(initial, cells);
    const auto prof = profile_or_trivial(spec);

    RunOptions opt;
    opt.t_final = tfinal;
    opt.snapshot_times = snapshots;
    auto res = run(spec, cells, u0, opt);

    const double dx = res.grid.dx;
    auto errors = open_csv(dir / "errors.csv", "t,raw_l2,corrected_l2");
    auto emit = [&](double t, const std::vector<double>& u) {
        const long n = std::lround(t / res.grid.dt);
        const auto ui = interior_vector(u0, spec.a, cells, dx, t);
        const auto ua = approximate_solution(spec, prof, u0, cells, dx, n);
        std::ostringstream name;
        name << "solution_t" << t << ".csv";
        auto f = open_csv(dir / name.str(), "x,u,u_int,u_app");
        for (int j = 0; j < cells; ++j)
            f << fmt((j + 0.5) * dx) << "," << fmt(u[size_t(j)]) << "," << fmt(ui[size_t(j)])
              << "," << fmt(ua[size_t(j)]) << "\n";
        errors << fmt(t) << "," << fmt(l2_error(u, ui, dx)) << "," << fmt(l2_error(u, ua, dx))
               << "\n";
    };
    for (const auto& [t, u] : res.grid.snapshots) emit(t, u);
    emit(res.grid.time_index * res.grid.dt, res.grid.newest());
    return 0;
}

int cmd_converge(const CommonOpts& c, const std::string& levels_arg, double tfinal,
                 const std::string& initial) {
    const auto spec = resolve_scheme(c);
    const auto dir = out_dir(c);
    const auto sep = levels_arg.find("..");
    if (sep == std::string::npos)
        throw scheme_error("--levels wants a range like 5..10 (meaning N = 2^M)");
    const int lo = std::stoi(levels_arg.substr(0, sep));
    const int hi = std::stoi(levels_arg.substr(sep + 2));
    if (lo < 1 || hi < lo || hi > 24) throw scheme_error("--levels range out of bounds");
    std::vector<int> cells;
    for (int m = lo; m <= hi; ++m) cells.push_back(1 << m);

    const auto u0 = make_initial(initial, 0);
    auto cs = convergence_study(spec, u0, tfinal, cells);
    auto f = open_csv(dir / "convergence.csv", "N,dx,raw,corrected");
    for (size_t i = 0; i < cs.cells.size(); ++i)
        f << cs.cells[i] << "," << fmt(cs.dx[i]) << "," << fmt(cs.raw[i]) << ","
          << fmt(cs.corrected[i]) << "\n";
    std::cout << "raw slope " << cs.raw_slope << ", corrected slope " << cs.corrected_slope
              << (cs.complete ? "" : " (incomplete: a level blew up)") << "\n";
    return cs.complete ? 0 : 1;
}

int cmd_assumptions(const CommonOpts& c) {
    const auto spec = resolve_scheme(c);
    const auto cons = check_consistency(spec);
    const bool a1 = cons.space_ok;
    const bool a2 = cons.time_ok && cons.sigma_alpha_nonzero;
    const auto diag = cauchy_stability(spec);
    const bool a3 = diag.verdict != Verdict::unstable;
    bool a4 = false;
    try {
        a4 = circle_assumption_holds(circle_roots(spec));
    } catch (const numerical_error&) {
    }
    auto line = [](const char* name, bool ok) {
        std::cout << name << ": " << (ok ? "PASS" : "FAIL") << "\n";
    };
    line("assumption 1 (space consistency)", a1);
    line("assumption 2 (time consistency)", a2);
    line("assumption 3 (Cauchy stability)", a3);
    line("assumption 4 (dissipative circle roots)", a4);
    return (a1 && a2 && a3 && a4) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary layer analysis of explicit multistep transport schemes"};
    app.require_subcommand(1);

    CommonOpts ca, cp, cs, cc, cm;
    int n_samples = 1024;
    long horizon = 50;
    int cells = 216;
    double tfinal = 0.5;
    std::vector<double> snapshots;
    std::string initial = "gaussian_bump";
    bool force_unstable = false;
    std::string levels = "5..10";
    double tfinal_conv = 0.125;
    std::string initial_conv = "gaussian_bump";

    auto* analyze = app.add_subcommand("analyze", "symbol report and analysis CSVs");
    add_common(analyze, ca);
    analyze->add_option("--samples", n_samples, "points on the unit circle");

    auto* profile = app.add_subcommand("profile", "boundary layer profile CSV");
    add_common(profile, cp);
    profile->add_option("--horizon", horizon, "largest cell index written");

    auto* simulate = app.add_subcommand("simulate", "run the IBVP scheme");
    add_common(simulate, cs);
    simulate->add_option("--cells", cells, "number of grid cells");
    simulate->add_option("--tfinal", tfinal, "final time");
    simulate->add_option("--snapshots", snapshots, "times to dump solution CSVs")
        ->delimiter(',');
    simulate->add_option("--initial", initial,
                         "gaussian_bump | constant | linear | sine | sampled-values file");
    simulate->add_flag("--force-unstable", force_unstable, "run even if Cauchy unstable");

    auto* converge = app.add_subcommand("converge", "grid refinement study");
    add_common(converge, cc);
    converge->add_option("--levels", levels, "range M1..M2, grids N = 2^M");
    converge->add_option("--tfinal", tfinal_conv, "final time");
    converge->add_option("--initial", initial_conv, "initial condition selector");

    auto* assumptions = app.add_subcommand("assumptions", "PASS/FAIL per assumption");
    add_common(assumptions, cm);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*analyze) return cmd_analyze(ca, n_samples);
        if (*profile) return cmd_profile(cp, horizon);
        if (*simulate) return cmd_simulate(cs, cells, tfinal, snapshots, initial, force_unstable);
        if (*converge) return cmd_converge(cc, levels, tfinal_conv, initial_conv);
        if (*assumptions) return cmd_assumptions(cm);
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const scheme_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
