#include "rsm/cli.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "rsm/criterion.hpp"
#include "rsm/error.hpp"
#include "rsm/report.hpp"
#include "rsm/spectral.hpp"
#include "rsm/verify.hpp"

namespace rsm {

int exit_code(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::precondition:
    case ErrorKind::domain:
    case ErrorKind::schema: return kExitPrecondition;
    case ErrorKind::evaluation:
    case ErrorKind::budget:
    case ErrorKind::inconclusive:
    case ErrorKind::consistency: return kExitBudget;
    }
    return kExitBudget;
}

RadialSource file_source(const std::string& path) {
    const auto t = read_csv_table(path);
    const auto& r = t.column("r");
    const auto& f = t.column("f");
    if (r.size() < 4) throw Error(ErrorKind::precondition, path + ": source needs at least 4 samples");
    if (r.front() != 0.0) throw Error(ErrorKind::precondition, path + ": source samples must start at r = 0");
    for (std::size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw Error(ErrorKind::precondition, path + ": radii must be strictly increasing");
    for (double v : f)
        if (!std::isfinite(v)) throw Error(ErrorKind::precondition, path + ": non-finite source value");

    gsl_set_error_handler_off();
    std::shared_ptr<gsl_spline> spline(gsl_spline_alloc(gsl_interp_cspline, r.size()), gsl_spline_free);
    if (!spline || gsl_spline_init(spline.get(), r.data(), f.data(), r.size()) != GSL_SUCCESS)
        throw Error(ErrorKind::precondition, path + ": cannot build the source spline");
    const double last = r.back();
    RadialSource s;
    s.name = "file(" + path + ")";
    s.f = [spline, last](double x) {
        if (x > last) return 0.0;
        return gsl_spline_eval(spline.get(), std::max(x, 0.0), nullptr);
    };
    s.kinks = {last};
    return s;
}

namespace {

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

std::string sci(double x, int digits = 3) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::scientific << std::setprecision(digits) << x;
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::precondition, "cannot open output file '" + path + "'");
    f << text;
    if (!f) throw Error(ErrorKind::precondition, "failed writing '" + path + "'");
}

void write_csv_file(const std::string& path, const CsvColumns& t) {
    std::ostringstream os;
    write_csv(os, t);
    write_text(path, os.str());
}

struct ManifoldFlags {
    std::optional<int> dimension;
    std::optional<std::string> family;
    std::optional<double> curvature, gamma, scale_b, r_max, eps0;
};

struct Outputs {
    std::string json;
    std::string csv;
};

struct Context {
    RunConfig cfg;
    Outputs out;
    Exec exec = Exec::parallel;
    std::ostream& os;
};

ModelManifold build_manifold(const RunConfig& cfg) { return cfg.manifold.build(); }

void emit_json(Context& c, const std::string& command, const Json& payload, bool stdout_fallback = false) {
    const std::string text = dump(envelope(command, payload));
    if (!c.out.json.empty()) write_text(c.out.json, text);
    else if (stdout_fallback) c.os << text;
}

int cmd_manifold(Context& c) {
    const auto m = build_manifold(c.cfg);
    const Json info = manifold_info(m);
    const auto& cl = info["classification"];
    c.os << "manifold: " << m.warping().describe() << ", n=" << m.dimension() << ", r_max=" << m.r_max()
         << ", eps0=" << m.eps0() << '\n';
    c.os << "class: " << (cl["non_parabolic"].get<bool>() ? "non_parabolic" : "parabolic") << ", "
         << (cl["finite_volume"].get<bool>() ? "finite_volume" : "infinite_volume") << '\n';
    c.os << "total volume: " << (info["total_volume"].is_null() ? std::string("inf")
                                                                  : sci(info["total_volume"].get<double>(), 6))
         << '\n';
    if (!c.out.csv.empty()) {
        CsvColumns t{{"radius", "k_tilde", "k_hat", "k", "theta"}, std::vector<std::vector<double>>(5)};
        for (const auto& k : info["curvature_scales"]) {
            std::size_t i = 0;
            for (const char* key : {"radius", "k_tilde", "k_hat", "k", "theta"})
                t.columns[i++].push_back(k[key].is_null() ? std::nan("") : k[key].get<double>());
        }
        write_csv_file(c.out.csv, t);
    }
    emit_json(c, "manifold info", info);
    return kExitOk;
}

int cmd_spectrum(Context& c) {
    const auto m = build_manifold(c.cfg);
    const auto& p = c.cfg.spectrum;
    SpectralEstimate est;
    std::string domain;
    if (p.ess) {
        est = lambda1_ess(m, c.exec);
        domain = "essential";
    } else {
        const auto d = p.exterior ? RadialDomain::exterior(*p.exterior) : RadialDomain::whole();
        est = lambda1(m, d, c.exec);
        domain = d.describe();
    }
    c.os << (p.ess ? "lambda1_ess" : "lambda1(" + domain + ")") << " = " << fixed(est.value, 8)
         << (est.converged ? "" : "  (not converged)") << '\n';
    c.os << "barta lower bound = " << fixed(est.barta_lower, 8) << ", rayleigh upper bound = "
         << fixed(est.rayleigh_upper, 8) << '\n';
    if (!c.out.csv.empty()) {
        CsvColumns t{{p.ess ? "exterior_radius" : "outer_radius", "value"}, std::vector<std::vector<double>>(2)};
        for (const auto& [r, v] : est.ladder) {
            t.columns[0].push_back(r);
            t.columns[1].push_back(v);
        }
        write_csv_file(c.out.csv, t);
    }
    Json payload;
    payload["manifold"] = to_json(m);
    payload["domain"] = domain;
    payload["estimate"] = to_json(est);
    emit_json(c, "spectrum", payload);
    return kExitOk;
}

int cmd_green(Context& c, bool export_csv) {
    const auto m = build_manifold(c.cfg);
    const auto& p = c.cfg.green;
    const GreenProfile g = [&] {
        if (p.kind == "minimal") return minimal_green(m, c.exec);
        if (p.kind == "dirichlet") return dirichlet_green(m, p.radius.value_or(0.5 * m.r_max()), c.exec);
        if (p.kind == "parabolic") return parabolic_green(m, c.exec);
        throw Error(ErrorKind::precondition, "unknown Green kind '" + p.kind + "'");
    }();
    const auto csv = to_csv(g.samples(), "G");
    if (export_csv && c.out.csv.empty()) {
        write_csv(c.os, csv);
    } else {
        c.os << "green: " << p.kind << " on " << m.warping().describe() << ", n=" << m.dimension() << '\n';
        for (double r : {0.5, 1.0, 2.0})
            if (r <= m.r_max()) c.os << "G(" << fixed(r, 1) << ") = " << sci(g.value(r), 10) << '\n';
        if (g.kind() == GreenKind::parabolic)
            c.os << "volume = " << sci(g.volume(), 8) << ", mean = " << sci(g.mean_check(), 2) << '\n';
    }
    if (!c.out.csv.empty()) write_csv_file(c.out.csv, csv);
    Json payload;
    payload["manifold"] = to_json(m);
    payload["green"] = green_summary(g);
    emit_json(c, "green", payload);
    return kExitOk;
}

int cmd_poisson(Context& c) {
    const auto m = build_manifold(c.cfg);
    const auto& p = c.cfg.poisson;
    const RadialSource f = [&] {
        if (p.source == "power") return power_source(p.parameter);
        if (p.source == "expdecay") return exp_source(p.parameter);
        if (p.source == "file") {
            if (p.file.empty()) throw Error(ErrorKind::precondition, "poisson: source 'file' needs a path");
            return file_source(p.file);
        }
        throw Error(ErrorKind::precondition, "unknown Poisson source '" + p.source + "'");
    }();
    const auto cls = classify(m);
    RadialSolution sol;
    std::string path;
    if (cls.non_parabolic) {
        sol = solve_poisson(m, f, c.exec);
        path = "green_potential";
    } else if (cls.finite_volume) {
        sol = solve_poisson_finite_volume(m, f, c.exec);
        path = "finite_volume";
    } else {
        throw Error(ErrorKind::precondition, "poisson: manifold is parabolic with infinite volume");
    }
    c.os << "source: " << f.name << '\n';
    if (sol.divergence.divergent) {
        c.os << "u(p) = divergent (growth exponent " << fixed(sol.divergence.growth_exponent, 4) << ")\n";
    } else {
        c.os << "u(p) = " << fixed(sol.value_at_pole, 6) << '\n';
        c.os << "residual_rms = " << sci(sol.residual_rms) << " over " << sol.residual_points << " points\n";
    }
    if (!c.out.csv.empty() && !sol.samples.r.empty()) write_csv_file(c.out.csv, to_csv(sol.samples, "u"));
    Json payload;
    payload["manifold"] = to_json(m);
    payload["source"] = f.name;
    payload["method"] = path;
    payload["solution"] = to_json(sol);
    emit_json(c, "poisson", payload);
    return kExitOk;
}

int cmd_criterion(Context& c) {
    const auto m = build_manifold(c.cfg);
    const auto& p = c.cfg.criterion;
    const auto zeta = p.zeta == "power" ? DecayEnvelope::power(p.parameter) : DecayEnvelope::constant(p.parameter);
    SeriesOptions o;
    o.j0 = p.j0;
    o.jmax = p.jmax;
    o.mode = parse_lambda_mode(p.mode);
    o.exec = c.exec;
    auto rep = series_terms(m, zeta, o);
    rep.evidence = verdict(rep);
    c.os << "verdict: " << to_string(rep.evidence.verdict) << " (fit slope " << fixed(rep.fit.slope, 4)
         << ", tail slope " << fixed(rep.evidence.tail_slope, 4) << ", partial sum "
         << sci(rep.terms.empty() ? 0.0 : rep.terms.back().partial, 6) << ")\n";
    if (!c.out.csv.empty()) write_csv_file(c.out.csv, to_csv(rep));
    Json payload;
    payload["manifold"] = to_json(m);
    payload["criterion"] = to_json(rep);
    emit_json(c, "criterion", payload, true);
    return kExitOk;
}

int cmd_verify(Context& c) {
    const auto res = run_suite(c.cfg.verify.suite, c.exec);
    for (const auto& [name, s] : res.report["suites"].items())
        c.os << (s["pass"].get<bool>() ? "PASS " : "FAIL ") << name << '\n';
    c.os << "suite " << c.cfg.verify.suite << ": " << (res.pass ? "PASS" : "FAIL") << '\n';
    if (!c.out.csv.empty() && !res.csv.header.empty()) write_csv_file(c.out.csv, res.csv);
    Json payload;
    payload["verify"] = res.report;
    emit_json(c, "verify", payload);
    return res.pass ? kExitOk : kExitVerify;
}

int cmd_sharpness(Context& c) {
    const auto& p = c.cfg.sharpness;
    const auto rep = sharpness_sweep(p.gamma, c.cfg.manifold.dimension, p.alpha_min, p.alpha_max, p.step, c.exec);
    c.os << "alpha,classification,growth_exponent,value_at_pole\n";
    for (const auto& pt : rep.base.points)
        c.os << fixed(pt.alpha, 4) << ',' << (pt.divergent ? "divergent" : "finite") << ','
             << fixed(pt.growth_exponent, 4) << ',' << (pt.divergent ? std::string("inf") : sci(pt.value_at_pole, 6))
             << (pt.boundary ? "  (boundary)" : "") << '\n';
    c.os << "threshold: " << fixed(rep.base.threshold, 4) << " (refined " << fixed(rep.refined.threshold, 4)
         << ", theory " << fixed(rep.theoretical, 4) << ") " << (rep.pass ? "PASS" : "FAIL") << '\n';
    if (!c.out.csv.empty()) write_csv_file(c.out.csv, to_csv(rep));
    Json payload;
    payload["sharpness"] = to_json(rep);
    emit_json(c, "sharpness", payload);
    return rep.pass ? kExitOk : kExitVerify;
}

void apply(const ManifoldFlags& f, ManifoldSpec& m) {
    if (f.dimension) m.dimension = *f.dimension;
    if (f.family) m.family = parse_family(*f.family);
    if (f.curvature) m.curvature = *f.curvature;
    if (f.gamma) m.gamma = *f.gamma;
    if (f.scale_b) m.scale_b = *f.scale_b;
    if (f.r_max) m.r_max = *f.r_max;
    if (f.eps0) m.eps0 = *f.eps0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Green functions, spectra and Poisson solvability on rotationally symmetric model manifolds.\n"
                 "Radii are geodesic distances from the pole in the units of the metric dr^2 + phi(r)^2 dtheta^2.\n"
                 "Precedence: built-in defaults < --config file < command-line flags.",
                 "rsm"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", kToolVersion);

    std::string config_path;
    std::optional<std::string> json_path, csv_path;
    bool serial = false;
    ManifoldFlags mf;
    app.add_option("--config", config_path, "JSON run configuration; unknown keys are rejected");
    app.add_option("--json", json_path, "write the JSON report to this file");
    app.add_option("--csv", csv_path, "write the command's table to this CSV file");
    app.add_flag("--serial", serial, "run kernels single-threaded (results are identical)");
    app.add_option("--dimension", mf.dimension, "manifold dimension n >= 2 (default 3)")->check(CLI::Range(2, 64));
    app.add_option("--family", mf.family, "warping family (default euclidean)")
        ->check(CLI::IsMember({"euclidean", "space_form", "power_exp", "cusp", "custom"}));
    app.add_option("--curvature", mf.curvature, "space_form sectional curvature k < 0 (default -1)");
    app.add_option("--gamma", mf.gamma, "power_exp exponent gamma >= 0 (default 2)");
    app.add_option("--scale-b", mf.scale_b, "power_exp scale B > 0 in exp(B r^{1+gamma/2}) (default 1)");
    app.add_option("--r-max", mf.r_max, "outer radius of the computational domain (default 60)");
    app.add_option("--eps0", mf.eps0, "inner radius of the curvature shells (default 0.1)");

    auto* manifold = app.add_subcommand("manifold", "geometry overview: classification, volume, curvature scales");
    std::string action = "info";
    manifold->add_option("action", action, "operation (default info)")->check(CLI::IsMember({"info"}));

    auto* spectrum = app.add_subcommand("spectrum", "bottom of the spectrum of -Laplacian (whole manifold by default)");
    std::optional<double> exterior;
    bool ess = false;
    auto* ext_opt = spectrum->add_option("--exterior", exterior, "lambda1 of M \\ B_R for this radius R");
    spectrum->add_flag("--ess", ess, "bottom of the essential spectrum")->excludes(ext_opt);

    auto* green = app.add_subcommand("green", "radial Green function profile G(r)");
    std::optional<std::string> kind;
    std::optional<double> radius;
    std::string export_kind;
    green->add_option("--kind", kind, "minimal | dirichlet | parabolic (default minimal)")
        ->check(CLI::IsMember({"minimal", "dirichlet", "parabolic"}));
    green->add_option("--radius", radius, "Dirichlet ball radius R (default r_max/2)");
    green->add_option("--export", export_kind, "csv: print the sampled profile r,G to stdout unless --csv is set")
        ->check(CLI::IsMember({"csv"}));

    auto* poisson = app.add_subcommand("poisson", "solve -Laplacian u = f for a radial source f");
    std::vector<std::string> source;
    poisson
        ->add_option("--source", source,
                     "power ALPHA: f = (1+r)^-ALPHA | expdecay C: f = exp(-C r) | file PATH: CSV with columns r,f "
                     "from r = 0 (default expdecay 1)")
        ->expected(2);

    auto* criterion = app.add_subcommand("criterion", "series criterion sum_j (theta(j+1)-theta(j)) / (lambda1 zeta)");
    std::vector<std::string> zeta;
    std::optional<int> jmax, j0;
    std::optional<std::string> mode;
    criterion
        ->add_option("--zeta", zeta, "power ALPHA: zeta = (1+r)^ALPHA | constant C: zeta = C (default power 1.5)")
        ->expected(2);
    criterion->add_option("--jmax", jmax, "last series index J; needs 1.1 J <= r_max (default 40)");
    criterion->add_option("--j0", j0, "first series index (default 2)");
    criterion->add_option("--mode", mode, "lambda1 source: barta (certified lower bound) | numerical (default numerical)")
        ->check(CLI::IsMember({"barta", "barta_certified", "numerical"}));

    auto* verify = app.add_subcommand("verify", "packaged verification suites; exit code 3 on failure");
    std::optional<std::string> suite;
    std::string suites = "all";
    for (const auto& n : suite_names()) suites += " | " + n;
    verify->add_option("--suite", suite, suites + " (default all)");

    auto* sharp = app.add_subcommand("sharpness",
                                     "decay threshold sweep for f = (1+r)^-alpha on power_exp(gamma); exit code 3 "
                                     "on failure");
    std::optional<double> s_gamma, amin, amax, step;
    sharp->add_option("--gamma", s_gamma, "power_exp exponent; 0 uses hyperbolic space (default 2)");
    sharp->add_option("--alpha-min", amin, "lower end of the alpha range (default -0.3)");
    sharp->add_option("--alpha-max", amax, "upper end of the alpha range (default 0.3)");
    sharp->add_option("--step", step, "alpha step; a refined run uses step/2 (default 0.05)");

    const std::string footer =
        "Manifold and output options (before or after the subcommand):\n"
        "  --config FILE        JSON run configuration\n"
        "  --json FILE          JSON report path; --csv FILE table path\n"
        "  --family NAME        euclidean | space_form | power_exp | cusp | custom (default euclidean)\n"
        "  --dimension N        manifold dimension (default 3)\n"
        "  --curvature K        space_form curvature (default -1)\n"
        "  --gamma G            power_exp exponent (default 2); --scale-b B (default 1)\n"
        "  --r-max R            domain radius (default 60); --eps0 E shell radius (default 0.1)\n"
        "  --serial             single-threaded kernels\n"
        "Radii are geodesic distances in metric units; exponents and levels are dimensionless.";
    for (auto* sub : {manifold, spectrum, green, poisson, criterion, verify, sharp}) sub->footer(footer);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitPrecondition;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        apply(mf, cfg.manifold);
        if (sharp->parsed() && s_gamma) cfg.sharpness.gamma = *s_gamma;
        if (exterior) cfg.spectrum.exterior = exterior;
        if (ess) cfg.spectrum.ess = true;
        if (cfg.spectrum.ess) cfg.spectrum.exterior.reset();
        if (kind) cfg.green.kind = *kind;
        if (radius) cfg.green.radius = radius;
        if (!source.empty()) {
            cfg.poisson.source = source[0];
            if (source[0] == "file") {
                cfg.poisson.file = source[1];
            } else if (source[0] == "power" || source[0] == "expdecay") {
                cfg.poisson.parameter = std::stod(source[1]);
            } else {
                throw Error(ErrorKind::precondition, "--source: expected power | expdecay | file");
            }
        }
        if (!zeta.empty()) {
            if (zeta[0] != "power" && zeta[0] != "constant")
                throw Error(ErrorKind::precondition, "--zeta: expected power | constant");
            cfg.criterion.zeta = zeta[0];
            cfg.criterion.parameter = std::stod(zeta[1]);
        }
        if (jmax) cfg.criterion.jmax = *jmax;
        if (j0) cfg.criterion.j0 = *j0;
        if (mode) cfg.criterion.mode = *mode;
        if (suite) cfg.verify.suite = *suite;
        if (amin) cfg.sharpness.alpha_min = *amin;
        if (amax) cfg.sharpness.alpha_max = *amax;
        if (step) cfg.sharpness.step = *step;
        if (sharp->parsed() && mf.gamma && !s_gamma) cfg.sharpness.gamma = *mf.gamma;

        Context c{cfg, {json_path.value_or(cfg.output.json), csv_path.value_or(cfg.output.csv)},
                  (serial || !cfg.parallel) ? Exec::serial : Exec::parallel, out};
        if (manifold->parsed()) return cmd_manifold(c);
        if (spectrum->parsed()) return cmd_spectrum(c);
        if (green->parsed()) return cmd_green(c, !export_kind.empty());
        if (poisson->parsed()) return cmd_poisson(c);
        if (criterion->parsed()) return cmd_criterion(c);
        if (verify->parsed()) return cmd_verify(c);
        if (sharp->parsed()) return cmd_sharpness(c);
        return kExitPrecondition;
    } catch (const Error& e) {
        err << "rsm: " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::invalid_argument& e) {
        err << "rsm: precondition error: malformed number in arguments\n";
        return kExitPrecondition;
    } catch (const std::exception& e) {
        err << "rsm: error: " << e.what() << '\n';
        return kExitBudget;
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"rsm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rsm
