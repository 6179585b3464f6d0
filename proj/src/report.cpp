#include "rsm/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "rsm/error.hpp"

namespace rsm {

namespace {

Json numbers(const std::vector<double>& xs) {
    Json a = Json::array();
    for (double x : xs) a.push_back(number(x));
    return a;
}

// log Vol(B_r), split at r = 1/2 so that the log-space quadrature never sees log phi(0).
double log_volume_ball(const ModelManifold& m, double r) {
    const double head = std::min(r, 0.5);
    double lv = std::log(volume_ball(m, head));
    if (r > head) {
        const double tail = log_integrate_exp([&](double t) { return m.log_density(t); }, head, r, m.warping().joints(),
                                              m.quad_options()) +
                            std::log(m.sphere_area());
        lv = std::max(lv, tail) + std::log1p(std::exp(-std::abs(lv - tail)));
    }
    return lv;
}

std::string describe_manifold(const ModelManifold& m) {
    return m.warping().describe() + ", n=" + std::to_string(m.dimension());
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const Tolerances& t) {
    Json j;
    j["quad_rel"] = number(t.quad_rel);
    j["grid_h_rel"] = number(t.grid_h_rel);
    j["profile_h"] = number(t.profile_h);
    j["profile_radius"] = number(t.profile_radius);
    return j;
}

Json to_json(const ModelManifold& m) {
    const auto& w = m.warping();
    Json j;
    j["dimension"] = m.dimension();
    j["family"] = to_string(w.family());
    if (w.family() == Family::space_form) j["curvature"] = number(w.curvature());
    if (w.family() == Family::power_exp) {
        j["gamma"] = number(w.gamma());
        j["scale_b"] = number(w.scale_b());
    }
    j["r_max"] = number(m.r_max());
    j["eps0"] = number(m.eps0());
    j["sphere_area"] = number(m.sphere_area());
    j["tolerances"] = to_json(m.tolerances());
    return j;
}

Json to_json(const Classification& c) {
    Json j;
    j["non_parabolic"] = c.non_parabolic;
    j["finite_volume"] = c.finite_volume;
    j["green_growth_slope"] = number(c.green_growth_slope);
    j["volume_growth_slope"] = number(c.volume_growth_slope);
    return j;
}

Json to_json(const CurvatureScale& k) {
    Json j;
    j["radius"] = number(k.radius);
    j["k_tilde"] = number(k.k_tilde);
    j["k_hat"] = number(k.k_hat);
    j["k"] = number(k.k);
    j["theta"] = number(k.theta);
    return j;
}

Json to_json(const SlopeFit& f) {
    Json j;
    j["slope"] = number(f.slope);
    j["intercept"] = number(f.intercept);
    j["residual_rms"] = number(f.residual_rms);
    j["points_used"] = f.points_used;
    return j;
}

Json to_json(const SpectralEstimate& s) {
    Json j;
    j["value"] = number(s.value);
    j["barta_lower"] = number(s.barta_lower);
    j["rayleigh_upper"] = number(s.rayleigh_upper);
    j["outer_radius_used"] = number(s.outer_radius_used);
    j["converged"] = s.converged;
    Json ladder = Json::array();
    for (const auto& [r, v] : s.ladder) ladder.push_back(Json::array({number(r), number(v)}));
    j["ladder"] = std::move(ladder);
    return j;
}

Json to_json(const DivergenceReport& d) {
    Json j;
    j["divergent"] = d.divergent;
    j["growth_exponent"] = number(d.growth_exponent);
    j["radii"] = numbers(d.radii);
    j["partial"] = numbers(d.partial);
    return j;
}

Json to_json(const RadialSolution& s) {
    Json j;
    j["value_at_pole"] = number(s.value_at_pole);
    j["green_representation"] = number(s.green_representation);
    j["residual_rms"] = number(s.residual_rms);
    j["residual_points"] = s.residual_points;
    j["average"] = number(s.average);
    j["flux_at_outer"] = number(s.flux_at_outer);
    j["divergence"] = to_json(s.divergence);
    j["profile_points"] = s.samples.r.size();
    return j;
}

Json to_json(const VerdictEvidence& e) {
    Json j;
    j["verdict"] = to_string(e.verdict);
    j["slope"] = number(e.slope);
    j["head_slope"] = number(e.head_slope);
    j["tail_slope"] = number(e.tail_slope);
    j["limit_slope"] = number(e.limit_slope);
    j["cauchy_ratio"] = number(e.cauchy_ratio);
    j["growth_ratio"] = number(e.growth_ratio);
    j["harmonic_minorant"] = e.harmonic_minorant;
    j["dominated"] = e.dominated;
    return j;
}

Json to_json(const CriterionReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["zeta"] = r.zeta;
    j["mode"] = to_string(r.mode);
    j["lambda_source"] = r.lambda_source;
    j["j0"] = r.j0;
    j["jmax"] = r.jmax;
    j["fit"] = to_json(r.fit);
    j["evidence"] = to_json(r.evidence);
    Json terms = Json::array();
    for (const auto& t : r.terms) {
        Json row;
        row["j"] = t.j;
        row["theta_j"] = number(t.theta_j);
        row["theta_next"] = number(t.theta_next);
        row["lambda1"] = number(t.lambda1);
        row["lambda_converged"] = t.lambda_converged;
        row["zeta"] = number(t.zeta);
        row["term"] = number(t.term);
        row["partial"] = number(t.partial);
        terms.push_back(std::move(row));
    }
    j["terms"] = std::move(terms);
    return j;
}

Json to_json(const ContainmentReport& r) {
    Json j;
    j["passed"] = r.passed;
    j["a_bound"] = number(r.a_bound);
    j["c0"] = number(r.c0);
    j["gradient_sup"] = number(r.gradient_sup);
    j["m_max"] = r.m_max;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        Json o;
        o["m"] = row.m;
        o["theta"] = number(row.theta);
        o["log_a"] = number(row.log_a);
        o["radius"] = number(row.radius);
        o["pass"] = row.pass;
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    return j;
}

namespace {

Json sharpness_run(const SharpnessRun& r) {
    Json j;
    j["step"] = number(r.step);
    j["threshold"] = number(r.threshold);
    j["monotone"] = r.monotone;
    j["pass"] = r.pass;
    Json pts = Json::array();
    for (const auto& p : r.points) {
        Json o;
        o["alpha"] = number(p.alpha);
        o["classification"] = p.divergent ? "divergent" : "finite";
        o["growth_exponent"] = number(p.growth_exponent);
        o["value_at_pole"] = number(p.value_at_pole);
        o["residual_rms"] = number(p.residual_rms);
        o["boundary"] = p.boundary;
        pts.push_back(std::move(o));
    }
    j["points"] = std::move(pts);
    return j;
}

Json tail_run(const TailAsymptoticRun& r) {
    Json j;
    j["pass"] = r.pass;
    j["constant"] = number(r.constant);
    j["spread"] = number(r.spread);
    j["upper_spread"] = number(r.upper_spread);
    j["fit"] = to_json(r.fit);
    j["radii"] = numbers(r.radii);
    j["ratios"] = numbers(r.ratios);
    return j;
}

Json donnelly_run(const DonnellyRun& r) {
    Json j;
    j["pass"] = r.pass;
    j["fit"] = to_json(r.fit);
    j["radii"] = numbers(r.radii);
    j["log_tail"] = numbers(r.log_tail);
    return j;
}

Json levelset_run(const LevelSetRun& r) {
    Json j;
    j["max_ratio"] = number(r.max_ratio);
    Json es = Json::array();
    for (const auto& e : r.entries) {
        Json o;
        o["delta"] = number(e.delta);
        o["eps"] = number(e.eps);
        o["inner_radius"] = number(e.inner_radius);
        o["outer_radius"] = number(e.outer_radius);
        o["lambda1"] = number(e.lambda1);
        o["mass"] = number(e.mass);
        o["ratio"] = number(e.ratio);
        es.push_back(std::move(o));
    }
    j["entries"] = std::move(es);
    return j;
}

Json exponential_run(const ExponentialLowerRun& r) {
    Json j;
    j["pass"] = r.pass;
    j["points"] = r.points;
    j["failures"] = r.failures;
    j["worst_margin"] = number(r.worst_margin);
    j["worst_radius"] = number(r.worst_radius);
    return j;
}

}  // namespace

Json to_json(const SharpnessReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["gamma"] = number(r.gamma);
    j["dimension"] = r.dimension;
    j["alpha_min"] = number(r.alpha_min);
    j["alpha_max"] = number(r.alpha_max);
    j["theoretical_threshold"] = number(r.theoretical);
    j["pass"] = r.pass;
    j["base"] = sharpness_run(r.base);
    j["refined"] = sharpness_run(r.refined);
    return j;
}

Json to_json(const TailAsymptoticReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["gamma"] = number(r.gamma);
    j["dimension"] = r.dimension;
    j["expected_constant"] = number(r.expected);
    j["pass"] = r.pass;
    j["base"] = tail_run(r.base);
    j["refined"] = tail_run(r.refined);
    return j;
}

Json to_json(const DonnellyReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["green_kind"] = r.green_kind;
    j["lambda_ess"] = number(r.lambda_ess);
    j["skipped"] = r.skipped;
    j["note"] = r.note;
    j["pass"] = r.pass;
    if (!r.skipped) {
        j["bound"] = number(r.bound);
        j["base"] = donnelly_run(r.base);
        j["refined"] = donnelly_run(r.refined);
    }
    return j;
}

Json to_json(const LevelSetBoundReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["eps_min"] = number(r.eps_min);
    j["eps_max"] = number(r.eps_max);
    j["relative_change"] = number(r.relative_change);
    j["pass"] = r.pass;
    j["base"] = levelset_run(r.base);
    j["refined"] = levelset_run(r.refined);
    return j;
}

Json to_json(const ExponentialLowerReport& r) {
    Json j;
    j["manifold"] = r.manifold;
    j["c0"] = number(r.c0);
    j["pass"] = r.pass;
    j["base"] = exponential_run(r.base);
    j["refined"] = exponential_run(r.refined);
    return j;
}

Json green_summary(const GreenProfile& g) {
    const auto& m = g.manifold();
    Json j;
    j["kind"] = to_string(g.kind());
    if (g.kind() == GreenKind::dirichlet) j["radius"] = number(g.radius());
    j["normalization"] = number(g.normalization());
    j["truncated"] = g.truncated();
    if (g.kind() == GreenKind::parabolic) {
        j["volume"] = number(g.volume());
        j["mean_check"] = number(g.mean_check());
    }
    Json vals = Json::array();
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
        if (r > m.r_max()) continue;
        Json o;
        o["r"] = r;
        o["value"] = number(g.value(r));
        o["log_value"] = number(g.log_value(r));
        vals.push_back(std::move(o));
    }
    j["values"] = std::move(vals);
    if (g.kind() != GreenKind::parabolic) {
        Json flux = Json::array();
        for (double r : {0.5, 1.0, 2.0}) {
            if (g.kind() == GreenKind::dirichlet && r >= g.radius()) continue;
            const double s = g.value(r);
            Json o;
            o["level"] = number(s);
            o["flux"] = number(flux_on_level(g, s));
            flux.push_back(std::move(o));
        }
        j["flux"] = std::move(flux);
    }
    j["profile_points"] = g.samples().r.size();
    return j;
}

Json manifold_info(const ModelManifold& m) {
    Json j;
    j["manifold"] = to_json(m);
    j["description"] = describe_manifold(m);
    j["classification"] = to_json(classify(m));
    j["total_volume"] = number(total_volume(m));
    std::vector<double> radii;
    for (double r = 1.0; r <= m.r_max(); r *= 2.0)
        if (r > m.eps0()) radii.push_back(r);
    Json scales = Json::array();
    for (const auto& k : curvature_scales(m, radii)) scales.push_back(to_json(k));
    j["curvature_scales"] = std::move(scales);
    Json local = Json::array();
    for (double r : radii) {
        Json o;
        o["r"] = r;
        o["ricci_radial"] = number(ricci_radial(m, r));
        o["mean_curvature"] = number(mean_curvature(m, r));
        o["log_volume_ball"] = number(log_volume_ball(m, r));
        local.push_back(std::move(o));
    }
    j["radial"] = std::move(local);
    return j;
}

Json envelope(const std::string& command, const Json& payload) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "rsm";
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    for (const auto& [k, v] : payload.items()) j[k] = v;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& os, const CsvColumns& t) {
    for (std::size_t c = 0; c < t.header.size(); ++c) os << (c ? "," : "") << t.header[c];
    os << '\n';
    const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
    char buf[32];
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const double x = t.columns[c][i];
            if (c) os << ',';
            if (std::isnan(x)) os << "nan";
            else if (std::isinf(x)) os << (x > 0 ? "inf" : "-inf");
            else os.write(buf, std::to_chars(buf, buf + sizeof buf, x).ptr - buf);
        }
        os << '\n';
    }
}

CsvColumns to_csv(const RadialSamples& s, const std::string& value_name) {
    return {{"r", value_name}, {s.r, s.value}};
}

CsvColumns to_csv(const CriterionReport& r) {
    CsvColumns t{{"j", "theta_j", "theta_next", "lambda1", "zeta", "term", "partial"}, {}};
    t.columns.resize(t.header.size());
    for (const auto& s : r.terms) {
        const double row[] = {double(s.j), s.theta_j, s.theta_next, s.lambda1, s.zeta, s.term, s.partial};
        for (std::size_t c = 0; c < t.columns.size(); ++c) t.columns[c].push_back(row[c]);
    }
    return t;
}

CsvColumns to_csv(const SharpnessReport& r) {
    CsvColumns t{{"gamma", "step", "alpha", "divergent", "growth_exponent", "value_at_pole", "boundary"}, {}};
    t.columns.resize(t.header.size());
    for (const SharpnessRun* run : {&r.base, &r.refined}) {
        for (const auto& p : run->points) {
            const double row[] = {r.gamma, run->step, p.alpha, p.divergent ? 1.0 : 0.0, p.growth_exponent,
                                  p.value_at_pole, p.boundary ? 1.0 : 0.0};
            for (std::size_t c = 0; c < t.columns.size(); ++c) t.columns[c].push_back(row[c]);
        }
    }
    return t;
}

CsvColumns to_csv(const ContainmentReport& r) {
    CsvColumns t{{"m", "theta", "log_a", "radius", "pass"}, {}};
    t.columns.resize(t.header.size());
    for (const auto& s : r.rows) {
        const double row[] = {double(s.m), s.theta, s.log_a, s.radius, s.pass ? 1.0 : 0.0};
        for (std::size_t c = 0; c < t.columns.size(); ++c) t.columns[c].push_back(row[c]);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Verify suites

namespace {

constexpr double kSuiteRmax = 60.0;

ModelManifold euclid3() { return {3, WarpingProfile::euclidean(kSuiteRmax)}; }
ModelManifold hyper3() { return {3, WarpingProfile::space_form(-1.0, kSuiteRmax)}; }
ModelManifold pexp3(double g) { return {3, WarpingProfile::power_exp(g, kSuiteRmax)}; }
ModelManifold cusp3() { return {3, WarpingProfile::cusp(kSuiteRmax)}; }

struct Section {
    Json checks = Json::array();
    bool pass = true;
    void add(Json j, bool ok) {
        pass = pass && ok;
        checks.push_back(std::move(j));
    }
};

Section sharpness_suite(Exec exec, CsvColumns& csv) {
    Section s;
    for (double g : {2.0, 3.0}) {
        const double t = 1.0 - g / 2.0;
        const auto rep = sharpness_sweep(g, 3, t - 0.25, t + 0.25, 0.05, exec);
        const auto part = to_csv(rep);
        if (csv.header.empty()) csv = part;
        else
            for (std::size_t c = 0; c < csv.columns.size(); ++c)
                csv.columns[c].insert(csv.columns[c].end(), part.columns[c].begin(), part.columns[c].end());
        s.add(to_json(rep), rep.pass);
    }
    return s;
}

Section tail_suite(Exec exec) {
    Section s;
    for (double g : {0.0, 2.0, 3.0}) {
        const auto rep = tail_asymptotic_check(g, 3, exec);
        s.add(to_json(rep), rep.pass);
    }
    return s;
}

Section donnelly_suite(Exec exec) {
    Section s;
    for (const ModelManifold& m : {hyper3(), cusp3(), euclid3()}) {
        const auto rep = donnelly_check(m, exec);
        s.add(to_json(rep), rep.pass);
    }
    return s;
}

Section levelset_suite(Exec exec) {
    Section s;
    for (const ModelManifold& m : {euclid3(), hyper3()}) {
        const auto rep = levelset_bound_check(m, exec);
        s.add(to_json(rep), rep.pass);
    }
    return s;
}

// Each entry carries a negative control with C0 scaled by 0.1, which must fail.
Section exponential_suite(Exec exec) {
    Section s;
    for (const ModelManifold& m : {euclid3(), hyper3(), pexp3(2.0)}) {
        const auto rep = exponential_lower_check(m, std::nullopt, exec);
        Json j = to_json(rep);
        bool ok = rep.pass;
        if (m.warping().family() != Family::euclidean) {
            const auto ctl = exponential_lower_check(m, 0.1 * rep.c0, exec);
            Json c;
            c["c0"] = number(ctl.c0);
            c["control_failed"] = !ctl.pass;
            c["base"] = to_json(ctl)["base"];
            j["negative_control"] = std::move(c);
            ok = ok && !ctl.pass;
        }
        s.add(std::move(j), ok);
    }
    return s;
}

Section containment_suite(Exec exec) {
    Section s;
    for (const ModelManifold& m : {euclid3(), hyper3(), pexp3(2.0)}) {
        ContainmentOptions o;
        o.exec = exec;
        const auto rep = containment_check(m, o);
        Json j;
        j["manifold"] = describe_manifold(m);
        j["result"] = to_json(rep);
        bool ok = rep.passed;
        if (m.warping().family() != Family::euclidean) {
            ContainmentOptions neg = o;
            neg.c0 = 0.1 * rep.c0;
            const auto ctl = containment_check(m, neg);
            Json c;
            c["c0"] = number(ctl.c0);
            c["control_failed"] = !ctl.passed;
            c["m_max"] = ctl.m_max;
            j["negative_control"] = std::move(c);
            ok = ok && !ctl.passed;
        }
        j["pass"] = ok;
        s.add(std::move(j), ok);
    }
    return s;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"sharpness",        "tail_asymptotic",   "donnelly",
                                                "levelset",         "exponential_lower", "containment"};
    return names;
}

SuiteResult run_suite(const std::string& name, Exec exec) {
    bool known = name == "all";
    for (const auto& n : suite_names()) known = known || n == name;
    if (!known) {
        std::string list = "all";
        for (const auto& n : suite_names()) list += " | " + n;
        throw Error(ErrorKind::precondition, "unknown verify suite '" + name + "' (expected " + list + ")");
    }
    SuiteResult out;
    Json suites;
    bool pass = true;
    for (const auto& n : suite_names()) {
        if (name != "all" && name != n) continue;
        Section s;
        if (n == "sharpness") s = sharpness_suite(exec, out.csv);
        else if (n == "tail_asymptotic") s = tail_suite(exec);
        else if (n == "donnelly") s = donnelly_suite(exec);
        else if (n == "levelset") s = levelset_suite(exec);
        else if (n == "exponential_lower") s = exponential_suite(exec);
        else s = containment_suite(exec);
        Json j;
        j["pass"] = s.pass;
        j["checks"] = std::move(s.checks);
        suites[n] = std::move(j);
        pass = pass && s.pass;
    }
    out.report["suite"] = name;
    out.report["pass"] = pass;
    out.report["suites"] = std::move(suites);
    out.pass = pass;
    return out;
}

}  // namespace rsm
