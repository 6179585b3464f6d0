#include "rsm/criterion.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "rsm/error.hpp"
#include "rsm/green.hpp"
#include "rsm/spectral.hpp"

namespace rsm {

// ---------------------------------------------------------------------------
// Decay envelopes

DecayEnvelope DecayEnvelope::power(double alpha, double divisor) {
    if (!std::isfinite(alpha) || !(divisor > 0.0) || !std::isfinite(divisor))
        throw Error(ErrorKind::precondition, "power envelope: alpha must be finite and the divisor positive");
    DecayEnvelope z;
    z.family_ = Family::power;
    z.parameter_ = alpha;
    z.divisor_ = divisor;
    return z;
}

DecayEnvelope DecayEnvelope::constant(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::precondition, "constant envelope must be positive");
    DecayEnvelope z;
    z.family_ = Family::constant;
    z.parameter_ = c;
    return z;
}

DecayEnvelope DecayEnvelope::custom(std::string name, RealFn zeta) {
    if (!zeta) throw Error(ErrorKind::precondition, "custom envelope: empty function");
    DecayEnvelope z;
    z.family_ = Family::custom;
    z.name_ = std::move(name);
    z.fn_ = std::move(zeta);
    return z;
}

double DecayEnvelope::operator()(double r) const {
    switch (family_) {
    case Family::power: return std::pow(1.0 + r, parameter_) / divisor_;
    case Family::constant: return parameter_;
    case Family::custom: return fn_(r);
    }
    return 0.0;
}

std::string DecayEnvelope::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
    case Family::power:
        os << "(1+r)^" << parameter_;
        if (divisor_ != 1.0) os << "/" << divisor_;
        break;
    case Family::constant: os << parameter_; break;
    case Family::custom: os << name_; break;
    }
    return os.str();
}

void DecayEnvelope::validate(double r_max) const {
    constexpr int kPoints = 1000;
    double prev = 0.0;
    for (int i = 0; i <= kPoints; ++i) {
        const double r = r_max * i / kPoints;
        const double z = (*this)(r);
        if (!(z > 0.0) || !std::isfinite(z)) {
            std::ostringstream os;
            os << "decay envelope " << describe() << " is not positive and finite at r = " << r;
            throw Error(ErrorKind::precondition, os.str());
        }
        if (z < prev * (1.0 - 1e-14)) {
            std::ostringstream os;
            os << "decay envelope " << describe() << " decreases near r = " << r;
            throw Error(ErrorKind::precondition, os.str());
        }
        prev = z;
    }
}

std::string to_string(DecayEnvelope::Family f) {
    switch (f) {
    case DecayEnvelope::Family::power: return "power";
    case DecayEnvelope::Family::constant: return "constant";
    case DecayEnvelope::Family::custom: return "custom";
    }
    return "unknown";
}

std::string to_string(LambdaMode m) { return m == LambdaMode::barta_certified ? "barta_certified" : "numerical"; }

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::converges: return "Converges";
    case Verdict::diverges: return "Diverges";
    case Verdict::inconclusive: return "Inconclusive";
    }
    return "unknown";
}

LambdaMode parse_lambda_mode(const std::string& s) {
    if (s == "barta" || s == "barta_certified") return LambdaMode::barta_certified;
    if (s == "numerical") return LambdaMode::numerical;
    throw Error(ErrorKind::precondition, "unknown lambda mode '" + s + "' (expected barta or numerical)");
}

// ---------------------------------------------------------------------------
// Verdict

namespace {

double window_slope(std::span<const double> j, std::span<const double> b, std::size_t lo, std::size_t hi) {
    return fit_log_slope(j.subspan(lo, hi - lo + 1), b.subspan(lo, hi - lo + 1)).slope;
}

}  // namespace

VerdictEvidence assess_terms(std::span<const double> j, std::span<const double> b, LambdaMode mode,
                             const VerdictRules& rules) {
    const std::size_t n = b.size();
    if (j.size() != n) throw Error(ErrorKind::precondition, "assess_terms: index and term counts differ");
    if (n < std::max<std::size_t>(rules.min_terms, 8))
        throw Error(ErrorKind::precondition, "assess_terms: at least 8 terms are required");
    for (double x : b)
        if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorKind::precondition, "assess_terms: terms must be positive");

    VerdictEvidence ev;
    const std::size_t h = n / 2, q = n / 4;
    ev.slope = fit_log_slope(j, b).slope;
    ev.head_slope = window_slope(j, b, std::min(q, h - 3), h);
    ev.tail_slope = window_slope(j, b, h, n - 1);
    ev.limit_slope = ev.tail_slope;
    if (ev.tail_slope > ev.head_slope) {
        const double m1 = std::sqrt(j[std::min(q, h - 3)] * j[h]);
        const double m2 = std::sqrt(j[h] * j[n - 1]);
        const double c = (ev.tail_slope - ev.head_slope) / (1.0 / std::log(m2) - 1.0 / std::log(m1));
        ev.limit_slope = ev.tail_slope - c / std::log(m2);
    }

    std::vector<long double> s(n);
    long double run = 0;
    for (std::size_t i = 0; i < n; ++i) s[i] = run += b[i];
    const std::size_t q3 = (3 * n) / 4;
    ev.cauchy_ratio = static_cast<double>((s[n - 1] - s[q3 - 1]) / s[n - 1]);
    ev.growth_ratio = static_cast<double>(s[n - 1] / s[h - 1]);

    ev.harmonic_minorant = true;
    ev.dominated = true;
    const double p_dom = 1.0 + rules.margin;
    for (std::size_t i = h + 1; i < n; ++i) {
        const double prev = j[i - 1] * b[i - 1], cur = j[i] * b[i];
        if (cur < prev * (1.0 - 1e-12)) ev.harmonic_minorant = false;
        const double dprev = std::pow(j[i - 1], p_dom) * b[i - 1], dcur = std::pow(j[i], p_dom) * b[i];
        if (dcur > dprev * (1.0 + 1e-12)) ev.dominated = false;
    }

    const double conv_gate = -(1.0 + rules.margin), div_gate = -(1.0 - rules.margin);
    const bool slopes_ok = ev.tail_slope < conv_gate && ev.limit_slope < conv_gate;
    const bool tail_ok = ev.cauchy_ratio <= rules.cauchy_tol || (mode == LambdaMode::barta_certified && ev.dominated);
    if (slopes_ok && tail_ok) {
        ev.verdict = Verdict::converges;
    } else if ((ev.tail_slope > div_gate || ev.harmonic_minorant) && ev.growth_ratio >= rules.growth_gate) {
        ev.verdict = Verdict::diverges;
    }
    return ev;
}

VerdictEvidence verdict(const CriterionReport& report, const VerdictRules& rules) {
    std::vector<double> j, b;
    for (const auto& t : report.terms) {
        j.push_back(t.j);
        b.push_back(t.term);
    }
    return assess_terms(j, b, report.mode, rules);
}

// ---------------------------------------------------------------------------
// Series terms

CriterionReport series_terms(const ModelManifold& m, const DecayEnvelope& zeta, const SeriesOptions& opt) {
    if (opt.j0 < 2) throw Error(ErrorKind::precondition, "series_terms: j0 must be at least 2");
    if (opt.jmax < opt.j0) throw Error(ErrorKind::precondition, "series_terms: jmax below j0");
    if (opt.jmax * (1.0 + opt.margin) > m.r_max()) {
        std::ostringstream os;
        os << "series_terms: jmax (1 + margin) = " << opt.jmax * (1.0 + opt.margin) << " exceeds r_max = " << m.r_max();
        throw Error(ErrorKind::precondition, os.str());
    }
    zeta.validate(m.r_max());
    const ModelManifold& lm = opt.lambda_manifold ? *opt.lambda_manifold : m;

    CriterionReport rep;
    rep.manifold = m.warping().describe();
    rep.zeta = zeta.describe();
    rep.mode = opt.mode;
    rep.lambda_source = lm.warping().describe();
    rep.j0 = opt.j0;
    rep.jmax = opt.jmax;

    std::vector<double> radii;
    for (int j = opt.j0; j <= opt.jmax + 1; ++j) radii.push_back(j);
    const auto scales = curvature_scales(m, radii);

    const std::size_t count = static_cast<std::size_t>(opt.jmax - opt.j0 + 1);
    rep.terms = parallel_map<SeriesTerm>(count, opt.exec, [&](std::size_t i) {
        SeriesTerm t;
        t.j = opt.j0 + static_cast<int>(i);
        t.theta_j = scales[i].theta;
        t.theta_next = scales[i + 1].theta;
        const auto dom = RadialDomain::exterior(t.j - 1.0);
        if (opt.mode == LambdaMode::barta_certified) {
            t.lambda1 = barta_lower_bound(lm, dom);
            if (!(t.lambda1 > 0.0)) {
                std::ostringstream os;
                os << "series_terms: Barta bound vanishes on " << dom.describe()
                   << "; certification is unavailable, use numerical mode";
                throw Error(ErrorKind::precondition, os.str());
            }
        } else {
            const auto e = lambda1(lm, dom, Exec::serial);
            t.lambda1 = e.value;
            t.lambda_converged = e.converged;
            if (!(t.lambda1 > 0.0)) {
                std::ostringstream os;
                os << "series_terms: lambda1 of " << dom.describe() << " is not positive (" << t.lambda1 << ")";
                throw Error(ErrorKind::precondition, os.str());
            }
        }
        t.zeta = zeta(t.j - 1.0);
        t.term = (t.theta_next - t.theta_j) / (t.lambda1 * t.zeta);
        return t;
    });
    long double run = 0;
    std::vector<double> js, bs;
    for (auto& t : rep.terms) {
        run += t.term;
        t.partial = static_cast<double>(run);
        js.push_back(t.j);
        bs.push_back(t.term);
    }
    if (rep.terms.size() >= 4) rep.fit = fit_log_slope(js, bs);
    return rep;
}

// ---------------------------------------------------------------------------
// Power-law fixtures

ModelManifold power_law_model(double gamma, double r_max, int n) {
    if (gamma == 0.0) return {n, WarpingProfile::space_form(-1.0, r_max)};
    return {n, WarpingProfile::power_exp(gamma, r_max)};
}

namespace {

double fixture_radius(int jmax) { return std::max(60.0, std::ceil(1.5 * jmax)); }

}  // namespace

CriterionReport corollary1_check(double gamma, double eps, double c, const CorollaryOptions& opt) {
    if (!(gamma >= 0.0)) throw Error(ErrorKind::precondition, "corollary1_check: gamma must be >= 0");
    if (!(eps >= 0.0)) throw Error(ErrorKind::precondition, "corollary1_check: eps must be >= 0");
    if (!(c > 0.0)) throw Error(ErrorKind::precondition, "corollary1_check: C must be positive");
    const ModelManifold m = power_law_model(gamma, fixture_radius(opt.jmax), opt.dimension);
    const auto ess = lambda1_ess(m, opt.exec);
    if (!(ess.value > 1e-6)) {
        std::ostringstream os;
        os << "corollary1_check: essential spectrum estimate " << ess.value << " is not positive; hypothesis violated";
        throw Error(ErrorKind::precondition, os.str());
    }
    SeriesOptions so;
    so.jmax = opt.jmax;
    so.mode = opt.mode;
    so.exec = opt.exec;
    auto rep = series_terms(m, DecayEnvelope::power(1.0 + 0.5 * gamma + eps, c), so);
    rep.evidence = verdict(rep, opt.rules);
    return rep;
}

CriterionReport corollary2_check(double gamma1, double gamma2, double eps, const CorollaryOptions& opt) {
    if (!(gamma2 >= 0.0) || !(gamma1 >= gamma2))
        throw Error(ErrorKind::precondition, "corollary2_check: requires gamma1 >= gamma2 >= 0");
    if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "corollary2_check: eps must be positive");
    const double alpha = 1.0 + 0.5 * gamma1 - gamma2 + eps;
    if (!(alpha >= 0.0))
        throw Error(ErrorKind::precondition, "corollary2_check: decay exponent 1 + gamma1/2 - gamma2 + eps is negative");
    const double r_max = fixture_radius(opt.jmax);
    const ModelManifold m = power_law_model(gamma1, r_max, opt.dimension);
    SeriesOptions so;
    so.jmax = opt.jmax;
    so.mode = LambdaMode::barta_certified;
    so.lambda_manifold = power_law_model(gamma2, r_max, opt.dimension);
    so.exec = opt.exec;
    const auto zeta = alpha == 0.0 ? DecayEnvelope::constant(1.0) : DecayEnvelope::power(alpha);
    auto rep = series_terms(m, zeta, so);
    rep.evidence = verdict(rep, opt.rules);
    return rep;
}

// ---------------------------------------------------------------------------
// Containment

ContainmentReport containment_check(const ModelManifold& m, const ContainmentOptions& opt) {
    if (!classify(m).non_parabolic) throw Error(ErrorKind::precondition, "containment_check: manifold is parabolic");
    const GreenProfile g = minimal_green(m, opt.exec);
    ContainmentReport rep;
    const double g1 = g.value(1.0);
    rep.a_bound = std::max(g1, 1.0 / g1) * (1.0 + 1e-12);
    rep.gradient_sup = gradient_ratio_profile(g).sup;
    rep.c0 = opt.c0 ? *opt.c0 : opt.c0_factor * rep.gradient_sup;
    if (!(rep.c0 > 0.0)) throw Error(ErrorKind::precondition, "containment_check: C0 must be positive");

    // 2 a_m must remain a normal double: C0 theta(m) <= -log(DBL_MIN) - log A.
    const double budget = (-std::log(DBL_MIN) - std::log(rep.a_bound)) / rep.c0;
    std::vector<double> ms;
    std::vector<double> thetas;
    for (int k = 2; k <= opt.m_cap; ++k) {
        const double th = curvature_scale(m, k).theta;
        if (th > budget) break;
        ms.push_back(k);
        thetas.push_back(th);
    }
    if (ms.size() < 2) {
        std::ostringstream os;
        os << "containment_check: a_m leaves the representable range before m = 3 (C0 = " << rep.c0 << ")";
        throw Error(ErrorKind::budget, os.str());
    }
    rep.m_max = static_cast<int>(ms.back());
    rep.rows = parallel_map<ContainmentRow>(ms.size(), opt.exec, [&](std::size_t i) {
        ContainmentRow row;
        row.m = static_cast<int>(ms[i]);
        row.theta = thetas[i];
        row.log_a = -rep.c0 * row.theta - std::log(2.0 * rep.a_bound);
        row.radius = level_radius(g, 2.0 * std::exp(row.log_a));
        row.pass = row.radius >= row.m - 1.0;
        return row;
    });
    rep.passed = std::all_of(rep.rows.begin(), rep.rows.end(), [](const ContainmentRow& r) { return r.pass; });
    return rep;
}

}  // namespace rsm
