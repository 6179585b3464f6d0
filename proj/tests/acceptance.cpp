// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 255).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "rsm/cli.hpp"
#include "rsm/criterion.hpp"
#include "rsm/green.hpp"
#include "rsm/spectral.hpp"
#include "rsm/verify.hpp"

using namespace rsm;
using std::numbers::pi;

namespace {

ModelManifold euclid() { return {3, WarpingProfile::euclidean(60.0)}; }
ModelManifold hyper() { return {3, WarpingProfile::space_form(-1.0, 60.0)}; }
ModelManifold pexp(double g) { return {3, WarpingProfile::power_exp(g, 60.0)}; }
ModelManifold cusp() { return {3, WarpingProfile::cusp(60.0)}; }

std::string g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << ' ' << id << ' ' << title << ": " << o.detail << " [" << g6(secs)
              << " s]" << std::endl;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome closed_form_green() {
    const auto ge = minimal_green(euclid());
    const auto gh = minimal_green(hyper());
    double worst_e = 0.0, worst_h = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double r = 0.2 + 0.2 * i;
        worst_e = std::max(worst_e, rel(ge.value(r), 1.0 / (4.0 * pi * r)));
        // coth r - 1 = 2 / expm1(2r).
        worst_h = std::max(worst_h, rel(gh.value(r), 2.0 / std::expm1(2.0 * r) / (4.0 * pi)));
    }
    return {worst_e < 1e-8 && worst_h < 1e-8,
            "max rel err euclidean " + g6(worst_e) + ", sinh " + g6(worst_h) + " over r = 0.2..10"};
}

Outcome flux_invariant() {
    double worst = 0.0;
    for (const ModelManifold& m : {euclid(), hyper(), pexp(2.0)}) {
        const auto g = minimal_green(m);
        for (int i = 0; i < 20; ++i) {
            const double r = 0.25 * std::pow(20.0, i / 19.0);
            worst = std::max(worst, std::abs(flux_on_level(g, g.value(r)) - 1.0));
        }
    }
    return {worst < 1e-6, "max |flux - 1| = " + g6(worst) + " on 20 levels x {euclidean, sinh, power_exp(2)}"};
}

Outcome poisson_oracle() {
    const auto a = solve_poisson(euclid(), exp_source(1.0));
    const auto b = solve_poisson(hyper(), exp_source(2.0));
    const double ea = rel(a.value_at_pole, 1.0), eb = rel(b.value_at_pole, 0.125);
    double rms = std::max(a.residual_rms, b.residual_rms);
    for (double alpha : {0.5, 1.0, 2.0}) rms = std::max(rms, solve_poisson(pexp(2.0), power_source(alpha)).residual_rms);
    return {ea < 1e-7 && eb < 1e-7 && rms < 1e-6,
            "rel err u(p) euclidean " + g6(ea) + ", sinh " + g6(eb) + "; max residual rms " + g6(rms)};
}

Outcome spectrum() {
    const auto ess = lambda1_ess(hyper());
    const double e_ess = rel(ess.value, 1.0);
    bool barta_ok = true, mono_ok = true;
    double worst_gap = kInf;
    for (const ModelManifold& m : {euclid(), hyper(), cusp(), pexp(1.0)}) {
        double prev = 0.0;
        for (double R : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            const auto e = lambda1(m, RadialDomain::exterior(R));
            barta_ok = barta_ok && e.barta_lower <= e.value;
            worst_gap = std::min(worst_gap, e.value - e.barta_lower);
            mono_ok = mono_ok && e.value >= prev - 1e-4 * std::max(1.0, prev);
            prev = e.value;
        }
        const auto ann = lambda1(m, RadialDomain::annulus(1.0, 3.0));
        barta_ok = barta_ok && ann.barta_lower <= ann.value;
        worst_gap = std::min(worst_gap, ann.value - ann.barta_lower);
    }
    return {e_ess < 0.02 && barta_ok && mono_ok,
            "sinh lambda1_ess = " + g6(ess.value) + " (rel err " + g6(e_ess) + "); min(lambda1 - barta) = " +
                g6(worst_gap) + "; exterior monotone " + (mono_ok ? "yes" : "no")};
}

// G - G_R is constant on [0, R] and equals G beyond R; it is sampled on
// [1, R + 1] where the subtraction loses the fewest digits.
Outcome exhaustion() {
    bool ok = true;
    double worst_abs = 0.0, worst_rel = 0.0;
    for (const ModelManifold& m : {euclid(), hyper(), pexp(2.0)}) {
        const auto g = minimal_green(m);
        double prev = kInf;
        for (double R : {2.0, 4.0, 8.0, 16.0}) {
            const auto gr = dirichlet_green(m, R);
            double sup = 0.0;
            for (int i = 0; i <= 400; ++i) {
                const double r = 1.0 + R * i / 400.0;
                sup = std::max(sup, g.value(r) - gr.value(r));
            }
            const double n1 = m.dimension() - 1;
            const double tail =
                integrate([&](double t) { return std::exp(-n1 * m.warping().log_phi(t)); }, R, kInf,
                          QuadratureOptions{0.0, 1e-13, 4000})
                    .value /
                m.sphere_area();
            worst_abs = std::max(worst_abs, std::abs(sup - tail));
            worst_rel = std::max(worst_rel, rel(sup, tail));
            ok = ok && sup < prev;
            prev = sup;
        }
    }
    return {ok && worst_abs < 1e-8, "sup|G - G_R| decreasing: " + std::string(ok ? "yes" : "no") +
                                        "; max abs err against the tail integral " + g6(worst_abs) +
                                        " (max rel err " + g6(worst_rel) + ")"};
}

Outcome criterion() {
    std::ostringstream os;
    bool ok = true;
    for (auto mode : {LambdaMode::numerical, LambdaMode::barta_certified}) {
        CorollaryOptions o;
        o.mode = mode;
        const auto c1 = corollary1_check(2.0, 0.5, 1.0, o);
        const bool slope_ok = std::abs(c1.fit.slope + 1.5) <= 0.1;
        const bool conv = c1.evidence.verdict == Verdict::converges;
        ok = ok && slope_ok && conv;
        os << "cor1(2, 0.5) " << to_string(mode) << ": slope " << g6(c1.fit.slope) << " (target -1.5 +- 0.1) "
           << to_string(c1.evidence.verdict) << "; ";
        const auto ctl = corollary1_check(2.0, 0.0, 1.0, o);
        const bool ctl_ok = ctl.evidence.verdict != Verdict::converges;
        ok = ok && ctl_ok;
        os << "eps=0 control " << to_string(ctl.evidence.verdict) << " slope " << g6(ctl.fit.slope) << "; ";
    }
    const auto c2 = corollary2_check(3.0, 3.0, 0.5);
    const bool c2_ok = c2.evidence.verdict == Verdict::converges;
    ok = ok && c2_ok;
    os << "cor2(3, 3) zeta " << c2.zeta << ": " << to_string(c2.evidence.verdict);
    return {ok, os.str()};
}

Outcome sharpness() {
    const auto t0 = std::chrono::steady_clock::now();
    std::ostringstream os;
    bool ok = true;
    for (double g : {2.0, 3.0}) {
        const double t = 1.0 - g / 2.0;
        const auto rep = sharpness_sweep(g, 3, t - 0.3, t + 0.3, 0.05);
        const bool good = rep.base.monotone && std::abs(rep.base.threshold - t) <= 0.05 + 1e-12;
        ok = ok && good && rep.pass;
        os << "gamma " << g6(g) << ": threshold " << g6(rep.base.threshold) << " (theory " << g6(t) << "), monotone "
           << (rep.base.monotone ? "yes" : "no") << "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs <= 300.0;
    os << "sweep time " << g6(secs) << " s";
    return {ok, os.str()};
}

Outcome donnelly() {
    const auto h = donnelly_check(hyper());
    const auto c = donnelly_check(cusp());
    const auto g = parabolic_green(cusp());
    const double v = g.volume();
    const auto res = laplacian_residual(cusp(), g.samples(), [v](double) { return -1.0 / v; }, 0.1, {});
    const bool ok = std::abs(h.base.fit.slope + 2.0) <= 0.05 && c.base.fit.slope <= c.bound &&
                    std::abs(g.mean_check()) < 1e-8 && res.max_abs < 1e-6;
    return {ok, "sinh slope " + g6(h.base.fit.slope) + "; cusp slope " + g6(c.base.fit.slope) + " vs bound " +
                    g6(c.bound) + "; mean " + g6(g.mean_check()) + "; max |residual| " + g6(res.max_abs) + " on " +
                    std::to_string(res.points) + " points"};
}

Outcome containment() {
    std::ostringstream os;
    bool ok = true;
    for (const ModelManifold& m : {euclid(), hyper(), pexp(2.0)}) {
        const auto rep = containment_check(m);
        ok = ok && rep.passed;
        os << m.warping().describe() << " m<=" << rep.m_max << " " << (rep.passed ? "pass" : "fail");
        if (m.warping().family() != Family::euclidean) {
            ContainmentOptions o;
            o.c0 = 0.1 * rep.c0;
            const auto neg = containment_check(m, o);
            ok = ok && !neg.passed;
            os << " (0.1 C0 control " << (neg.passed ? "passes" : "fails") << ")";
        }
        os << "; ";
    }
    return {ok, os.str()};
}

Outcome levelset() {
    const auto e = levelset_bound_check(euclid());
    const auto h = levelset_bound_check(hyper());
    return {e.relative_change < 0.1 && h.relative_change < 0.1,
            "euclidean max ratio " + g6(e.base.max_ratio) + " change " + g6(e.relative_change) + "; sinh max ratio " +
                g6(h.base.max_ratio) + " change " + g6(h.relative_change)};
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "rsm_acceptance";
    std::filesystem::create_directories(dir);
    std::string text[2];
    int codes[2];
    for (int k = 0; k < 2; ++k) {
        const auto path = (dir / ("suite" + std::to_string(k) + ".json")).string();
        std::ostringstream out, err;
        codes[k] = run_cli({"verify", "--suite", "all", "--json", path}, out, err);
        std::ifstream f(path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        text[k] = ss.str();
    }
    const bool same = !text[0].empty() && text[0] == text[1];
    return {same && codes[0] == 0 && codes[1] == 0, std::string(same ? "identical" : "different") + " (" +
                                                        std::to_string(text[0].size()) + " bytes), exit codes " +
                                                        std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
}

}  // namespace

int main() {
    report(1, "closed-form Green oracle", closed_form_green);
    report(2, "flux invariant", flux_invariant);
    report(3, "Poisson oracle", poisson_oracle);
    report(4, "spectrum", spectrum);
    report(5, "exhaustion", exhaustion);
    report(6, "series criterion", criterion);
    report(7, "sharpness", sharpness);
    report(8, "Donnelly decay", donnelly);
    report(9, "containment", containment);
    report(10, "level-set bound", levelset);
    report(11, "determinism", determinism);
    std::cout << (11 - failures) << "/11 criteria passed" << std::endl;
    return std::min(failures, 255);
}
