#include "rsm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rsm/criterion.hpp"
#include "rsm/error.hpp"
#include "rsm/green.hpp"
#include "rsm/spectral.hpp"

namespace rsm {

namespace {

double relative_spread(std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mid = 0.5 * (*lo + *hi);
    return (*hi - *lo) / std::abs(mid);
}

std::vector<double> uniform(double a, double b, std::size_t points) {
    std::vector<double> x(points);
    for (std::size_t i = 0; i < points; ++i)
        x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Sharpness

namespace {

SharpnessRun sharpness_run(const ModelManifold& m, double theory, double alpha_min, double alpha_max, double step,
                           Exec exec) {
    SharpnessRun run;
    run.step = step;
    const auto count = static_cast<std::size_t>(std::floor((alpha_max - alpha_min) / step + 1e-9)) + 1;
    run.points = parallel_map<SharpnessPoint>(count, exec, [&](std::size_t i) {
        SharpnessPoint p;
        p.alpha = alpha_min + step * static_cast<double>(i);
        p.boundary = std::abs(p.alpha - theory) < step * (1.0 - 1e-9);
        const auto sol = solve_poisson(m, power_source(p.alpha), Exec::serial);
        p.divergent = sol.divergence.divergent;
        p.growth_exponent = sol.divergence.growth_exponent;
        p.value_at_pole = sol.value_at_pole;
        p.residual_rms = sol.residual_rms;
        return p;
    });
    // Divergent below the threshold, finite above: exactly one switch.
    std::size_t switches = 0;
    for (std::size_t i = 1; i < run.points.size(); ++i)
        if (run.points[i].divergent != run.points[i - 1].divergent) ++switches;
    run.monotone = switches == 1 && run.points.front().divergent && !run.points.back().divergent;
    if (run.monotone) {
        for (std::size_t i = 1; i < run.points.size(); ++i)
            if (run.points[i - 1].divergent && !run.points[i].divergent)
                run.threshold = 0.5 * (run.points[i - 1].alpha + run.points[i].alpha);
    } else {
        run.threshold = std::numeric_limits<double>::quiet_NaN();
    }
    run.pass = run.monotone && std::abs(run.threshold - theory) <= step * (1.0 + 1e-9);
    return run;
}

}  // namespace

SharpnessReport sharpness_sweep(double gamma, int n, double alpha_min, double alpha_max, double step, Exec exec) {
    if (!(gamma >= 0.0)) throw Error(ErrorKind::precondition, "sharpness_sweep: gamma must be >= 0");
    if (!(step > 0.0)) throw Error(ErrorKind::precondition, "sharpness_sweep: step must be positive");
    SharpnessReport rep;
    rep.gamma = gamma;
    rep.dimension = n;
    rep.alpha_min = alpha_min;
    rep.alpha_max = alpha_max;
    rep.theoretical = gamma == 0.0 ? 1.0 : 1.0 - 0.5 * gamma;
    if (!(alpha_min < rep.theoretical && alpha_max > rep.theoretical)) {
        std::ostringstream os;
        os << "sharpness_sweep: alpha range [" << alpha_min << ", " << alpha_max << "] does not straddle "
           << rep.theoretical;
        throw Error(ErrorKind::precondition, os.str());
    }
    const ModelManifold m = power_law_model(gamma, 60.0, n);
    rep.manifold = m.warping().describe();
    rep.base = sharpness_run(m, rep.theoretical, alpha_min, alpha_max, step, exec);
    rep.refined = sharpness_run(m, rep.theoretical, alpha_min, alpha_max, 0.5 * step, exec);
    rep.pass = rep.base.pass && rep.refined.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Tail asymptotics

TailAsymptoticReport tail_asymptotic_check(double gamma, int n, Exec exec) {
    if (!(gamma >= 0.0)) throw Error(ErrorKind::precondition, "tail_asymptotic_check: gamma must be >= 0");
    if (gamma == 0.0 && n != 3)
        throw Error(ErrorKind::precondition, "tail_asymptotic_check: the hyperbolic surrogate is defined for n = 3");
    const ModelManifold m = power_law_model(gamma, 60.0, n);
    const GreenProfile g = minimal_green(m, exec);
    const double n1 = n - 1;
    const double p = 1.0 + 0.5 * gamma;

    TailAsymptoticReport rep;
    rep.gamma = gamma;
    rep.dimension = n;
    rep.manifold = m.warping().describe();
    rep.expected = gamma == 0.0 ? 1.0 : 1.0 / (n1 * p);

    auto log_ratio = [&](double r) {
        if (gamma == 0.0) return g.log_value(r) + std::log(4.0 * std::numbers::pi / 2.0) + 2.0 * r;
        // int_r^inf phi^{1-n} = phi(r)^{1-n} J(r); log phi(r) = r^p for r >= 1.
        return std::log(g.scale(r)) + n1 * (std::pow(r, p) - m.warping().log_phi(r)) + 0.5 * gamma * std::log(r);
    };
    // Leading correction: e^{-2r} for the surrogate, r^{-p} otherwise.
    auto correction = [&](double r) { return gamma == 0.0 ? std::exp(-2.0 * r) : std::pow(r, -p); };

    auto run = [&](std::size_t points) {
        TailAsymptoticRun out;
        out.radii = uniform(2.0, 8.0, points);
        const auto logs = parallel_map<double>(points, exec, [&](std::size_t i) { return log_ratio(out.radii[i]); });
        std::vector<double> lr, upper_r, upper_x, upper_y;
        for (std::size_t i = 0; i < points; ++i) {
            out.ratios.push_back(std::exp(logs[i]));
            lr.push_back(std::log(out.radii[i]));
            if (out.radii[i] >= 5.0 - 1e-12) {
                upper_r.push_back(out.radii[i]);
                upper_x.push_back(correction(out.radii[i]));
                upper_y.push_back(out.ratios[i]);
            }
        }
        out.spread = relative_spread(out.ratios);
        out.upper_spread = relative_spread(upper_y);
        out.constant = fit_line(upper_x, upper_y).intercept;
        std::vector<double> scaled(points);
        for (std::size_t i = 0; i < points; ++i) scaled[i] = logs[i] - 0.5 * gamma * lr[i];
        out.fit = fit_line(lr, scaled);
        out.pass = out.upper_spread < 0.02 && std::abs(out.constant / rep.expected - 1.0) < 0.02;
        return out;
    };
    rep.base = run(25);
    rep.refined = run(49);
    rep.pass = rep.base.pass && rep.refined.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Donnelly decay

DonnellyReport donnelly_check(const ModelManifold& m, Exec exec) {
    DonnellyReport rep;
    rep.manifold = m.warping().describe();
    const auto cls = classify(m);
    const auto ess = lambda1_ess(m, exec);
    rep.lambda_ess = ess.value;
    if (!(ess.value > 1e-3)) {
        rep.skipped = true;
        rep.pass = true;
        rep.note = "lambda1_ess = 0, hypothesis void";
        rep.green_kind = "none";
        return rep;
    }
    rep.bound = -2.0 * std::sqrt(0.8 * ess.value) + 0.05;
    const GreenProfile g = cls.non_parabolic ? minimal_green(m, exec) : parabolic_green(m, exec);
    rep.green_kind = to_string(g.kind());
    // Parabolic tails carry a polynomial factor; the ladder starts further out.
    const double lo = cls.non_parabolic ? 2.0 : 20.0;
    const double hi = std::min(cls.non_parabolic ? 10.0 : 40.0, m.r_max() - 1.0);
    auto run = [&](std::size_t points) {
        DonnellyRun out;
        out.radii = uniform(lo, hi, points);
        out.log_tail = parallel_map<double>(points, exec, [&](std::size_t i) { return tail_l2(g, out.radii[i]).log_value; });
        out.fit = fit_line(out.radii, out.log_tail);
        out.pass = out.fit.slope <= rep.bound;
        return out;
    };
    rep.base = run(9);
    rep.refined = run(17);
    rep.pass = rep.base.pass && rep.refined.pass;
    return rep;
}

// ---------------------------------------------------------------------------
// Level-set bound

LevelSetBoundReport levelset_bound_check(const ModelManifold& m, Exec exec) {
    if (!classify(m).non_parabolic) throw Error(ErrorKind::precondition, "levelset_bound_check: manifold is parabolic");
    const GreenProfile g = minimal_green(m, exec);
    LevelSetBoundReport rep;
    rep.manifold = m.warping().describe();
    constexpr int kDeltas = 10;
    const double delta_min = std::ldexp(1.0, -kDeltas);
    const double edge = m.r_max() - 1.0;
    rep.eps_max = g.value(1.0);
    rep.eps_min = 1e-3 * rep.eps_max;
    const double floor = 2.0 * g.value(edge) / delta_min * (1.0 + 1e-9);
    if (rep.eps_min < floor) {
        rep.eps_min = floor;
        rep.eps_max = 1e3 * floor;
    }
    struct Case {
        double delta, eps;
    };
    std::vector<Case> cases;
    for (int k = 1; k <= kDeltas; ++k)
        for (int e = 0; e < 4; ++e) cases.push_back({std::ldexp(1.0, -k), rep.eps_max * std::pow(10.0, -e)});

    // Geometry of each case is shared by both resolutions.
    const auto geo = parallel_map<LevelSetEntry>(cases.size(), exec, [&](std::size_t i) {
        LevelSetEntry en;
        en.delta = cases[i].delta;
        en.eps = cases[i].eps;
        const auto wide = level_set(g, 0.5 * en.delta * en.eps, 2.0 * en.eps);
        en.inner_radius = wide.inner_radius;
        en.outer_radius = wide.outer_radius;
        en.mass = level_set_mass(g, level_set(g, en.delta * en.eps, en.eps));
        return en;
    });
    auto run = [&](double refine) {
        LevelSetRun out;
        out.entries = parallel_map<LevelSetEntry>(geo.size(), exec, [&](std::size_t i) {
            LevelSetEntry en = geo[i];
            const double h = radial_grid_spacing(m, en.inner_radius, en.outer_radius) * refine;
            en.lambda1 = solve_radial(m, en.inner_radius, en.outer_radius, h, Exec::serial).value;
            en.ratio = en.lambda1 * en.mass / (-std::log(en.delta) + 1.0);
            return en;
        });
        for (const auto& en : out.entries) out.max_ratio = std::max(out.max_ratio, en.ratio);
        return out;
    };
    rep.base = run(1.0);
    rep.refined = run(0.5);
    rep.relative_change = std::abs(rep.refined.max_ratio - rep.base.max_ratio) / rep.base.max_ratio;
    rep.pass = std::isfinite(rep.base.max_ratio) && rep.relative_change < 0.1;
    return rep;
}

// ---------------------------------------------------------------------------
// Exponential lower bound

ExponentialLowerReport exponential_lower_check(const ModelManifold& m, std::optional<double> c0, Exec exec) {
    if (!classify(m).non_parabolic)
        throw Error(ErrorKind::precondition, "exponential_lower_check: manifold is parabolic");
    const GreenProfile g = minimal_green(m, exec);
    ExponentialLowerReport rep;
    rep.manifold = m.warping().describe();
    rep.c0 = c0 ? *c0 : 1.1 * gradient_ratio_profile(g).sup;
    const double log_g1 = g.log_value(1.0);
    auto run = [&](std::size_t points) {
        ExponentialLowerRun out;
        out.points = points;
        const auto radii = uniform(1.0, m.r_max() - 1.0, points);
        std::vector<double> shifted(points);
        for (std::size_t i = 0; i < points; ++i) shifted[i] = radii[i] + 1.0;
        const auto scales = curvature_scales(m, shifted);
        const auto margins = parallel_map<double>(points, exec, [&](std::size_t i) {
            const double bound = log_g1 - rep.c0 * std::sqrt(scales[i].k) * radii[i];
            return g.log_value(radii[i]) - bound;
        });
        out.worst_margin = kInf;
        for (std::size_t i = 0; i < points; ++i) {
            if (margins[i] < -1e-9) ++out.failures;
            if (margins[i] < out.worst_margin) {
                out.worst_margin = margins[i];
                out.worst_radius = radii[i];
            }
        }
        out.pass = out.failures == 0;
        return out;
    };
    rep.base = run(200);
    rep.refined = run(399);
    rep.pass = rep.base.pass && rep.refined.pass;
    return rep;
}

}  // namespace rsm
