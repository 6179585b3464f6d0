#include "rsm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rsm/error.hpp"

namespace rsm {

namespace {

constexpr double kLadderSteps[] = {5.0, 10.0, 20.0, 40.0};
constexpr double kLadderAgreement = 1e-4;
constexpr double kEssAgreement = 1e-3;
constexpr std::size_t kMaxNodes = 4000000;
constexpr double kMaxStepTimesScale = 0.05;

// 3-point Gauss-Legendre on [0, 1].
constexpr double kGaussX[3] = {0.11270166537925831, 0.5, 0.8872983346207417};
constexpr double kGaussW[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

double log_weight(const ModelManifold& m, double r) {
    return r <= 0.0 ? -kInf : m.log_density(r);
}

struct ElementSums {
    long double num = 0;
    long double den = 0;
};

// Energy and mass of the linear function through (x0, V0), (x1, V1) against
// exp(LW(x) - ref). V are values already multiplied by exp(ref / 2).
ElementSums element(const ModelManifold& m, double x0, double x1, double V0, double V1, double ref) {
    const double len = x1 - x0;
    const double slope = (V1 - V0) / len;
    ElementSums s;
    for (int q = 0; q < 3; ++q) {
        const double t = kGaussX[q];
        const double w = std::exp(log_weight(m, x0 + t * len) - ref) * kGaussW[q] * len;
        const double v = V0 + (V1 - V0) * t;
        s.num += static_cast<long double>(w) * slope * slope;
        s.den += static_cast<long double>(w) * v * v;
    }
    return s;
}

double richardson(double l1, double v1, double l2, double v2) {
    const double a = l1 * l1, b = l2 * l2;
    return (b * v2 - a * v1) / (b - a);
}

bool agree(double x, double y, double rel) { return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)); }

}  // namespace

std::string RadialDomain::describe() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::exterior: os << "exterior(" << r1 << ")"; break;
    case Kind::annulus: os << "annulus(" << r1 << ", " << r2 << ")"; break;
    case Kind::whole: os << "whole"; break;
    }
    return os.str();
}

RadialEigen solve_radial(const ModelManifold& m, double a, double b, double h, Exec exec) {
    if (!(a >= 0.0 && b > a && h > 0.0)) throw Error(ErrorKind::precondition, "solve_radial: need 0 <= a < b, h > 0");
    if (b > m.warping().max_radius()) throw Error(ErrorKind::domain, "solve_radial: outer radius beyond the profile");
    const bool origin = a == 0.0;
    const double span = b - a;
    const double raw = origin ? span / h - 0.5 : span / h - 1.0;
    if (!(raw < static_cast<double>(kMaxNodes)))
        throw BudgetExceeded("solve_radial: grid exceeds the node budget", kInf, kInf);
    const std::size_t n = static_cast<std::size_t>(std::max(2.0, std::round(raw)));
    const double step = origin ? span / (static_cast<double>(n) + 0.5) : span / (static_cast<double>(n) + 1.0);

    std::vector<double> nodes(n), faces(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        nodes[i] = origin ? (static_cast<double>(i) + 0.5) * step : a + static_cast<double>(i + 1) * step;
    for (std::size_t i = 0; i <= n; ++i)
        faces[i] = origin ? static_cast<double>(i) * step : a + (static_cast<double>(i) + 0.5) * step;
    const auto ln = parallel_map<double>(n, exec, [&](std::size_t i) { return log_weight(m, nodes[i]); });
    const auto lf = parallel_map<double>(n + 1, exec, [&](std::size_t i) { return log_weight(m, faces[i]); });

    const Tridiagonal t = assemble_radial_operator(ln, lf, step, exec);
    const EigenPair ep = smallest_eigenpair_symmetric(t.diag, t.offdiag);
    std::vector<double> y = ep.vector;
    if (y[n / 2] < 0.0)
        for (double& v : y) v = -v;

    // Elements: boundary-to-node, node-to-node (n - 1), node-to-boundary.
    const auto parts = parallel_map<ElementSums>(n + 1, exec, [&](std::size_t e) {
        if (e == 0) {
            if (origin) {
                ElementSums s = element(m, 0.0, nodes[0], y[0], y[0], ln[0]);
                s.num = 0;
                return s;
            }
            return element(m, a, nodes[0], 0.0, y[0], ln[0]);
        }
        if (e == n) return element(m, nodes[n - 1], b, y[n - 1], 0.0, ln[n - 1]);
        const double ref = 0.5 * (ln[e - 1] + ln[e]);
        return element(m, nodes[e - 1], nodes[e], y[e - 1] * std::exp(0.5 * (ref - ln[e - 1])),
                       y[e] * std::exp(0.5 * (ref - ln[e])), ref);
    });
    long double num = 0, den = 0;
    for (const auto& p : parts) {
        num += p.num;
        den += p.den;
    }

    RadialEigen out;
    out.value = ep.value;
    out.rayleigh_upper = static_cast<double>(num / den);
    out.nodes = n;
    out.h = step;
    return out;
}

double radial_grid_spacing(const ModelManifold& m, double a, double first_outer) {
    const double span = first_outer - a;
    double h = m.tolerances().grid_h_rel * span;
    const double lo = a > 0.0 ? a : std::min(1.0, 0.5 * first_outer);
    const double half = 0.5 * (m.dimension() - 1);
    const auto s = grid_supremum([&](double r) { return half * std::abs(m.warping().jet(r).dlog); }, lo, first_outer,
                                 1e-3);
    if (s.value > 0.0) h = std::min(h, kMaxStepTimesScale / s.value);
    return std::max(h, span / static_cast<double>(kMaxNodes / 2));
}

double barta_lower_bound(const ModelManifold& m, const RadialDomain& d) {
    const auto& w = m.warping();
    double lo = 0.0, hi = m.r_max();
    bool unbounded = false;
    switch (d.kind) {
    case RadialDomain::Kind::exterior: lo = d.r1; unbounded = true; break;
    case RadialDomain::Kind::annulus: lo = d.r1; hi = d.r2; break;
    case RadialDomain::Kind::whole: lo = std::min(1e-3, 1e-3 * m.r_max()); unbounded = true; break;
    }
    const double n1 = m.dimension() - 1;
    double a = grid_infimum([&](double r) { return n1 * w.jet(r).dlog; }, lo, hi, 1e-9).value;
    a = std::min(a, n1 * w.jet(lo).dlog);
    a = std::min(a, n1 * w.jet(hi).dlog);
    if (unbounded) {
        const double limit = w.asymptotic_dlog();
        if (!std::isnan(limit)) a = std::min(a, n1 * limit);
    }
    return a > 0.0 ? 0.25 * a * a : 0.0;
}

SpectralEstimate lambda1(const ModelManifold& m, const RadialDomain& d, Exec exec) {
    const double r_max = m.r_max();
    SpectralEstimate est;
    if (d.kind == RadialDomain::Kind::annulus) {
        if (!(d.r1 > 0.0 && d.r2 > d.r1 && d.r2 <= r_max))
            throw Error(ErrorKind::domain, "lambda1: annulus radii must satisfy 0 < r1 < r2 <= r_max");
        const auto e = solve_radial(m, d.r1, d.r2, radial_grid_spacing(m, d.r1, d.r2), exec);
        est.value = e.value;
        est.rayleigh_upper = e.rayleigh_upper;
        est.outer_radius_used = d.r2;
        est.converged = true;
        est.ladder.emplace_back(d.r2, e.value);
        est.barta_lower = barta_lower_bound(m, d);
        return est;
    }

    const double a = d.kind == RadialDomain::Kind::exterior ? d.r1 : 0.0;
    if (d.kind == RadialDomain::Kind::exterior && !(a > 0.0 && a < r_max))
        throw Error(ErrorKind::domain, "lambda1: exterior radius must lie in (0, r_max)");
    std::vector<double> outer;
    for (double step : kLadderSteps) {
        const double L = std::min(a + step, r_max);
        if (L > a && (outer.empty() || L > outer.back())) outer.push_back(L);
    }
    const double h = radial_grid_spacing(m, a, outer.front());

    std::vector<RadialEigen> rungs;
    for (double L : outer) {
        rungs.push_back(solve_radial(m, a, L, h, exec));
        est.ladder.emplace_back(L, rungs.back().value);
        const std::size_t k = rungs.size();
        if (k >= 2 && agree(rungs[k - 1].value, rungs[k - 2].value, kLadderAgreement)) {
            est.converged = true;
            break;
        }
    }
    const std::size_t k = rungs.size();
    est.value = rungs.back().value;
    if (!est.converged && k >= 2) {
        // Truncation error of a Dirichlet cut at L behaves like c / (L - a)^2.
        const double l1 = outer[k - 2] - a, l2 = outer[k - 1] - a;
        const double x = richardson(l1, rungs[k - 2].value, l2, rungs[k - 1].value);
        est.value = std::clamp(x, 0.0, rungs.back().value);
        if (k >= 3) {
            const double l0 = outer[k - 3] - a;
            const double x0 = std::clamp(richardson(l0, rungs[k - 3].value, l1, rungs[k - 2].value), 0.0, kInf);
            est.converged = agree(x0, est.value, kLadderAgreement);
        }
    }
    est.rayleigh_upper = rungs.back().rayleigh_upper;
    est.outer_radius_used = outer[k - 1];
    est.barta_lower = barta_lower_bound(m, d);
    return est;
}

SpectralEstimate lambda1_ess(const ModelManifold& m, Exec exec) {
    const double top = std::min(64.0, m.r_max() - kLadderSteps[0]);
    if (top < 1.0) throw Error(ErrorKind::domain, "lambda1_ess: r_max too small for the exterior ladder");
    SpectralEstimate est;
    SpectralEstimate last;
    std::vector<double> vals;
    for (double R = 1.0; R <= top; R *= 2.0) {
        last = lambda1(m, RadialDomain::exterior(R), exec);
        if (!vals.empty() && last.value < vals.back() - kEssAgreement * std::max(1.0, std::abs(vals.back()))) {
            std::ostringstream os;
            os << "lambda1_ess: exterior eigenvalue decreased from " << vals.back() << " to " << last.value
               << " at R = " << R;
            throw Error(ErrorKind::consistency, os.str());
        }
        vals.push_back(last.value);
        est.ladder.emplace_back(R, last.value);
        const std::size_t k = vals.size();
        if (k >= 2 && std::abs(vals[k - 1] - vals[k - 2]) <= kEssAgreement * std::max(1e-3, std::abs(vals[k - 1]))) {
            est.converged = true;
            break;
        }
    }
    const std::size_t k = vals.size();
    est.value = vals.back();
    if (!est.converged && k >= 3) {
        const double d1 = vals[k - 2] - vals[k - 3], d2 = vals[k - 1] - vals[k - 2];
        // Increments halving with R doubling: c / R approach to the limit.
        if (d2 >= 0.0 && d2 <= 0.75 * d1) est.value = vals[k - 1] + d2 * d2 / (d1 - d2);
    }
    est.barta_lower = last.barta_lower;
    est.rayleigh_upper = last.rayleigh_upper;
    est.outer_radius_used = last.outer_radius_used;
    return est;
}

}  // namespace rsm
