#include "rsm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rsm/error.hpp"

namespace rsm {

namespace {

constexpr double kBlendStart = 0.5;
constexpr double kBlendEnd = 1.0;

// log(sinh(x)) for x > 0 without overflow.
double log_sinh(double x) {
    if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

}  // namespace

std::string to_string(Family f) {
    switch (f) {
    case Family::euclidean: return "euclidean";
    case Family::space_form: return "space_form";
    case Family::power_exp: return "power_exp";
    case Family::cusp: return "cusp";
    case Family::custom: return "custom";
    }
    return "unknown";
}

WarpingProfile::Quintic WarpingProfile::Quintic::fit(double r0, double r1, double y0, double d0, double s0,
                                                     double y1, double d1, double s1) {
    Quintic q;
    q.r0 = r0;
    q.h = r1 - r0;
    const double h = q.h;
    q.c[0] = y0;
    q.c[1] = h * d0;
    q.c[2] = 0.5 * h * h * s0;
    const double a = y1 - (q.c[0] + q.c[1] + q.c[2]);
    const double b = h * d1 - (q.c[1] + 2.0 * q.c[2]);
    const double c = h * h * s1 - 2.0 * q.c[2];
    q.c[3] = 10.0 * a - 4.0 * b + 0.5 * c;
    q.c[4] = -15.0 * a + 7.0 * b - c;
    q.c[5] = 6.0 * a - 3.0 * b + 0.5 * c;
    return q;
}

void WarpingProfile::Quintic::eval(double r, double& y, double& d, double& s) const {
    const double t = (r - r0) / h;
    y = ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
    d = ((((5.0 * c[5] * t + 4.0 * c[4]) * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1]) / h;
    s = (((20.0 * c[5] * t + 12.0 * c[4]) * t + 6.0 * c[3]) * t + 2.0 * c[2]) / (h * h);
}

WarpingProfile WarpingProfile::euclidean(double r_max) {
    WarpingProfile w;
    w.family_ = Family::euclidean;
    w.r_max_ = r_max;
    w.validate();
    return w;
}

WarpingProfile WarpingProfile::space_form(double curvature, double r_max) {
    if (!(curvature < 0.0)) throw Error(ErrorKind::precondition, "space_form: curvature must be negative");
    WarpingProfile w;
    w.family_ = Family::space_form;
    w.curvature_ = curvature;
    w.r_max_ = r_max;
    w.validate();
    return w;
}

WarpingProfile WarpingProfile::power_exp(double gamma, double r_max, double scale_b) {
    if (!(gamma >= 0.0)) throw Error(ErrorKind::precondition, "power_exp: gamma must be >= 0");
    if (!(scale_b > 0.0)) throw Error(ErrorKind::precondition, "power_exp: B must be positive");
    WarpingProfile w;
    w.family_ = Family::power_exp;
    w.gamma_ = gamma;
    w.scale_b_ = scale_b;
    w.r_max_ = r_max;
    w.build_blend();
    w.validate();
    return w;
}

WarpingProfile WarpingProfile::cusp(double r_max) {
    WarpingProfile w;
    w.family_ = Family::cusp;
    w.r_max_ = r_max;
    w.build_blend();
    w.validate();
    return w;
}

WarpingProfile WarpingProfile::custom(CustomSamples s) {
    const std::size_t n = s.r.size();
    if (n < 2 || s.phi.size() != n || s.dphi.size() != n || s.d2phi.size() != n)
        throw Error(ErrorKind::precondition, "custom profile: need >= 2 samples of r, phi, phi', phi''");
    if (s.r.front() != 0.0) throw Error(ErrorKind::precondition, "custom profile: first sample must be at r = 0");
    for (std::size_t i = 1; i < n; ++i)
        if (!(s.r[i] > s.r[i - 1])) throw Error(ErrorKind::precondition, "custom profile: radii must increase");
    if (std::abs(s.phi[0]) > 1e-12 || std::abs(s.dphi[0] - 1.0) > 1e-9)
        throw Error(ErrorKind::precondition, "custom profile: requires phi(0) = 0 and phi'(0) = 1");
    WarpingProfile w;
    w.family_ = Family::custom;
    w.r_max_ = s.r.back();
    w.custom_ = std::make_shared<const CustomSamples>(std::move(s));
    w.validate();
    return w;
}

double WarpingProfile::max_radius() const { return family_ == Family::custom ? r_max_ : kInf; }

bool WarpingProfile::exponential_tail() const {
    return family_ == Family::space_form || family_ == Family::power_exp || family_ == Family::cusp;
}

double WarpingProfile::asymptotic_dlog() const {
    switch (family_) {
    case Family::euclidean: return 0.0;
    case Family::space_form: return std::sqrt(-curvature_);
    case Family::power_exp: return gamma_ == 0.0 ? scale_b_ : kInf;
    case Family::cusp: return -1.0;
    case Family::custom: break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

WarpJet WarpingProfile::far_jet(double r) const {
    if (family_ == Family::power_exp) {
        const double p = 1.0 + 0.5 * gamma_;
        const double d = scale_b_ * p * std::pow(r, p - 1.0);
        return {scale_b_ * std::pow(r, p), d, d * d + scale_b_ * p * (p - 1.0) * std::pow(r, p - 2.0)};
    }
    // cusp: phi = r e^{-r}
    return {std::log(r) - r, 1.0 / r - 1.0, 1.0 - 2.0 / r};
}

double WarpingProfile::log_phi_shift(double s, double d) const {
    if (d == 0.0) return 0.0;
    const double t = s + d;
    switch (family_) {
    case Family::euclidean: return std::log1p(d / s);
    case Family::space_form: {
        const double a = std::sqrt(-curvature_);
        return a * d + std::log1p(-std::exp(-2.0 * a * t)) - std::log1p(-std::exp(-2.0 * a * s));
    }
    case Family::power_exp:
        if (std::min(s, t) >= kBlendEnd) {
            const double p = 1.0 + 0.5 * gamma_;
            const double y = d / s;
            return scale_b_ * std::pow(s, p - 1.0) * d * (std::expm1(p * std::log1p(y)) / y);
        }
        break;
    case Family::cusp:
        if (std::min(s, t) >= kBlendEnd) return std::log1p(d / s) - d;
        break;
    case Family::custom: break;
    }
    return log_phi(t) - log_phi(s);
}

void WarpingProfile::build_blend() {
    const WarpJet j = far_jet(kBlendEnd);
    const double y1 = std::exp(j.log_phi);
    blend_ = Quintic::fit(kBlendStart, kBlendEnd, kBlendStart, 1.0, 0.0, y1, j.dlog * y1, j.d2ratio * y1);
    joints_ = {kBlendStart, kBlendEnd};
}

WarpJet WarpingProfile::jet(double r) const {
    if (!(r > 0.0)) throw Error(ErrorKind::domain, "warping profile evaluated at r <= 0");
    switch (family_) {
    case Family::euclidean: return {std::log(r), 1.0 / r, 0.0};
    case Family::space_form: {
        const double a = std::sqrt(-curvature_);
        return {log_sinh(a * r) - std::log(a), a / std::tanh(a * r), a * a};
    }
    case Family::power_exp:
    case Family::cusp: {
        if (r <= kBlendStart) return {std::log(r), 1.0 / r, 0.0};
        if (r < kBlendEnd) {
            double y, d, s;
            blend_.eval(r, y, d, s);
            return {std::log(y), d / y, s / y};
        }
        return far_jet(r);
    }
    case Family::custom: {
        if (r > r_max_) throw Error(ErrorKind::domain, "custom profile evaluated beyond its last sample");
        const auto& s = *custom_;
        auto it = std::upper_bound(s.r.begin(), s.r.end(), r);
        std::size_t k = static_cast<std::size_t>(it - s.r.begin());
        k = std::clamp<std::size_t>(k, 1, s.r.size() - 1);
        const auto q = Quintic::fit(s.r[k - 1], s.r[k], s.phi[k - 1], s.dphi[k - 1], s.d2phi[k - 1], s.phi[k],
                                    s.dphi[k], s.d2phi[k]);
        double y, d, dd;
        q.eval(r, y, d, dd);
        return {std::log(y), d / y, dd / y};
    }
    }
    return {};
}

double WarpingProfile::phi(double r) const { return r == 0.0 ? 0.0 : std::exp(jet(r).log_phi); }

double WarpingProfile::dphi(double r) const {
    if (r == 0.0) return family_ == Family::custom ? custom_->dphi[0] : 1.0;
    const auto j = jet(r);
    return j.dlog * std::exp(j.log_phi);
}

double WarpingProfile::d2phi(double r) const {
    if (r == 0.0) return family_ == Family::custom ? custom_->d2phi[0] : 0.0;
    const auto j = jet(r);
    return j.d2ratio * std::exp(j.log_phi);
}

std::string WarpingProfile::describe() const {
    std::ostringstream os;
    os << to_string(family_);
    if (family_ == Family::space_form) os << "(k=" << curvature_ << ")";
    if (family_ == Family::power_exp) os << "(gamma=" << gamma_ << ", B=" << scale_b_ << ")";
    return os.str();
}

void WarpingProfile::validate() const {
    if (!(r_max_ > 0.0) || !std::isfinite(r_max_)) throw Error(ErrorKind::precondition, "warping profile: r_max must be positive");
    constexpr int kGrid = 2000;
    for (int i = 1; i <= kGrid; ++i) {
        const double r = r_max_ * i / kGrid;
        const auto j = jet(r);
        if (!std::isfinite(j.log_phi) || !std::isfinite(j.dlog) || !std::isfinite(j.d2ratio))
            throw Error(ErrorKind::precondition, "warping profile: phi must be positive and finite on (0, r_max]");
    }
    for (double x : joints_) {
        // One-sided evaluation at the joint from both pieces.
        double yl, dl, sl, yr, dr, sr;
        if (x == kBlendStart) {
            yl = x, dl = 1.0, sl = 0.0;
            blend_.eval(x, yr, dr, sr);
        } else {
            blend_.eval(x, yl, dl, sl);
            const auto j = far_jet(x);
            yr = std::exp(j.log_phi);
            dr = j.dlog * yr;
            sr = j.d2ratio * yr;
        }
        auto jump = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); };
        if (jump(yl, yr) > 1e-9 || jump(dl, dr) > 1e-9 || jump(sl, sr) > 1e-9)
            throw Error(ErrorKind::consistency, "warping profile: splice is not C^2");
    }
}

ModelManifold::ModelManifold(int dimension, WarpingProfile warping, double eps0, Tolerances tol)
    : n_(dimension), warping_(std::move(warping)), eps0_(eps0), tol_(tol) {
    if (n_ < 2) throw Error(ErrorKind::precondition, "model manifold: dimension must be >= 2");
    if (!(eps0_ > 0.0 && eps0_ < 1.0)) throw Error(ErrorKind::precondition, "model manifold: eps0 must lie in (0, 1)");
    if (4.0 * eps0_ > warping_.r_max()) throw Error(ErrorKind::precondition, "model manifold: r_max must exceed 4 eps0");
    for (int i = 1; i <= 400; ++i) {
        const double r = 4.0 * eps0_ * i / 400.0;
        if (!(warping_.jet(r).dlog > 0.0))
            throw Error(ErrorKind::precondition, "model manifold: phi' must be positive on (0, 4 eps0]");
    }
    sphere_area_ = unit_sphere_area(n_);
}

QuadratureOptions ModelManifold::quad_options() const {
    QuadratureOptions o;
    o.abs_tol = 1e-300;
    o.rel_tol = tol_.quad_rel;
    o.max_subdivisions = 4000;
    return o;
}

double ModelManifold::log_density(double r) const { return (n_ - 1) * warping_.log_phi(r); }

namespace {

void check_radius(const ModelManifold& m, double r, const char* op) {
    if (!(r > 0.0 && r <= m.r_max()))
        throw Error(ErrorKind::domain, std::string(op) + ": radius must lie in (0, r_max]");
}

}  // namespace

double ricci_radial(const ModelManifold& m, double r) {
    check_radius(m, r, "ricci_radial");
    return -(m.dimension() - 1) * m.warping().jet(r).d2ratio;
}

double mean_curvature(const ModelManifold& m, double r) {
    check_radius(m, r, "mean_curvature");
    return (m.dimension() - 1) * m.warping().jet(r).dlog;
}

std::vector<CurvatureScale> curvature_scales(const ModelManifold& m, std::span<const double> radii) {
    std::vector<CurvatureScale> out;
    out.reserve(radii.size());
    const auto& w = m.warping();
    double lo = m.eps0();
    double kt = -kInf, kh = -kInf;
    for (double radius : radii) {
        if (!(radius > m.eps0())) throw Error(ErrorKind::domain, "curvature_scale: R must exceed eps0");
        if (radius > w.max_radius()) throw Error(ErrorKind::domain, "curvature_scale: R beyond the sampled profile");
        if (radius < lo) throw Error(ErrorKind::precondition, "curvature_scales: radii must be non-decreasing");
        if (radius > lo || kt == -kInf) {
            kt = std::max(kt, grid_supremum([&](double r) { return w.jet(r).d2ratio; }, lo, radius).value);
            kh = std::max(kh, grid_supremum([&](double r) { return w.jet(r).dlog; }, lo, radius).value);
            lo = radius;
        }
        CurvatureScale c;
        c.radius = radius;
        c.k_tilde = kt;
        c.k_hat = kh;
        c.k = std::max({1.0, kt, kh});
        c.theta = radius * std::sqrt(c.k);
        out.push_back(c);
    }
    return out;
}

CurvatureScale curvature_scale(const ModelManifold& m, double radius) {
    const double r[1] = {radius};
    return curvature_scales(m, r).front();
}

double volume_ball(const ModelManifold& m, double radius) {
    if (!(radius > 0.0 && radius <= m.warping().max_radius()))
        throw Error(ErrorKind::domain, "volume_ball: radius must be positive and within the profile");
    const auto r = integrate_piecewise([&](double t) { return t == 0.0 ? 0.0 : std::exp(m.log_density(t)); }, 0.0,
                                       radius, m.warping().joints(), m.quad_options());
    return m.sphere_area() * r.value;
}

namespace {

// Log-log slope of increments of int_1^T exp(sign * log_density) over a
// doubling ladder of T.
double growth_slope(const ModelManifold& m, double sign) {
    const auto& w = m.warping();
    std::vector<double> ladder;
    if (w.family() == Family::custom) {
        for (int k = 4; k >= 0; --k) ladder.push_back(w.r_max() / std::pow(2.0, k));
    } else {
        ladder = {8.0, 16.0, 32.0, 64.0, 128.0};
    }
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k + 1 < ladder.size(); ++k) {
        if (ladder[k] < 1.0) continue;
        const double li = log_integrate_exp([&](double t) { return sign * m.log_density(t); }, ladder[k],
                                            ladder[k + 1], w.joints(), m.quad_options());
        xs.push_back(std::log(ladder[k]));
        ys.push_back(li);
    }
    if (xs.size() < 2) throw Error(ErrorKind::inconclusive, "classify: r_max too small for a growth test");
    return fit_line(xs, ys).slope;
}

bool decide(double slope, const char* integral) {
    if (slope < -0.5) return true;
    if (slope > -0.1) return false;
    throw Error(ErrorKind::inconclusive, std::string("classification inconclusive for ") + integral);
}

}  // namespace

Classification classify(const ModelManifold& m) {
    Classification c;
    c.green_growth_slope = growth_slope(m, -1.0);
    c.volume_growth_slope = growth_slope(m, 1.0);
    c.non_parabolic = decide(c.green_growth_slope, "int^inf phi^{1-n}");
    c.finite_volume = decide(c.volume_growth_slope, "int^inf phi^{n-1}");
    return c;
}

double total_volume(const ModelManifold& m) {
    const auto& w = m.warping();
    if (!classify(m).finite_volume) return kInf;
    const double upper = w.family() == Family::custom ? w.r_max() : kInf;
    QuadratureOptions o = m.quad_options();
    double v = integrate_piecewise([&](double t) { return t == 0.0 ? 0.0 : std::exp(m.log_density(t)); }, 0.0, 1.0,
                                   w.joints(), o)
                   .value;
    v += integrate([&](double t) { return std::exp(m.log_density(t)); }, 1.0, upper, o).value;
    return m.sphere_area() * v;
}

}  // namespace rsm
