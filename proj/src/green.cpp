#include "rsm/green.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rsm/error.hpp"

namespace rsm {

namespace {

constexpr double kTableStep = 0.25;
constexpr double kLogDrop = 800.0;           // exp(-800) is far below double resolution of any sum
constexpr double kFiniteVolumeProfile = 4.0;  // psi grows like e^{2r} on cusps
constexpr double kDivergenceSlope = -0.02;

double upper_limit(const ModelManifold& m) { return m.warping().max_radius(); }

std::vector<double> merged(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// int_a^b exp((n-1)(log phi(t) - log phi(ref)) * sign) * g(t) dt with the
// joints of the profile as breakpoints. The offset d = t - ref is the
// integration variable so that sharp peaks at ref stay resolved for large ref.
double scaled_integral(const ModelManifold& m, double a, double b, double ref, double sign, const RealFn& g,
                       std::span<const double> extra = {}, const QuadratureOptions* opt = nullptr) {
    if (!(b > a)) return 0.0;
    const double n1 = m.dimension() - 1;
    auto cuts = merged(m.warping().joints(), extra);
    for (double& c : cuts) c -= ref;
    auto f = [&](double d) {
        const double e = sign * n1 * m.warping().log_phi_shift(ref, d);
        if (!(e >= -745.0)) return 0.0;
        return std::exp(e) * g(ref + d);
    };
    const double lo = a == ref ? 0.0 : a - ref;
    const double hi = b == ref ? 0.0 : b - ref;
    return integrate_piecewise(f, lo, hi, cuts, opt ? *opt : m.quad_options()).value;
}

const RealFn kOne = [](double) { return 1.0; };

// First radius past a (doubling steps) where the exponent has fallen by kLogDrop.
double decay_cutoff(const RealFn& exponent, double a, double limit) {
    const double e0 = exponent(a);
    double step = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double t = a + step;
        if (t >= limit) return limit;
        if (exponent(t) < e0 - kLogDrop) return t;
        step *= 2.0;
    }
    throw BudgetExceeded("decay_cutoff: integrand does not decay", kInf, kInf);
}

std::vector<double> profile_grid(const ModelManifold& m, double radius, bool include_zero) {
    const double inv = std::round(1.0 / m.tolerances().profile_h);
    const std::size_t n = static_cast<std::size_t>(std::round(radius * inv));
    std::vector<double> g;
    for (std::size_t i = include_zero ? 0 : 1; i <= n; ++i) g.push_back(static_cast<double>(i) / inv);
    return g;
}

double profile_radius(const ModelManifold& m) {
    return std::min(m.tolerances().profile_radius, m.warping().max_radius());
}

}  // namespace

std::string to_string(GreenKind k) {
    switch (k) {
    case GreenKind::minimal: return "minimal";
    case GreenKind::dirichlet: return "dirichlet";
    case GreenKind::parabolic: return "parabolic";
    }
    return "unknown";
}

void write_csv(std::ostream& os, const RadialSamples& s) {
    os << "r,value\n";
    char buf[64];
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        char* p = std::to_chars(buf, buf + 32, s.r[i]).ptr;
        *p++ = ',';
        p = std::to_chars(p, buf + sizeof buf, s.value[i]).ptr;
        *p++ = '\n';
        os.write(buf, p - buf);
    }
}

// ---------------------------------------------------------------------------
// GreenProfile

double GreenProfile::scaled_tail(double r) const {
    const double upper = kind_ == GreenKind::dirichlet ? radius_ : upper_limit(*m_);
    if (r >= upper) return 0.0;
    const double kappa = (m_->dimension() - 1) * std::abs(m_->warping().jet(r).dlog);
    std::vector<double> near;
    for (double k : {1.0, 10.0, 100.0})
        if (kappa > 0.0 && std::isfinite(kappa)) near.push_back(r + k / kappa);
    return scaled_integral(*m_, r, upper, r, -1.0, kOne, near);
}

double GreenProfile::parabolic_q(double t) const {
    return scaled_integral(*m_, t, upper_limit(*m_), t, 1.0, kOne) / volume_;
}

double GreenProfile::parabolic_offset(double r) const {
    // Nearest table node, then a short adaptive piece.
    const double k = std::clamp(std::round(r / kTableStep), 1.0, static_cast<double>(table_r_.size()));
    const std::size_t idx = static_cast<std::size_t>(k) - 1;
    const double t = table_r_[idx];
    double piece = 0.0;
    if (r != t) {
        const auto res = integrate_piecewise([&](double s) { return parabolic_q(s); }, std::min(r, t), std::max(r, t),
                                             m_->warping().joints(), m_->quad_options());
        piece = r > t ? res.value : -res.value;
    }
    return -(table_i_[idx] + piece);
}

double GreenProfile::value(double r) const {
    if (!(r > 0.0)) throw Error(ErrorKind::domain, "GreenProfile: radius must be positive");
    if (r > m_->warping().max_radius()) throw Error(ErrorKind::domain, "GreenProfile: radius beyond the profile");
    if (kind_ == GreenKind::parabolic) return constant_ + parabolic_offset(r);
    return std::exp(log_value(r));
}

double GreenProfile::log_value(double r) const {
    if (!(r > 0.0)) throw Error(ErrorKind::domain, "GreenProfile: radius must be positive");
    if (kind_ == GreenKind::parabolic) return std::log(std::abs(value(r)));
    if (r >= radius_) return -kInf;
    const double j = scaled_tail(r);
    if (!(j > 0.0)) return -kInf;
    return -std::log(m_->sphere_area()) - (m_->dimension() - 1) * m_->warping().log_phi(r) + std::log(j);
}

double GreenProfile::scale(double r) const {
    if (kind_ == GreenKind::parabolic) return std::abs(value(r)) / parabolic_q(r);
    return scaled_tail(r);
}

double GreenProfile::log_derivative(double r) const {
    double h = 1e-3 * std::min(r, scale(r));
    if (kind_ == GreenKind::dirichlet) h = std::min(h, (radius_ - r) / 3.0);
    if (!(h > 0.0)) throw Error(ErrorKind::domain, "log_derivative: radius outside the open domain");
    const double fp2 = log_value(r + 2 * h), fp1 = log_value(r + h);
    const double fm1 = log_value(r - h), fm2 = log_value(r - 2 * h);
    return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

GreenProfile minimal_green(const ModelManifold& m, Exec exec) {
    if (!classify(m).non_parabolic)
        throw Error(ErrorKind::precondition, "minimal_green: manifold is parabolic; use parabolic_green");
    GreenProfile g;
    g.kind_ = GreenKind::minimal;
    g.m_ = std::make_shared<const ModelManifold>(m);
    g.truncated_ = std::isfinite(m.warping().max_radius());
    g.samples_.r = profile_grid(m, profile_radius(m), false);
    g.samples_.value = parallel_map<double>(g.samples_.r.size(), exec, [&](std::size_t i) {
        return g.value(g.samples_.r[i]);
    });
    return g;
}

GreenProfile dirichlet_green(const ModelManifold& m, double radius, Exec exec) {
    if (!(radius > 0.0 && radius <= m.warping().max_radius()))
        throw Error(ErrorKind::domain, "dirichlet_green: radius must be positive and within the profile");
    GreenProfile g;
    g.kind_ = GreenKind::dirichlet;
    g.m_ = std::make_shared<const ModelManifold>(m);
    g.radius_ = radius;
    g.samples_.r = profile_grid(m, std::min(radius, profile_radius(m)), false);
    g.samples_.value = parallel_map<double>(g.samples_.r.size(), exec, [&](std::size_t i) {
        return g.samples_.r[i] >= radius ? 0.0 : g.value(g.samples_.r[i]);
    });
    return g;
}

GreenProfile parabolic_green(const ModelManifold& m, Exec exec) {
    const auto cls = classify(m);
    if (cls.non_parabolic || !cls.finite_volume)
        throw Error(ErrorKind::precondition, "parabolic_green: needs a parabolic manifold of finite volume");
    GreenProfile g;
    g.kind_ = GreenKind::parabolic;
    g.m_ = std::make_shared<const ModelManifold>(m);
    g.volume_ = total_volume(m);
    g.truncated_ = std::isfinite(m.warping().max_radius());
    const auto& w = m.warping();
    const double omega = m.sphere_area();
    const double n1 = m.dimension() - 1;
    const auto opts = m.quad_options();
    const double top = std::min(std::max(m.r_max(), profile_radius(m)), w.max_radius());

    // Table of int_1^{t_k} q on t_k = k * kTableStep.
    const std::size_t nodes = static_cast<std::size_t>(std::floor(top / kTableStep));
    g.table_r_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) g.table_r_[k] = static_cast<double>(k + 1) * kTableStep;
    const auto cells = parallel_map<double>(nodes - 1, exec, [&](std::size_t k) {
        return integrate_piecewise([&](double s) { return g.parabolic_q(s); }, g.table_r_[k], g.table_r_[k + 1],
                                   w.joints(), opts)
            .value;
    });
    const std::size_t one = static_cast<std::size_t>(std::round(1.0 / kTableStep)) - 1;
    g.table_i_.assign(nodes, 0.0);
    long double run = 0;
    for (std::size_t k = one; k + 1 < nodes; ++k) {
        run += cells[k];
        g.table_i_[k + 1] = static_cast<double>(run);
    }
    run = 0;
    for (std::size_t k = one; k > 0; --k) {
        run -= cells[k - 1];
        g.table_i_[k - 1] = static_cast<double>(run);
    }

    // Mean-zero constant by exchanging the order of integration.
    auto head = [&](double t) {
        const double wt = integrate_piecewise([&](double s) { return std::exp(n1 * w.log_phi(s)); }, 0.0, t,
                                              w.joints(), opts)
                              .value;
        return g.parabolic_q(t) * wt;
    };
    auto tail = [&](double t) {
        const double ld = n1 * w.log_phi(t);
        if (ld < -1400.0) return 0.0;
        const double s = g.parabolic_q(t) * g.volume_;
        return s * s * std::exp(ld) / g.volume_;
    };
    const double head_i = integrate_piecewise(head, 0.0, 1.0, w.joints(), opts).value;
    const double tail_i = integrate_piecewise(tail, 1.0, upper_limit(m), w.joints(), opts).value;
    g.constant_ = -(omega / g.volume_) * (head_i - tail_i);

    // Independent check of the normalization by direct quadrature of G.
    auto dens = [&](double r) { return n1 * w.log_phi(r); };
    const double cut = std::isfinite(w.max_radius()) ? w.max_radius() : decay_cutoff(dens, 1.0, kInf);
    g.mean_check_ = omega * integrate_piecewise(
                                [&](double r) {
                                    const double ld = dens(r);
                                    return ld < -745.0 ? 0.0 : g.value(r) * std::exp(ld);
                                },
                                0.0, cut, merged(w.joints(), std::vector<double>{kTableStep}), opts)
                                .value;

    // Samples anchored at r = 1, where G equals the constant.
    const auto grid = profile_grid(m, profile_radius(m), false);
    const auto sc = parallel_map<double>(grid.size() - 1, exec, [&](std::size_t i) {
        return integrate_piecewise([&](double s) { return g.parabolic_q(s); }, grid[i], grid[i + 1], w.joints(), opts)
            .value;
    });
    const std::size_t anchor = static_cast<std::size_t>(std::round(1.0 / m.tolerances().profile_h)) - 1;
    g.samples_.r = grid;
    g.samples_.value.assign(grid.size(), g.constant_);
    if (anchor < grid.size()) {
        long double acc = g.constant_;
        for (std::size_t i = anchor; i + 1 < grid.size(); ++i) {
            acc -= sc[i];
            g.samples_.value[i + 1] = static_cast<double>(acc);
        }
        acc = g.constant_;
        for (std::size_t i = anchor; i > 0; --i) {
            acc += sc[i - 1];
            g.samples_.value[i - 1] = static_cast<double>(acc);
        }
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i) g.samples_.value[i] = g.value(grid[i]);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Sources

RadialSource zero_source() {
    RadialSource s;
    s.name = "zero";
    s.f = [](double) { return 0.0; };
    s.is_zero = true;
    return s;
}

RadialSource exp_source(double rate) {
    std::ostringstream os;
    os << "exp(-" << rate << " r)";
    return {os.str(), [rate](double r) { return std::exp(-rate * r); }, {}, false};
}

RadialSource power_source(double alpha) {
    std::ostringstream os;
    os << "(1+r)^(-" << alpha << ")";
    return {os.str(), [alpha](double r) { return std::pow(1.0 + r, -alpha); }, {}, false};
}

RadialSource bump_source(const ModelManifold& m) {
    auto shape = [](double r) {
        if (r >= 1.0) return 0.0;
        const double s = 1.0 - r * r;
        return s * s * s;
    };
    const double n1 = m.dimension() - 1;
    const double mass =
        m.sphere_area() * integrate_piecewise([&](double t) { return shape(t) * std::exp(n1 * m.warping().log_phi(t)); },
                                              0.0, 1.0, m.warping().joints(), m.quad_options())
                              .value;
    const double c = 1.0 / mass;
    return {"bump", [shape, c](double r) { return c * shape(r); }, {1.0}, false};
}

// ---------------------------------------------------------------------------
// Poisson, non-parabolic path

namespace {

// P(s) = phi(s)^{1-n} int_0^s f phi^{n-1}.
double poisson_flux(const ModelManifold& m, const RadialSource& f, double s) {
    std::vector<double> near{s - 1.0, s - 0.1, s - 0.01};
    const double kappa = (m.dimension() - 1) * std::abs(m.warping().jet(s).dlog);
    for (double k : {1.0, 10.0, 100.0})
        if (k < kappa) near.push_back(s - k / kappa);
    near.insert(near.end(), f.kinks.begin(), f.kinks.end());
    return scaled_integral(m, 0.0, s, s, 1.0, f.f, near);
}

}  // namespace

DivergenceReport poisson_divergence_test(const ModelManifold& m, const RadialSource& f, Exec exec) {
    DivergenceReport rep;
    if (f.is_zero) {
        rep.growth_exponent = -kInf;
        return rep;
    }
    const auto& w = m.warping();
    std::vector<double> ladder;
    if (std::isfinite(w.max_radius())) {
        for (int k = 5; k >= 0; --k) ladder.push_back(w.max_radius() / std::pow(2.0, k));
    } else {
        ladder = {25.0, 50.0, 100.0, 200.0, 400.0, 800.0};
    }
    QuadratureOptions o = m.quad_options();
    o.rel_tol = std::max(o.rel_tol, 1e-10);
    const auto pieces = parallel_map<double>(ladder.size(), exec, [&](std::size_t k) {
        const double a = k == 0 ? 0.0 : ladder[k - 1];
        return integrate_piecewise([&](double s) { return poisson_flux(m, f, s); }, a, ladder[k],
                                   merged(w.joints(), f.kinks), o)
            .value;
    });
    long double run = 0;
    std::vector<double> xs, inc;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        run += pieces[k];
        rep.radii.push_back(ladder[k]);
        rep.partial.push_back(static_cast<double>(run));
        if (k > 0 && pieces[k] > 1e-300) {
            xs.push_back(ladder[k - 1]);
            inc.push_back(pieces[k]);
        }
    }
    if (xs.size() >= 4 && inc.back() > 1e-14 * std::abs(rep.partial.back())) {
        rep.growth_exponent = fit_log_slope(xs, inc).slope;
        rep.divergent = rep.growth_exponent > kDivergenceSlope;
    } else {
        rep.growth_exponent = -kInf;
    }
    return rep;
}

ResidualStats laplacian_residual(const ModelManifold& m, const RadialSamples& u, const RealFn& rhs, double r_from,
                                 std::span<const double> kinks) {
    ResidualStats st;
    const std::size_t n = u.r.size();
    if (n < 5) return st;
    const double h = u.r[1] - u.r[0];
    const double n1 = m.dimension() - 1;
    const auto cuts = merged(m.warping().joints(), kinks);
    long double sum = 0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double lo = u.r[i - 3], hi = u.r[i + 3];
        if (lo < r_from - 1e-12 || !(u.r[i] > 0.0)) continue;
        bool crosses = false;
        for (double c : cuts) crosses = crosses || (c > lo + 1e-12 && c < hi - 1e-12);
        if (crosses) continue;
        const double* v = &u.value[i];
        const double d2 = (2.0 * (v[3] + v[-3]) - 27.0 * (v[2] + v[-2]) + 270.0 * (v[1] + v[-1]) - 490.0 * v[0]) /
                          (180.0 * h * h);
        const double d1 = (v[3] - v[-3] - 9.0 * (v[2] - v[-2]) + 45.0 * (v[1] - v[-1])) / (60.0 * h);
        const double res = -(d2 + n1 * m.warping().jet(u.r[i]).dlog * d1) - rhs(u.r[i]);
        sum += static_cast<long double>(res) * res;
        st.max_abs = std::max(st.max_abs, std::abs(res));
        ++st.points;
    }
    st.rms = st.points ? std::sqrt(static_cast<double>(sum / st.points)) : 0.0;
    return st;
}

RadialSolution solve_poisson(const ModelManifold& m, const RadialSource& f, Exec exec) {
    if (!classify(m).non_parabolic)
        throw Error(ErrorKind::precondition, "solve_poisson: manifold is parabolic; use solve_poisson_finite_volume");
    RadialSolution sol;
    sol.divergence = poisson_divergence_test(m, f, exec);
    if (sol.divergence.divergent) {
        sol.value_at_pole = kInf;
        sol.green_representation = kInf;
        return sol;
    }
    const auto& w = m.warping();
    const auto grid = profile_grid(m, profile_radius(m), true);
    sol.samples.r = grid;
    sol.samples.value.assign(grid.size(), 0.0);
    if (f.is_zero) return sol;

    const auto opts = m.quad_options();
    const auto cuts = merged(w.joints(), f.kinks);
    auto flux = [&](double s) { return poisson_flux(m, f, s); };
    const auto cells = parallel_map<double>(grid.size() - 1, exec, [&](std::size_t i) {
        return integrate_piecewise(flux, grid[i], grid[i + 1], cuts, opts).value;
    });
    // u(R) = J(R) int_0^R f (phi/phi(R))^{n-1} + int_R^inf f J, J the scaled tail of G.
    const GreenProfile g = minimal_green(m, Exec::serial);
    const double big_r = grid.back();
    const double tail = g.scale(big_r) * scaled_integral(m, 0.0, big_r, big_r, 1.0, f.f, f.kinks) +
                        integrate_piecewise([&](double t) { return g.scale(t) * f.f(t); }, big_r, upper_limit(m), cuts,
                                            opts)
                            .value;
    long double acc = tail;
    sol.samples.value.back() = tail;
    for (std::size_t i = grid.size() - 1; i > 0; --i) {
        acc += cells[i - 1];
        sol.samples.value[i - 1] = static_cast<double>(acc);
    }
    sol.value_at_pole = sol.samples.value.front();

    // Pole formula int_0^inf J(t) f(t) dt.
    sol.green_representation =
        integrate_piecewise([&](double t) { return g.scale(t) * f.f(t); }, 0.0, upper_limit(m), cuts, opts).value;

    const auto res = laplacian_residual(m, sol.samples, f.f, 0.0, f.kinks);
    sol.residual_rms = res.rms;
    sol.residual_points = res.points;
    return sol;
}

// ---------------------------------------------------------------------------
// Poisson, parabolic finite-volume path

RadialSolution solve_poisson_finite_volume(const ModelManifold& m, const RadialSource& f, Exec exec) {
    const auto cls = classify(m);
    if (cls.non_parabolic || !cls.finite_volume)
        throw Error(ErrorKind::precondition, "solve_poisson_finite_volume: needs a parabolic finite-volume manifold");
    const auto& w = m.warping();
    const double omega = m.sphere_area();
    const double n1 = m.dimension() - 1;
    const auto opts = m.quad_options();
    const double upper = upper_limit(m);
    const double volume = total_volume(m);
    const RadialSource bump = bump_source(m);
    const auto cuts = merged(w.joints(), merged(f.kinks, bump.kinks));

    RadialSolution sol;
    const double top = std::min(kFiniteVolumeProfile, profile_radius(m));
    const auto grid = profile_grid(m, top, true);
    sol.samples.r = grid;
    sol.samples.value.assign(grid.size(), 0.0);
    sol.divergence.growth_exponent = -kInf;
    if (f.is_zero) return sol;

    auto dens = [&](double t) {
        const double ld = n1 * w.log_phi(t);
        return ld < -745.0 ? 0.0 : std::exp(ld);
    };
    const double alpha = omega * integrate_piecewise([&](double t) { return f.f(t) * dens(t); }, 0.0, upper, cuts, opts).value;
    const double to_rmax =
        omega * integrate_piecewise([&](double t) { return f.f(t) * dens(t); }, 0.0, m.r_max(), cuts, opts).value;
    sol.average = alpha;
    sol.flux_at_outer = to_rmax - alpha;
    if (std::abs(sol.flux_at_outer) > 1e-8 * std::max(1.0, std::abs(alpha))) {
        std::ostringstream os;
        os << "solve_poisson_finite_volume: zero-average violated, |F(r_max)| = " << std::abs(sol.flux_at_outer);
        throw BudgetExceeded(os.str(), sol.flux_at_outer, std::abs(sol.flux_at_outer));
    }

    auto fbar = [&](double t) { return f.f(t) - alpha * bump.f(t); };
    // f_bar integrates to zero, so partial integrals cancel: use an absolute target.
    QuadratureOptions cancel = opts;
    cancel.abs_tol = 1e-15 * std::max(1.0, std::abs(alpha) * bump.f(0.0));
    // u_bar'(r): the flux of f_bar through the sphere of radius r, rescaled.
    auto ubar_d = [&](double r) {
        if (r <= 1.0) return -scaled_integral(m, 0.0, r, r, 1.0, fbar, cuts, &cancel);
        return scaled_integral(m, r, upper, r, 1.0, f.f, cuts);
    };
    auto psi_d = [&](double r) {
        const double lr = w.log_phi(r);
        if (r <= 1.0) return -scaled_integral(m, 0.0, r, r, 1.0, bump.f, cuts);
        return -std::exp(-n1 * lr) / omega;
    };
    // Mean-zero constant: c = -(omega / V) int_0^inf u_bar'(t) T(t) dt, T(t) = int_t^inf phi^{n-1}.
    auto weighted = [&](double t) {
        const double lt = w.log_phi(t);
        if (n1 * lt < -1400.0) return 0.0;
        const double s = scaled_integral(m, t, upper, t, 1.0, kOne);
        return ubar_d(t) * s * std::exp(n1 * lt);
    };
    const double c = -(omega / volume) * integrate_piecewise(weighted, 0.0, upper, cuts, opts).value;

    const auto ub = cumulative_integral(ubar_d, grid, cuts, opts, exec);
    const auto ps = cumulative_integral(psi_d, grid, cuts, opts, exec);
    for (std::size_t i = 0; i < grid.size(); ++i) sol.samples.value[i] = c + ub[i] + alpha * ps[i];
    sol.value_at_pole = c;

    const GreenProfile g = parabolic_green(m, exec);
    sol.green_representation =
        omega * integrate_piecewise(
                    [&](double t) {
                        const double d = dens(t);
                        return d == 0.0 ? 0.0 : g.value(t) * fbar(t) * d;
                    },
                    0.0, std::isfinite(upper) ? upper : decay_cutoff([&](double t) { return n1 * w.log_phi(t); }, 1.0, kInf),
                    merged(cuts, std::vector<double>{0.25}), opts)
                    .value;

    const auto res = laplacian_residual(m, sol.samples, f.f, 0.0, cuts);
    sol.residual_rms = res.rms;
    sol.residual_points = res.points;
    return sol;
}

// ---------------------------------------------------------------------------
// Level sets, flux, tails

double level_radius(const GreenProfile& g, double s) {
    if (!std::isfinite(s) || (g.kind() != GreenKind::parabolic && !(s > 0.0)))
        throw Error(ErrorKind::domain, "level_radius: level outside the range of G");
    const double limit = g.kind() == GreenKind::dirichlet ? g.radius() : g.manifold().warping().max_radius();
    double lo = std::min(1.0, 0.5 * limit);
    for (int k = 0; g.value(lo) <= s; ++k) {
        if (k > 200) throw Error(ErrorKind::domain, "level_radius: level above G on the sampled range");
        lo *= 0.5;
    }
    double hi = lo;
    for (int k = 0;; ++k) {
        const double next = std::min(2.0 * hi, limit);
        if (next == limit && g.kind() == GreenKind::dirichlet) {
            hi = limit;
            break;
        }
        hi = next;
        if (g.value(hi) < s) break;
        if (hi >= limit || k > 2100) {
            std::ostringstream os;
            os << "level_radius: could not bracket level " << s << " below radius " << limit;
            throw Error(ErrorKind::domain, os.str());
        }
    }
    if (g.kind() == GreenKind::parabolic)
        return bisect_root([&](double r) { return g.value(r) - s; }, lo, hi, 1e-12);
    const double ls = std::log(s);
    return bisect_root(
        [&](double r) {
            const double v = r >= limit && g.kind() == GreenKind::dirichlet ? -kInf : g.log_value(r);
            return v - ls;
        },
        lo, hi, 1e-12 * std::max(1.0, lo));
}

LevelSetAnnulus level_set(const GreenProfile& g, double a, double b) {
    if (!(a >= 0.0 && a < b)) throw Error(ErrorKind::precondition, "level_set: need 0 <= a < b");
    LevelSetAnnulus ann;
    ann.a = a;
    ann.b = b;
    ann.inner_radius = std::isinf(b) ? 0.0 : level_radius(g, b);
    if (a == 0.0)
        ann.outer_radius = g.kind() == GreenKind::dirichlet ? g.radius() : kInf;
    else
        ann.outer_radius = level_radius(g, a);
    return ann;
}

double level_set_mass(const GreenProfile& g, const LevelSetAnnulus& ann) {
    if (!(ann.outer_radius > ann.inner_radius)) return 0.0;
    const auto& m = g.manifold();
    const double lw = std::log(m.sphere_area());
    const double n1 = m.dimension() - 1;
    auto f = [&](double r) {
        const double e = g.log_value(r) + lw + n1 * m.warping().log_phi(r);
        return e < -745.0 ? 0.0 : std::exp(e);
    };
    return integrate_piecewise(f, ann.inner_radius, std::min(ann.outer_radius, m.warping().max_radius()),
                               m.warping().joints(), m.quad_options())
        .value;
}

double flux_on_level(const GreenProfile& g, double s) {
    const double r = level_radius(g, s);
    const auto& m = g.manifold();
    const double e = g.log_value(r) + std::log(m.sphere_area()) + (m.dimension() - 1) * m.warping().log_phi(r);
    return std::abs(g.log_derivative(r)) * std::exp(e);
}

TailL2 tail_l2(const GreenProfile& g, double radius) {
    const auto& m = g.manifold();
    if (!(radius > 0.0 && radius < m.r_max())) throw Error(ErrorKind::domain, "tail_l2: radius must lie in (0, r_max)");
    const double lw = std::log(m.sphere_area());
    const double n1 = m.dimension() - 1;
    auto exponent = [&](double r) { return 2.0 * g.log_value(r) + lw + n1 * m.warping().log_phi(r); };
    TailL2 out;
    double upper = m.r_max();
    if (m.warping().exponential_tail()) {
        upper = decay_cutoff(exponent, radius, m.warping().max_radius());
    } else {
        out.truncated = true;
    }
    if (g.kind() == GreenKind::dirichlet) upper = std::min(upper, g.radius());
    if (!(upper > radius)) {
        out.log_value = -kInf;
        return out;
    }
    out.log_value = log_integrate_exp(exponent, radius, upper, m.warping().joints(), m.quad_options());
    out.value = std::exp(out.log_value);
    return out;
}

GradientRatio gradient_ratio_profile(const GreenProfile& g, std::size_t points) {
    const auto& m = g.manifold();
    const double lo = 3.0 * m.eps0(), hi = m.r_max() - 1.0;
    if (!(hi > lo) || points < 2) throw Error(ErrorKind::domain, "gradient_ratio_profile: empty radius range");
    GradientRatio out;
    std::vector<double> shifted(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        out.profile.r.push_back(r);
        shifted[i] = r + 1.0;
    }
    const auto scales = curvature_scales(m, shifted);
    out.profile.value = parallel_map<double>(points, Exec::parallel, [&](std::size_t i) {
        return std::abs(g.log_derivative(out.profile.r[i])) / std::sqrt(scales[i].k);
    });
    for (std::size_t i = 0; i < points; ++i) {
        if (out.profile.value[i] > out.sup) {
            out.sup = out.profile.value[i];
            out.sup_radius = out.profile.r[i];
        }
    }
    return out;
}

}  // namespace rsm
