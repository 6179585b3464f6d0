#include "rsm/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "rsm/error.hpp"

namespace rsm {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

std::string where(double x) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite integrand value at t = " << x;
    return os.str();
}

// One Gauss-Kronrod 7/15 panel with the QUADPACK error heuristic.
template <class F>
Segment gk15(const F& f, double a, double b, std::size_t& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double s = f1[j] + f2[j];
        resk += kWgk[j] * s;
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * s;
    }
    evals += 15;
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double hl = std::abs(half);
    double err = std::abs((resk - resg) * half);
    resasc *= hl;
    resabs *= hl;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * resabs, err);
    return {a, b, resk * half, err};
}

template <class F>
QuadratureResult adapt(const F& f, double a, double b, const QuadratureOptions& opt) {
    std::size_t evals = 0;
    std::priority_queue<Segment> heap;
    std::vector<Segment> frozen;
    heap.push(gk15(f, a, b, evals));
    auto target = [&](double v) { return std::max(opt.abs_tol, opt.rel_tol * std::abs(v)); };

    double total = heap.top().value;
    double total_err = heap.top().error;
    std::size_t segments = 1;
    while (total_err > target(total)) {
        if (heap.empty()) break;
        if (segments >= opt.max_subdivisions) {
            throw BudgetExceeded("quadrature subdivision budget exhausted", total, total_err);
        }
        Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) <= 8.0 * kEps * std::max(std::abs(s.a), std::abs(s.b))) {
            frozen.push_back(s);
            continue;
        }
        Segment l = gk15(f, s.a, mid, evals);
        Segment r = gk15(f, mid, s.b, evals);
        total += l.value + r.value - s.value;
        total_err += l.error + r.error - s.error;
        heap.push(l);
        heap.push(r);
        ++segments;
    }
    if (heap.empty() && total_err > target(total)) {
        throw BudgetExceeded("quadrature stalled at roundoff-limited intervals", total, total_err);
    }

    // Resum in interval order so the result does not depend on heap history.
    std::vector<Segment> all = std::move(frozen);
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
    long double v = 0, e = 0;
    for (const auto& s : all) {
        v += s.value;
        e += s.error;
    }
    return {static_cast<double>(v), static_cast<double>(e), evals};
}

}  // namespace

QuadratureResult integrate(const RealFn& f, double a, double b, const QuadratureOptions& opt) {
    if (!(opt.abs_tol > 0.0 || opt.rel_tol > 0.0)) throw Error(ErrorKind::precondition, "integrate: tolerance must be positive");
    if (!(a < b)) throw Error(ErrorKind::precondition, "integrate: requires a < b");
    if (std::isinf(b)) {
        auto g = [&](double u) {
            const double t = a + (1.0 - u) / u;
            if (!std::isfinite(t)) return 0.0;
            const double y = f(t);
            if (!std::isfinite(y)) throw EvaluationError(where(t), t);
            return y / (u * u);
        };
        return adapt(g, 0.0, 1.0, opt);
    }
    auto g = [&](double t) {
        const double y = f(t);
        if (!std::isfinite(y)) throw EvaluationError(where(t), t);
        return y;
    };
    return adapt(g, a, b, opt);
}

QuadratureResult integrate(const RealFn& f, double a, double b, double tol) {
    QuadratureOptions opt;
    opt.abs_tol = tol;
    return integrate(f, a, b, opt);
}

QuadratureResult integrate_piecewise(const RealFn& f, double a, double b, std::span<const double> breakpoints,
                                     const QuadratureOptions& opt) {
    if (!(a < b)) throw Error(ErrorKind::precondition, "integrate_piecewise: requires a < b");
    std::vector<double> cuts{a};
    for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    QuadratureResult total;
    // Split the absolute tolerance between pieces; the relative one applies per piece.
    QuadratureOptions piece = opt;
    piece.abs_tol = opt.abs_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto r = integrate(f, cuts[i], cuts[i + 1], piece);
        total.value += r.value;
        total.error_estimate += r.error_estimate;
        total.evaluations += r.evaluations;
    }
    return total;
}

QuadratureResult integrate_with_envelope(const RealFn& f, double a, const TailEnvelope& env, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorKind::precondition, "integrate_with_envelope: tol must be positive");
    double t = std::max(a + 1.0, env.start);
    int doublings = 0;
    while (!(env.tail_bound(t) < 0.5 * tol)) {
        t = a + 2.0 * (t - a);
        if (++doublings > 60) throw Error(ErrorKind::budget, "tail envelope never drops below tol/2");
    }
    auto r = integrate(f, a, t, 0.5 * tol);
    r.error_estimate += env.tail_bound(t);
    return r;
}

double log_integrate_exp(const RealFn& exponent, double a, double b, std::span<const double> breakpoints,
                         const QuadratureOptions& opt) {
    double ref = -kInf, peak = a;
    auto probe = [&](double t) {
        const double e = exponent(t);
        if (std::isnan(e)) throw EvaluationError(where(t), t);
        if (e > ref) {
            ref = e;
            peak = t;
        }
    };
    if (std::isinf(b)) {
        for (double d = 0.0; d <= 64.0; d = (d == 0.0 ? 1.0 / 64.0 : 2.0 * d)) probe(a + d);
    } else {
        for (int i = 0; i <= 32; ++i) probe(a + (b - a) * i / 32.0);
        for (double x : breakpoints)
            if (x > a && x < b) probe(x);
    }
    if (!std::isfinite(ref)) {
        if (ref == -kInf) return -kInf;
        throw Error(ErrorKind::evaluation, "log_integrate_exp: exponent overflow");
    }
    QuadratureOptions o = opt;
    o.abs_tol = std::min(opt.abs_tol, 1e-300);
    if (o.rel_tol <= 0.0) o.rel_tol = 1e-12;
    auto g = [&](double t) { return std::exp(exponent(t) - ref); };
    if (std::isinf(b)) return ref + std::log(std::max(integrate(g, a, b, o).value, 0.0));
    // Geometric breakpoints around the probed maximum keep narrow peaks visible.
    std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
    for (int k = 1; k <= 12; ++k) {
        const double d = (b - a) * std::ldexp(1.0, -2 * k);
        for (double x : {peak - d, peak + d})
            if (x > a && x < b) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    const auto r = integrate_piecewise(g, a, b, cuts, o);
    if (r.value <= 0.0) return -kInf;
    return ref + std::log(r.value);
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x) {
    const std::size_t n = diag.size();
    double bmax = 0.0;
    for (double b : offdiag) bmax = std::max(bmax, b * b);
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, bmax);
    std::size_t count = 0;
    double q = diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = (diag[i] - x) - offdiag[i - 1] * offdiag[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0) ++count;
    }
    return count;
}

double smallest_eigenvalue_symmetric(std::span<const double> diag, std::span<const double> offdiag) {
    const std::size_t n = diag.size();
    if (n == 0 || offdiag.size() + 1 != n) throw Error(ErrorKind::precondition, "tridiagonal: size mismatch");
    if (n == 1) return diag[0];
    double lo = kInf, hi = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? std::abs(offdiag[i - 1]) : 0.0;
        const double right = i + 1 < n ? std::abs(offdiag[i]) : 0.0;
        lo = std::min(lo, diag[i] - left - right);
        hi = std::min(hi, diag[i]);
    }
    const double scale = std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
    lo -= 4.0 * kEps * scale;
    hi += 4.0 * kEps * scale;
    while (sturm_count(diag, offdiag, hi) == 0) hi += 4.0 * kEps * scale + std::abs(hi - lo);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(diag, offdiag, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Solves (A - shift I) x = rhs for tridiagonal A with partial pivoting.
void shifted_tridiagonal_solve(std::span<const double> diag, std::span<const double> offdiag, double shift,
                               std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> d(n), du(offdiag.begin(), offdiag.end()), dl(offdiag.begin(), offdiag.end());
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = diag[i] - shift;
        norm = std::max(norm, std::abs(diag[i]) + (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) +
                                  (i + 1 < n ? std::abs(offdiag[i]) : 0.0));
    }
    const double tiny = kEps * std::max(norm, std::numeric_limits<double>::min());
    auto guard = [&](double& p) {
        if (std::abs(p) < tiny) p = std::copysign(tiny, p == 0.0 ? 1.0 : p);
    };
    std::vector<double>& b = rhs;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(d[i]) >= std::abs(dl[i])) {
            guard(d[i]);
            const double fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            const double fact = d[i] / dl[i];
            d[i] = dl[i];
            const double temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if (i + 2 < n) {
                dl[i] = du[i + 1];
                du[i + 1] = -fact * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = temp;
            const double tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    guard(d[n - 1]);
    b[n - 1] /= d[n - 1];
    if (n >= 2) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n; k-- > 2;) {
        const std::size_t i = k - 2;
        b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
    }
}

void normalize(std::vector<double>& v) {
    long double s = 0;
    for (double x : v) s += static_cast<long double>(x) * x;
    const double inv = 1.0 / std::sqrt(static_cast<double>(s));
    long double sum = 0;
    for (double& x : v) {
        x *= inv;
        sum += x;
    }
    if (sum < 0)
        for (double& x : v) x = -x;
}

}  // namespace

double rayleigh_quotient(std::span<const double> diag, std::span<const double> offdiag, std::span<const double> v) {
    const std::size_t n = diag.size();
    long double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double row = diag[i];
        if (i > 0) row += offdiag[i - 1];
        if (i + 1 < n) row += offdiag[i];
        num += row * v[i] * v[i];
        den += static_cast<long double>(v[i]) * v[i];
        if (i + 1 < n) {
            const long double dv = static_cast<long double>(v[i + 1]) - v[i];
            num -= static_cast<long double>(offdiag[i]) * dv * dv;
        }
    }
    return static_cast<double>(num / den);
}

EigenPair smallest_eigenpair_symmetric(std::span<const double> diag, std::span<const double> offdiag) {
    const double sigma = smallest_eigenvalue_symmetric(diag, offdiag);
    const std::size_t n = diag.size();
    std::vector<double> v(n, 1.0);
    normalize(v);
    for (int it = 0; it < 4; ++it) {
        shifted_tridiagonal_solve(diag, offdiag, sigma, v);
        normalize(v);
    }
    EigenPair out;
    out.value = rayleigh_quotient(diag, offdiag, v);
    out.vector = std::move(v);
    return out;
}

EigenPair smallest_eigenpair(std::span<const double> diag, std::span<const double> offdiag,
                             std::span<const double> weight) {
    const std::size_t n = diag.size();
    if (n < 2 || offdiag.size() + 1 != n || weight.size() != n)
        throw Error(ErrorKind::precondition, "smallest_eigenpair: need equal sizes >= 2 and offdiag of size n-1");
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(weight[i] > 0.0)) throw Error(ErrorKind::precondition, "invalid mass: non-positive weight entry");
        s[i] = 1.0 / std::sqrt(weight[i]);
    }
    std::vector<double> a(n), b(n - 1);
    for (std::size_t i = 0; i < n; ++i) a[i] = diag[i] * s[i] * s[i];
    for (std::size_t i = 0; i + 1 < n; ++i) b[i] = offdiag[i] * s[i] * s[i + 1];
    EigenPair p = smallest_eigenpair_symmetric(a, b);
    for (std::size_t i = 0; i < n; ++i) p.vector[i] *= s[i];
    return p;
}

SlopeFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw Error(ErrorKind::precondition, "fit_line: need >= 2 paired points");
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    long double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0) throw Error(ErrorKind::precondition, "fit_line: abscissae are all equal");
    SlopeFit fit;
    fit.slope = static_cast<double>(sxy / sxx);
    fit.intercept = static_cast<double>(my - sxy / sxx * mx);
    long double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const long double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(static_cast<double>(ss / n));
    fit.points_used = n;
    return fit;
}

SlopeFit fit_log_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 4 || ys.size() != xs.size())
        throw Error(ErrorKind::precondition, "fit_log_slope: insufficient data (need >= 4 paired points)");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw Error(ErrorKind::precondition, "fit_log_slope: data must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return fit_line(lx, ly);
}

namespace {

Extremum golden_max(const RealFn& f, double a, double b) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 80 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    return f1 > f2 ? Extremum{x1, f1} : Extremum{x2, f2};
}

}  // namespace

Extremum grid_supremum(const RealFn& f, double a, double b, double rel_tol) {
    if (!(a <= b)) throw Error(ErrorKind::precondition, "grid_supremum: requires a <= b");
    if (a == b) return {a, f(a)};
    Extremum prev{a, -kInf};
    for (std::size_t n = 64; n <= (std::size_t{1} << 17); n *= 2) {
        Extremum best{a, -kInf};
        std::size_t k = 0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
            const double y = f(x);
            if (std::isnan(y)) throw EvaluationError(where(x), x);
            if (y > best.value) {
                best = {x, y};
                k = i;
            }
        }
        const double lo = a + (b - a) * static_cast<double>(k == 0 ? 0 : k - 1) / static_cast<double>(n);
        const double hi = a + (b - a) * static_cast<double>(std::min(k + 1, n)) / static_cast<double>(n);
        const Extremum polished = golden_max(f, lo, hi);
        if (polished.value > best.value) best = polished;
        if (std::abs(best.value - prev.value) <= rel_tol * std::max(std::abs(best.value), 1e-300)) return best;
        prev = best;
    }
    return prev;
}

Extremum grid_infimum(const RealFn& f, double a, double b, double rel_tol) {
    Extremum e = grid_supremum([&](double x) { return -f(x); }, a, b, rel_tol);
    e.value = -e.value;
    return e;
}

double bisect_root(const RealFn& g, double lo, double hi, double xtol) {
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if ((glo > 0) == (ghi > 0)) throw Error(ErrorKind::consistency, "bisect_root: no sign change in bracket");
    for (int it = 0; it < 300 && hi - lo > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double unit_sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace rsm
