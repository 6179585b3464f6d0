#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "rsm/error.hpp"
#include "rsm/numerics.hpp"

using namespace rsm;

TEST_CASE("integrate: polynomial exactness and closed forms") {
    CHECK(integrate([](double x) { return x; }, 0.0, 1.0, 1e-10).value == doctest::Approx(0.5).epsilon(1e-12));
    const auto p = integrate([](double x) { return std::pow(x, 20); }, 0.0, 1.0, 1e-14);
    CHECK(std::abs(p.value - 1.0 / 21.0) < 1e-14);
    CHECK(p.evaluations >= 1);
    CHECK(p.error_estimate >= 0.0);

    const auto e = integrate([](double t) { return std::exp(-t); }, 0.0, kInf, 1e-10);
    CHECK(std::abs(e.value - 1.0) < 1e-10);
    CHECK(std::abs(e.value - 1.0) <= std::max(e.error_estimate, 1e-15));

    // Oracle: antiderivative -(t+1)e^{-t}.
    auto anti = [](double t) { return -(t + 1.0) * std::exp(-t); };
    const double oracle = 0.0 - anti(0.0);
    const auto te = integrate([](double t) { return t * std::exp(-t); }, 0.0, kInf, 1e-10);
    CHECK(std::abs(te.value - oracle) < 1e-10);
}

TEST_CASE("integrate: algebraic tails on the half line") {
    const auto r = integrate([](double t) { return 1.0 / (t * t); }, 1.0, kInf, 1e-12);
    CHECK(std::abs(r.value - 1.0) < 1e-12);
}

TEST_CASE("integrate: additivity over splits within the error estimates") {
    auto f = [](double x) { return std::sin(3 * x) * std::exp(-x * x); };
    const auto whole = integrate(f, -1.0, 2.0, 1e-13);
    const auto left = integrate(f, -1.0, 0.7, 1e-13);
    const auto right = integrate(f, 0.7, 2.0, 1e-13);
    CHECK(std::abs(whole.value - left.value - right.value) <=
          whole.error_estimate + left.error_estimate + right.error_estimate + 1e-15);
}

TEST_CASE("integrate: deterministic for fixed inputs") {
    auto f = [](double x) { return 1.0 / (1.0 + 25.0 * x * x); };
    const auto a = integrate(f, -1.0, 1.0, 1e-14);
    const auto b = integrate(f, -1.0, 1.0, 1e-14);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("integrate: error paths") {
    SUBCASE("non-finite integrand reports the abscissa") {
        try {
            integrate([](double x) { return x > 0.5 ? std::nan("") : 1.0; }, 0.0, 1.0, 1e-8);
            FAIL("expected EvaluationError");
        } catch (const EvaluationError& e) {
            CHECK(e.abscissa > 0.5);
            CHECK(e.kind() == ErrorKind::evaluation);
        }
    }
    SUBCASE("budget exhaustion carries the best estimate") {
        QuadratureOptions o;
        o.abs_tol = 1e-15;
        o.max_subdivisions = 3;
        try {
            integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0, o);
            FAIL("expected BudgetExceeded");
        } catch (const BudgetExceeded& e) {
            CHECK(std::isfinite(e.best_estimate));
            CHECK(e.kind() == ErrorKind::budget);
        }
    }
    SUBCASE("empty interval is a precondition error") {
        CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 1.0, 1e-8), Error);
    }
}

TEST_CASE("integrate_with_envelope truncates at the certified radius") {
    TailEnvelope env{0.0, [](double t) { return std::exp(-t); }};
    const auto r = integrate_with_envelope([](double t) { return std::exp(-t); }, 0.0, env, 1e-10);
    CHECK(std::abs(r.value - 1.0) < 1e-10);
    CHECK(r.error_estimate < 1e-10);
}

TEST_CASE("log_integrate_exp survives exponents far outside double range") {
    // int_0^1 exp(-2000 + t) dt = exp(-2000) (e - 1)
    const double li = log_integrate_exp([](double t) { return -2000.0 + t; }, 0.0, 1.0, {}, QuadratureOptions{});
    CHECK(li == doctest::Approx(-2000.0 + std::log(std::exp(1.0) - 1.0)).epsilon(1e-13));
}

namespace {

long double naive_quotient(const std::vector<double>& d, const std::vector<double>& e, const std::vector<double>& w,
                           const std::vector<double>& v) {
    long double num = 0, den = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        num += static_cast<long double>(d[i]) * v[i] * v[i];
        if (i + 1 < d.size()) num += 2.0L * e[i] * v[i] * v[i + 1];
        den += static_cast<long double>(w[i]) * v[i] * v[i];
    }
    return num / den;
}

}  // namespace

TEST_CASE("smallest_eigenpair: discrete Dirichlet Laplacian") {
    const double h = 1.0 / 1000.0;
    const std::size_t n = 999;
    std::vector<double> d(n, 2.0 / (h * h)), e(n - 1, -1.0 / (h * h)), w(n, 1.0);
    const auto p = smallest_eigenpair(d, e, w);
    const double discrete = (2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * h));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(p.value - pi2) / pi2 < 1e-4);
    CHECK(std::abs(p.value - discrete) / discrete < 1e-11);
    const long double rq = naive_quotient(d, e, w, p.vector);
    CHECK(std::abs(static_cast<double>(rq) - p.value) / p.value < 1e-12);
    // Unit weighted norm and positive ground state.
    long double norm = 0;
    for (std::size_t i = 0; i < n; ++i) norm += w[i] * p.vector[i] * p.vector[i];
    CHECK(static_cast<double>(norm) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : p.vector) CHECK(x > 0.0);
}

TEST_CASE("smallest_eigenpair: trivial and homogeneity cases") {
    std::vector<double> d{1.0, 1.0}, e{0.0}, w{1.0, 1.0};
    CHECK(smallest_eigenpair(d, e, w).value == doctest::Approx(1.0).epsilon(1e-14));

    std::vector<double> dk{4.0, 3.0, 5.0, 2.5}, ek{-1.0, -0.5, -1.2}, wk{1.0, 2.0, 0.5, 1.5};
    const double base = smallest_eigenpair(dk, ek, wk).value;
    const double c = 7.25;
    std::vector<double> ds = dk, es = ek;
    for (auto& x : ds) x *= c;
    for (auto& x : es) x *= c;
    CHECK(smallest_eigenpair(ds, es, wk).value == doctest::Approx(c * base).epsilon(1e-12));

    // K -> D K D, W -> D W D leaves the generalized spectrum unchanged.
    std::vector<double> scale{0.3, 2.0, 1.7, 0.9};
    std::vector<double> dd(4), ed(3), wd(4);
    for (std::size_t i = 0; i < 4; ++i) {
        dd[i] = dk[i] * scale[i] * scale[i];
        wd[i] = wk[i] * scale[i] * scale[i];
    }
    for (std::size_t i = 0; i < 3; ++i) ed[i] = ek[i] * scale[i] * scale[i + 1];
    CHECK(std::abs(smallest_eigenpair(dd, ed, wd).value - base) < 1e-10 * std::abs(base));
}

TEST_CASE("smallest_eigenpair: invalid mass") {
    std::vector<double> d{2.0, 2.0}, e{-1.0}, w{1.0, 0.0};
    CHECK_THROWS_AS(smallest_eigenpair(d, e, w), Error);
}

TEST_CASE("sturm_count brackets the spectrum") {
    std::vector<double> d{2.0, 2.0, 2.0}, e{-1.0, -1.0};
    // eigenvalues 2 - sqrt2, 2, 2 + sqrt2
    CHECK(sturm_count(d, e, 0.5) == 0);
    CHECK(sturm_count(d, e, 1.0) == 1);
    CHECK(sturm_count(d, e, 3.0) == 2);
    CHECK(sturm_count(d, e, 4.0) == 3);
}

TEST_CASE("fit_log_slope") {
    std::vector<double> xs{1, 2, 3, 5, 8, 13}, sq, inv;
    for (double x : xs) {
        sq.push_back(x * x);
        inv.push_back(5.0 / x);
    }
    CHECK(std::abs(fit_log_slope(xs, sq).slope - 2.0) < 1e-12);
    const auto f = fit_log_slope(xs, inv);
    CHECK(std::abs(f.slope + 1.0) < 1e-12);
    CHECK(std::abs(f.intercept - std::log(5.0)) < 1e-12);
    CHECK(f.residual_rms < 1e-12);

    // Frozen from an independent dense least-squares fit (numpy.polyfit).
    std::vector<double> js, ys;
    for (int j = 10; j <= 100; ++j) {
        js.push_back(j);
        ys.push_back(std::pow(j, 1.5) * (1.0 + 0.01 * std::sin(j)));
    }
    const auto noisy = fit_log_slope(js, ys);
    CHECK(std::abs(noisy.slope - 1.5002700173437244) < 1e-9);
    CHECK(std::abs(noisy.slope - 1.5) < 0.02);

    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(fit_log_slope(three, three), Error);
}

TEST_CASE("grid extrema and root bisection") {
    const auto s = grid_supremum([](double x) { return -(x - 0.3137) * (x - 0.3137); }, 0.0, 1.0);
    CHECK(s.location == doctest::Approx(0.3137).epsilon(1e-6));
    const auto m = grid_infimum([](double x) { return 1.0 / x; }, 0.1, 4.0);
    CHECK(m.value == doctest::Approx(0.25));
    CHECK(bisect_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-14) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
    CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
}
