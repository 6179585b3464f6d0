#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "rsm/error.hpp"
#include "rsm/green.hpp"

using namespace rsm;
using std::numbers::pi;

namespace {

ModelManifold euclid(int n = 3) { return {n, WarpingProfile::euclidean(60.0)}; }
ModelManifold hyper() { return {3, WarpingProfile::space_form(-1.0, 60.0)}; }
ModelManifold pexp(double g) { return {3, WarpingProfile::power_exp(g, 60.0)}; }
ModelManifold cusp() { return {3, WarpingProfile::cusp(60.0)}; }

// (coth r - 1) / (4 pi) without cancellation.
double hyper_green(double r) { return 2.0 / std::expm1(2.0 * r) / (4.0 * pi); }

}  // namespace

TEST_CASE("minimal_green closed forms") {
    const auto ge = minimal_green(euclid());
    const auto gh = minimal_green(hyper());
    CHECK(ge.kind() == GreenKind::minimal);
    CHECK_FALSE(ge.truncated());
    for (int i = 1; i <= 50; ++i) {
        const double r = 0.2 * i;
        CHECK(std::abs(ge.value(r) * 4.0 * pi * r - 1.0) < 1e-8);
        CHECK(std::abs(gh.value(r) / hyper_green(r) - 1.0) < 1e-8);
    }
    for (std::size_t i = 1; i < ge.samples().value.size(); ++i) CHECK(ge.samples().value[i] < ge.samples().value[i - 1]);
    CHECK_THROWS_AS(minimal_green(euclid(2)), Error);
    CHECK_THROWS_AS(minimal_green(cusp()), Error);
}

TEST_CASE("power_exp Green asymptotics") {
    // G ~ r^{-1} exp(-2 r^2) / (16 pi) for gamma = 2, n = 3.
    const auto g = minimal_green(pexp(2.0));
    double prev = 0.0;
    for (double r : {2.0, 4.0, 8.0, 16.0}) {
        const double c = std::exp(g.log_value(r) + std::log(r) + 2.0 * r * r);
        CHECK(c > prev);
        prev = c;
    }
    CHECK(prev == doctest::Approx(1.0 / (16.0 * pi)).epsilon(1e-3));
}

TEST_CASE("dirichlet_green") {
    const auto m = euclid();
    const auto g2 = dirichlet_green(m, 2.0);
    CHECK(g2.value(1.0) == doctest::Approx(1.0 / (8.0 * pi)).epsilon(1e-12));
    CHECK(g2.value(2.0) == 0.0);
    const auto g4 = dirichlet_green(m, 4.0);
    const auto g = minimal_green(m);
    for (double r : {0.1, 0.5, 1.0, 1.9}) {
        CHECK(g2.value(r) <= g4.value(r));
        CHECK(g4.value(r) <= g.value(r));
        // G - G_R is the constant tail (1 / (4 pi)) int_R^inf t^{-2} = 1 / (4 pi R).
        CHECK(g.value(r) - g4.value(r) == doctest::Approx(1.0 / (16.0 * pi)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(dirichlet_green(m, -1.0), Error);
}

TEST_CASE("flux on levels is 1") {
    const auto ge = minimal_green(euclid());
    const auto gh = minimal_green(hyper());
    const auto gp = minimal_green(pexp(2.0));
    for (double s : {1e-6, 1e-3, 0.1, 10.0}) CHECK(std::abs(flux_on_level(ge, s) - 1.0) < 1e-10);
    CHECK(std::abs(flux_on_level(gh, gh.value(1.0)) - 1.0) < 1e-8);
    for (double s : {1e-30, 1e-10, 1e-3, 1.0}) CHECK(std::abs(flux_on_level(gp, s) - 1.0) < 1e-6);
    const auto gd = dirichlet_green(euclid(), 3.0);
    CHECK(std::abs(flux_on_level(gd, gd.value(1.5)) - 1.0) < 1e-8);
    CHECK_THROWS_AS(flux_on_level(ge, -1.0), Error);
}

TEST_CASE("level sets") {
    const auto ge = minimal_green(euclid());
    const auto ann = level_set(ge, 1.0 / (8.0 * pi), 1.0 / (4.0 * pi));
    CHECK(ann.inner_radius == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(ann.outer_radius == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(std::isinf(level_set(ge, 0.0, 1.0).outer_radius));
    CHECK_THROWS_AS(level_set(ge, 1.0, 0.5), Error);

    const auto gh = minimal_green(hyper());
    for (double s : {1e-8, 1e-3, 0.5}) {
        const double r = level_radius(gh, s);
        CHECK(std::abs(hyper_green(r) / s - 1.0) < 1e-10);
    }

    // Mass of {G > G(1)} is int_0^1 r dr = 1/2.
    const auto ball = level_set(ge, ge.value(1.0), kInf);
    CHECK(ball.inner_radius == 0.0);
    CHECK(level_set_mass(ge, ball) == doctest::Approx(0.5).epsilon(1e-10));
    const double s1 = ge.value(0.5), s2 = ge.value(1.5), s3 = ge.value(3.0);
    const double whole = level_set_mass(ge, level_set(ge, s3, s1));
    const double parts = level_set_mass(ge, level_set(ge, s3, s2)) + level_set_mass(ge, level_set(ge, s2, s1));
    CHECK(whole == doctest::Approx(parts).epsilon(1e-10));
    CHECK(level_set_mass(ge, LevelSetAnnulus{1.0, 1.0, 2.0, 2.0}) == 0.0);
}

TEST_CASE("level set above A lies in the unit ball") {
    for (const ModelManifold& m : {euclid(), hyper(), pexp(2.0)}) {
        const auto g = minimal_green(m);
        const double a = std::max(g.value(1.0), 1.0 / g.value(1.0)) * (1.0 + 1e-12);
        CHECK(level_radius(g, a) <= 1.0);
    }
}

TEST_CASE("solve_poisson oracles") {
    const auto e = solve_poisson(euclid(), exp_source(1.0));
    CHECK(std::abs(e.value_at_pole - 1.0) < 1e-7);
    CHECK(std::abs(e.green_representation - e.value_at_pole) < 1e-8 * e.value_at_pole);
    CHECK(e.residual_rms < 1e-6);
    CHECK(e.residual_points > 100);
    CHECK_FALSE(e.divergence.divergent);

    const auto h = solve_poisson(hyper(), exp_source(2.0));
    CHECK(std::abs(h.value_at_pole - 0.125) < 1e-7 * 0.125);
    CHECK(std::abs(h.green_representation - h.value_at_pole) < 1e-8 * h.value_at_pole);
    CHECK(h.residual_rms < 1e-6);

    const auto z = solve_poisson(euclid(), zero_source());
    CHECK(z.value_at_pole == 0.0);
    CHECK(z.residual_rms == 0.0);
    for (double v : z.samples.value) CHECK(v == 0.0);

    const auto p = solve_poisson(pexp(2.0), power_source(0.5));
    CHECK_FALSE(p.divergence.divergent);
    CHECK(p.residual_rms < 1e-6);
    CHECK(std::abs(p.green_representation - p.value_at_pole) < 1e-8 * p.value_at_pole);
    CHECK_THROWS_AS(solve_poisson(cusp(), exp_source(1.0)), Error);
}

TEST_CASE("divergence test follows 1 - alpha - gamma/2") {
    for (double g : {2.0, 3.0}) {
        const auto m = pexp(g);
        for (double alpha : {-0.5, 0.5, 1.0}) {
            const auto d = poisson_divergence_test(m, power_source(alpha));
            const double expected = 1.0 - alpha - g / 2.0;
            CHECK(std::abs(d.growth_exponent - expected) < 0.02);
            CHECK(d.divergent == (expected > -0.02));
        }
    }
    const auto div = solve_poisson(pexp(2.0), power_source(-0.2));
    CHECK(div.divergence.divergent);
    CHECK(div.samples.r.empty());
}

TEST_CASE("parabolic_green on the cusp") {
    const auto g = parabolic_green(cusp());
    CHECK(g.kind() == GreenKind::parabolic);
    CHECK(std::abs(g.mean_check()) < 1e-8);
    const double v = g.volume();
    // Unbounded volume part beyond r = 1 plus the inner ball.
    CHECK(v == doctest::Approx(total_volume(cusp())).epsilon(1e-14));
    const auto res = laplacian_residual(cusp(), g.samples(), [v](double) { return -1.0 / v; }, 1.0, {});
    CHECK(res.rms < 1e-6);
    CHECK(res.points > 500);
    // Flux near the pole: 1 - Vol(B_r)/V.
    const double r = 0.01;
    const double flux = -g.log_derivative(r) * g.value(r) * 4.0 * pi * r * r;
    CHECK(flux == doctest::Approx(1.0 - 4.0 * pi * r * r * r / 3.0 / v).epsilon(1e-8));
    CHECK_THROWS_AS(parabolic_green(euclid()), Error);
    CHECK_THROWS_AS(parabolic_green(euclid(2)), Error);
}

TEST_CASE("solve_poisson_finite_volume") {
    const auto m = cusp();
    const auto e = solve_poisson_finite_volume(m, exp_source(1.0));
    CHECK(e.residual_rms < 1e-6);
    CHECK(std::abs(e.value_at_pole - e.green_representation) < 1e-8);
    const auto b = solve_poisson_finite_volume(m, bump_source(m));
    CHECK(b.average == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.residual_rms < 1e-6);
    CHECK(std::abs(b.value_at_pole) < 1e-12);
    const auto z = solve_poisson_finite_volume(m, zero_source());
    for (double v : z.samples.value) CHECK(v == 0.0);
}

TEST_CASE("tail_l2") {
    const auto gh = minimal_green(hyper());
    std::vector<double> rs, ls;
    for (double R = 2.0; R <= 10.0; R += 1.0) {
        const auto t = tail_l2(gh, R);
        CHECK_FALSE(t.truncated);
        CHECK(t.log_value == doctest::Approx(-2.0 * R - std::log(8.0 * pi)).epsilon(1e-10));
        rs.push_back(R);
        ls.push_back(t.log_value);
    }
    CHECK(fit_line(rs, ls).slope == doctest::Approx(-2.0).epsilon(1e-9));

    const auto ge = minimal_green(euclid());
    const auto t = tail_l2(ge, 10.0);
    CHECK(t.truncated);
    CHECK(t.value == doctest::Approx(50.0 / (4.0 * pi)).epsilon(1e-10));
}

TEST_CASE("gradient ratio profile") {
    const auto ge = minimal_green(euclid());
    const auto gr = gradient_ratio_profile(ge);
    CHECK(gr.sup_radius == doctest::Approx(0.3));
    CHECK(gr.sup == doctest::Approx(1.0 / (0.3 * std::sqrt(10.0))).epsilon(1e-8));
    for (std::size_t i = 0; i < gr.profile.r.size(); i += 37)
        CHECK(gr.profile.value[i] == doctest::Approx(1.0 / (gr.profile.r[i] * std::sqrt(10.0))).epsilon(1e-8));

    const auto gh = minimal_green(hyper());
    const auto hr = gradient_ratio_profile(gh);
    const double k = 1.0 / std::tanh(0.1);
    for (std::size_t i = 0; i < hr.profile.r.size(); i += 37) {
        const double r = hr.profile.r[i];
        CHECK(hr.profile.value[i] == doctest::Approx((1.0 / std::tanh(r) + 1.0) / std::sqrt(k)).epsilon(1e-8));
    }
    CHECK(std::isfinite(gradient_ratio_profile(minimal_green(pexp(2.0))).sup));
}

TEST_CASE("csv export") {
    RadialSamples s{{0.5, 1.0}, {2.0, 0.25}};
    std::ostringstream os;
    write_csv(os, s);
    CHECK(os.str() == "r,value\n0.5,2\n1,0.25\n");
}

TEST_CASE("serial and parallel profiles agree") {
    const auto s = minimal_green(pexp(2.0), Exec::serial);
    const auto p = minimal_green(pexp(2.0), Exec::parallel);
    CHECK(s.samples().value == p.samples().value);
    const auto us = solve_poisson(hyper(), exp_source(2.0), Exec::serial);
    const auto up = solve_poisson(hyper(), exp_source(2.0), Exec::parallel);
    CHECK(us.samples.value == up.samples.value);
    CHECK(us.divergence.partial == up.divergence.partial);
}
