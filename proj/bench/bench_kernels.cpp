// Serial against OpenMP-parallel kernels. Argument 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "rsm/green.hpp"
#include "rsm/kernels.hpp"
#include "rsm/spectral.hpp"

namespace {

rsm::Exec exec_of(const benchmark::State& state) {
    return state.range(0) == 0 ? rsm::Exec::serial : rsm::Exec::parallel;
}

std::vector<double> uniform(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = a + (b - a) * double(i) / double(n - 1);
    return g;
}

void BM_sample(benchmark::State& state) {
    const rsm::ModelManifold m(3, rsm::WarpingProfile::power_exp(2.0, 60.0));
    const auto grid = uniform(0.01, 20.0, 200000);
    const rsm::RealFn f = [&](double r) { return m.warping().jet(r).d2ratio; };
    for (auto _ : state) benchmark::DoNotOptimize(rsm::sample(f, grid, exec_of(state)));
}

void BM_cumulative_integral(benchmark::State& state) {
    const auto grid = uniform(0.0, 50.0, 2001);
    const rsm::RealFn f = [](double r) { return std::exp(-r) * std::cos(3.0 * r) * std::sqrt(1.0 + r); };
    rsm::QuadratureOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-15;
    for (auto _ : state) benchmark::DoNotOptimize(rsm::cumulative_integral(f, grid, {}, o, exec_of(state)));
}

void BM_solve_radial(benchmark::State& state) {
    const rsm::ModelManifold m(3, rsm::WarpingProfile::space_form(-1.0, 60.0));
    for (auto _ : state) benchmark::DoNotOptimize(rsm::solve_radial(m, 1.0, 21.0, 2e-4, exec_of(state)));
}

void BM_minimal_green(benchmark::State& state) {
    const rsm::ModelManifold m(3, rsm::WarpingProfile::power_exp(2.0, 60.0));
    for (auto _ : state) benchmark::DoNotOptimize(rsm::minimal_green(m, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_sample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cumulative_integral)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_solve_radial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_minimal_green)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
