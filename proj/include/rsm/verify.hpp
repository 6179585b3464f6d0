#pragma once

// Packaged numerical experiments with pass/fail outcomes. Every check is run
// at its base resolution and once more at doubled resolution; a check passes
// only when both runs pass.

#include <optional>
#include <string>
#include <vector>

#include "rsm/geometry.hpp"
#include "rsm/kernels.hpp"
#include "rsm/numerics.hpp"

namespace rsm {

// ---------------------------------------------------------------------------
// Sharpness of the decay threshold alpha = 1 - gamma/2

struct SharpnessPoint {
    double alpha = 0.0;
    bool divergent = false;
    double growth_exponent = 0.0;
    double value_at_pole = 0.0;   ///< +inf when divergent
    double residual_rms = 0.0;
    bool boundary = false;        ///< within one step of the theoretical threshold
};

struct SharpnessRun {
    double step = 0.0;
    std::vector<SharpnessPoint> points;
    double threshold = 0.0;       ///< midpoint of the last divergent and first finite alpha
    bool monotone = false;
    bool pass = false;
};

struct SharpnessReport {
    double gamma = 0.0;
    int dimension = 3;
    std::string manifold;
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double theoretical = 0.0;     ///< 1 - gamma/2
    SharpnessRun base;
    SharpnessRun refined;
    bool pass = false;
};

/// Power-exp(gamma) (hyperbolic space for gamma = 0) with f = (1 + r)^{-alpha}.
SharpnessReport sharpness_sweep(double gamma, int n, double alpha_min, double alpha_max, double step,
                                Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Tail asymptotics of int_r^inf phi^{1-n}

struct TailAsymptoticRun {
    std::vector<double> radii;
    std::vector<double> ratios;
    double spread = 0.0;          ///< relative spread over [2, 8]
    double upper_spread = 0.0;    ///< relative spread over the upper half [5, 8]
    double constant = 0.0;        ///< ratio extrapolated to r -> inf
    SlopeFit fit;                 ///< log(int_r^inf phi^{1-n} exp((n-1) r^p)) against log r
    bool pass = false;
};

struct TailAsymptoticReport {
    double gamma = 0.0;
    int dimension = 3;
    std::string manifold;
    double expected = 0.0;        ///< 1/((n-1)(1+gamma/2)); 1 for the hyperbolic surrogate
    TailAsymptoticRun base;
    TailAsymptoticRun refined;
    bool pass = false;
};

/// gamma > 0: ratio int_r^inf phi^{1-n} / (r^{-gamma/2} exp(-(n-1) r^{1+gamma/2})).
/// gamma = 0: ratio 4 pi G(r) / (2 e^{-2r}) on hyperbolic 3-space.
TailAsymptoticReport tail_asymptotic_check(double gamma, int n, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// L2 decay of the Green function tail

struct DonnellyRun {
    std::vector<double> radii;
    std::vector<double> log_tail;
    SlopeFit fit;
    bool pass = false;
};

struct DonnellyReport {
    std::string manifold;
    std::string green_kind;
    double lambda_ess = 0.0;
    bool skipped = false;
    std::string note;
    double bound = 0.0;           ///< -2 sqrt(0.8 lambda_ess) + 0.05
    DonnellyRun base;
    DonnellyRun refined;
    bool pass = false;
};

DonnellyReport donnelly_check(const ModelManifold& m, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Level-set bound lambda1(L(de/2, 2e)) int_{L(de, e)} G <= C (-log d + 1)

struct LevelSetEntry {
    double delta = 0.0;
    double eps = 0.0;
    double inner_radius = 0.0;    ///< of L(de/2, 2e)
    double outer_radius = 0.0;
    double lambda1 = 0.0;
    double mass = 0.0;            ///< int over L(de, e)
    double ratio = 0.0;
};

struct LevelSetRun {
    std::vector<LevelSetEntry> entries;
    double max_ratio = 0.0;
};

struct LevelSetBoundReport {
    std::string manifold;
    double eps_min = 0.0;
    double eps_max = 0.0;
    LevelSetRun base;
    LevelSetRun refined;          ///< eigen grid spacing halved
    double relative_change = 0.0;
    bool pass = false;
};

/// delta = 2^{-k}, k = 1..10; eps over four decades placed so that every
/// annulus lies inside B_{r_max - 1}.
LevelSetBoundReport levelset_bound_check(const ModelManifold& m, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Exponential lower bound G(r) >= G(1) exp(-C0 sqrt(K(r+1)) r)

struct ExponentialLowerRun {
    std::size_t points = 0;
    std::size_t failures = 0;
    double worst_margin = 0.0;    ///< min of log G(r) - log bound(r)
    double worst_radius = 0.0;
    bool pass = false;
};

struct ExponentialLowerReport {
    std::string manifold;
    double c0 = 0.0;
    ExponentialLowerRun base;
    ExponentialLowerRun refined;
    bool pass = false;
};

/// C0 defaults to 1.1 times the gradient-ratio supremum.
ExponentialLowerReport exponential_lower_check(const ModelManifold& m, std::optional<double> c0 = std::nullopt,
                                               Exec exec = Exec::parallel);

}  // namespace rsm
