#pragma once

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature on finite and
// semi-infinite intervals, a Sturm-bisection eigensolver for symmetric
// tridiagonal pencils, and log-log least-squares slope fitting.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace rsm {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

/// Accuracy target is max(abs_tol, rel_tol * |value|).
struct QuadratureOptions {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_subdivisions = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature.
/// `b` may be +infinity; the half line is then mapped onto (0, 1] by
/// t = a + (1 - u) / u. Throws EvaluationError on a non-finite sample and
/// BudgetExceeded (carrying the best estimate) when the subdivision budget
/// runs out before the tolerance is met.
QuadratureResult integrate(const RealFn& f, double a, double b, const QuadratureOptions& opt);
QuadratureResult integrate(const RealFn& f, double a, double b, double tol);

/// Same as integrate(), but splits [a, b] at every breakpoint strictly
/// inside it. Used for integrands with kinks (spliced warping profiles).
QuadratureResult integrate_piecewise(const RealFn& f, double a, double b,
                                     std::span<const double> breakpoints,
                                     const QuadratureOptions& opt);

/// Caller-supplied monotone bound on the tail: tail_bound(T) >= |int_T^inf f|
/// for every T >= start.
struct TailEnvelope {
    double start = 0.0;
    RealFn tail_bound;
};

/// Semi-infinite integral truncated at the first radius T >= envelope.start
/// (doubling search) where tail_bound(T) < tol/2; the finite part gets the
/// remaining tol/2. The tail bound is added to the error estimate.
QuadratureResult integrate_with_envelope(const RealFn& f, double a, const TailEnvelope& env, double tol);

/// log of int_a^b exp(E(t)) dt, evaluated relative to the largest sampled
/// exponent so that neither overflow nor underflow occurs for unimodal E.
double log_integrate_exp(const RealFn& exponent, double a, double b,
                         std::span<const double> breakpoints, const QuadratureOptions& opt);

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Smallest eigenpair of the symmetric tridiagonal matrix (diag, offdiag).
/// Bisection on Sturm counts, then inverse iteration; the returned value is
/// the Rayleigh quotient of the returned unit vector.
EigenPair smallest_eigenpair_symmetric(std::span<const double> diag, std::span<const double> offdiag);

/// Bisection-only variant (no vector).
double smallest_eigenvalue_symmetric(std::span<const double> diag, std::span<const double> offdiag);

/// Smallest generalized eigenpair K v = lambda W v with K symmetric
/// tridiagonal and W = diag(weight) positive. The vector has unit W-norm.
EigenPair smallest_eigenpair(std::span<const double> diag, std::span<const double> offdiag,
                             std::span<const double> weight);

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below x.
std::size_t sturm_count(std::span<const double> diag, std::span<const double> offdiag, double x);

/// Rayleigh quotient v^T A v / v^T v in a cancellation-free form
/// (row sums plus squared differences), accumulated in long double.
double rayleigh_quotient(std::span<const double> diag, std::span<const double> offdiag,
                         std::span<const double> v);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::size_t points_used = 0;
};

/// Ordinary least squares of log(ys) against log(xs). Needs >= 4 positive points.
SlopeFit fit_log_slope(std::span<const double> xs, std::span<const double> ys);

/// Ordinary least squares of ys against xs (no transform). Needs >= 2 points.
SlopeFit fit_line(std::span<const double> xs, std::span<const double> ys);

struct Extremum {
    double location = 0.0;
    double value = 0.0;
};

/// Supremum of f on [a, b] by uniform sampling, golden-section polishing of
/// the best bracket, and grid doubling until two successive estimates agree
/// to rel_tol.
Extremum grid_supremum(const RealFn& f, double a, double b, double rel_tol = 1e-6);
Extremum grid_infimum(const RealFn& f, double a, double b, double rel_tol = 1e-6);

/// Bisection for a sign change of g on [lo, hi]; stops when hi - lo <= xtol.
double bisect_root(const RealFn& g, double lo, double hi, double xtol);

/// Area of the unit (n-1)-sphere, 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

}  // namespace rsm
