#pragma once

// Series criterion for solvability of -Laplacian u = f with |f| <= 1/zeta(r):
//   sum_j b_j,  b_j = (theta(j+1) - theta(j)) / (lambda1(M \ B_{j-1}) zeta(j-1)),
// together with the power-law specializations and the level-set containment
// diagnostic for the sequence a_m = exp(-C0 theta(m)) / (2A).

#include <optional>
#include <string>
#include <vector>

#include "rsm/geometry.hpp"
#include "rsm/kernels.hpp"
#include "rsm/numerics.hpp"

namespace rsm {

class DecayEnvelope {
public:
    enum class Family { power, constant, custom };

    /// zeta = (1 + r)^alpha / divisor.
    static DecayEnvelope power(double alpha, double divisor = 1.0);
    static DecayEnvelope constant(double c);
    static DecayEnvelope custom(std::string name, RealFn zeta);

    double operator()(double r) const;
    Family family() const { return family_; }
    double parameter() const { return parameter_; }
    double divisor() const { return divisor_; }
    std::string describe() const;

    /// Throws a precondition error unless zeta > 0 and non-decreasing on a
    /// uniform grid of [0, r_max].
    void validate(double r_max) const;

private:
    Family family_ = Family::constant;
    double parameter_ = 1.0;
    double divisor_ = 1.0;
    std::string name_;
    RealFn fn_;
};

std::string to_string(DecayEnvelope::Family f);

enum class LambdaMode { barta_certified, numerical };
enum class Verdict { converges, diverges, inconclusive };

std::string to_string(LambdaMode m);
std::string to_string(Verdict v);
LambdaMode parse_lambda_mode(const std::string& s);

struct SeriesTerm {
    int j = 0;
    double theta_j = 0.0;       ///< theta(j)
    double theta_next = 0.0;    ///< theta(j + 1)
    double lambda1 = 0.0;       ///< lambda1 (or its Barta bound) of M \ B_{j-1}
    bool lambda_converged = true;
    double zeta = 0.0;          ///< zeta(j - 1)
    double term = 0.0;
    double partial = 0.0;
};

struct VerdictRules {
    double margin = 0.1;        ///< half-width of the undecided band around exponent -1
    double cauchy_tol = 0.1;    ///< last-quartile share of the partial sum
    double growth_gate = 1.05;  ///< S_J / S_{J/2} needed for Diverges
    std::size_t min_terms = 8;
};

struct VerdictEvidence {
    Verdict verdict = Verdict::inconclusive;
    double slope = 0.0;         ///< log-log fit over all terms
    double head_slope = 0.0;    ///< fit over the second quarter
    double tail_slope = 0.0;    ///< fit over the second half
    /// Tail slope extrapolated to j -> inf, assuming the local slope drifts
    /// like c / log j (equal to tail_slope when the slope is not rising).
    double limit_slope = 0.0;
    double cauchy_ratio = 0.0;  ///< (S_J - S_{3J/4}) / S_J
    double growth_ratio = 0.0;  ///< S_J / S_{J/2}
    bool harmonic_minorant = false;  ///< j b_j non-decreasing over the second half
    bool dominated = false;          ///< j^{1+margin} b_j non-increasing over the second half
};

/// Applies the three-valued decision rules to terms b_j indexed by j.
/// Converges: tail and limit slopes below -(1 + margin) and either the
/// Cauchy ratio below tolerance or (certified mode) domination by c / j^{1+margin}.
/// Diverges: (tail slope above -(1 - margin) or a harmonic minorant) and
/// S_J / S_{J/2} at least the growth gate. Otherwise Inconclusive.
VerdictEvidence assess_terms(std::span<const double> j, std::span<const double> b, LambdaMode mode,
                             const VerdictRules& rules = {});

struct CriterionReport {
    std::string manifold;
    std::string zeta;
    LambdaMode mode = LambdaMode::numerical;
    std::string lambda_source;  ///< manifold that supplied lambda1
    int j0 = 2;
    int jmax = 0;
    std::vector<SeriesTerm> terms;
    SlopeFit fit;
    VerdictEvidence evidence;
};

struct SeriesOptions {
    int j0 = 2;
    int jmax = 40;
    LambdaMode mode = LambdaMode::numerical;
    /// r_max must be at least jmax (1 + margin).
    double margin = 0.1;
    /// Barta bounds are taken on this manifold when set (comparison geometry).
    std::optional<ModelManifold> lambda_manifold;
    Exec exec = Exec::parallel;
};

/// Terms, partial sums and fit; evidence is left at its defaults.
CriterionReport series_terms(const ModelManifold& m, const DecayEnvelope& zeta, const SeriesOptions& opt = {});

/// Evaluates the decision rules on a report's terms.
VerdictEvidence verdict(const CriterionReport& report, const VerdictRules& rules = {});

/// Model used for the power-law fixtures: power_exp(gamma), with the
/// hyperbolic space form standing in for gamma = 0.
ModelManifold power_law_model(double gamma, double r_max, int n = 3);

struct CorollaryOptions {
    int jmax = 80;
    LambdaMode mode = LambdaMode::numerical;
    int dimension = 3;
    VerdictRules rules;
    Exec exec = Exec::parallel;
};

/// Power-exp(gamma) geometry with zeta = (1 + r)^{1 + gamma/2 + eps} / c.
/// Throws a precondition error when the essential spectrum estimate is not positive.
CriterionReport corollary1_check(double gamma, double eps, double c, const CorollaryOptions& opt = {});

/// Power-exp(gamma1) geometry, Barta-certified lambda1 from power_exp(gamma2),
/// zeta = (1 + r)^{1 + gamma1/2 - gamma2 + eps}.
CriterionReport corollary2_check(double gamma1, double gamma2, double eps, const CorollaryOptions& opt = {});

struct ContainmentRow {
    int m = 0;
    double theta = 0.0;
    double log_a = 0.0;     ///< log a_m
    double radius = 0.0;    ///< r_m with G(r_m) = 2 a_m
    bool pass = false;      ///< r_m >= m - 1
};

struct ContainmentReport {
    double a_bound = 0.0;       ///< A = max(G(1), 1/G(1)) (1 + 1e-12)
    double c0 = 0.0;
    double gradient_sup = 0.0;  ///< sup of the gradient ratio profile
    int m_max = 0;
    std::vector<ContainmentRow> rows;
    bool passed = false;
};

struct ContainmentOptions {
    /// C0 = c0_factor * sup gradient ratio, unless c0 is set explicitly.
    double c0_factor = 1.1;
    std::optional<double> c0;
    int m_cap = 64;
    Exec exec = Exec::parallel;
};

/// Requires a non-parabolic manifold. m runs from 2 while 2 a_m stays a
/// normal double (and m <= m_cap); fewer than two rows is a budget error.
ContainmentReport containment_check(const ModelManifold& m, const ContainmentOptions& opt = {});

}  // namespace rsm
