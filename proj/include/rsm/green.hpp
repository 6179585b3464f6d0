#pragma once

// Radial Green's functions and radial Poisson solutions.
//
// G is normalized with 1/sphere_area so that -Laplacian G = delta_p exactly
// and the flux through every level set is 1. All integrals that involve
// phi^{n-1} or phi^{1-n} are evaluated in scaled form, e.g.
//   G(r) = phi(r)^{1-n} J(r) / sphere_area,
//   J(r) = int_r^inf exp((n-1)(log phi(r) - log phi(t))) dt,
// so that no intermediate quantity over- or underflows.

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rsm/geometry.hpp"
#include "rsm/kernels.hpp"

namespace rsm {

enum class GreenKind { minimal, dirichlet, parabolic };

std::string to_string(GreenKind k);

/// Sampled radial function on a uniform grid (column "value" in CSV).
struct RadialSamples {
    std::vector<double> r;
    std::vector<double> value;
};

void write_csv(std::ostream& os, const RadialSamples& s);

class GreenProfile {
public:
    GreenKind kind() const { return kind_; }
    const ModelManifold& manifold() const { return *m_; }
    /// Outer radius of the Dirichlet ball (dirichlet kind only).
    double radius() const { return radius_; }
    double normalization() const { return 1.0 / m_->sphere_area(); }
    /// True when the profile could not be integrated past r_max (sampled
    /// warping); G is then the Dirichlet function on B_{r_max}.
    bool truncated() const { return truncated_; }
    double quadrature_tolerance() const { return m_->tolerances().quad_rel; }

    double value(double r) const;
    /// log |G(r)|; -inf where G vanishes.
    double log_value(double r) const;
    /// 5-point central difference of log |G| at r.
    double log_derivative(double r) const;
    /// Natural length scale at r: |G / G'| from the construction (J(r) for
    /// minimal and dirichlet kinds, |G|/q for parabolic).
    double scale(double r) const;

    /// Total volume (parabolic kind).
    double volume() const { return volume_; }
    /// sphere_area * int G phi^{n-1}, by direct quadrature (parabolic kind).
    double mean_check() const { return mean_check_; }

    const RadialSamples& samples() const { return samples_; }

private:
    friend GreenProfile minimal_green(const ModelManifold&, Exec);
    friend GreenProfile dirichlet_green(const ModelManifold&, double, Exec);
    friend GreenProfile parabolic_green(const ModelManifold&, Exec);

    double scaled_tail(double r) const;      // J(r) or J_R(r)
    double parabolic_q(double t) const;      // -G'(t) for the parabolic kind
    double parabolic_offset(double r) const; // int_r^1 q

    GreenKind kind_ = GreenKind::minimal;
    std::shared_ptr<const ModelManifold> m_;
    double radius_ = kInf;
    bool truncated_ = false;
    double volume_ = kInf;
    double constant_ = 0.0;   // parabolic value at r = 1
    double mean_check_ = 0.0;
    std::vector<double> table_r_, table_i_;  // parabolic: int_1^{t_k} q
    RadialSamples samples_;
};

/// Requires a non-parabolic manifold.
GreenProfile minimal_green(const ModelManifold& m, Exec exec = Exec::parallel);
/// Zero Dirichlet data on the sphere of radius R.
GreenProfile dirichlet_green(const ModelManifold& m, double radius, Exec exec = Exec::parallel);
/// Mean-zero Green's function of a parabolic finite-volume manifold:
/// -Laplacian G = delta_p - 1/V.
GreenProfile parabolic_green(const ModelManifold& m, Exec exec = Exec::parallel);

/// Radial source term f(r) with the radii where it is not smooth.
struct RadialSource {
    std::string name;
    RealFn f;
    std::vector<double> kinks;
    bool is_zero = false;
};

RadialSource zero_source();
RadialSource exp_source(double rate);          ///< e^{-rate r}
RadialSource power_source(double alpha);       ///< (1 + r)^{-alpha}
RadialSource bump_source(const ModelManifold& m);  ///< unit-mass (1 - r^2)^3 on [0, 1]

struct DivergenceReport {
    bool divergent = false;
    /// Fitted log-log slope of the increments U(2T) - U(T) of the partial
    /// pole integrals U(T) = int_0^T u'-integrand; 1 - alpha - gamma/2 for
    /// power sources on power_exp profiles.
    double growth_exponent = 0.0;
    std::vector<double> radii;
    std::vector<double> partial;
};

struct RadialSolution {
    RadialSamples samples;
    double value_at_pole = 0.0;
    /// Pole value from the Green representation (int G f dV).
    double green_representation = 0.0;
    double residual_rms = 0.0;
    std::size_t residual_points = 0;
    DivergenceReport divergence;
    /// Scalar alpha_avg = int f dV (finite-volume path).
    double average = 0.0;
    double flux_at_outer = 0.0;
};

/// Growth test for u(p) = int_0^inf P(s) ds, P(s) = phi^{1-n}(s) int_0^s f phi^{n-1}.
DivergenceReport poisson_divergence_test(const ModelManifold& m, const RadialSource& f, Exec exec = Exec::parallel);

/// Non-parabolic path: u(r) = int_r^inf P. A divergent potential is
/// returned as a report (divergence.divergent = true, no samples).
RadialSolution solve_poisson(const ModelManifold& m, const RadialSource& f, Exec exec = Exec::parallel);

/// Parabolic finite-volume path: u = u_bar + alpha_avg psi with -Laplacian
/// psi = bump and u_bar the mean-zero solution for f - alpha_avg bump.
RadialSolution solve_poisson_finite_volume(const ModelManifold& m, const RadialSource& f,
                                           Exec exec = Exec::parallel);

struct LevelSetAnnulus {
    double a = 0.0;
    double b = kInf;
    double inner_radius = 0.0;
    double outer_radius = kInf;
};

/// {a < G < b} for a decreasing Green profile.
LevelSetAnnulus level_set(const GreenProfile& g, double a, double b);
/// Radius where G equals s.
double level_radius(const GreenProfile& g, double s);
/// sphere_area * int_{inner}^{outer} G phi^{n-1}.
double level_set_mass(const GreenProfile& g, const LevelSetAnnulus& annulus);
/// |G'| sphere_area phi^{n-1} on the level set {G = s}.
double flux_on_level(const GreenProfile& g, double s);

struct TailL2 {
    double value = 0.0;
    double log_value = 0.0;
    bool truncated = false;
};

/// sphere_area * int_R^inf G^2 phi^{n-1}; cut at r_max (truncated = true)
/// when the profile has no exponential tail.
TailL2 tail_l2(const GreenProfile& g, double radius);

struct GradientRatio {
    RadialSamples profile;
    double sup = 0.0;
    double sup_radius = 0.0;
};

/// r -> (|G'|/G) / sqrt(K(r + 1)) on [3 eps0, r_max - 1].
GradientRatio gradient_ratio_profile(const GreenProfile& g, std::size_t points = 400);

/// Interior RMS of -(u'' + (n-1)(phi'/phi) u') - f from 6th-order
/// differences; stencils touching a kink or splice joint are skipped.
struct ResidualStats {
    double rms = 0.0;
    double max_abs = 0.0;
    std::size_t points = 0;
};
ResidualStats laplacian_residual(const ModelManifold& m, const RadialSamples& u, const RealFn& rhs,
                                 double r_from, std::span<const double> kinks);

}  // namespace rsm
