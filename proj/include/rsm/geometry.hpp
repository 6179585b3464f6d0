#pragma once

// Rotationally symmetric model manifolds ds^2 = dr^2 + phi(r)^2 dtheta^2.
//
// Every geometric quantity is driven by the warping function phi. Profiles
// are evaluated in log form (log phi, phi'/phi, phi''/phi) so that rapidly
// growing warpings such as exp(r^2) stay representable far beyond the radius
// where phi itself overflows.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rsm/numerics.hpp"

namespace rsm {

/// log phi, phi'/phi and phi''/phi at one radius.
struct WarpJet {
    double log_phi = 0.0;
    double dlog = 0.0;    ///< phi'/phi
    double d2ratio = 0.0; ///< phi''/phi
};

enum class Family { euclidean, space_form, power_exp, cusp, custom };

std::string to_string(Family f);

/// Sampled triple (phi, phi', phi'') for user-defined profiles. Interpolated
/// cell-wise by quintic Hermite polynomials; derivatives come from the
/// interpolant, never from differencing.
struct CustomSamples {
    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> dphi;
    std::vector<double> d2phi;
};

class WarpingProfile {
public:
    /// phi(r) = r.
    static WarpingProfile euclidean(double r_max);
    /// phi(r) = sinh(sqrt(-k) r) / sqrt(-k), constant curvature k < 0.
    static WarpingProfile space_form(double curvature, double r_max);
    /// phi = r on [0, 1/2], quintic blend on [1/2, 1], exp(B r^{1+gamma/2}) on [1, inf).
    static WarpingProfile power_exp(double gamma, double r_max, double scale_b = 1.0);
    /// phi = r on [0, 1/2], quintic blend on [1/2, 1], r e^{-r} on [1, inf): a finite-volume cusp.
    static WarpingProfile cusp(double r_max);
    static WarpingProfile custom(CustomSamples samples);

    Family family() const { return family_; }
    double r_max() const { return r_max_; }
    double gamma() const { return gamma_; }
    double curvature() const { return curvature_; }
    double scale_b() const { return scale_b_; }

    /// Largest radius at which the profile may be evaluated: r_max for
    /// sampled profiles, unbounded for closed-form families.
    double max_radius() const;

    /// Whether integrals of Green-type quantities have an exponentially
    /// decaying envelope past r_max (closed-form families with positive
    /// essential spectrum).
    bool exponential_tail() const;

    /// lim phi'/phi as r -> inf for closed-form families; NaN for sampled profiles.
    double asymptotic_dlog() const;

    /// Points where phi is only C^2 (splice joints, custom grid knots are not listed).
    std::span<const double> joints() const { return joints_; }

    WarpJet jet(double r) const;
    double log_phi(double r) const { return jet(r).log_phi; }
    /// log phi(s + d) - log phi(s), without cancellation on the far branches.
    double log_phi_shift(double s, double d) const;
    double phi(double r) const;
    double dphi(double r) const;
    double d2phi(double r) const;

    std::string describe() const;

private:
    struct Quintic {
        double c[6] = {0, 0, 0, 0, 0, 0};
        double r0 = 0.0, h = 1.0;
        static Quintic fit(double r0, double r1, double y0, double d0, double s0, double y1, double d1, double s1);
        void eval(double r, double& y, double& d, double& s) const;
    };

    WarpJet far_jet(double r) const;
    void build_blend();
    void validate() const;

    Family family_ = Family::euclidean;
    double r_max_ = 0.0;
    double gamma_ = 0.0;
    double curvature_ = 0.0;
    double scale_b_ = 1.0;
    Quintic blend_;
    std::vector<double> joints_;
    std::shared_ptr<const CustomSamples> custom_;
};

/// Numerical knobs shared by all operations on one manifold.
struct Tolerances {
    double quad_rel = 1e-12;        ///< relative target for adaptive quadrature
    double grid_h_rel = 1e-3;       ///< radial eigen-grid spacing as a fraction of domain length
    double profile_h = 0.01;        ///< spacing of exported solution / Green profiles
    double profile_radius = 8.0;    ///< outer radius of exported profiles
};

class ModelManifold {
public:
    ModelManifold(int dimension, WarpingProfile warping, double eps0 = 0.1, Tolerances tol = {});

    int dimension() const { return n_; }
    const WarpingProfile& warping() const { return warping_; }
    double eps0() const { return eps0_; }
    double r_max() const { return warping_.r_max(); }
    /// Area of the unit (n-1)-sphere.
    double sphere_area() const { return sphere_area_; }
    const Tolerances& tolerances() const { return tol_; }
    QuadratureOptions quad_options() const;

    /// (n-1) log phi(r): log of the radial volume density without the sphere constant.
    double log_density(double r) const;

private:
    int n_;
    WarpingProfile warping_;
    double eps0_;
    double sphere_area_;
    Tolerances tol_;
};

struct CurvatureScale {
    double radius = 0.0;
    double k_tilde = 0.0;  ///< sup of phi''/phi on [eps0, R]
    double k_hat = 0.0;    ///< sup of phi'/phi on [eps0, R]
    double k = 0.0;        ///< max(1, k_tilde, k_hat)
    double theta = 0.0;    ///< R sqrt(K)
};

/// Radial Ricci curvature -(n-1) phi''/phi.
double ricci_radial(const ModelManifold& m, double r);
/// Laplacian of the distance function, (n-1) phi'/phi.
double mean_curvature(const ModelManifold& m, double r);

CurvatureScale curvature_scale(const ModelManifold& m, double radius);
/// Batched curvature_scale over increasing radii; suprema are accumulated
/// shell by shell.
std::vector<CurvatureScale> curvature_scales(const ModelManifold& m, std::span<const double> radii);

/// Volume of the geodesic ball B_R(p).
double volume_ball(const ModelManifold& m, double radius);
/// Total volume; +inf when the volume integral diverges.
double total_volume(const ModelManifold& m);

struct Classification {
    bool non_parabolic = false;
    bool finite_volume = false;
    double green_growth_slope = 0.0;   ///< log-log slope of increments of int phi^{1-n}
    double volume_growth_slope = 0.0;  ///< log-log slope of increments of int phi^{n-1}
};

Classification classify(const ModelManifold& m);

}  // namespace rsm
