#pragma once

// Bottom of the spectrum of -Laplacian on radial domains.
//
// On a model manifold the ground state of a radial domain is radial, so the
// problem reduces to -(w v')'/w = lambda v with w = phi^{n-1}. It is
// discretized by second-order finite differences with the weight lumped at
// the nodes and solved in the symmetrically scaled form, which only needs
// differences of log w and so never overflows.

#include <string>
#include <utility>
#include <vector>

#include "rsm/geometry.hpp"
#include "rsm/kernels.hpp"

namespace rsm {

struct RadialDomain {
    enum class Kind { exterior, annulus, whole };
    Kind kind = Kind::whole;
    double r1 = 0.0;  ///< inner radius (exterior, annulus)
    double r2 = 0.0;  ///< outer radius (annulus)

    static RadialDomain exterior(double radius) { return {Kind::exterior, radius, 0.0}; }
    static RadialDomain annulus(double inner, double outer) { return {Kind::annulus, inner, outer}; }
    static RadialDomain whole() { return {Kind::whole, 0.0, 0.0}; }

    std::string describe() const;
};

struct SpectralEstimate {
    double value = 0.0;
    double barta_lower = 0.0;
    double rayleigh_upper = 0.0;
    double outer_radius_used = 0.0;
    bool converged = false;
    /// (outer radius, value) per truncation rung for lambda1; (R, value) per
    /// exterior for lambda1_ess.
    std::vector<std::pair<double, double>> ladder;
};

/// One Dirichlet problem on (a, b), or on (0, b) with the regular-origin
/// condition when a == 0.
struct RadialEigen {
    double value = 0.0;
    /// Rayleigh quotient of the piecewise-linear interpolant of the discrete
    /// ground state: an upper bound for the continuous problem on (a, b).
    double rayleigh_upper = 0.0;
    std::size_t nodes = 0;
    double h = 0.0;
};

RadialEigen solve_radial(const ModelManifold& m, double a, double b, double h, Exec exec = Exec::parallel);

/// Grid spacing used for a domain whose first truncation radius is `first_outer`.
double radial_grid_spacing(const ModelManifold& m, double a, double first_outer);

SpectralEstimate lambda1(const ModelManifold& m, const RadialDomain& d, Exec exec = Exec::parallel);

/// a^2/4 with a = inf of (n-1) phi'/phi over the domain (truncated at r_max);
/// 0 when a <= 0.
double barta_lower_bound(const ModelManifold& m, const RadialDomain& d);

SpectralEstimate lambda1_ess(const ModelManifold& m, Exec exec = Exec::parallel);

}  // namespace rsm
