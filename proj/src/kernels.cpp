#include "rsm/kernels.hpp"

#include <cmath>

#include "rsm/error.hpp"

namespace rsm {

std::vector<double> sample(const RealFn& f, std::span<const double> grid, Exec exec) {
    return parallel_map<double>(grid.size(), exec, [&](std::size_t i) { return f(grid[i]); });
}

std::vector<double> cumulative_integral(const RealFn& f, std::span<const double> grid,
                                        std::span<const double> breakpoints, const QuadratureOptions& opt,
                                        Exec exec) {
    const std::size_t n = grid.size();
    if (n == 0) return {};
    const auto cells = parallel_map<double>(n - 1, exec, [&](std::size_t i) {
        if (grid[i + 1] == grid[i]) return 0.0;
        return integrate_piecewise(f, grid[i], grid[i + 1], breakpoints, opt).value;
    });
    std::vector<double> out(n, 0.0);
    long double run = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        run += cells[i];
        out[i + 1] = static_cast<double>(run);
    }
    return out;
}

Tridiagonal assemble_radial_operator(std::span<const double> log_w_nodes, std::span<const double> log_w_faces,
                                     double h, Exec exec) {
    const std::size_t n = log_w_nodes.size();
    if (n < 1 || log_w_faces.size() != n + 1)
        throw Error(ErrorKind::precondition, "assemble_radial_operator: need faces = nodes + 1");
    Tridiagonal t;
    t.diag.resize(n);
    t.offdiag.resize(n > 0 ? n - 1 : 0);
    const double inv_h2 = 1.0 / (h * h);
    parallel_for(n, exec, [&](std::size_t i) {
        const double ln = log_w_nodes[i];
        t.diag[i] = (std::exp(log_w_faces[i] - ln) + std::exp(log_w_faces[i + 1] - ln)) * inv_h2;
        if (i + 1 < n) t.offdiag[i] = -std::exp(log_w_faces[i + 1] - 0.5 * (ln + log_w_nodes[i + 1])) * inv_h2;
    });
    return t;
}

}  // namespace rsm
