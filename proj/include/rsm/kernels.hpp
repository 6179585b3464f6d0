#pragma once

// Data-parallel inner loops. Every kernel has a serial reference path
// (Exec::serial) and an OpenMP path (Exec::parallel) that must produce
// bit-identical output: each iteration writes only its own slot and any
// reduction is done serially afterwards, in index order.

#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <vector>

#include "rsm/numerics.hpp"

namespace rsm {

enum class Exec { serial, parallel };

/// Runs fn(i) for i in [0, n). If any iteration throws, the exception from
/// the lowest failing index is rethrown after the loop.
template <class Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
    if (exec == Exec::serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first;
    std::size_t first_index = std::numeric_limits<std::size_t>::max();
    std::mutex guard;
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (static_cast<std::size_t>(i) < first_index) {
                first_index = static_cast<std::size_t>(i);
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
}

/// Maps fn over [0, n) into a vector, preserving index order.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Exec exec, Fn&& fn) {
    std::vector<T> out(n);
    parallel_for(n, exec, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

/// f evaluated at every grid point.
std::vector<double> sample(const RealFn& f, std::span<const double> grid, Exec exec = Exec::parallel);

/// Running integral of f over a sorted grid: out[0] = 0 and
/// out[k] = int_{grid[0]}^{grid[k]} f. Cells are integrated independently
/// (adaptive, split at breakpoints) and summed serially.
std::vector<double> cumulative_integral(const RealFn& f, std::span<const double> grid,
                                        std::span<const double> breakpoints, const QuadratureOptions& opt,
                                        Exec exec = Exec::parallel);

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;
};

/// Symmetrically scaled stiffness W^{-1/2} K W^{-1/2} of the weighted
/// radial operator -(w v')'/w on a uniform grid of spacing h.
/// log_w_nodes has one entry per unknown, log_w_faces one per cell face
/// (nodes + 1); face i sits between unknowns i-1 and i. A face weight of
/// -inf (log) encodes a no-flux boundary.
Tridiagonal assemble_radial_operator(std::span<const double> log_w_nodes, std::span<const double> log_w_faces,
                                     double h, Exec exec = Exec::parallel);

}  // namespace rsm
