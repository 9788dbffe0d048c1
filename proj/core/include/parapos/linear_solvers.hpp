#pragma once

#include <array>
#include <span>
#include <vector>

#include "parapos/model.hpp"

namespace parapos {

/// Nine-point stencil operator on a grid. Interior rows hold coefficients for the
/// neighbours (di, dj) in {-1, 0, 1}^2 at slot (dj + 1) * 3 + (di + 1); boundary
/// rows are the identity. Neighbour values on boundary nodes are taken as zero.
class StencilOperator {
public:
    explicit StencilOperator(const Grid& grid);

    static constexpr int slot(int di, int dj) { return (dj + 1) * 3 + (di + 1); }

    std::array<double, 9>& row(std::size_t idx) { return rows_[idx]; }
    const std::array<double, 9>& row(std::size_t idx) const { return rows_[idx]; }
    const Grid& grid() const { return *grid_; }

    void apply(std::span<const double> x, std::span<double> y) const;

private:
    const Grid* grid_;
    std::vector<std::array<double, 9>> rows_;
};

struct LinearSolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = true;
};

/// Thomas algorithm for lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// The solution overwrites `rhs`. Requires a non-singular, pivot-free system
/// (diagonally dominant in practice).
void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Jacobi-preconditioned BiCGSTAB. `x` holds the initial guess on entry.
LinearSolveReport bicgstab(const StencilOperator& op, std::span<const double> b, std::span<double> x,
                           double relative_tolerance, int max_iterations);

/// Solves op x = b: direct tridiagonal elimination in 1D, BiCGSTAB in 2D.
LinearSolveReport solve_stencil(const StencilOperator& op, std::span<const double> b, std::span<double> x,
                                double relative_tolerance, int max_iterations);

}  // namespace parapos
