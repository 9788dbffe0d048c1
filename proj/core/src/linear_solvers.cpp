#include "parapos/linear_solvers.hpp"

#include <cmath>
#include <numeric>

namespace parapos {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

StencilOperator::StencilOperator(const Grid& grid) : grid_(&grid), rows_(grid.size()) {
    for (std::size_t idx = 0; idx < rows_.size(); ++idx) {
        rows_[idx].fill(0.0);
        rows_[idx][slot(0, 0)] = 1.0;
    }
}

void StencilOperator::apply(std::span<const double> x, std::span<double> y) const {
    const Grid& g = *grid_;
    const int nx = g.nodes(0);
    const int ny = g.nodes(1);
    const bool two_d = g.dimension() == 2;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t idx = g.index(i, j);
            const bool boundary = i == 0 || i == nx - 1 || (two_d && (j == 0 || j == ny - 1));
            if (boundary) {
                y[idx] = x[idx];
                continue;
            }
            const auto& r = rows_[idx];
            double acc = 0.0;
            const int jlo = two_d ? -1 : 0;
            const int jhi = two_d ? 1 : 0;
            for (int dj = jlo; dj <= jhi; ++dj) {
                for (int di = -1; di <= 1; ++di) {
                    const double c = r[static_cast<std::size_t>(slot(di, dj))];
                    if (c == 0.0) {
                        continue;
                    }
                    const int ii = i + di;
                    const int jj = j + dj;
                    const bool nb_boundary =
                        ii == 0 || ii == nx - 1 || (two_d && (jj == 0 || jj == ny - 1));
                    if (nb_boundary && (di != 0 || dj != 0)) {
                        continue;
                    }
                    acc += c * x[g.index(ii, jj)];
                }
            }
            y[idx] = acc;
        }
    }
}

void solve_tridiagonal(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
                       std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) {
        return;
    }
    std::vector<double> c(n, 0.0);
    double beta = diag[0];
    if (beta == 0.0) {
        throw SolverError("tridiagonal system has a zero pivot");
    }
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        if (beta == 0.0) {
            throw SolverError("tridiagonal system has a zero pivot");
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

LinearSolveReport bicgstab(const StencilOperator& op, std::span<const double> b, std::span<double> x,
                           double relative_tolerance, int max_iterations) {
    const std::size_t n = b.size();
    std::vector<double> inv_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = op.row(i)[static_cast<std::size_t>(StencilOperator::slot(0, 0))];
        inv_diag[i] = d != 0.0 ? 1.0 / d : 1.0;
    }
    std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
    op.apply(x, r);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
    }
    const double bnorm = l2(b);
    LinearSolveReport rep;
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return rep;
    }
    rep.relative_residual = l2(r) / bnorm;
    if (rep.relative_residual <= relative_tolerance) {
        return rep;
    }
    r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        const double rho_new = dot(r0, r);
        if (rho_new == 0.0) {
            break;
        }
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            phat[i] = inv_diag[i] * p[i];
        }
        op.apply(phat, v);
        const double r0v = dot(r0, v);
        if (r0v == 0.0) {
            break;
        }
        alpha = rho / r0v;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = r[i] - alpha * v[i];
        }
        rep.iterations = it;
        if (l2(s) / bnorm <= relative_tolerance) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * phat[i];
            }
            rep.relative_residual = l2(s) / bnorm;
            rep.converged = true;
            return rep;
        }
        for (std::size_t i = 0; i < n; ++i) {
            shat[i] = inv_diag[i] * s[i];
        }
        op.apply(shat, t);
        const double tt = dot(t, t);
        omega = tt != 0.0 ? dot(t, s) / tt : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = s[i] - omega * t[i];
        }
        rep.relative_residual = l2(r) / bnorm;
        if (rep.relative_residual <= relative_tolerance) {
            rep.converged = true;
            return rep;
        }
        if (omega == 0.0) {
            break;
        }
    }
    // Recompute the true residual before declaring failure.
    op.apply(x, r);
    for (std::size_t i = 0; i < n; ++i) {
        r[i] = b[i] - r[i];
    }
    rep.relative_residual = l2(r) / bnorm;
    rep.converged = rep.relative_residual <= relative_tolerance;
    return rep;
}

LinearSolveReport solve_stencil(const StencilOperator& op, std::span<const double> b, std::span<double> x,
                                double relative_tolerance, int max_iterations) {
    const Grid& g = op.grid();
    if (g.dimension() == 2) {
        return bicgstab(op, b, x, relative_tolerance, max_iterations);
    }
    const int n = g.nodes(0);
    const auto interior = static_cast<std::size_t>(n - 2);
    std::vector<double> lo(interior), di(interior), up(interior), rhs(interior);
    for (std::size_t k = 0; k < interior; ++k) {
        const auto& r = op.row(k + 1);
        lo[k] = k == 0 ? 0.0 : r[StencilOperator::slot(-1, 0)];
        di[k] = r[StencilOperator::slot(0, 0)];
        up[k] = k + 1 == interior ? 0.0 : r[StencilOperator::slot(1, 0)];
        rhs[k] = b[k + 1];
    }
    solve_tridiagonal(lo, di, up, rhs);
    x[0] = b[0];
    x[static_cast<std::size_t>(n - 1)] = b[static_cast<std::size_t>(n - 1)];
    for (std::size_t k = 0; k < interior; ++k) {
        x[k + 1] = rhs[k];
    }
    LinearSolveReport rep;
    std::vector<double> res(b.size());
    op.apply(x, res);
    double rn = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        rn += (b[i] - res[i]) * (b[i] - res[i]);
    }
    const double bn = l2(b);
    rep.relative_residual = bn > 0.0 ? std::sqrt(rn) / bn : std::sqrt(rn);
    return rep;
}

}  // namespace parapos
