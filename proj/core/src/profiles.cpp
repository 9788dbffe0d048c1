#include "parapos/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parapos/linear_solvers.hpp"

namespace parapos {

namespace profiles {

Scalar zero() {
    return [](const Point&) { return 0.0; };
}

Scalar sine(const SpatialDomain& domain, double amplitude, std::array<int, 2> modes) {
    const int n = domain.dimension();
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> k{0.0, 0.0};
    for (int a = 0; a < n; ++a) {
        lo[static_cast<std::size_t>(a)] = domain.axis(a).lo;
        k[static_cast<std::size_t>(a)] = modes[static_cast<std::size_t>(a)] * std::numbers::pi / domain.axis(a).length();
    }
    return [=](const Point& x) {
        double v = amplitude;
        for (int a = 0; a < n; ++a) {
            const auto i = static_cast<std::size_t>(a);
            v *= std::sin(k[i] * (x[i] - lo[i]));
        }
        return v;
    };
}

Scalar gaussian(double amplitude, Point center, double width) {
    return [=](const Point& x) {
        const double dx = x[0] - center[0];
        const double dy = x[1] - center[1];
        return amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
    };
}

Scalar bump(double amplitude, Point center, double radius, int power) {
    return [=](const Point& x) {
        const double dx = x[0] - center[0];
        const double dy = x[1] - center[1];
        const double s = (dx * dx + dy * dy) / (radius * radius);
        if (s >= 1.0) {
            return 0.0;
        }
        return amplitude * std::pow(1.0 - s, power);
    };
}

Scalar plateau(const SpatialDomain& domain, double amplitude, double ramp) {
    const int n = domain.dimension();
    std::array<Interval, 2> b{};
    for (int a = 0; a < n; ++a) {
        b[static_cast<std::size_t>(a)] = domain.axis(a);
    }
    auto step = [](double s) {
        s = std::clamp(s, 0.0, 1.0);
        return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
    };
    return [=](const Point& x) {
        double v = amplitude;
        for (int a = 0; a < n; ++a) {
            const auto i = static_cast<std::size_t>(a);
            const double dist = std::min(x[i] - b[i].lo, b[i].hi - x[i]);
            v *= step(dist / ramp);
        }
        return v;
    };
}

Scalar hat(const SpatialDomain& domain, double amplitude, double peak) {
    const Interval b = domain.axis(0);
    return [=](const Point& x) {
        if (x[0] <= b.lo || x[0] >= b.hi) {
            return 0.0;
        }
        return x[0] <= peak ? amplitude * (x[0] - b.lo) / (peak - b.lo) : amplitude * (b.hi - x[0]) / (b.hi - peak);
    };
}

InitialProfile stack(std::vector<Scalar> components) {
    return [c = std::move(components)](const Point& x, std::span<double> out) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            out[k] = c[k](x);
        }
    };
}

}  // namespace profiles

std::vector<double> discrete_laplacian(const Grid& grid, std::span<const double> values) {
    std::vector<double> out(grid.size(), 0.0);
    const int nx = grid.nodes(0);
    const int ny = grid.nodes(1);
    const double hx2 = grid.spacing(0) * grid.spacing(0);
    const bool two_d = grid.dimension() == 2;
    const double hy2 = two_d ? grid.spacing(1) * grid.spacing(1) : 1.0;
    for (int j = two_d ? 1 : 0; j < (two_d ? ny - 1 : 1); ++j) {
        for (int i = 1; i < nx - 1; ++i) {
            const std::size_t c = grid.index(i, j);
            double lap = (values[grid.index(i - 1, j)] - 2.0 * values[c] + values[grid.index(i + 1, j)]) / hx2;
            if (two_d) {
                lap += (values[grid.index(i, j - 1)] - 2.0 * values[c] + values[grid.index(i, j + 1)]) / hy2;
            }
            out[c] = lap;
        }
    }
    return out;
}

std::vector<double> scalar_steady_state(const Grid& grid, double d, const ScalarField& rate,
                                        const ScalarField& crowding, double t, double tolerance) {
    const std::size_t n = grid.size();
    std::vector<double> rho(n), theta(n), psi(n, 0.0);
    double cap = 0.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const Point x = grid.point(idx);
        rho[idx] = rate(t, x);
        theta[idx] = crowding(t, x);
        if (theta[idx] > 0.0) {
            cap = std::max(cap, rho[idx] / theta[idx]);
        }
    }
    const auto guess = profiles::sine(grid.domain(), cap > 0.0 ? cap : 1.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        psi[idx] = grid.is_boundary(idx) ? 0.0 : guess(grid.point(idx));
    }

    const double hx = grid.spacing(0);
    const double hy = grid.dimension() == 2 ? grid.spacing(1) : 1.0;
    auto residual = [&](const std::vector<double>& v) {
        std::vector<double> r = discrete_laplacian(grid, v);
        for (std::size_t idx = 0; idx < n; ++idx) {
            r[idx] = grid.is_boundary(idx) ? 0.0 : d * r[idx] + v[idx] * (rho[idx] - theta[idx] * v[idx]);
        }
        return r;
    };
    auto sup = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double e : v) {
            s = std::max(s, std::abs(e));
        }
        return s;
    };

    StencilOperator jac(grid);
    std::vector<double> r = residual(psi);
    for (int iter = 0; iter < 200; ++iter) {
        const double scale = 1.0 + sup(psi) * (d * (2.0 / (hx * hx) + (grid.dimension() == 2 ? 2.0 / (hy * hy) : 0.0)) +
                                               sup(rho) + sup(theta) * sup(psi));
        if (sup(r) <= tolerance * scale) {
            return psi;
        }
        for (std::size_t idx = 0; idx < n; ++idx) {
            auto& row = jac.row(idx);
            row.fill(0.0);
            if (grid.is_boundary(idx)) {
                row[StencilOperator::slot(0, 0)] = 1.0;
                continue;
            }
            const double cx = d / (hx * hx);
            row[StencilOperator::slot(-1, 0)] = cx;
            row[StencilOperator::slot(1, 0)] = cx;
            double diag = -2.0 * cx;
            if (grid.dimension() == 2) {
                const double cy = d / (hy * hy);
                row[StencilOperator::slot(0, -1)] = cy;
                row[StencilOperator::slot(0, 1)] = cy;
                diag -= 2.0 * cy;
            }
            row[StencilOperator::slot(0, 0)] = diag + rho[idx] - 2.0 * theta[idx] * psi[idx];
        }
        std::vector<double> rhs(n), delta(n, 0.0);
        for (std::size_t idx = 0; idx < n; ++idx) {
            rhs[idx] = -r[idx];
        }
        solve_stencil(jac, rhs, delta, 1e-15, 5000);
        // Damped update keeps the iterate on the positive branch.
        double step = 1.0;
        const double r0 = sup(r);
        for (int ls = 0; ls < 30; ++ls) {
            std::vector<double> trial(psi);
            for (std::size_t idx = 0; idx < n; ++idx) {
                trial[idx] += step * delta[idx];
            }
            std::vector<double> rt = residual(trial);
            if (sup(rt) < r0 || ls == 29) {
                psi = std::move(trial);
                r = std::move(rt);
                break;
            }
            step *= 0.5;
        }
        if (sup(delta) * step <= 1e-15 * (1.0 + sup(psi)) && sup(r) <= 1e3 * tolerance * scale) {
            return psi;
        }
    }
    throw NonConvergence("scalar steady state: Newton iteration did not converge");
}

}  // namespace parapos
