#include "parapos/fdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "parapos/linear_solvers.hpp"

namespace parapos {

namespace {

using Rows = std::vector<std::array<double, 9>>;

// Interior-node central gradient of every component, row-major p[k * n + axis].
void gradient_at(const Field& u, std::size_t idx, std::span<double> p) {
    const Grid& g = u.grid();
    const int n = g.dimension();
    const auto [i, j] = g.coords(idx);
    for (int k = 0; k < u.components(); ++k) {
        p[static_cast<std::size_t>(k * n)] =
            (u.at(k, g.index(i + 1, j)) - u.at(k, g.index(i - 1, j))) / (2.0 * g.spacing(0));
        if (n == 2) {
            p[static_cast<std::size_t>(k * n + 1)] =
                (u.at(k, g.index(i, j + 1)) - u.at(k, g.index(i, j - 1))) / (2.0 * g.spacing(1));
        }
    }
}

struct Explicit {
    std::vector<double> values;  // component-major, zero on boundary nodes
    std::size_t evaluations = 0;
};

// Drift and source terms b . grad u^k + c^k at every interior node.
Explicit explicit_terms(const Field& u, double t, const ProblemSpec& spec) {
    const auto& cs = spec.coefficients;
    const Grid& g = u.grid();
    const int m = cs.components;
    const int n = g.dimension();
    const std::size_t N = g.size();
    Explicit out;
    out.values.assign(static_cast<std::size_t>(m) * N, 0.0);
    std::vector<double> state(static_cast<std::size_t>(m));
    std::vector<double> p(static_cast<std::size_t>(m * n), 0.0);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    std::vector<double> c(static_cast<std::size_t>(m), 0.0);
    const bool need_p = cs.gradient_dependent || cs.has_drift();
    for (std::size_t idx = 0; idx < N; ++idx) {
        if (g.is_boundary(idx)) {
            continue;
        }
        const Point x = g.point(idx);
        u.gather(idx, state);
        if (need_p) {
            gradient_at(u, idx, p);
        }
        cs.source(t, x, state, p, c);
        ++out.evaluations;
        if (cs.has_drift()) {
            cs.drift(t, x, state, p, b);
        }
        for (int k = 0; k < m; ++k) {
            double v = c[static_cast<std::size_t>(k)];
            if (cs.has_drift()) {
                for (int a = 0; a < n; ++a) {
                    v += b[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(k * n + a)];
                }
            }
            out.values[static_cast<std::size_t>(k) * N + idx] = v;
        }
    }
    return out;
}

// Stencil rows of L_k = sum_ij a^k_ij D_ij with A frozen at state u; boundary rows are zero.
Rows diffusion_rows(const Field& u, double t, const ProblemSpec& spec, int k) {
    const auto& cs = spec.coefficients;
    const Grid& g = u.grid();
    const std::size_t N = g.size();
    const bool two_d = g.dimension() == 2;
    const double hx = g.spacing(0);
    const double hy = two_d ? g.spacing(1) : 1.0;
    Rows rows(N);
    std::vector<double> state(static_cast<std::size_t>(cs.components));
    for (std::size_t idx = 0; idx < N; ++idx) {
        auto& r = rows[idx];
        r.fill(0.0);
        if (g.is_boundary(idx)) {
            continue;
        }
        u.gather(idx, state);
        const DiffusionMatrix a = checked_diffusion(cs, t, g.point(idx), state, k);
        const double cx = a(0, 0) / (hx * hx);
        r[StencilOperator::slot(-1, 0)] = cx;
        r[StencilOperator::slot(1, 0)] = cx;
        double center = -2.0 * cx;
        if (two_d) {
            const double cy = a(1, 1) / (hy * hy);
            const double cxy = a(0, 1) / (2.0 * hx * hy);
            r[StencilOperator::slot(0, -1)] = cy;
            r[StencilOperator::slot(0, 1)] = cy;
            r[StencilOperator::slot(1, 1)] = cxy;
            r[StencilOperator::slot(-1, -1)] = cxy;
            r[StencilOperator::slot(1, -1)] = -cxy;
            r[StencilOperator::slot(-1, 1)] = -cxy;
            center -= 2.0 * cy;
        }
        r[StencilOperator::slot(0, 0)] = center;
    }
    return rows;
}

// y = L x for one component; neighbours on boundary nodes are read as they are (zero).
void apply_rows(const Grid& g, const Rows& rows, std::span<const double> x, std::span<double> y) {
    const int nx = g.nodes(0);
    const int ny = g.dimension() == 2 ? g.nodes(1) : 1;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (g.is_boundary(idx)) {
            y[idx] = 0.0;
            continue;
        }
        const auto [i, j] = g.coords(idx);
        double s = 0.0;
        for (int dj = -1; dj <= 1; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const double c = rows[idx][static_cast<std::size_t>(StencilOperator::slot(di, dj))];
                if (c == 0.0) {
                    continue;
                }
                const int ii = i + di;
                const int jj = j + dj;
                if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) {
                    continue;
                }
                s += c * x[g.index(ii, jj)];
            }
        }
        y[idx] = s;
    }
}

double negative_part(const Field& u) {
    double s = 0.0;
    for (double v : u.raw()) {
        s = std::max(s, -v);
    }
    return s;
}

void check_finite(const Field& u, double t) {
    if (!u.all_finite()) {
        std::ostringstream os;
        os << "state became non-finite at t = " << t;
        throw SolverError(os.str(), t);
    }
}

StepDiagnostics diagnose_impl(const Field& prev, const Field& next, double t, double dt) {
    const Grid& g = next.grid();
    const int m = next.components();
    StepDiagnostics d;
    d.t = t;
    d.min_value = std::numeric_limits<double>::infinity();
    d.component_sup.assign(static_cast<std::size_t>(m), 0.0);
    d.dudt_min_by_component.assign(static_cast<std::size_t>(m), std::numeric_limits<double>::infinity());
    d.dudt_max_by_component.assign(static_cast<std::size_t>(m), -std::numeric_limits<double>::infinity());
    bool any_interior = false;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        double sq = 0.0;
        const bool interior = !g.is_boundary(idx);
        any_interior = any_interior || interior;
        for (int k = 0; k < m; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double v = next.at(k, idx);
            sq += v * v;
            d.min_value = std::min(d.min_value, v);
            d.negpart_norm = std::max(d.negpart_norm, -v);
            d.component_sup[kk] = std::max(d.component_sup[kk], std::abs(v));
            if (interior) {
                const double rate = dt > 0.0 ? (v - prev.at(k, idx)) / dt : 0.0;
                d.dudt_min_by_component[kk] = std::min(d.dudt_min_by_component[kk], rate);
                d.dudt_max_by_component[kk] = std::max(d.dudt_max_by_component[kk], rate);
            }
        }
        d.sup_norm = std::max(d.sup_norm, std::sqrt(sq));
    }
    if (!any_interior) {
        std::fill(d.dudt_min_by_component.begin(), d.dudt_min_by_component.end(), 0.0);
        std::fill(d.dudt_max_by_component.begin(), d.dudt_max_by_component.end(), 0.0);
    }
    d.dudt_min = d.dudt_min_by_component[0];
    d.dvdt_max = m >= 2 ? d.dudt_max_by_component[1] : 0.0;
    return d;
}

std::size_t step_count(double horizon, double dt) {
    const double ratio = horizon / dt;
    const double r = std::round(ratio);
    const double steps = std::abs(ratio - r) <= 1e-9 * std::max(1.0, r) ? r : std::ceil(ratio);
    return static_cast<std::size_t>(std::max(1.0, steps));
}

double time_of(std::size_t n, std::size_t total, double dt, double horizon) {
    return n == total ? horizon : std::min(static_cast<double>(n) * dt, horizon);
}

// Advances one step and records diagnostics and solver statistics.
Field advance(const Field& u, double t, double t_next, const ProblemSpec& spec, const SchemeConfig& scheme,
              Trajectory& traj) {
    auto [next, report] = step(u, t, t_next - t, spec, scheme);
    traj.total_linear_iterations += report.linear_iterations;
    traj.max_linear_residual = std::max(traj.max_linear_residual, report.linear_residual);
    traj.max_clipped = std::max(traj.max_clipped, report.clipped);
    traj.diagnostics.push_back(diagnose_impl(u, next, t_next, t_next - t));
    return std::move(next);
}

Trajectory start_trajectory(const ProblemSpec& spec, const SchemeConfig& scheme) {
    spec.validate();
    scheme.validate();
    Trajectory traj;
    traj.positivity_step_bound = positivity_step_bound(spec);
    traj.within_positivity_bound = scheme.dt <= traj.positivity_step_bound;
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(spec.initial);
    traj.diagnostics.push_back(diagnose_impl(spec.initial, spec.initial, 0.0, 0.0));
    return traj;
}

double sup_difference(const Field& a, const Field& b) {
    double s = 0.0;
    const auto ra = a.raw();
    const auto rb = b.raw();
    for (std::size_t i = 0; i < ra.size(); ++i) {
        s = std::max(s, std::abs(ra[i] - rb[i]));
    }
    return s;
}

}  // namespace

StepDiagnostics diagnose_step(const Field& prev, const Field& next, double t, double dt) {
    return diagnose_impl(prev, next, t, dt);
}

std::string to_string(TimeStepper s) {
    switch (s) {
        case TimeStepper::imex_be: return "imex_be";
        case TimeStepper::imex_cn: return "imex_cn";
        case TimeStepper::erk2: return "erk2";
    }
    return "unknown";
}

std::string to_string(PositivityMode m) {
    return m == PositivityMode::monitor_only ? "monitor_only" : "clip_and_flag";
}

void SchemeConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw SpecError("time step must be positive");
    }
    if (snapshot_stride < 1) {
        throw SpecError("snapshot stride must be at least 1");
    }
    if (!(linear_tolerance > 0.0) || max_linear_iterations < 1) {
        throw SpecError("linear solver tolerance and iteration cap must be positive");
    }
}

double erk2_step_limit(const ProblemSpec& spec, const Field& u, double t) {
    const Grid& g = u.grid();
    const int n = g.dimension();
    double h = g.spacing(0);
    if (n == 2) {
        h = std::min(h, g.spacing(1));
    }
    double lam = 0.0;
    std::vector<double> state(static_cast<std::size_t>(u.components()));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (g.is_boundary(idx)) {
            continue;
        }
        u.gather(idx, state);
        for (int k = 0; k < u.components(); ++k) {
            lam = std::max(lam, checked_diffusion(spec.coefficients, t, g.point(idx), state, k).max_eigenvalue());
        }
    }
    return lam > 0.0 ? h * h / (2.0 * n * lam) : std::numeric_limits<double>::infinity();
}

double positivity_step_bound(const ProblemSpec& spec) {
    const auto& cs = spec.coefficients;
    const Grid& g = spec.grid();
    const int m = cs.components;
    const int n = g.dimension();
    double sup_phi = 0.0;
    for (double v : spec.initial.raw()) {
        sup_phi = std::max(sup_phi, std::abs(v));
    }
    const double R = std::max(2.0 * sup_phi, 1e-3);
    const double eps = 1e-6 * std::max(1.0, R);

    std::vector<std::vector<double>> states;
    constexpr int levels = 5;
    if (m <= 3) {
        int total = 1;
        for (int k = 0; k < m; ++k) {
            total *= levels;
        }
        for (int s = 0; s < total; ++s) {
            std::vector<double> u(static_cast<std::size_t>(m));
            int rem = s;
            for (int k = 0; k < m; ++k) {
                u[static_cast<std::size_t>(k)] = R * (rem % levels) / (levels - 1);
                rem /= levels;
            }
            states.push_back(std::move(u));
        }
    } else {
        for (int l = 0; l < levels; ++l) {
            states.emplace_back(static_cast<std::size_t>(m), R * l / (levels - 1));
            for (int k = 0; k < m; ++k) {
                std::vector<double> u(static_cast<std::size_t>(m), 0.0);
                u[static_cast<std::size_t>(k)] = R * l / (levels - 1);
                states.push_back(std::move(u));
            }
        }
    }

    std::array<int, 2> stride{std::max(1, (g.nodes(0) - 1) / 8), n == 2 ? std::max(1, (g.nodes(1) - 1) / 8) : 1};
    const std::vector<double> p(static_cast<std::size_t>(m * n), 0.0);
    std::vector<double> up(static_cast<std::size_t>(m)), cp(static_cast<std::size_t>(m)),
        cm(static_cast<std::size_t>(m));
    double jac = 0.0;
    for (double t : {0.0, 0.5 * spec.horizon, spec.horizon}) {
        for (int j = 0; j < (n == 2 ? g.nodes(1) : 1); j += stride[1]) {
            for (int i = 0; i < g.nodes(0); i += stride[0]) {
                const Point x = g.point(g.index(i, j));
                for (const auto& u : states) {
                    std::vector<double> row(static_cast<std::size_t>(m), 0.0);
                    for (int q = 0; q < m; ++q) {
                        const auto qq = static_cast<std::size_t>(q);
                        up = u;
                        up[qq] = u[qq] + eps;
                        cs.source(t, x, up, p, cp);
                        up[qq] = u[qq] - eps;
                        cs.source(t, x, up, p, cm);
                        for (int k = 0; k < m; ++k) {
                            const auto kk = static_cast<std::size_t>(k);
                            row[kk] += std::abs(cp[kk] - cm[kk]) / (2.0 * eps);
                        }
                    }
                    for (double r : row) {
                        if (std::isfinite(r)) {
                            jac = std::max(jac, r);
                        }
                    }
                }
            }
        }
    }
    return jac > 0.0 ? 1.0 / (2.0 * jac) : std::numeric_limits<double>::infinity();
}

std::pair<Field, StepReport> step(const Field& state, double t, double dt, const ProblemSpec& spec,
                                  const SchemeConfig& scheme) {
    const Grid& g = state.grid();
    const int m = state.components();
    const std::size_t N = g.size();
    StepReport rep;
    Field next(g, m);

    if (scheme.stepper == TimeStepper::erk2) {
        const double limit = erk2_step_limit(spec, state, t);
        if (dt > limit * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "erk2 time step " << dt << " exceeds the stability bound " << limit;
            throw SpecError(os.str());
        }
        const Explicit f1 = explicit_terms(state, t, spec);
        rep.source_evaluations += f1.evaluations;
        Field mid(g, m);
        std::vector<double> k1(static_cast<std::size_t>(m) * N);
        std::vector<double> lu(N);
        for (int k = 0; k < m; ++k) {
            const Rows rows = diffusion_rows(state, t, spec, k);
            apply_rows(g, rows, state.component(k), lu);
            for (std::size_t idx = 0; idx < N; ++idx) {
                const std::size_t o = static_cast<std::size_t>(k) * N + idx;
                k1[o] = g.is_boundary(idx) ? 0.0 : lu[idx] + f1.values[o];
                mid.at(k, idx) = g.is_boundary(idx) ? 0.0 : state.at(k, idx) + dt * k1[o];
            }
        }
        check_finite(mid, t + dt);
        const Explicit f2 = explicit_terms(mid, t + dt, spec);
        rep.source_evaluations += f2.evaluations;
        for (int k = 0; k < m; ++k) {
            const Rows rows = diffusion_rows(mid, t + dt, spec, k);
            apply_rows(g, rows, mid.component(k), lu);
            for (std::size_t idx = 0; idx < N; ++idx) {
                const std::size_t o = static_cast<std::size_t>(k) * N + idx;
                next.at(k, idx) =
                    g.is_boundary(idx) ? 0.0 : state.at(k, idx) + 0.5 * dt * (k1[o] + lu[idx] + f2.values[o]);
            }
        }
    } else {
        const Explicit f = explicit_terms(state, t, spec);
        rep.source_evaluations += f.evaluations;
        const double w = scheme.stepper == TimeStepper::imex_cn ? 0.5 : 1.0;
        StencilOperator op(g);
        std::vector<double> rhs(N), lu(N, 0.0);
        for (int k = 0; k < m; ++k) {
            const Rows rows = diffusion_rows(state, t, spec, k);
            if (scheme.stepper == TimeStepper::imex_cn) {
                apply_rows(g, rows, state.component(k), lu);
            }
            for (std::size_t idx = 0; idx < N; ++idx) {
                auto& r = op.row(idx);
                if (g.is_boundary(idx)) {
                    r.fill(0.0);
                    r[StencilOperator::slot(0, 0)] = 1.0;
                    rhs[idx] = 0.0;
                    continue;
                }
                for (std::size_t s = 0; s < 9; ++s) {
                    r[s] = -w * dt * rows[idx][s];
                }
                r[StencilOperator::slot(0, 0)] += 1.0;
                const std::size_t o = static_cast<std::size_t>(k) * N + idx;
                rhs[idx] = state.at(k, idx) + dt * f.values[o] + (1.0 - w) * dt * lu[idx];
            }
            auto x = next.component(k);
            std::copy(state.component(k).begin(), state.component(k).end(), x.begin());
            const LinearSolveReport lr =
                solve_stencil(op, rhs, x, scheme.linear_tolerance, scheme.max_linear_iterations);
            rep.linear_iterations += lr.iterations;
            rep.linear_residual = std::max(rep.linear_residual, lr.relative_residual);
            if (!lr.converged) {
                std::ostringstream os;
                os << "linear solve did not converge at t = " << t + dt << " (relative residual "
                   << lr.relative_residual << ")";
                throw SolverError(os.str(), t + dt);
            }
        }
    }
    next.zero_boundary();
    check_finite(next, t + dt);
    rep.negative_part = negative_part(next);
    if (scheme.positivity == PositivityMode::clip_and_flag && rep.negative_part > 0.0) {
        for (double& v : next.raw()) {
            v = std::max(v, 0.0);
        }
        rep.clipped = rep.negative_part;
    }
    return {std::move(next), rep};
}

Trajectory solve(const ProblemSpec& spec, const SchemeConfig& scheme) {
    Trajectory traj = start_trajectory(spec, scheme);
    const std::size_t total = step_count(spec.horizon, scheme.dt);
    Field u = spec.initial;
    double t = 0.0;
    for (std::size_t n = 1; n <= total; ++n) {
        const double t_next = time_of(n, total, scheme.dt, spec.horizon);
        u = advance(u, t, t_next, spec, scheme, traj);
        t = t_next;
        if (n % static_cast<std::size_t>(scheme.snapshot_stride) == 0 || n == total) {
            traj.snapshot_times.push_back(t);
            traj.snapshots.push_back(u);
        }
    }
    return traj;
}

SteadyRun solve_until_steady(const ProblemSpec& spec, const SchemeConfig& scheme, const SteadyOptions& options) {
    if (!(options.window_fraction > 0.0 && options.window_fraction < 1.0) || !(options.steady_tol > 0.0) ||
        !(options.t_max > 0.0)) {
        throw SpecError("steady options need 0 < window_fraction < 1, steady_tol > 0, t_max > 0");
    }
    SteadyRun run;
    run.trajectory = start_trajectory(spec, scheme);
    Trajectory& traj = run.trajectory;
    const std::size_t total = step_count(options.t_max, scheme.dt);
    Field u = spec.initial;
    double t = 0.0;
    run.tail_slope = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= total; ++n) {
        const double t_next = time_of(n, total, scheme.dt, options.t_max);
        u = advance(u, t, t_next, spec, scheme, traj);
        t = t_next;
        if (n % static_cast<std::size_t>(scheme.snapshot_stride) != 0 && n != total) {
            continue;
        }
        traj.snapshot_times.push_back(t);
        traj.snapshots.push_back(u);
        // Reference snapshot: the latest one at or before t - w.
        const double target = t - options.window_fraction * t;
        std::size_t ref = 0;
        for (std::size_t s = 0; s + 1 < traj.snapshot_times.size(); ++s) {
            if (traj.snapshot_times[s] <= target) {
                ref = s;
            }
        }
        const double w = t - traj.snapshot_times[ref];
        if (ref == 0 || w <= 0.0) {
            continue;
        }
        run.tail_slope = sup_difference(u, traj.snapshots[ref]) / w;
        if (run.tail_slope <= options.steady_tol) {
            run.converged = true;
            break;
        }
    }
    run.stop_time = t;
    return run;
}

ProblemSpec cutoff_problem(const CauchyProblem& problem, double radius, double spacing) {
    const int n = problem.domain.dimension();
    const double cells = 2.0 * radius / spacing;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, rounded) || rounded < 2.0) {
        throw SpecError("2 r / spacing must be an integer for every cutoff radius");
    }
    const int nodes = static_cast<int>(rounded) + 1;
    std::vector<Interval> box(static_cast<std::size_t>(n), Interval{-radius, radius});
    std::vector<int> counts(static_cast<std::size_t>(n), nodes);
    Grid grid(SpatialDomain(box), counts);
    const RadialCutoff zeta(radius, problem.domain.transition_width());
    const int m = problem.coefficients.components;
    const InitialProfile phi = problem.initial;
    Field initial = discretize(grid, m, [&](const Point& x, std::span<double> out) {
        phi(x, out);
        const double z = zeta(x);
        for (double& v : out) {
            v *= z;
        }
    });
    CoefficientSet cs = problem.coefficients;
    cs.source = [src = problem.coefficients.source, zeta](double t, const Point& x, std::span<const double> u,
                                                         std::span<const double> p, std::span<double> out) {
        src(t, x, u, p, out);
        const double z = zeta(x);
        for (double& v : out) {
            v *= z;
        }
    };
    return ProblemSpec{grid.domain(), std::move(cs), std::move(initial), problem.horizon, std::nullopt};
}

std::pair<Trajectory, NestedReport> solve_cauchy_nested(const CauchyProblem& problem, const NestedOptions& options,
                                                        const SchemeConfig& scheme) {
    if (problem.domain.boundary() != BoundaryKind::cauchy_nested) {
        throw SpecError("nested solve requires a cauchy_nested domain");
    }
    const auto& radii = problem.domain.cutoff_radii();
    if (radii.size() < 2) {
        throw SpecError("nested solve needs at least two radii");
    }
    if (!(options.spacing > 0.0) || !(options.tolerance > 0.0) ||
        !(options.inner_fraction > 0.0 && options.inner_fraction <= 1.0)) {
        throw SpecError("nested options need spacing > 0, tolerance > 0, 0 < inner_fraction <= 1");
    }
    NestedReport report;
    report.radii = radii;
    const int n = problem.domain.dimension();
    const double inner = options.inner_fraction * radii.front();
    std::optional<Field> previous;
    Trajectory last;
    for (std::size_t l = 0; l < radii.size(); ++l) {
        const ProblemSpec spec = cutoff_problem(problem, radii[l], options.spacing);
        Trajectory traj = solve(spec, scheme);
        const Field& cur = traj.final_state();
        if (previous) {
            const Grid& gp = previous->grid();
            const Grid& gc = cur.grid();
            const int shift = static_cast<int>(std::lround((radii[l] - radii[l - 1]) / options.spacing));
            double diff = 0.0;
            for (std::size_t idx = 0; idx < gp.size(); ++idx) {
                const Point x = gp.point(idx);
                if (std::abs(x[0]) > inner + 1e-9 * options.spacing ||
                    (n == 2 && std::abs(x[1]) > inner + 1e-9 * options.spacing)) {
                    continue;
                }
                const auto [i, j] = gp.coords(idx);
                const std::size_t cidx = gc.index(i + shift, n == 2 ? j + shift : 0);
                for (int k = 0; k < cur.components(); ++k) {
                    diff = std::max(diff, std::abs(previous->at(k, idx) - cur.at(k, cidx)));
                }
            }
            report.differences.push_back(diff);
            const std::size_t d = report.differences.size();
            if (d >= 2 && report.differences[d - 1] >= report.differences[d - 2] && report.differences[d - 1] > 0.0) {
                std::ostringstream os;
                os << "nested differences did not decrease: " << report.differences[d - 2] << " then "
                   << report.differences[d - 1] << " at radius " << radii[l];
                throw NonConvergence(os.str());
            }
        }
        previous = cur;
        last = std::move(traj);
    }
    report.converged = report.differences.back() <= options.tolerance;
    return {std::move(last), std::move(report)};
}

OrderEstimate estimate_order(const ProblemSpec& base, const InitialProfile& profile, const SchemeConfig& scheme,
                             std::vector<int> coarse_nodes) {
    const int n = base.domain.dimension();
    if (static_cast<int>(coarse_nodes.size()) != n) {
        throw SpecError("coarse node counts must match the domain dimension");
    }
    std::vector<Field> finals;
    for (int level = 0; level < 3; ++level) {
        std::vector<int> counts;
        for (int c : coarse_nodes) {
            counts.push_back((c - 1) * (1 << level) + 1);
        }
        const Grid grid(base.domain, counts);
        ProblemSpec spec{base.domain, base.coefficients, discretize(grid, base.coefficients.components, profile),
                         base.horizon, base.lv};
        finals.push_back(solve(spec, scheme).final_state());
    }
    const Grid& gc = finals[0].grid();
    double e1 = 0.0;
    double e2 = 0.0;
    for (std::size_t idx = 0; idx < gc.size(); ++idx) {
        const auto [i, j] = gc.coords(idx);
        const std::size_t f1 = finals[1].grid().index(2 * i, 2 * j);
        const std::size_t f2 = finals[2].grid().index(4 * i, 4 * j);
        for (int k = 0; k < finals[0].components(); ++k) {
            const double a = finals[0].at(k, idx);
            const double b = finals[1].at(k, f1);
            const double c = finals[2].at(k, f2);
            e1 = std::max(e1, std::abs(a - b));
            e2 = std::max(e2, std::abs(b - c));
        }
    }
    if (e1 < 1e-13 || e2 < 1e-13) {
        throw DegenerateRefinement("refinement differences are indistinguishable from rounding");
    }
    return {std::log2(e1 / e2), e1, e2};
}

}  // namespace parapos
