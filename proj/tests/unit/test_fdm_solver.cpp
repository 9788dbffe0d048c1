#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "parapos/fdm.hpp"
#include "parapos/functions.hpp"
#include "parapos/hypothesis.hpp"
#include "parapos/linear_solvers.hpp"
#include "parapos/lv_analysis.hpp"
#include "parapos/profiles.hpp"

using namespace parapos;

namespace {

const double kPi = std::numbers::pi;

CoefficientSet heat_coefficients(int dimension, double d) {
    CoefficientSet cs;
    cs.components = 1;
    cs.dimension = dimension;
    cs.diffusion = [d, dimension](double, const Point&, std::span<const double>, int) {
        return DiffusionMatrix::scalar(dimension, d);
    };
    cs.source = [](double, const Point&, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    cs.constant_diffusion = std::vector<double>{d};
    return cs;
}

ProblemSpec heat_problem(const Grid& g, double d, const profiles::Scalar& phi, double horizon) {
    return ProblemSpec{g.domain(), heat_coefficients(g.dimension(), d),
                       discretize(g, 1, profiles::stack({phi})), horizon, std::nullopt};
}

LVCoefficients logistic(double d, double beta = 1.0, double gamma = 1.0) {
    LVCoefficients lv;
    lv.species = 1;
    lv.diffusion = {d};
    lv.growth = {make_constant(beta)};
    lv.interaction = {{make_constant(gamma)}};
    return lv;
}

ProblemSpec lv_problem(const LVCoefficients& lv, const Grid& g, const std::vector<profiles::Scalar>& phi,
                       double horizon) {
    return build_lv_problem(lv, g.domain(), discretize(g, lv.species, profiles::stack(phi)), horizon);
}

SchemeConfig scheme(TimeStepper s, double dt, int stride = 10) {
    SchemeConfig c;
    c.stepper = s;
    c.dt = dt;
    c.snapshot_stride = stride;
    return c;
}

double discrete_eigenvalue(double h) { return 2.0 * (1.0 - std::cos(kPi * h)) / (h * h); }

}  // namespace

TEST(Scheme, Validation) {
    EXPECT_THROW(scheme(TimeStepper::imex_be, 0.0).validate(), SpecError);
    EXPECT_THROW(scheme(TimeStepper::imex_be, -1e-3).validate(), SpecError);
    EXPECT_THROW(scheme(TimeStepper::imex_be, 1e-3, 0).validate(), SpecError);
    EXPECT_NO_THROW(scheme(TimeStepper::imex_cn, 1e-3).validate());
}

TEST(Step, BackwardEulerHeatMode) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {51});
    const auto spec = heat_problem(g, 1.0, profiles::sine(g.domain(), 1.0), 1.0);
    const double dt = 1e-3;
    const auto [next, rep] = step(spec.initial, 0.0, dt, spec, scheme(TimeStepper::imex_be, dt));
    const double h = g.spacing(0);
    const double discrete = 1.0 / (1.0 + dt * discrete_eigenvalue(h));
    const double modal = 1.0 / (1.0 + kPi * kPi * dt);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double u = spec.initial.at(0, i);
        EXPECT_NEAR(next.at(0, i), discrete * u, 1e-13);
        EXPECT_NEAR(next.at(0, i), modal * u, 2.0 * kPi * kPi * kPi * kPi * h * h * dt / 12.0);
    }
    EXPECT_EQ(next.boundary_sup(), 0.0);
}

TEST(Step, CrankNicolsonHeatMode) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {41});
    const auto spec = heat_problem(g, 0.5, profiles::sine(g.domain(), 2.0), 1.0);
    const double dt = 1e-2;
    const auto [next, rep] = step(spec.initial, 0.0, dt, spec, scheme(TimeStepper::imex_cn, dt));
    const double lam = 0.5 * discrete_eigenvalue(g.spacing(0));
    const double factor = (1.0 - 0.5 * dt * lam) / (1.0 + 0.5 * dt * lam);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        EXPECT_NEAR(next.at(0, i), factor * spec.initial.at(0, i), 1e-13);
    }
}

TEST(Step, BackwardEulerHeatMode2D) {
    Grid g(SpatialDomain({{0.0, 1.0}, {0.0, 2.0}}), {33, 33});
    const auto spec = heat_problem(g, 0.3, profiles::sine(g.domain(), 1.0, {1, 1}), 1.0);
    const double dt = 5e-3;
    const auto [next, rep] = step(spec.initial, 0.0, dt, spec, scheme(TimeStepper::imex_be, dt));
    const double hx = g.spacing(0);
    const double hy = g.spacing(1);
    const double lam = 0.3 * (discrete_eigenvalue(hx) + 2.0 * (1.0 - std::cos(kPi * hy / 2.0)) / (hy * hy));
    const double factor = 1.0 / (1.0 + dt * lam);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(next.at(0, i), factor * spec.initial.at(0, i), 1e-9);
    }
    EXPECT_GT(rep.linear_iterations, 0);
    EXPECT_LE(rep.linear_residual, 1e-10);
}

TEST(Step, ZeroStaysZero) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    const auto spec = lv_problem(logistic(0.1), g, {profiles::zero()}, 1.0);
    for (auto s : {TimeStepper::imex_be, TimeStepper::imex_cn, TimeStepper::erk2}) {
        const auto [next, rep] = step(spec.initial, 0.0, 1e-3, spec, scheme(s, 1e-3));
        for (double v : next.raw()) {
            EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Step, HeunMatchesLogisticOde) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {41});
    const double u0 = 0.4;
    const double beta = 1.3;
    const double gamma = 0.7;
    auto spec = lv_problem(logistic(1e-3, beta, gamma), g, {[u0](const Point&) { return u0; }}, 1.0);
    const double dt = 0.01;
    const auto [next, rep] = step(spec.initial, 0.0, dt, spec, scheme(TimeStepper::erk2, dt));
    auto f = [&](double u) { return u * (beta - gamma * u); };
    const double k1 = f(u0);
    const double heun = u0 + 0.5 * dt * (k1 + f(u0 + dt * k1));
    // nodes at least three away from the boundary do not see it after two stages
    for (int i = 3; i <= 37; ++i) {
        EXPECT_NEAR(next.at(0, g.index(i)), heun, 1e-14);
    }
}

TEST(Step, Erk2StabilityBoundEnforced) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {101});
    const auto spec = heat_problem(g, 1.0, profiles::sine(g.domain(), 1.0), 1.0);
    const double limit = erk2_step_limit(spec, spec.initial, 0.0);
    EXPECT_NEAR(limit, 1e-4 / 2.0, 1e-15);
    EXPECT_THROW(step(spec.initial, 0.0, 2.0 * limit, spec, scheme(TimeStepper::erk2, 2.0 * limit)), SpecError);
    EXPECT_NO_THROW(step(spec.initial, 0.0, limit, spec, scheme(TimeStepper::erk2, limit)));
}

TEST(Step, NonFiniteStateRaisesSolverError) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {11});
    auto lv = logistic(0.1);
    lv.growth[0] = [](double t, const Point&) { return t > 0.5 ? std::nan("") : 1.0; };
    const auto spec = lv_problem(lv, g, {profiles::sine(g.domain(), 0.5)}, 1.0);
    EXPECT_THROW(solve(spec, scheme(TimeStepper::imex_be, 0.1)), Error);
}

TEST(Solve, LogisticStaysPositiveAndBounded) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {101});
    const auto spec = lv_problem(logistic(0.01), g, {profiles::sine(g.domain(), 0.5)}, 5.0);
    const auto traj = solve(spec, scheme(TimeStepper::imex_be, 0.01));
    SampleBudget b;
    b.u_radius = 2.0;
    const auto dis = check_dissipativity(spec, b, DissipativityMode::A2Prime);
    const double bound = max_principle_bound(dis.d1, dis.d2, spec.horizon, spec.initial);
    for (const auto& d : traj.diagnostics) {
        EXPECT_GE(d.min_value, -1e-10);
        EXPECT_LE(d.sup_norm, bound + 1e-6);
    }
    EXPECT_DOUBLE_EQ(traj.final_time(), 5.0);
}

TEST(Solve, ZeroDataGivesZeroTrajectory) {
    Grid g(SpatialDomain({{0.0, 1.0}, {0.0, 1.0}}), {17, 17});
    LVCoefficients lv = LVCoefficients::two_species(0.1, 0.2, make_constant(1), make_constant(1), make_constant(1),
                                                    make_constant(1), make_constant(1), make_constant(1));
    const auto spec = lv_problem(lv, g, {profiles::zero(), profiles::zero()}, 0.5);
    const auto traj = solve(spec, scheme(TimeStepper::imex_be, 0.05, 2));
    for (const auto& s : traj.snapshots) {
        for (double v : s.raw()) {
            ASSERT_EQ(v, 0.0);
        }
    }
}

TEST(Solve, SnapshotsAndBoundaryExactness) {
    Grid g(SpatialDomain({{0.0, 1.0}, {0.0, 1.0}}), {21, 21});
    LVCoefficients lv = LVCoefficients::two_species(0.05, 0.02, make_constant(1), make_constant(1),
                                                    make_constant(0.5), make_constant(0.8), make_constant(0.3),
                                                    make_constant(1));
    const auto spec = lv_problem(lv, g,
                                 {profiles::bump(0.8, {0.4, 0.5}, 0.3), profiles::bump(0.6, {0.6, 0.5}, 0.3)}, 0.37);
    const auto traj = solve(spec, scheme(TimeStepper::imex_cn, 0.01, 10));
    // 37 steps, stride 10: t = 0, 0.1, 0.2, 0.3 and the final time
    ASSERT_EQ(traj.snapshots.size(), 5u);
    EXPECT_EQ(traj.diagnostics.size(), 38u);
    for (std::size_t i = 1; i < traj.snapshot_times.size(); ++i) {
        EXPECT_GT(traj.snapshot_times[i], traj.snapshot_times[i - 1]);
    }
    for (const auto& s : traj.snapshots) {
        EXPECT_EQ(s.boundary_sup(), 0.0);
        EXPECT_EQ(s.grid(), g);
    }
}

TEST(Solve, MonitorOnlyNeverAlters) {
    // a source that pushes the first component negative
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    auto spec = lv_problem(logistic(0.05), g, {profiles::sine(g.domain(), 0.1)}, 0.5);
    spec.coefficients.source = [](double, const Point&, std::span<const double>, std::span<const double>,
                                  std::span<double> out) { out[0] = -1.0; };
    spec.lv.reset();
    const auto monitored = solve(spec, scheme(TimeStepper::imex_be, 0.01));
    EXPECT_LT(monitored.diagnostics.back().min_value, -0.1);
    EXPECT_EQ(monitored.max_clipped, 0.0);
    auto clip = scheme(TimeStepper::imex_be, 0.01);
    clip.positivity = PositivityMode::clip_and_flag;
    const auto clipped = solve(spec, clip);
    EXPECT_GT(clipped.max_clipped, 0.0);
    for (double v : clipped.final_state().raw()) {
        EXPECT_GE(v, 0.0);
    }
}

TEST(Solve, PositivityStepBound) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    const auto spec = lv_problem(logistic(0.05, 2.0, 1.0), g, {profiles::sine(g.domain(), 1.0)}, 1.0);
    const double bound = positivity_step_bound(spec);
    // |dc/du| = |beta - 2 gamma u| <= 2 on [0, 2]
    EXPECT_NEAR(bound, 0.25, 1e-6);
    const auto traj = solve(spec, scheme(TimeStepper::imex_be, 0.01));
    EXPECT_TRUE(traj.within_positivity_bound);
    const auto heat = heat_problem(g, 1.0, profiles::sine(g.domain(), 1.0), 1.0);
    EXPECT_TRUE(std::isinf(positivity_step_bound(heat)));
}

TEST(Solve, PositivityUnderA7AcrossSteppers) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {81});
    LVCoefficients lv = LVCoefficients::two_species(0.01, 0.03, make_constant(1.5), make_constant(1),
                                                    make_constant(2), make_constant(1), make_constant(2),
                                                    make_constant(1));
    const auto spec = lv_problem(lv, g,
                                 {profiles::bump(1.0, {0.3, 0.0}, 0.2), profiles::bump(1.0, {0.7, 0.0}, 0.2)}, 2.0);
    for (auto s : {TimeStepper::imex_be, TimeStepper::imex_cn}) {
        const auto traj = solve(spec, scheme(s, 0.01));
        for (const auto& d : traj.diagnostics) {
            EXPECT_LE(d.negpart_norm, 1e-8 * (1.0 + d.sup_norm)) << to_string(s) << " t=" << d.t;
        }
    }
}

TEST(SteadyRun, ReachesLogisticSteadyState) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {41});
    const auto spec = lv_problem(logistic(0.05, 2.0, 1.0), g, {profiles::sine(g.domain(), 0.1)}, 1.0);
    SteadyOptions o;
    o.t_max = 40.0;
    const auto run = solve_until_steady(spec, scheme(TimeStepper::imex_be, 0.01), o);
    EXPECT_TRUE(run.converged);
    EXPECT_LE(run.tail_slope, 1e-8);
    const auto psi = scalar_steady_state(g, 0.05, make_constant(2.0), make_constant(1.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(run.trajectory.final_state().at(0, i), psi[i], 1e-6);
    }
}

TEST(Nested, HeatGaussianDifferencesDecay) {
    CauchyProblem p{SpatialDomain::cauchy(1, {4.0, 6.0, 8.0}, 1.0), heat_coefficients(1, 0.1),
                    profiles::stack({profiles::gaussian(1.0, {0.0, 0.0}, 1.0)}), 1.0, std::nullopt};
    NestedOptions o;
    o.spacing = 0.05;
    const auto [traj, rep] = solve_cauchy_nested(p, o, scheme(TimeStepper::imex_be, 0.01));
    ASSERT_EQ(rep.differences.size(), 2u);
    EXPECT_GT(rep.differences[0], rep.differences[1]);
    EXPECT_EQ(traj.final_state().grid().nodes(0), 321);
    EXPECT_EQ(traj.final_state().boundary_sup(), 0.0);
}

TEST(Nested, ZeroDataZeroDifferences) {
    CauchyProblem p{SpatialDomain::cauchy(1, {4.0, 6.0, 8.0}, 1.0), heat_coefficients(1, 0.1),
                    profiles::stack({profiles::zero()}), 0.2, std::nullopt};
    const auto [traj, rep] = solve_cauchy_nested(p, NestedOptions{}, scheme(TimeStepper::imex_be, 0.01));
    for (double d : rep.differences) {
        EXPECT_EQ(d, 0.0);
    }
    EXPECT_TRUE(rep.converged);
}

TEST(Nested, LogisticCompactSupportConverges) {
    auto lv = logistic(0.1);
    Grid probe(SpatialDomain({{-1.0, 1.0}}), {3});
    auto cs = build_lv_problem(lv, probe.domain(), Field(probe, 1), 1.0).coefficients;
    CauchyProblem p{SpatialDomain::cauchy(1, {4.0, 6.0, 8.0}, 1.0), cs,
                    profiles::stack({profiles::bump(0.5, {0.0, 0.0}, 1.0)}), 2.0, lv};
    NestedOptions o;
    o.tolerance = 1e-6;
    const auto [traj, rep] = solve_cauchy_nested(p, o, scheme(TimeStepper::imex_be, 0.01));
    EXPECT_LE(rep.differences.back(), 1e-6);
    EXPECT_TRUE(rep.converged);
}

TEST(Nested, RejectsDirichletDomain) {
    CauchyProblem p{SpatialDomain({{0.0, 1.0}}), heat_coefficients(1, 0.1), profiles::stack({profiles::zero()}),
                    0.2, std::nullopt};
    EXPECT_THROW(solve_cauchy_nested(p, NestedOptions{}, scheme(TimeStepper::imex_be, 0.01)), SpecError);
}

TEST(Order, SmoothHeatIsSecondOrder) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    const auto phi = profiles::sine(g.domain(), 1.0);
    const auto spec = heat_problem(g, 0.1, phi, 0.1);
    const auto est = estimate_order(spec, profiles::stack({phi}), scheme(TimeStepper::imex_be, 1e-3), {21});
    EXPECT_NEAR(est.order, 2.0, 0.3);
}

TEST(Order, SmoothLvIsSecondOrder) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    LVCoefficients lv = LVCoefficients::two_species(0.05, 0.08, make_constant(1), make_constant(1),
                                                    make_constant(0.5), make_constant(0.8), make_constant(0.3),
                                                    make_constant(1));
    const std::vector<profiles::Scalar> phi{profiles::sine(g.domain(), 0.6, {1, 1}),
                                            profiles::sine(g.domain(), 0.4, {2, 1})};
    const auto spec = lv_problem(lv, g, phi, 0.5);
    const auto est = estimate_order(spec, profiles::stack(phi), scheme(TimeStepper::imex_be, 1e-3), {21});
    EXPECT_NEAR(est.order, 2.0, 0.3);
}

TEST(Order, PiecewiseLinearDataIsReduced) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {21});
    const auto phi = profiles::hat(g.domain(), 1.0, 0.53);
    const auto spec = heat_problem(g, 0.1, phi, 0.01);
    const auto est = estimate_order(spec, profiles::stack({phi}), scheme(TimeStepper::imex_be, 1e-4), {21});
    EXPECT_LT(est.order, 2.0);
}

TEST(Order, DegenerateRefinement) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {11});
    const auto spec = heat_problem(g, 0.1, profiles::zero(), 0.1);
    EXPECT_THROW(estimate_order(spec, profiles::stack({profiles::zero()}), scheme(TimeStepper::imex_be, 1e-2), {11}),
                 DegenerateRefinement);
}

TEST(LinearSolvers, TridiagonalMatchesKnownSolution) {
    const std::vector<double> lower{0.0, -1.0, -1.0, -1.0};
    const std::vector<double> diag{4.0, 4.0, 4.0, 4.0};
    const std::vector<double> upper{-1.0, -1.0, -1.0, 0.0};
    const std::vector<double> x{1.0, 2.0, -1.0, 0.5};
    std::vector<double> rhs(4);
    for (int i = 0; i < 4; ++i) {
        rhs[i] = diag[i] * x[i] + (i > 0 ? lower[i] * x[i - 1] : 0.0) + (i < 3 ? upper[i] * x[i + 1] : 0.0);
    }
    solve_tridiagonal(lower, diag, upper, rhs);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(rhs[i], x[i], 1e-14);
    }
}

TEST(LinearSolvers, BicgstabAgreesWithApply) {
    Grid g(SpatialDomain({{0.0, 1.0}, {0.0, 1.0}}), {15, 12});
    StencilOperator op(g);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (g.is_boundary(idx)) {
            continue;
        }
        auto& r = op.row(idx);
        r[StencilOperator::slot(0, 0)] = 5.0;
        r[StencilOperator::slot(-1, 0)] = -1.0;
        r[StencilOperator::slot(1, 0)] = -1.2;
        r[StencilOperator::slot(0, -1)] = -0.9;
        r[StencilOperator::slot(0, 1)] = -1.0;
        r[StencilOperator::slot(1, 1)] = 0.2;
        r[StencilOperator::slot(-1, -1)] = 0.2;
    }
    std::vector<double> truth(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        truth[i] = std::sin(0.37 * static_cast<double>(i));
    }
    std::vector<double> b(g.size());
    op.apply(truth, b);
    std::vector<double> x(g.size(), 0.0);
    const auto rep = bicgstab(op, b, x, 1e-12, 1000);
    EXPECT_TRUE(rep.converged);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(x[i], truth[i], 1e-9);
    }
}
