#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <nlohmann/json.hpp>

#include "parapos/functions.hpp"
#include "parapos/hypothesis.hpp"
#include "parapos/profiles.hpp"

using namespace parapos;

namespace {

const double kPi = std::numbers::pi;

ScalarField c(double v) { return make_constant(v); }

LVCoefficients constant_lv(double d1, double d2, double b = 1, double g = 1, double de = 1, double r = 1,
                           double s = 1, double th = 1) {
    return LVCoefficients::two_species(d1, d2, c(b), c(g), c(de), c(r), c(s), c(th));
}

template <class F>
ProblemSpec lv_problem(const LVCoefficients& lv, int nodes, F phi) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {nodes});
    Field init(g, lv.species);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (int k = 0; k < lv.species; ++k) {
            init.at(k, i) = phi(k, g.point(i)[0]);
        }
    }
    init.zero_boundary();
    return build_lv_problem(lv, g.domain(), init, 1.0);
}

ProblemSpec custom_problem(int m, DiffusionFn a, SourceFn src, DriftFn b = {}) {
    Grid g(SpatialDomain({{0.0, 1.0}}), {11});
    CoefficientSet cs;
    cs.components = m;
    cs.dimension = 1;
    cs.diffusion = std::move(a);
    cs.source = std::move(src);
    cs.drift = std::move(b);
    cs.gradient_dependent = static_cast<bool>(cs.drift);
    return ProblemSpec{g.domain(), cs, Field(g, m), 1.0, std::nullopt};
}

DiffusionFn scalar_diffusion(double d) {
    return [d](double, const Point&, std::span<const double>, int) { return DiffusionMatrix::scalar(1, d); };
}

SourceFn zero_source() {
    return [](double, const Point&, std::span<const double>, std::span<const double>, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
    };
}

SampleBudget budget(double radius = 1.0) {
    SampleBudget b;
    b.u_radius = radius;
    return b;
}

auto zero_phi = [](int, double) { return 0.0; };

}  // namespace

TEST(Parabolicity, ConstantDiagonal) {
    const auto spec = lv_problem(constant_lv(1, 2), 11, zero_phi);
    const auto r = check_parabolicity(spec, budget());
    EXPECT_EQ(r.kappa, 1.0);
    EXPECT_EQ(r.entry.status, CheckStatus::pass);
}

TEST(Parabolicity, KappaIsMinimumDiffusion) {
    const auto spec = lv_problem(constant_lv(0.37, 0.21), 11, zero_phi);
    EXPECT_EQ(check_parabolicity(spec, budget()).kappa, 0.21);
}

TEST(Parabolicity, StateDependentMinimumAtOrigin) {
    const auto spec = custom_problem(
        2,
        [](double, const Point&, std::span<const double> u, int) {
            return DiffusionMatrix::scalar(1, 1.0 + u[0] * u[0] + u[1] * u[1]);
        },
        zero_source());
    const auto r = check_parabolicity(spec, budget(1.0));
    EXPECT_DOUBLE_EQ(r.kappa, 1.0);
    EXPECT_EQ(r.entry.status, CheckStatus::pass);
}

TEST(Parabolicity, EnvelopeViolation) {
    const auto spec = custom_problem(
        1, [](double, const Point&, std::span<const double> u, int) { return DiffusionMatrix::scalar(1, 1.0 + 2.0 * std::abs(u[0])); },
        zero_source());
    Majorants m;
    m.kappa = 0.5;
    m.mu = [](double r) { return 1.0 + r; };
    m.mu_hat = [](double) { return 0.5; };
    const auto r = check_parabolicity(spec, budget(1.0), &m);
    EXPECT_EQ(r.entry.status, CheckStatus::fail);
    ASSERT_TRUE(r.entry.witness.has_value());
    EXPECT_LT(r.entry.worst_margin, 0.0);
}

TEST(Parabolicity, NonFiniteEigenvalueThrows) {
    const auto spec = custom_problem(
        1, [](double, const Point&, std::span<const double>, int) { return DiffusionMatrix::scalar(1, INFINITY); },
        zero_source());
    EXPECT_THROW(check_parabolicity(spec, budget()), CoefficientError);
}

TEST(Dissipativity, LvOrthantEstimate) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    const auto r = check_dissipativity(spec, budget(2.0), DissipativityMode::A2Prime);
    EXPECT_EQ(r.entry.status, CheckStatus::pass);
    // (c,u) <= max(beta, rho) |u|^2 with equality approached at u -> 0 along an axis
    EXPECT_LE(r.d2, 1.0 + 1e-12);
    EXPECT_GT(r.d2, 0.9);
    EXPECT_EQ(r.d1, 0.0);
}

TEST(Dissipativity, ZeroSource) {
    const auto spec = custom_problem(2, scalar_diffusion(1.0), zero_source());
    const auto r = check_dissipativity(spec, budget(), DissipativityMode::A2);
    EXPECT_EQ(r.d1, 0.0);
    EXPECT_EQ(r.d2, 0.0);
    EXPECT_EQ(r.entry.status, CheckStatus::pass);
}

TEST(Dissipativity, FullBallFailsWithCubicGrowth) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    Majorants m;
    m.kappa = 1.0;
    m.d1 = 1.0;
    m.d2 = 1.0;
    const auto full = check_dissipativity(spec, budget(4.0), DissipativityMode::A2, &m);
    EXPECT_EQ(full.entry.status, CheckStatus::fail);
    ASSERT_TRUE(full.entry.witness.has_value());
    const auto& u = full.entry.witness->u;
    EXPECT_TRUE(u[0] < 0.0 || u[1] < 0.0);
    // the same constants hold on the orthant
    EXPECT_EQ(check_dissipativity(spec, budget(4.0), DissipativityMode::A2Prime, &m).entry.status,
              CheckStatus::pass);
}

TEST(Dissipativity, FullBallPassImpliesOrthantPass) {
    const auto spec = custom_problem(
        1, scalar_diffusion(1.0),
        [](double, const Point&, std::span<const double> u, std::span<const double>, std::span<double> out) {
            out[0] = 0.5 * u[0] - u[0] * u[0] * u[0];
        });
    Majorants m;
    m.kappa = 1.0;
    m.d1 = 0.1;
    m.d2 = 0.5;
    for (double radius : {0.5, 1.0, 3.0}) {
        const auto full = check_dissipativity(spec, budget(radius), DissipativityMode::A2, &m);
        const auto orth = check_dissipativity(spec, budget(radius), DissipativityMode::A2Prime, &m);
        ASSERT_EQ(full.entry.status, CheckStatus::pass);
        EXPECT_EQ(orth.entry.status, CheckStatus::pass);
        EXPECT_GE(orth.entry.worst_margin, full.entry.worst_margin);
    }
}

TEST(Growth, ZeroDriftPassesWithUnitMargin) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    Majorants m;
    m.kappa = 1.0;
    m.theta1 = [](double) { return 1.0; };
    const auto [a, b] = check_growth(spec, budget(), &m);
    EXPECT_EQ(a.status, CheckStatus::pass);
    EXPECT_DOUBLE_EQ(a.worst_margin, 1.0);
    EXPECT_EQ(b.status, CheckStatus::not_applicable);
}

TEST(Growth, SourceBoundFromSamples) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    // sup |c| over |u| <= 1: |c| <= |u|(1 + 2|u|) <= 3 bounds it comfortably
    Majorants m;
    m.kappa = 1.0;
    m.theta2 = [](double, double p) { return 3.0 / ((1.0 + p) * (1.0 + p)); };
    const auto [a, b] = check_growth(spec, budget(), &m);
    EXPECT_EQ(a.status, CheckStatus::not_applicable);
    EXPECT_EQ(b.status, CheckStatus::pass);
    EXPECT_NE(b.note.find("heuristic"), std::string::npos);
}

TEST(Growth, NonDecayingTheta2Fails) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    Majorants m;
    m.kappa = 1.0;
    m.theta2 = [](double, double) { return 10.0; };
    EXPECT_EQ(check_growth(spec, budget(), &m).second.status, CheckStatus::fail);
}

TEST(Growth, LinearDriftFailsAtLargestGradient) {
    const auto spec = custom_problem(
        1, scalar_diffusion(1.0), zero_source(),
        [](double, const Point&, std::span<const double>, std::span<const double> p, std::span<double> out) {
            out[0] = 2.0 * std::abs(p[0]);
        });
    Majorants m;
    m.kappa = 1.0;
    m.theta1 = [](double) { return 1.0; };
    SampleBudget b = budget();
    b.p_radius = 4.0;
    const auto [a, unused] = check_growth(spec, b, &m);
    EXPECT_EQ(a.status, CheckStatus::fail);
    ASSERT_TRUE(a.witness.has_value());
    double largest = 0.0;
    const SamplePlan plan(b, spec.domain, spec.horizon, 1);
    for (const auto& p : plan.gradients()) {
        largest = std::max(largest, std::abs(p[0]));
    }
    EXPECT_DOUBLE_EQ(std::abs(a.witness->p[0]), largest);
    // margin (1 + |p|) - 2|p| is worst at the largest |p|
    EXPECT_DOUBLE_EQ(a.worst_margin, 1.0 - largest);
}

TEST(Growth, NoMajorantsNotApplicable) {
    const auto spec = lv_problem(constant_lv(1, 1), 11, zero_phi);
    const auto [a, b] = check_growth(spec, budget(), nullptr);
    EXPECT_EQ(a.status, CheckStatus::not_applicable);
    EXPECT_EQ(b.status, CheckStatus::not_applicable);
}

TEST(Compatibility, ZeroDataPassesExactly) {
    const auto spec = lv_problem(constant_lv(1, 1), 21, zero_phi);
    const auto e = check_compatibility(spec);
    EXPECT_EQ(e.status, CheckStatus::pass);
    EXPECT_EQ(e.worst_margin, 0.0);
}

TEST(Compatibility, SineResidualIsDiscretizationOnly) {
    // phi'' vanishes at the boundary for sin(pi x), so the analytic residual is zero and the
    // reported one comes from the one-sided stencil alone: it must shrink at least like h^2.
    LVCoefficients lv;
    lv.species = 1;
    lv.diffusion = {0.5};
    lv.growth = {c(1.0)};
    lv.interaction = {{c(1.0)}};
    auto sine = [](int, double x) { return 0.1 * std::sin(kPi * x); };
    const double coarse = -check_compatibility(lv_problem(lv, 101, sine)).worst_margin;
    const double fine = -check_compatibility(lv_problem(lv, 201, sine)).worst_margin;
    EXPECT_LT(coarse, 1e-4);
    EXPECT_GT(coarse / fine, 3.5);
}

TEST(Compatibility, QuarticDataFailsWithTwiceDiffusion) {
    const double d = 0.3;
    LVCoefficients lv;
    lv.species = 1;
    lv.diffusion = {d};
    lv.growth = {c(1.0)};
    lv.interaction = {{c(1.0)}};
    const auto spec = lv_problem(lv, 101, [](int, double x) { return x * x * (1 - x) * (1 - x); });
    const auto e = check_compatibility(spec);
    EXPECT_EQ(e.status, CheckStatus::fail);
    EXPECT_NEAR(-e.worst_margin, 2.0 * d, 1e-3);
}

TEST(PositivitySource, LvPassesWithZeroMargin) {
    const auto spec = lv_problem(constant_lv(1, 1, 2, 3, 0.5, 1, 4, 1), 11, zero_phi);
    const auto [a, b] = check_positivity_source(spec, budget(3.0));
    EXPECT_EQ(a.status, CheckStatus::pass);
    EXPECT_EQ(b.status, CheckStatus::pass);
    EXPECT_EQ(b.worst_margin, 0.0);
}

TEST(PositivitySource, NegativeSourceAtZero) {
    const auto spec = custom_problem(
        1, scalar_diffusion(1.0),
        [](double, const Point&, std::span<const double> u, std::span<const double>, std::span<double> out) {
            out[0] = u[0] * u[0] - 1.0;
        });
    const auto [a, b] = check_positivity_source(spec, budget());
    EXPECT_EQ(b.status, CheckStatus::fail);
    ASSERT_TRUE(b.witness.has_value());
    EXPECT_EQ(b.witness->u[0], 0.0);
    EXPECT_DOUBLE_EQ(b.worst_margin, -1.0);
}

TEST(PositivitySource, NegativeInitialNode) {
    auto spec = lv_problem(constant_lv(1, 1), 11, [](int, double) { return 0.2; });
    const std::size_t bad = 4;
    spec.initial.at(1, bad) = -1e-3;
    const auto [a, b] = check_positivity_source(spec, budget());
    EXPECT_EQ(a.status, CheckStatus::fail);
    ASSERT_TRUE(a.witness && a.witness->node);
    EXPECT_EQ(*a.witness->node, bad);
    EXPECT_DOUBLE_EQ(a.worst_margin, -1e-3);
}

TEST(MonotoneCoefficients, ConstantPasses) {
    const SpatialDomain dom({{0.0, 1.0}});
    const auto e = check_monotone_coefficients(constant_lv(1, 1), dom, 5.0, budget());
    EXPECT_EQ(e.status, CheckStatus::pass);
    EXPECT_EQ(e.worst_margin, 0.0);
}

TEST(MonotoneCoefficients, SignedFamiliesPass) {
    auto f = [](double a, double b) { return ScalarField([a, b](double t, const Point&) { return a + b * std::exp(-t); }); };
    const auto lv = LVCoefficients::two_species(1, 1, f(1, -1), f(1, 1), f(1, 1), f(0, 1), f(1, -0.5), f(1, -0.5));
    const SpatialDomain dom({{0.0, 1.0}});
    EXPECT_EQ(check_monotone_coefficients(lv, dom, 5.0, budget()).status, CheckStatus::pass);
}

TEST(MonotoneCoefficients, DecayingGrowthFails) {
    auto lv = constant_lv(1, 1);
    lv.growth[0] = [](double t, const Point&) { return std::exp(-t); };
    const SpatialDomain dom({{0.0, 1.0}});
    const auto e = check_monotone_coefficients(lv, dom, 5.0, budget());
    EXPECT_EQ(e.status, CheckStatus::fail);
    ASSERT_TRUE(e.witness.has_value());
    EXPECT_NE(e.note.find("beta"), std::string::npos);
    // -d/dt e^{-t} is most negative at the earliest sampled time
    EXPECT_NEAR(e.worst_margin, -std::exp(-e.witness->t), 1e-6);
}

TEST(MonotoneCoefficients, SingleSpeciesNotApplicable) {
    LVCoefficients lv;
    lv.species = 1;
    lv.diffusion = {1.0};
    lv.growth = {c(1.0)};
    lv.interaction = {{c(1.0)}};
    EXPECT_EQ(check_monotone_coefficients(lv, SpatialDomain({{0.0, 1.0}}), 1.0, budget()).status,
              CheckStatus::not_applicable);
}

TEST(InitialMonotonicity, ZeroPasses) {
    const auto lv = constant_lv(1, 1);
    const auto spec = lv_problem(lv, 21, zero_phi);
    const auto e = check_initial_monotonicity(lv, spec.initial);
    EXPECT_EQ(e.status, CheckStatus::pass);
    EXPECT_EQ(e.worst_margin, 0.0);
}

TEST(InitialMonotonicity, SteadyPsiPassesNearZero) {
    const double d2 = 0.05;
    const auto lv = constant_lv(1, d2, 1, 1, 1, 2.0, 1, 1.5);
    Grid g(SpatialDomain({{0.0, 1.0}}), {101});
    const auto psi = scalar_steady_state(g, d2, c(2.0), c(1.5));
    Field init(g, 2);
    std::copy(psi.begin(), psi.end(), init.component(1).begin());
    const auto e = check_initial_monotonicity(lv, init);
    EXPECT_EQ(e.status, CheckStatus::pass);
    EXPECT_NEAR(e.worst_margin, 0.0, 1e-10);
}

TEST(InitialMonotonicity, ConcaveSineFails) {
    const auto lv = constant_lv(1, 1, 0, 0, 0, 1, 1, 1);
    const auto spec = lv_problem(lv, 51, [](int k, double x) { return k == 0 ? std::sin(kPi * x) : 0.0; });
    const auto e = check_initial_monotonicity(lv, spec.initial);
    EXPECT_EQ(e.status, CheckStatus::fail);
    EXPECT_NE(e.note.find("phi"), std::string::npos);
    // discrete Laplacian eigenvalue times the peak value
    const double h = 1.0 / 50.0;
    EXPECT_NEAR(e.worst_margin, -2.0 * (1.0 - std::cos(kPi * h)) / (h * h), 1e-9);
}

TEST(Report, FailEntriesCarryWitnessAndFiniteMargins) {
    auto spec = lv_problem(constant_lv(1, 1), 21, [](int, double x) { return 0.3 * std::sin(kPi * x); });
    spec.initial.at(0, 5) = -0.1;
    CheckSelection all;
    all.dissipativity_full = true;
    const auto report = check_hypotheses(spec, budget(2.0), all);
    bool any_fail = false;
    for (const auto& e : report.entries) {
        EXPECT_TRUE(std::isfinite(e.worst_margin));
        if (e.status == CheckStatus::fail) {
            any_fail = true;
            EXPECT_TRUE(e.witness.has_value()) << to_string(e.id);
        }
    }
    EXPECT_TRUE(any_fail);
    EXPECT_FALSE(report.none_failed());
    const auto j = report.to_json();
    EXPECT_EQ(j.at("provenance"), "sampled, not proven");
    EXPECT_EQ(j.at("entries").size(), report.entries.size());
}

TEST(Report, DeterministicForFixedSeed) {
    const auto spec = lv_problem(constant_lv(0.5, 0.7, 1, 1, 0.5, 1, 0.5, 1), 21,
                                 [](int, double x) { return 0.3 * std::sin(kPi * x); });
    CheckSelection all;
    all.dissipativity_full = true;
    const auto a = check_hypotheses(spec, budget(2.0), all).to_json().dump();
    const auto b = check_hypotheses(spec, budget(2.0), all).to_json().dump();
    EXPECT_EQ(a, b);
}

TEST(Report, LargerBudgetNeverTurnsFailIntoPass) {
    // a source that is negative on {u = 0} only for x > 0.8
    const auto spec = custom_problem(
        1, scalar_diffusion(1.0),
        [](double, const Point& x, std::span<const double> u, std::span<const double>, std::span<double> out) {
            out[0] = u[0] + (x[0] > 0.8 ? -(x[0] - 0.8) : 0.0);
        });
    bool failed = false;
    for (int n : {2, 3, 5, 9, 17, 33}) {
        SampleBudget b = budget();
        b.x_points = n;
        b.t_points = n;
        b.u_points = 4 * n;
        const auto status = check_positivity_source(spec, b).second.status;
        if (failed) {
            EXPECT_EQ(status, CheckStatus::fail) << n;
        }
        failed = failed || status == CheckStatus::fail;
    }
    EXPECT_TRUE(failed);
}

TEST(Sampling, PlansAreNested) {
    const SpatialDomain dom({{0.0, 1.0}, {0.0, 2.0}});
    SampleBudget small = budget(2.0);
    SampleBudget large = small;
    large.t_points = 11;
    large.x_points = 17;
    large.u_points = 100;
    large.p_points = 20;
    const SamplePlan a(small, dom, 3.0, 2);
    const SamplePlan b(large, dom, 3.0, 2);
    for (const auto& u : a.states()) {
        EXPECT_NE(std::find(b.states().begin(), b.states().end(), u), b.states().end());
    }
    for (const auto& p : a.gradients()) {
        EXPECT_NE(std::find(b.gradients().begin(), b.gradients().end(), p), b.gradients().end());
    }
    for (const auto& u : b.states()) {
        EXPECT_LE(std::hypot(u[0], u[1]), 2.0 + 1e-12);
    }
    for (const auto& u : b.orthant_states()) {
        EXPECT_GE(u[0], 0.0);
        EXPECT_GE(u[1], 0.0);
    }
    for (double t : a.times()) {
        EXPECT_NE(std::find(b.times().begin(), b.times().end(), t), b.times().end());
    }
    for (const auto& x : a.points()) {
        EXPECT_NE(std::find(b.points().begin(), b.points().end(), x), b.points().end());
    }
}

TEST(Sampling, InvalidBudget) {
    SampleBudget b;
    b.t_points = 1;
    EXPECT_THROW(b.validate(), SpecError);
    b = SampleBudget{};
    b.u_radius = 0.0;
    EXPECT_THROW(b.validate(), SpecError);
}

TEST(Hoelder, NotApplicable) {
    const auto e = hoelder_not_checked();
    EXPECT_EQ(e.id, AssumptionId::A5);
    EXPECT_EQ(e.status, CheckStatus::not_applicable);
}
