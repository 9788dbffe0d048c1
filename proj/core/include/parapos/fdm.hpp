#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "parapos/model.hpp"

namespace parapos {

enum class TimeStepper { imex_be, imex_cn, erk2 };
enum class PositivityMode { monitor_only, clip_and_flag };

std::string to_string(TimeStepper s);
std::string to_string(PositivityMode m);

/// Time integration settings. The erk2 stability bound depends on A and the grid,
/// so it is enforced when a step is taken rather than here.
struct SchemeConfig {
    TimeStepper stepper = TimeStepper::imex_be;
    double dt = 1e-3;
    PositivityMode positivity = PositivityMode::monitor_only;
    int snapshot_stride = 10;
    double linear_tolerance = 1e-10;
    int max_linear_iterations = 20000;

    void validate() const;
};

struct StepReport {
    int linear_iterations = 0;
    double linear_residual = 0.0;
    std::size_t source_evaluations = 0;
    double negative_part = 0.0;  ///< max_k ||min(u^k, 0)||_inf after the step, before any clipping
    double clipped = 0.0;        ///< largest magnitude removed by clip_and_flag
};

struct StepDiagnostics {
    double t = 0.0;
    double min_value = 0.0;     ///< min_k min_x u^k
    double sup_norm = 0.0;      ///< max_x |u(x)| (Euclidean in the components)
    double negpart_norm = 0.0;  ///< max_k ||min(u^k, 0)||_inf
    double dudt_min = 0.0;      ///< min over interior nodes of the discrete d_t u^1
    double dvdt_max = 0.0;      ///< max over interior nodes of the discrete d_t u^2 (0 when m = 1)
    std::vector<double> component_sup;
    std::vector<double> dudt_min_by_component;
    std::vector<double> dudt_max_by_component;
};

struct Trajectory {
    std::vector<double> snapshot_times;
    std::vector<Field> snapshots;
    std::vector<StepDiagnostics> diagnostics;  ///< entry 0 is t = 0
    double positivity_step_bound = 0.0;        ///< 1 / (2 sup |d c / d u|) from sampled Jacobians
    bool within_positivity_bound = true;
    int total_linear_iterations = 0;
    double max_linear_residual = 0.0;
    double max_clipped = 0.0;

    const Field& final_state() const { return snapshots.back(); }
    double final_time() const { return snapshot_times.back(); }
};

/// Diagnostics of `next`, with discrete time derivatives (next - prev) / dt (0 when dt = 0).
StepDiagnostics diagnose_step(const Field& prev, const Field& next, double t, double dt);

/// Largest stable erk2 step h_min^2 / (2 n max eig A) for the coefficients at state `u`.
double erk2_step_limit(const ProblemSpec& spec, const Field& u, double t);

/// 1 / (2 sup |d c / d u|) over finite-difference Jacobians sampled at grid nodes,
/// three times and states in [0, 2 sup|phi|]^m. Infinite when c does not depend on u.
double positivity_step_bound(const ProblemSpec& spec);

/// One time step from t to t + dt. Diffusion coefficients (and drift) are frozen at the
/// state at t; source and drift are explicit with central-difference gradients.
std::pair<Field, StepReport> step(const Field& state, double t, double dt, const ProblemSpec& spec,
                                  const SchemeConfig& scheme);

/// Integrates to the horizon. Snapshots every `snapshot_stride` steps plus t = 0 and T.
Trajectory solve(const ProblemSpec& spec, const SchemeConfig& scheme);

struct SteadyOptions {
    double window_fraction = 0.1;
    double steady_tol = 1e-8;
    double t_max = 50.0;
};

struct SteadyRun {
    Trajectory trajectory;
    bool converged = false;
    double stop_time = 0.0;
    double tail_slope = 0.0;  ///< sup |u(t) - u(t - w)| / w with w = window_fraction * t
};

/// Integrates until the tail slope drops to steady_tol (checked at snapshot times) or t_max.
/// The horizon of `spec` is ignored.
SteadyRun solve_until_steady(const ProblemSpec& spec, const SchemeConfig& scheme, const SteadyOptions& options);

/// Whole-space problem approximated on boxes [-r, r]^n from the domain's radius schedule.
struct CauchyProblem {
    SpatialDomain domain;  ///< cauchy_nested kind
    CoefficientSet coefficients;
    InitialProfile initial;
    double horizon = 1.0;
    std::optional<LVCoefficients> lv;
};

struct NestedOptions {
    double spacing = 0.05;       ///< 2 r / spacing must be an integer for every radius
    double tolerance = 1e-6;
    double inner_fraction = 0.5;  ///< compared region: |x_i| <= inner_fraction * r_1
};

struct NestedReport {
    std::vector<double> radii;
    std::vector<double> differences;  ///< between consecutive radii, final time, inner region
    bool converged = false;
};

/// Solves the Dirichlet problem on each box with data phi * zeta_r and source zeta_r * c.
/// Throws NonConvergence when a difference fails to decrease.
std::pair<Trajectory, NestedReport> solve_cauchy_nested(const CauchyProblem& problem, const NestedOptions& options,
                                                        const SchemeConfig& scheme);

/// The problem on box [-r, r]^n used by the nested construction.
ProblemSpec cutoff_problem(const CauchyProblem& problem, double radius, double spacing);

struct OrderEstimate {
    double order = 0.0;
    double coarse_difference = 0.0;  ///< max |u_h - u_{h/2}| on coarse nodes
    double fine_difference = 0.0;    ///< max |u_{h/2} - u_{h/4}| on coarse nodes
};

/// Richardson estimate log2(|u_h - u_{h/2}| / |u_{h/2} - u_{h/4}|) at the final time with a
/// fixed time step. The grids have n, 2n - 1 and 4n - 3 nodes per axis.
OrderEstimate estimate_order(const ProblemSpec& base, const InitialProfile& profile, const SchemeConfig& scheme,
                             std::vector<int> coarse_nodes);

}  // namespace parapos
