#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parapos/fdm.hpp"
#include "parapos/model.hpp"

namespace parapos {

/// max(e^{(d2 + 1) T} sup|phi|, sqrt(d1))
double max_principle_bound(double d1, double d2, double horizon, double sup_phi);
double max_principle_bound(double d1, double d2, double horizon, const Field& phi);

struct ComponentBound {
    double m_k = 0.0;
    double trajectory_sup = 0.0;  ///< sup of u^k over steps with t <= T_split
    double ratio_sup = 0.0;       ///< sampled sup of beta_k / gamma_kk for t >= T_split
};

/// m_k = max(sup_{t <= T_split} u^k, sup_{t >= T_split} beta_k / gamma_kk). The ratio is
/// sampled at the trajectory's grid nodes and times T_split + 2^j - 1, j = 0..40.
/// Throws DivisionDomainError when a sampled gamma_kk is not positive.
ComponentBound component_bound_mk(const Trajectory& traj, int k, const ScalarField& beta, const ScalarField& gamma,
                                  double t_split);

struct GronwallBound {
    double bound = 0.0;     ///< sup|phi_k| exp(integral)
    double integral = 0.0;  ///< int_0^inf sup_x beta_k(t, x) dt
};

/// Integrates sup_x beta over [0, inf) on dyadic pieces [2^j - 1, 2^{j+1} - 1] with adaptive
/// Simpson, stopping once two consecutive pieces fall below 1e-10. The supremum is taken
/// over `points`. Throws IntegrabilityError when the tail has not decayed after 64 pieces.
GronwallBound gronwall_extinction_bound(double sup_phi, const ScalarField& beta, const std::vector<Point>& points);

/// Grid nodes of `grid` as points.
std::vector<Point> node_points(const Grid& grid);

struct MonotoneCheck {
    bool pass = true;
    double worst_margin = 0.0;  ///< min over nodes and snapshot pairs of sign * (difference quotient)
    double tolerance = 0.0;     ///< 1e-8 (1 + sup|u|)
    double t = 0.0;             ///< witness time (end of the offending interval)
    std::size_t node = 0;
};

/// Sign of the discrete time derivative of component k between consecutive snapshots.
/// expected_sign is +1 or -1. Needs at least 3 snapshots.
MonotoneCheck detect_monotone(const Trajectory& traj, int k, int expected_sign);

/// Compactly supported bump (1 - |x - c|^2 / r^2)^2 with closed-form Laplacian.
class TestFunction {
public:
    TestFunction(Point center, double radius, int dimension);

    double operator()(const Point& x) const;
    /// (-4n + (4n + 8) s) / r^2 with s = |x - c|^2 / r^2 inside the support; half that
    /// within 1e-9 of the support edge (s = 1), 0 outside.
    double laplacian(const Point& x) const;

    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    /// True when the closed support lies strictly inside the domain.
    bool inside(const SpatialDomain& domain) const;

private:
    Point center_;
    double radius_;
    int dimension_;
};

/// Five bumps of radius 0.2 x (smallest width) on a coarse interior lattice.
std::vector<TestFunction> default_battery(const SpatialDomain& domain);

/// Limits of the two-species coefficients as t -> inf, functions of x.
struct LimitCoefficients {
    double d1 = 1.0;
    double d2 = 1.0;
    std::function<double(const Point&)> beta, gamma, delta, rho, sigma, theta;
};

struct WeakResidual {
    std::size_t test_id = 0;
    int equation = 1;  ///< 1: u-equation, 2: v-equation
    double value = 0.0;
};

struct SteadyStateReport {
    std::optional<Field> state;  ///< (u-bar, v-bar)
    bool converged = false;
    double final_time = 0.0;
    double window = 0.0;
    double tail_slope = 0.0;          ///< sup_x |u(T) - u(T - w)| / w
    std::vector<double> drift;        ///< per node, max over components of the same quotient
    std::vector<WeakResidual> residuals;
    std::vector<double> monotone_margins;  ///< per component, from detect_monotone
    std::string battery_note = "finite test-function battery; the weak identity is checked only on it";

    nlohmann::json to_json() const;
};

/// Final snapshot and tail slope against the latest snapshot at or before (1 - f) T.
SteadyStateReport extract_steady_state(const Trajectory& traj, double window_fraction = 0.1,
                                       double steady_tol = 1e-8);

/// Trapezoid quadrature of int d1 Lap(eta) u + eta u (beta - gamma u - delta v) and the
/// v-analogue for every test function. Throws SpecError for a support touching the boundary.
std::vector<WeakResidual> elliptic_weak_residual(const Field& steady, const LimitCoefficients& limits,
                                                 const std::vector<TestFunction>& battery);

struct ExtinctionResult {
    bool extinct = false;
    double final_sup = 0.0;
    bool decreasing = false;  ///< sup_x u^k non-increasing over the last window
};

/// Extinct iff sup_x u^k at the final time is at most tol_ext and the sup series is
/// non-increasing over the last `window_fraction` of the run.
ExtinctionResult extinction_check(const Trajectory& traj, int k, double tol_ext = 1e-3,
                                  double window_fraction = 0.1);

}  // namespace parapos
