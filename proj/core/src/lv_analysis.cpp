#include "parapos/lv_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace parapos {

namespace {

double sup_abs(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) {
        s = std::max(s, std::abs(e));
    }
    return s;
}

double simpson(double a, double fa, double b, double fb, double fm) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

template <class F>
double adaptive_simpson(F&& f, double a, double fa, double b, double fb, double fm, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(F&& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, fa, b, fb, fm, simpson(a, fa, b, fb, fm), tol, 40);
}

}  // namespace

double max_principle_bound(double d1, double d2, double horizon, double sup_phi) {
    if (d1 < 0.0 || d2 < 0.0 || !(horizon > 0.0)) {
        throw SpecError("max-principle bound needs d1, d2 >= 0 and T > 0");
    }
    return std::max(std::exp((d2 + 1.0) * horizon) * sup_phi, std::sqrt(d1));
}

double max_principle_bound(double d1, double d2, double horizon, const Field& phi) {
    double s = 0.0;
    std::vector<double> u(static_cast<std::size_t>(phi.components()));
    for (std::size_t idx = 0; idx < phi.nodes(); ++idx) {
        phi.gather(idx, u);
        double sq = 0.0;
        for (double e : u) {
            sq += e * e;
        }
        s = std::max(s, std::sqrt(sq));
    }
    return max_principle_bound(d1, d2, horizon, s);
}

ComponentBound component_bound_mk(const Trajectory& traj, int k, const ScalarField& beta, const ScalarField& gamma,
                                  double t_split) {
    if (traj.snapshots.empty()) {
        throw SpecError("trajectory has no snapshots");
    }
    ComponentBound out;
    const auto kk = static_cast<std::size_t>(k);
    for (const auto& d : traj.diagnostics) {
        if (d.t <= t_split && kk < d.component_sup.size()) {
            out.trajectory_sup = std::max(out.trajectory_sup, d.component_sup[kk]);
        }
    }
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        if (traj.snapshot_times[s] <= t_split) {
            out.trajectory_sup = std::max(out.trajectory_sup, sup_abs(traj.snapshots[s].component(k)));
        }
    }
    const auto points = node_points(traj.snapshots.front().grid());
    double ratio = 0.0;
    for (int j = 0; j <= 40; ++j) {
        const double t = t_split + std::ldexp(1.0, j) - 1.0;
        for (const Point& x : points) {
            const double g = gamma(t, x);
            if (!(g > 0.0)) {
                std::ostringstream os;
                os << "gamma_kk = " << g << " is not positive at t = " << t << ", x = (" << x[0] << ", " << x[1]
                   << ")";
                throw DivisionDomainError(os.str());
            }
            ratio = std::max(ratio, beta(t, x) / g);
        }
    }
    out.ratio_sup = ratio;
    out.m_k = std::max(out.trajectory_sup, ratio);
    return out;
}

std::vector<Point> node_points(const Grid& grid) {
    std::vector<Point> pts;
    pts.reserve(grid.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        pts.push_back(grid.point(idx));
    }
    return pts;
}

GronwallBound gronwall_extinction_bound(double sup_phi, const ScalarField& beta, const std::vector<Point>& points) {
    if (points.empty()) {
        throw SpecError("Gronwall bound needs at least one spatial point");
    }
    auto sup_beta = [&](double t) {
        double s = -std::numeric_limits<double>::infinity();
        for (const Point& x : points) {
            s = std::max(s, beta(t, x));
        }
        if (!std::isfinite(s)) {
            throw IntegrabilityError("growth rate is not finite");
        }
        return s;
    };
    double total = 0.0;
    int small = 0;
    for (int j = 0; j < 64; ++j) {
        const double a = std::ldexp(1.0, j) - 1.0;
        const double b = std::ldexp(1.0, j + 1) - 1.0;
        const double piece = integrate(sup_beta, a, b, 1e-13);
        total += piece;
        small = std::abs(piece) < 1e-10 ? small + 1 : 0;
        if (small >= 2) {
            return {std::abs(sup_phi) * std::exp(total), total};
        }
    }
    throw IntegrabilityError("integral of sup_x beta over [0, inf) does not converge");
}

MonotoneCheck detect_monotone(const Trajectory& traj, int k, int expected_sign) {
    if (traj.snapshots.size() < 3) {
        throw SpecError("monotonicity detection needs at least 3 snapshots");
    }
    if (expected_sign != 1 && expected_sign != -1) {
        throw SpecError("expected sign must be +1 or -1");
    }
    MonotoneCheck out;
    double sup = 0.0;
    for (const auto& f : traj.snapshots) {
        sup = std::max(sup, sup_abs(f.raw()));
    }
    out.tolerance = 1e-8 * (1.0 + sup);
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t s = 1; s < traj.snapshots.size(); ++s) {
        const double dt = traj.snapshot_times[s] - traj.snapshot_times[s - 1];
        const auto a = traj.snapshots[s - 1].component(k);
        const auto b = traj.snapshots[s].component(k);
        for (std::size_t idx = 0; idx < a.size(); ++idx) {
            const double margin = expected_sign * (b[idx] - a[idx]) / dt;
            if (margin < out.worst_margin) {
                out.worst_margin = margin;
                out.t = traj.snapshot_times[s];
                out.node = idx;
            }
        }
    }
    out.pass = out.worst_margin >= -out.tolerance;
    return out;
}

TestFunction::TestFunction(Point center, double radius, int dimension)
    : center_(center), radius_(radius), dimension_(dimension) {
    if (!(radius > 0.0) || dimension < 1 || dimension > 2) {
        throw SpecError("test function needs a positive radius and dimension 1 or 2");
    }
    if (dimension == 1) {
        center_[1] = 0.0;
    }
}

double TestFunction::operator()(const Point& x) const {
    const double dx = x[0] - center_[0];
    const double dy = dimension_ == 2 ? x[1] - center_[1] : 0.0;
    const double s = (dx * dx + dy * dy) / (radius_ * radius_);
    if (s >= 1.0) {
        return 0.0;
    }
    return (1.0 - s) * (1.0 - s);
}

double TestFunction::laplacian(const Point& x) const {
    const double dx = x[0] - center_[0];
    const double dy = dimension_ == 2 ? x[1] - center_[1] : 0.0;
    const double s = (dx * dx + dy * dy) / (radius_ * radius_);
    const double n = dimension_;
    const double inner = (-4.0 * n + (4.0 * n + 8.0) * s) / (radius_ * radius_);
    // The Laplacian jumps at the support edge; a node on the edge takes the mean of the
    // one-sided limits so that trapezoid quadrature stays second order.
    if (std::abs(s - 1.0) <= 1e-9) {
        return 0.5 * inner;
    }
    return s < 1.0 ? inner : 0.0;
}

bool TestFunction::inside(const SpatialDomain& domain) const {
    for (int a = 0; a < dimension_; ++a) {
        const auto& iv = domain.axis(a);
        const double c = center_[static_cast<std::size_t>(a)];
        if (!(c - radius_ > iv.lo && c + radius_ < iv.hi)) {
            return false;
        }
    }
    return true;
}

std::vector<TestFunction> default_battery(const SpatialDomain& domain) {
    const int n = domain.dimension();
    double width = domain.axis(0).length();
    if (n == 2) {
        width = std::min(width, domain.axis(1).length());
    }
    const double r = 0.2 * width;
    std::vector<TestFunction> out;
    auto at = [&](int a, double frac) { return domain.axis(a).lo + frac * domain.axis(a).length(); };
    if (n == 1) {
        for (double f : {0.3, 0.4, 0.5, 0.6, 0.7}) {
            out.emplace_back(Point{at(0, f), 0.0}, r, 1);
        }
    } else {
        const double pts[5][2] = {{0.5, 0.5}, {0.3, 0.3}, {0.7, 0.3}, {0.3, 0.7}, {0.7, 0.7}};
        for (const auto& p : pts) {
            out.emplace_back(Point{at(0, p[0]), at(1, p[1])}, r, 2);
        }
    }
    return out;
}

std::vector<WeakResidual> elliptic_weak_residual(const Field& steady, const LimitCoefficients& limits,
                                                 const std::vector<TestFunction>& battery) {
    if (steady.components() != 2) {
        throw SpecError("weak residuals need the two-species pair (u, v)");
    }
    const Grid& g = steady.grid();
    for (std::size_t q = 0; q < battery.size(); ++q) {
        if (!battery[q].inside(g.domain())) {
            throw SpecError("test function " + std::to_string(q) + " has support touching the domain boundary");
        }
    }
    std::vector<WeakResidual> out;
    for (std::size_t q = 0; q < battery.size(); ++q) {
        const auto& eta = battery[q];
        double r1 = 0.0;
        double r2 = 0.0;
        for (std::size_t idx = 0; idx < g.size(); ++idx) {
            const Point x = g.point(idx);
            const double e = eta(x);
            const double lap = eta.laplacian(x);
            if (e == 0.0 && lap == 0.0) {
                continue;
            }
            const double w = g.quadrature_weight(idx);
            const double u = steady.at(0, idx);
            const double v = steady.at(1, idx);
            r1 += w * (limits.d1 * lap * u + e * u * (limits.beta(x) - limits.gamma(x) * u - limits.delta(x) * v));
            r2 += w * (limits.d2 * lap * v + e * v * (limits.rho(x) - limits.sigma(x) * u - limits.theta(x) * v));
        }
        out.push_back({q, 1, r1});
        out.push_back({q, 2, r2});
    }
    return out;
}

SteadyStateReport extract_steady_state(const Trajectory& traj, double window_fraction, double steady_tol) {
    if (traj.snapshots.empty()) {
        throw SpecError("trajectory has no snapshots");
    }
    if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
        throw SpecError("window fraction must lie in (0, 1)");
    }
    SteadyStateReport rep;
    const Field& last = traj.final_state();
    rep.state = last;
    rep.final_time = traj.final_time();
    const double target = rep.final_time * (1.0 - window_fraction);
    std::size_t ref = 0;
    for (std::size_t s = 0; s + 1 < traj.snapshot_times.size(); ++s) {
        if (traj.snapshot_times[s] <= target) {
            ref = s;
        }
    }
    rep.window = rep.final_time - traj.snapshot_times[ref];
    rep.drift.assign(last.nodes(), 0.0);
    if (rep.window <= 0.0) {
        rep.tail_slope = std::numeric_limits<double>::infinity();
        return rep;
    }
    const Field& prev = traj.snapshots[ref];
    for (std::size_t idx = 0; idx < last.nodes(); ++idx) {
        for (int k = 0; k < last.components(); ++k) {
            rep.drift[idx] = std::max(rep.drift[idx], std::abs(last.at(k, idx) - prev.at(k, idx)) / rep.window);
        }
        rep.tail_slope = std::max(rep.tail_slope, rep.drift[idx]);
    }
    rep.converged = rep.tail_slope <= steady_tol;
    return rep;
}

nlohmann::json SteadyStateReport::to_json() const {
    nlohmann::json j;
    j["status"] = converged ? "converged" : "not converged";
    j["final_time"] = final_time;
    j["window"] = window;
    j["tail_slope"] = tail_slope;
    double max_drift = 0.0;
    for (double d : drift) {
        max_drift = std::max(max_drift, d);
    }
    j["max_node_drift"] = max_drift;
    nlohmann::json res = nlohmann::json::array();
    for (const auto& r : residuals) {
        res.push_back({{"test_id", r.test_id}, {"equation", r.equation}, {"residual", r.value}});
    }
    j["residuals"] = std::move(res);
    j["monotone_margins"] = monotone_margins;
    j["battery_note"] = battery_note;
    return j;
}

ExtinctionResult extinction_check(const Trajectory& traj, int k, double tol_ext, double window_fraction) {
    ExtinctionResult out;
    if (traj.diagnostics.empty()) {
        throw SpecError("trajectory has no diagnostics");
    }
    const auto kk = static_cast<std::size_t>(k);
    const double t_end = traj.diagnostics.back().t;
    const double from = t_end * (1.0 - window_fraction);
    out.final_sup = traj.diagnostics.back().component_sup.at(kk);
    out.decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& d : traj.diagnostics) {
        if (d.t < from) {
            continue;
        }
        const double s = d.component_sup.at(kk);
        if (s > prev) {
            out.decreasing = false;
        }
        prev = s;
    }
    out.extinct = out.final_sup <= tol_ext && out.decreasing;
    return out;
}

}  // namespace parapos
