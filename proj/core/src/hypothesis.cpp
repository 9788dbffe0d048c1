#include "parapos/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "parapos/profiles.hpp"

namespace parapos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void require_finite(std::span<const double> v, const char* what) {
    for (double e : v) {
        if (!std::isfinite(e)) {
            throw CoefficientError(std::string(what) + " evaluator returned a non-finite value");
        }
    }
}

// Tracks the smallest slack seen and where it occurred.
class WorstSlack {
public:
    void offer(double slack, double t, const Point& x, std::span<const double> u, std::span<const double> p,
               std::optional<std::size_t> node = std::nullopt) {
        if (slack < value_) {
            value_ = slack;
            w_.t = t;
            w_.x = x;
            w_.u.assign(u.begin(), u.end());
            w_.p.assign(p.begin(), p.end());
            w_.node = node;
            seen_ = true;
        }
    }

    bool seen() const { return seen_; }
    double value() const { return seen_ ? value_ : 0.0; }

    ReportEntry entry(AssumptionId id, bool pass, std::string note = {}) const {
        ReportEntry e;
        e.id = id;
        e.status = pass ? CheckStatus::pass : CheckStatus::fail;
        e.worst_margin = value();
        if (seen_) {
            e.witness = w_;
        }
        e.note = std::move(note);
        return e;
    }

private:
    double value_ = kInf;
    Witness w_;
    bool seen_ = false;
};

ReportEntry not_applicable(AssumptionId id, std::string note) {
    ReportEntry e;
    e.id = id;
    e.status = CheckStatus::not_applicable;
    e.note = std::move(note);
    return e;
}

std::vector<std::vector<double>> gradient_samples(const ProblemSpec& spec, const SamplePlan& plan) {
    if (spec.coefficients.gradient_dependent || spec.coefficients.has_drift()) {
        return plan.gradients();
    }
    const auto mn = static_cast<std::size_t>(spec.coefficients.components * spec.coefficients.dimension);
    return {std::vector<double>(mn, 0.0)};
}

// First and second derivatives along one axis from values f(i') on the line through node i.
template <class F>
double diff1(F&& f, int i, int count, double h) {
    if (i == 0) {
        return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    }
    if (i == count - 1) {
        return (3.0 * f(i) - 4.0 * f(i - 1) + f(i - 2)) / (2.0 * h);
    }
    return (f(i + 1) - f(i - 1)) / (2.0 * h);
}

template <class F>
double diff2(F&& f, int i, int count, double h) {
    const double h2 = h * h;
    if (count < 4) {
        const int c = std::clamp(i, 1, count - 2);
        return (f(c - 1) - 2.0 * f(c) + f(c + 1)) / h2;
    }
    if (i == 0) {
        return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
    }
    if (i == count - 1) {
        return (2.0 * f(i) - 5.0 * f(i - 1) + 4.0 * f(i - 2) - f(i - 3)) / h2;
    }
    return (f(i - 1) - 2.0 * f(i) + f(i + 1)) / h2;
}

}  // namespace

std::string to_string(AssumptionId id) {
    switch (id) {
        case AssumptionId::A1: return "A1";
        case AssumptionId::A2: return "A2";
        case AssumptionId::A2Prime: return "A2'";
        case AssumptionId::A4a: return "A4a";
        case AssumptionId::A4b: return "A4b";
        case AssumptionId::A5: return "A5";
        case AssumptionId::A6: return "A6";
        case AssumptionId::A7a: return "A7a";
        case AssumptionId::A7b: return "A7b";
        case AssumptionId::MonotoneCoeffs: return "MonotoneCoeffs";
        case AssumptionId::InitMonotone: return "InitMonotone";
    }
    return "unknown";
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::not_applicable: return "not_applicable";
    }
    return "unknown";
}

const ReportEntry* HypothesisReport::find(AssumptionId id) const {
    for (const auto& e : entries) {
        if (e.id == id) {
            return &e;
        }
    }
    return nullptr;
}

bool HypothesisReport::passed(AssumptionId id) const {
    const auto* e = find(id);
    return e != nullptr && e->status == CheckStatus::pass;
}

bool HypothesisReport::none_failed() const {
    return std::none_of(entries.begin(), entries.end(),
                        [](const ReportEntry& e) { return e.status == CheckStatus::fail; });
}

nlohmann::json HypothesisReport::to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j{{"assumption", to_string(e.id)}, {"status", to_string(e.status)}, {"margin", e.worst_margin}};
        if (e.witness) {
            const auto& w = *e.witness;
            nlohmann::json wj{{"t", w.t}, {"x", {w.x[0], w.x[1]}}, {"u", w.u}, {"p", w.p}};
            if (w.node) {
                wj["node"] = *w.node;
            }
            j["witness"] = std::move(wj);
        } else {
            j["witness"] = nullptr;
        }
        if (!e.note.empty()) {
            j["note"] = e.note;
        }
        list.push_back(std::move(j));
    }
    nlohmann::json constants = nlohmann::json::object();
    constants["kappa"] = kappa ? nlohmann::json(*kappa) : nlohmann::json(nullptr);
    constants["d1"] = d1 ? nlohmann::json(*d1) : nlohmann::json(nullptr);
    constants["d2"] = d2 ? nlohmann::json(*d2) : nlohmann::json(nullptr);
    return {{"provenance", "sampled, not proven"}, {"entries", std::move(list)}, {"constants", std::move(constants)}};
}

ParabolicityResult check_parabolicity(const ProblemSpec& spec, const SampleBudget& budget,
                                      const Majorants* majorants, const CheckTolerances& tol) {
    const auto& cs = spec.coefficients;
    const SamplePlan plan(budget, spec.domain, spec.horizon, cs.components);
    double kappa = kInf;
    WorstSlack worst;
    const std::vector<double> no_p;
    for (double t : plan.times()) {
        for (const Point& x : plan.points()) {
            for (const auto& u : plan.states()) {
                const double r = euclid(u);
                for (int k = 0; k < cs.components; ++k) {
                    const DiffusionMatrix a = checked_diffusion(cs, t, x, u, k);
                    const double lo = a.min_eigenvalue();
                    const double hi = a.max_eigenvalue();
                    if (!std::isfinite(lo) || !std::isfinite(hi)) {
                        throw CoefficientError("diffusion matrix has a non-finite eigenvalue");
                    }
                    kappa = std::min(kappa, lo);
                    double slack = lo;
                    if (majorants != nullptr) {
                        slack = std::min(slack, lo - majorants->kappa);
                        if (majorants->mu) {
                            slack = std::min(slack, majorants->mu(r) - hi);
                        }
                        if (majorants->mu_hat) {
                            slack = std::min(slack, lo - majorants->mu_hat(r));
                        }
                    }
                    worst.offer(slack, t, x, u, no_p);
                }
            }
        }
    }
    bool pass = kappa > 0.0;
    if (majorants != nullptr) {
        pass = pass && worst.value() >= -tol.sign;
    }
    ParabolicityResult out;
    out.kappa = kappa;
    out.entry = worst.entry(AssumptionId::A1, pass,
                            majorants != nullptr ? "smallest eigenvalue and envelopes mu_hat(|u|) <= A <= mu(|u|)"
                                                 : "smallest eigenvalue only; no envelopes supplied");
    return out;
}

DissipativityResult check_dissipativity(const ProblemSpec& spec, const SampleBudget& budget, DissipativityMode mode,
                                        const Majorants* majorants, const CheckTolerances& tol) {
    const auto& cs = spec.coefficients;
    const SamplePlan plan(budget, spec.domain, spec.horizon, cs.components);
    const auto& states = mode == DissipativityMode::A2 ? plan.states() : plan.orthant_states();
    const auto grads = gradient_samples(spec, plan);
    const auto id = mode == DissipativityMode::A2 ? AssumptionId::A2 : AssumptionId::A2Prime;

    struct Sample {
        double cu;
        double r2;
    };
    std::vector<Sample> samples;
    std::vector<double> c(static_cast<std::size_t>(cs.components));
    double d2_hat = 0.0;
    for (double t : plan.times()) {
        for (const Point& x : plan.points()) {
            for (const auto& u : states) {
                for (const auto& p : grads) {
                    cs.source(t, x, u, p, c);
                    require_finite(c, "source");
                    const double cu = dot(c, u);
                    const double r2 = dot(u, u);
                    samples.push_back({cu, r2});
                    if (r2 > 0.0) {
                        d2_hat = std::max(d2_hat, cu / r2);
                    }
                }
            }
        }
    }

    const bool user = majorants != nullptr && majorants->d1 && majorants->d2;
    const double d2_ref = user ? *majorants->d2 : d2_hat;
    double d1_hat = 0.0;
    for (const auto& s : samples) {
        d1_hat = std::max(d1_hat, s.cu - d2_ref * s.r2);
    }

    DissipativityResult out;
    out.d1 = d1_hat;
    out.d2 = d2_hat;
    if (!user) {
        // Constants fitted to the samples dominate them by construction.
        WorstSlack worst;
        std::size_t i = 0;
        for (double t : plan.times()) {
            for (const Point& x : plan.points()) {
                for (const auto& u : states) {
                    for (const auto& p : grads) {
                        const auto& s = samples[i++];
                        worst.offer(d1_hat + d2_hat * s.r2 - s.cu, t, x, u, p);
                    }
                }
            }
        }
        out.entry = worst.entry(id, true, "no constants supplied; d1, d2 estimated from the samples");
        return out;
    }

    const double d1 = *majorants->d1;
    const double d2 = *majorants->d2;
    WorstSlack worst;
    std::size_t i = 0;
    for (double t : plan.times()) {
        for (const Point& x : plan.points()) {
            for (const auto& u : states) {
                for (const auto& p : grads) {
                    const auto& s = samples[i++];
                    worst.offer(d1 + d2 * s.r2 - s.cu, t, x, u, p);
                }
            }
        }
    }
    out.entry = worst.entry(id, worst.value() >= -tol.sign * (1.0 + d1 + d2 * budget.u_radius * budget.u_radius),
                            "checked against supplied d1, d2");
    return out;
}

std::pair<ReportEntry, ReportEntry> check_growth(const ProblemSpec& spec, const SampleBudget& budget,
                                                 const Majorants* majorants, const CheckTolerances& tol) {
    const bool have1 = majorants != nullptr && static_cast<bool>(majorants->theta1);
    const bool have2 = majorants != nullptr && static_cast<bool>(majorants->theta2);
    std::pair<ReportEntry, ReportEntry> out{not_applicable(AssumptionId::A4a, "theta1 not supplied"),
                                            not_applicable(AssumptionId::A4b, "theta2 not supplied")};
    if (!have1 && !have2) {
        return out;
    }
    const auto& cs = spec.coefficients;
    const SamplePlan plan(budget, spec.domain, spec.horizon, cs.components);
    const auto& grads = plan.gradients();
    std::vector<double> b(static_cast<std::size_t>(cs.dimension), 0.0);
    std::vector<double> c(static_cast<std::size_t>(cs.components));
    WorstSlack w1;
    WorstSlack w2;
    for (double t : plan.times()) {
        for (const Point& x : plan.points()) {
            for (const auto& u : plan.states()) {
                const double ru = euclid(u);
                for (const auto& p : grads) {
                    const double rp = euclid(p);
                    if (have1) {
                        std::fill(b.begin(), b.end(), 0.0);
                        if (cs.has_drift()) {
                            cs.drift(t, x, u, p, b);
                            require_finite(b, "drift");
                        }
                        double bmax = 0.0;
                        for (double e : b) {
                            bmax = std::max(bmax, std::abs(e));
                        }
                        w1.offer(majorants->theta1(ru) * (1.0 + rp) - bmax, t, x, u, p);
                    }
                    if (have2) {
                        cs.source(t, x, u, p, c);
                        require_finite(c, "source");
                        w2.offer(majorants->theta2(ru, rp) * (1.0 + rp) * (1.0 + rp) - euclid(c), t, x, u, p);
                    }
                }
            }
        }
    }
    if (have1) {
        out.first = w1.entry(AssumptionId::A4a, w1.value() >= -tol.sign);
    }
    if (have2) {
        // Geometric ladder |p| = C2 * 2^j, j = 0..7, at every sampled |u|.
        bool decays = true;
        std::ostringstream note;
        note << "decay of theta2 in |p| checked on a geometric ladder (heuristic)";
        for (const auto& u : plan.states()) {
            const double ru = euclid(u);
            double rungs[8];
            for (int j = 0; j < 8; ++j) {
                rungs[j] = majorants->theta2(ru, budget.p_radius * std::ldexp(1.0, j));
            }
            if (!(rungs[5] > rungs[6] && rungs[6] > rungs[7])) {
                decays = false;
                note << "; not decreasing at |u| = " << ru;
                break;
            }
        }
        out.second = w2.entry(AssumptionId::A4b, decays && w2.value() >= -tol.sign, note.str());
    }
    return out;
}

ReportEntry check_compatibility(const ProblemSpec& spec, const CheckTolerances& tol) {
    if (spec.domain.boundary() != BoundaryKind::dirichlet_zero) {
        return not_applicable(AssumptionId::A6, "boundary compatibility applies to dirichlet_zero domains");
    }
    const auto& cs = spec.coefficients;
    const Grid& grid = spec.grid();
    const Field& phi = spec.initial;
    const int n = grid.dimension();
    const int m = cs.components;
    const std::array<int, 2> count{grid.nodes(0), n == 2 ? grid.nodes(1) : 1};
    const std::array<double, 2> h{grid.spacing(0), n == 2 ? grid.spacing(1) : 1.0};

    const std::vector<double> zero_u(static_cast<std::size_t>(m), 0.0);
    std::vector<double> p(static_cast<std::size_t>(m * n));
    std::vector<double> b(static_cast<std::size_t>(n));
    std::vector<double> c(static_cast<std::size_t>(m));

    double scale = 0.0;
    double worst_residual = 0.0;
    WorstSlack worst;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (!grid.is_boundary(idx)) {
            continue;
        }
        const auto [i, j] = grid.coords(idx);
        const Point x = grid.point(idx);
        std::vector<double> second(static_cast<std::size_t>(m * 4), 0.0);
        for (int k = 0; k < m; ++k) {
            auto v = [&](int ii, int jj) { return phi.at(k, grid.index(ii, jj)); };
            auto along_x = [&](int jj) { return [&, jj](int ii) { return v(ii, jj); }; };
            p[static_cast<std::size_t>(k * n)] = diff1(along_x(j), i, count[0], h[0]);
            second[static_cast<std::size_t>(k * 4)] = diff2(along_x(j), i, count[0], h[0]);
            if (n == 2) {
                auto along_y = [&](int ii) { return [&, ii](int jj) { return v(ii, jj); }; };
                p[static_cast<std::size_t>(k * n + 1)] = diff1(along_y(i), j, count[1], h[1]);
                second[static_cast<std::size_t>(k * 4 + 3)] = diff2(along_y(i), j, count[1], h[1]);
                const double mixed = diff1(
                    [&](int ii) { return diff1(along_y(ii), j, count[1], h[1]); }, i, count[0], h[0]);
                second[static_cast<std::size_t>(k * 4 + 1)] = mixed;
                second[static_cast<std::size_t>(k * 4 + 2)] = mixed;
            }
        }
        std::fill(b.begin(), b.end(), 0.0);
        if (cs.has_drift()) {
            cs.drift(0.0, x, zero_u, p, b);
            require_finite(b, "drift");
        }
        cs.source(0.0, x, zero_u, p, c);
        require_finite(c, "source");
        double residual = 0.0;
        for (int k = 0; k < m; ++k) {
            const DiffusionMatrix a = checked_diffusion(cs, 0.0, x, zero_u, k);
            double r = c[static_cast<std::size_t>(k)];
            for (int a1 = 0; a1 < n; ++a1) {
                r += b[static_cast<std::size_t>(a1)] * p[static_cast<std::size_t>(k * n + a1)];
                for (int a2 = 0; a2 < n; ++a2) {
                    r += a(a1, a2) * second[static_cast<std::size_t>(k * 4 + a1 * 2 + a2)];
                    scale = std::max(scale, std::abs(a(a1, a2)));
                }
            }
            residual = std::max({residual, std::abs(r), std::abs(phi.at(k, idx))});
        }
        for (double e : b) {
            scale = std::max(scale, std::abs(e));
        }
        worst_residual = std::max(worst_residual, residual);
        worst.offer(-residual, 0.0, x, zero_u, p, idx);
    }
    const double limit = tol.compat * (1.0 + scale);
    std::ostringstream note;
    note << "one-sided second-order differences; tolerance " << limit;
    return worst.entry(AssumptionId::A6, worst_residual <= limit, note.str());
}

std::pair<ReportEntry, ReportEntry> check_positivity_source(const ProblemSpec& spec, const SampleBudget& budget,
                                                            const CheckTolerances& tol) {
    const auto& cs = spec.coefficients;
    const Grid& grid = spec.grid();
    const int m = cs.components;
    const std::vector<double> no_p;

    WorstSlack wa;
    std::vector<double> u(static_cast<std::size_t>(m));
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        spec.initial.gather(idx, u);
        for (int k = 0; k < m; ++k) {
            wa.offer(u[static_cast<std::size_t>(k)], 0.0, grid.point(idx), u, no_p, idx);
        }
    }
    ReportEntry a = wa.entry(AssumptionId::A7a, wa.value() >= 0.0, "minimum of the initial data over grid nodes");

    const SamplePlan plan(budget, spec.domain, spec.horizon, m);
    const auto grads = gradient_samples(spec, plan);
    std::vector<double> c(static_cast<std::size_t>(m));
    WorstSlack wb;
    for (double t : plan.times()) {
        for (const Point& x : plan.points()) {
            for (const auto& base : plan.orthant_states()) {
                for (const auto& p : grads) {
                    for (int k = 0; k < m; ++k) {
                        u = base;
                        u[static_cast<std::size_t>(k)] = 0.0;
                        cs.source(t, x, u, p, c);
                        require_finite(c, "source");
                        wb.offer(c[static_cast<std::size_t>(k)], t, x, u, p);
                    }
                }
            }
        }
    }
    ReportEntry b = wb.entry(AssumptionId::A7b, wb.value() >= -tol.zero, "c^k on {u^k = 0, u^i >= 0}");
    return {a, b};
}

ReportEntry check_monotone_coefficients(const LVCoefficients& lv, const SpatialDomain& domain, double horizon,
                                        const SampleBudget& budget, const CheckTolerances& tol) {
    if (lv.species != 2) {
        return not_applicable(AssumptionId::MonotoneCoeffs, "defined for two-species models");
    }
    const SamplePlan plan(budget, domain, horizon, 2);
    const double dt = 1e-4 * std::max(1.0, horizon);
    struct Coefficient {
        const char* name;
        const ScalarField* f;
        double sign;
    };
    const Coefficient coeffs[] = {
        {"beta", &lv.growth[0], 1.0},          {"gamma", &lv.interaction[0][0], -1.0},
        {"delta", &lv.interaction[0][1], -1.0}, {"rho", &lv.growth[1], -1.0},
        {"sigma", &lv.interaction[1][0], 1.0},  {"theta", &lv.interaction[1][1], 1.0},
    };
    WorstSlack worst;
    std::string worst_name;
    const std::vector<double> none;
    for (double t : plan.times()) {
        const double tc = std::max(t, dt);
        for (const Point& x : plan.points()) {
            for (const auto& c : coeffs) {
                const double deriv = ((*c.f)(tc + dt, x) - (*c.f)(tc - dt, x)) / (2.0 * dt);
                if (!std::isfinite(deriv)) {
                    throw CoefficientError(std::string("coefficient ") + c.name + " is not finite");
                }
                const double before = worst.value();
                const bool first = !worst.seen();
                worst.offer(c.sign * deriv, tc, x, none, none);
                if (first || worst.value() < before) {
                    worst_name = c.name;
                }
            }
        }
    }
    const bool pass = worst.value() >= -tol.sign;
    return worst.entry(AssumptionId::MonotoneCoeffs, pass,
                       pass ? "signs (+,-,-,-,+,+) of the time derivatives hold"
                            : "wrong-signed time derivative of " + worst_name);
}

ReportEntry check_initial_monotonicity(const LVCoefficients& lv, const Field& initial, const CheckTolerances& tol) {
    if (lv.species != 2 || initial.components() != 2) {
        return not_applicable(AssumptionId::InitMonotone, "defined for two-species models");
    }
    const Grid& grid = initial.grid();
    const auto phi = initial.component(0);
    const auto psi = initial.component(1);
    const auto lap_phi = discrete_laplacian(grid, phi);
    const auto lap_psi = discrete_laplacian(grid, psi);
    WorstSlack worst;
    bool second_worse = false;
    const std::vector<double> none;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (grid.is_boundary(idx)) {
            continue;
        }
        const Point x = grid.point(idx);
        const double f = phi[idx];
        const double g = psi[idx];
        const double r1 = lv.diffusion[0] * lap_phi[idx] +
                          f * (lv.growth[0](0.0, x) - lv.interaction[0][0](0.0, x) * f - lv.interaction[0][1](0.0, x) * g);
        const double r2 = lv.diffusion[1] * lap_psi[idx] +
                          g * (lv.growth[1](0.0, x) - lv.interaction[1][0](0.0, x) * f - lv.interaction[1][1](0.0, x) * g);
        const std::vector<double> u{f, g};
        const double before = worst.value();
        const bool first = !worst.seen();
        worst.offer(std::min(r1, -r2), 0.0, x, u, none, idx);
        if (first || worst.value() < before) {
            second_worse = -r2 < r1;
        }
    }
    const bool pass = worst.value() >= -tol.sign;
    std::string note = "discrete Laplacian at interior nodes";
    if (!pass) {
        note += second_worse ? "; psi inequality violated" : "; phi inequality violated";
    }
    return worst.entry(AssumptionId::InitMonotone, pass, note);
}

ReportEntry hoelder_not_checked() {
    return not_applicable(AssumptionId::A5, "Hoelder continuity of derivatives is not estimable from samples");
}

HypothesisReport check_hypotheses(const ProblemSpec& spec, const SampleBudget& budget, const CheckSelection& which,
                                  const Majorants* majorants, const CheckTolerances& tol) {
    HypothesisReport report;
    if (which.parabolicity) {
        auto r = check_parabolicity(spec, budget, majorants, tol);
        report.entries.push_back(std::move(r.entry));
        report.kappa = r.kappa;
    }
    if (which.dissipativity_full) {
        auto r = check_dissipativity(spec, budget, DissipativityMode::A2, majorants, tol);
        report.entries.push_back(std::move(r.entry));
        report.d1 = r.d1;
        report.d2 = r.d2;
    }
    if (which.dissipativity_orthant) {
        auto r = check_dissipativity(spec, budget, DissipativityMode::A2Prime, majorants, tol);
        report.entries.push_back(std::move(r.entry));
        report.d1 = r.d1;
        report.d2 = r.d2;
    }
    if (which.growth) {
        auto [a, b] = check_growth(spec, budget, majorants, tol);
        report.entries.push_back(std::move(a));
        report.entries.push_back(std::move(b));
    }
    report.entries.push_back(hoelder_not_checked());
    if (which.compatibility) {
        report.entries.push_back(check_compatibility(spec, tol));
    }
    if (which.positivity_source) {
        auto [a, b] = check_positivity_source(spec, budget, tol);
        report.entries.push_back(std::move(a));
        report.entries.push_back(std::move(b));
    }
    if (which.monotone_coefficients) {
        report.entries.push_back(spec.lv ? check_monotone_coefficients(*spec.lv, spec.domain, spec.horizon, budget, tol)
                                         : not_applicable(AssumptionId::MonotoneCoeffs, "not an LV model"));
    }
    if (which.initial_monotonicity) {
        report.entries.push_back(spec.lv ? check_initial_monotonicity(*spec.lv, spec.initial, tol)
                                         : not_applicable(AssumptionId::InitMonotone, "not an LV model"));
    }
    return report;
}

}  // namespace parapos
