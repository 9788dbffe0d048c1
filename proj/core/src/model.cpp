#include "parapos/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace parapos {

double norm(const Point& x) { return std::hypot(x[0], x[1]); }

std::string to_string(BoundaryKind kind) {
    return kind == BoundaryKind::dirichlet_zero ? "dirichlet_zero" : "cauchy_nested";
}

SpatialDomain::SpatialDomain(std::vector<Interval> bounds, BoundaryKind kind)
    : bounds_(std::move(bounds)), kind_(kind) {
    if (bounds_.empty() || bounds_.size() > 2) {
        throw SpecError("domain dimension must be 1 or 2");
    }
    for (const auto& b : bounds_) {
        if (!(b.length() > 0.0) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
            throw SpecError("domain interval must have strictly positive finite length");
        }
    }
    if (kind_ == BoundaryKind::cauchy_nested) {
        throw SpecError("cauchy_nested domains require a radius schedule; use SpatialDomain::cauchy");
    }
}

SpatialDomain SpatialDomain::cauchy(int dimension, std::vector<double> radii, double transition_width) {
    if (dimension < 1 || dimension > 2) {
        throw SpecError("domain dimension must be 1 or 2");
    }
    if (radii.empty()) {
        throw SpecError("cauchy_nested domain needs at least one cutoff radius");
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > transition_width) || (i > 0 && !(radii[i] > radii[i - 1]))) {
            throw SpecError("cutoff radii must increase strictly and exceed the transition width");
        }
    }
    if (!(transition_width > 0.0)) {
        throw SpecError("cutoff transition width must be positive");
    }
    SpatialDomain d;
    const double r = radii.back();
    d.bounds_.assign(static_cast<std::size_t>(dimension), Interval{-r, r});
    d.kind_ = BoundaryKind::cauchy_nested;
    d.radii_ = std::move(radii);
    d.transition_width_ = transition_width;
    return d;
}

bool SpatialDomain::contains(const Point& x, double slack) const {
    for (int i = 0; i < dimension(); ++i) {
        const auto& b = bounds_[static_cast<std::size_t>(i)];
        if (x[static_cast<std::size_t>(i)] < b.lo - slack || x[static_cast<std::size_t>(i)] > b.hi + slack) {
            return false;
        }
    }
    return true;
}

Grid::Grid(SpatialDomain domain, std::vector<int> nodes_per_axis) : domain_(std::move(domain)) {
    if (static_cast<int>(nodes_per_axis.size()) != domain_.dimension()) {
        throw SpecError("grid needs one node count per domain axis");
    }
    for (int i = 0; i < domain_.dimension(); ++i) {
        const int n = nodes_per_axis[static_cast<std::size_t>(i)];
        if (n < 3) {
            throw SpecError("grid needs at least 3 nodes per axis");
        }
        nodes_[static_cast<std::size_t>(i)] = n;
        spacing_[static_cast<std::size_t>(i)] = domain_.axis(i).length() / static_cast<double>(n - 1);
    }
}

Point Grid::point(std::size_t idx) const {
    const auto ij = coords(idx);
    Point x{0.0, 0.0};
    for (int a = 0; a < dimension(); ++a) {
        const auto& b = domain_.axis(a);
        const int n = nodes_[static_cast<std::size_t>(a)];
        const int i = ij[static_cast<std::size_t>(a)];
        // Pin the last node to hi exactly.
        x[static_cast<std::size_t>(a)] = (i == n - 1) ? b.hi : b.lo + spacing_[static_cast<std::size_t>(a)] * i;
    }
    return x;
}

bool Grid::is_boundary(std::size_t idx) const {
    const auto ij = coords(idx);
    for (int a = 0; a < dimension(); ++a) {
        const int i = ij[static_cast<std::size_t>(a)];
        if (i == 0 || i == nodes_[static_cast<std::size_t>(a)] - 1) {
            return true;
        }
    }
    return false;
}

double Grid::quadrature_weight(std::size_t idx) const {
    const auto ij = coords(idx);
    double w = 1.0;
    for (int a = 0; a < dimension(); ++a) {
        const int i = ij[static_cast<std::size_t>(a)];
        const double h = spacing_[static_cast<std::size_t>(a)];
        w *= (i == 0 || i == nodes_[static_cast<std::size_t>(a)] - 1) ? 0.5 * h : h;
    }
    return w;
}

Field::Field(Grid grid, int components) : grid_(std::move(grid)), components_(components) {
    if (components < 1) {
        throw SpecError("field needs at least one component");
    }
    values_.assign(static_cast<std::size_t>(components) * grid_.size(), 0.0);
}

std::span<double> Field::component(int k) {
    return std::span<double>(values_).subspan(offset(k), grid_.size());
}

std::span<const double> Field::component(int k) const {
    return std::span<const double>(values_).subspan(offset(k), grid_.size());
}

void Field::gather(std::size_t idx, std::span<double> out) const {
    for (int k = 0; k < components_; ++k) {
        out[static_cast<std::size_t>(k)] = values_[offset(k) + idx];
    }
}

void Field::zero_boundary() {
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
        if (grid_.is_boundary(idx)) {
            for (int k = 0; k < components_; ++k) {
                values_[offset(k) + idx] = 0.0;
            }
        }
    }
}

double Field::boundary_sup() const {
    double s = 0.0;
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
        if (grid_.is_boundary(idx)) {
            for (int k = 0; k < components_; ++k) {
                s = std::max(s, std::abs(values_[offset(k) + idx]));
            }
        }
    }
    return s;
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

DiffusionMatrix DiffusionMatrix::scalar(int n, double d) {
    DiffusionMatrix m;
    m.n = n;
    m(0, 0) = d;
    if (n == 2) {
        m(1, 1) = d;
    }
    return m;
}

double DiffusionMatrix::min_eigenvalue() const {
    if (n == 1) {
        return a[0];
    }
    const double tr = a[0] + a[3];
    const double diff = a[0] - a[3];
    const double disc = std::sqrt(diff * diff + 4.0 * a[1] * a[2]);
    return 0.5 * (tr - disc);
}

double DiffusionMatrix::max_eigenvalue() const {
    if (n == 1) {
        return a[0];
    }
    const double tr = a[0] + a[3];
    const double diff = a[0] - a[3];
    const double disc = std::sqrt(diff * diff + 4.0 * a[1] * a[2]);
    return 0.5 * (tr + disc);
}

LVCoefficients LVCoefficients::two_species(double d1, double d2, ScalarField beta, ScalarField gamma,
                                           ScalarField delta, ScalarField rho, ScalarField sigma,
                                           ScalarField theta) {
    LVCoefficients lv;
    lv.species = 2;
    lv.diffusion = {d1, d2};
    lv.growth = {std::move(beta), std::move(rho)};
    lv.interaction = {{std::move(gamma), std::move(delta)}, {std::move(sigma), std::move(theta)}};
    return lv;
}

void LVCoefficients::validate() const {
    const auto m = static_cast<std::size_t>(species);
    if (species < 1) {
        throw SpecError("LV model needs at least one species");
    }
    if (diffusion.size() != m || growth.size() != m || interaction.size() != m) {
        throw SpecError("LV coefficient arrays must have one entry per species");
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (!(diffusion[k] > 0.0)) {
            throw SpecError("LV diffusion constants must be positive");
        }
        if (!growth[k] || interaction[k].size() != m) {
            throw SpecError("LV interaction matrix must be m x m with every entry set");
        }
        for (const auto& g : interaction[k]) {
            if (!g) {
                throw SpecError("LV interaction matrix must be m x m with every entry set");
            }
        }
    }
}

void LVCoefficients::source(double t, const Point& x, std::span<const double> u, std::span<double> out) const {
    const auto m = static_cast<std::size_t>(species);
    for (std::size_t k = 0; k < m; ++k) {
        // Factored so the value at u^k = 0 is exactly 0.
        double g = growth[k](t, x);
        for (std::size_t i = 0; i < m; ++i) {
            g -= interaction[k][i](t, x) * u[i];
        }
        out[k] = u[k] * g;
    }
}

std::vector<SignViolation> sample_lv_signs(const LVCoefficients& lv, const Grid& grid,
                                           std::span<const double> times) {
    std::vector<SignViolation> out;
    const auto m = static_cast<std::size_t>(lv.species);
    for (double t : times) {
        for (std::size_t idx = 0; idx < grid.size(); ++idx) {
            const Point x = grid.point(idx);
            for (std::size_t k = 0; k < m; ++k) {
                const double b = lv.growth[k](t, x);
                if (b < 0.0) {
                    out.push_back({"beta_" + std::to_string(k + 1), t, x, b});
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double g = lv.interaction[k][i](t, x);
                    if (g < 0.0) {
                        out.push_back({"gamma_" + std::to_string(k + 1) + std::to_string(i + 1), t, x, g});
                    }
                }
            }
        }
    }
    return out;
}

void ProblemSpec::validate() const {
    if (!(horizon > 0.0)) {
        throw SpecError("horizon T must be positive");
    }
    if (!(initial.grid().domain() == domain)) {
        throw SpecError("initial field grid does not belong to the problem domain");
    }
    if (initial.components() != coefficients.components) {
        throw SpecError("initial field component count does not match the coefficients");
    }
    if (coefficients.dimension != domain.dimension()) {
        throw SpecError("coefficient dimension does not match the domain");
    }
    if (!coefficients.diffusion || !coefficients.source) {
        throw SpecError("diffusion and source evaluators are required");
    }
    if (!initial.all_finite()) {
        throw SpecError("initial data must be finite");
    }
    if (domain.boundary() == BoundaryKind::dirichlet_zero && initial.boundary_sup() != 0.0) {
        throw SpecError("initial data must vanish on the boundary of a dirichlet_zero domain");
    }
}

DiffusionMatrix checked_diffusion(const CoefficientSet& coefficients, double t, const Point& x,
                                  std::span<const double> u, int component) {
    DiffusionMatrix a = coefficients.diffusion(t, x, u, component);
    a.n = coefficients.dimension;
    for (int i = 0; i < a.n; ++i) {
        for (int j = 0; j < a.n; ++j) {
            if (!std::isfinite(a(i, j))) {
                throw CoefficientError("diffusion matrix has a non-finite entry");
            }
        }
    }
    if (a.n == 2) {
        const double scale = std::max({std::abs(a(0, 0)), std::abs(a(1, 1)), std::abs(a(0, 1)),
                                       std::abs(a(1, 0)), std::numeric_limits<double>::min()});
        if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * scale) {
            throw CoefficientError("diffusion matrix is not symmetric");
        }
        const double off = 0.5 * (a(0, 1) + a(1, 0));
        a(0, 1) = off;
        a(1, 0) = off;
    }
    return a;
}

CoefficientValues evaluate_coefficients(const ProblemSpec& spec, double t, const Point& x,
                                        std::span<const double> u, std::span<const double> p) {
    const auto& cs = spec.coefficients;
    if (!spec.domain.contains(x)) {
        throw SpecError("evaluation point lies outside the domain");
    }
    if (t < 0.0 || t > spec.horizon) {
        throw SpecError("evaluation time lies outside [0, T]");
    }
    CoefficientValues v;
    v.diffusion.reserve(static_cast<std::size_t>(cs.components));
    for (int k = 0; k < cs.components; ++k) {
        v.diffusion.push_back(checked_diffusion(cs, t, x, u, k));
    }
    v.drift.assign(static_cast<std::size_t>(cs.dimension), 0.0);
    if (cs.has_drift()) {
        cs.drift(t, x, u, p, v.drift);
    }
    v.source.assign(static_cast<std::size_t>(cs.components), 0.0);
    cs.source(t, x, u, p, v.source);
    auto finite = [](double d) { return std::isfinite(d); };
    if (!std::all_of(v.drift.begin(), v.drift.end(), finite) ||
        !std::all_of(v.source.begin(), v.source.end(), finite)) {
        throw CoefficientError("coefficient evaluator returned a non-finite value");
    }
    return v;
}

ProblemSpec build_lv_problem(const LVCoefficients& lv, const SpatialDomain& domain, const Field& initial,
                             double horizon) {
    lv.validate();
    if (initial.components() != lv.species) {
        throw SpecError("initial data has " + std::to_string(initial.components()) + " components but the LV model has " +
                        std::to_string(lv.species) + " species");
    }
    if (!initial.all_finite()) {
        throw SpecError("initial data must be finite");
    }
    CoefficientSet cs;
    cs.components = lv.species;
    cs.dimension = domain.dimension();
    const int n = domain.dimension();
    auto d = lv.diffusion;
    cs.diffusion = [d, n](double, const Point&, std::span<const double>, int k) {
        return DiffusionMatrix::scalar(n, d[static_cast<std::size_t>(k)]);
    };
    cs.source = [lv](double t, const Point& x, std::span<const double> u, std::span<const double>,
                     std::span<double> out) { lv.source(t, x, u, out); };
    cs.gradient_dependent = false;
    cs.constant_diffusion = lv.diffusion;

    ProblemSpec spec{domain, std::move(cs), initial, horizon, lv};
    spec.validate();
    return spec;
}

Field discretize(const Grid& grid, int components, const InitialProfile& profile) {
    Field f(grid, components);
    std::vector<double> buf(static_cast<std::size_t>(components));
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        profile(grid.point(idx), buf);
        for (int k = 0; k < components; ++k) {
            f.at(k, idx) = buf[static_cast<std::size_t>(k)];
        }
    }
    if (grid.domain().boundary() == BoundaryKind::dirichlet_zero) {
        f.zero_boundary();
    }
    return f;
}

RadialCutoff::RadialCutoff(double radius, double transition_width) : radius_(radius), width_(transition_width) {
    if (!(transition_width > 0.0) || !(radius > transition_width)) {
        throw SpecError("cutoff requires r > transition_width > 0");
    }
}

double RadialCutoff::profile(double rho) const {
    const double s = std::clamp((radius_ - rho) / width_, 0.0, 1.0);
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

RadialCutoff build_cutoff(double radius, double transition_width) { return {radius, transition_width}; }

void Majorants::validate(std::span<const double> u_norm_samples) const {
    if (!(kappa > 0.0) || !(C1 > 0.0) || !(C2 > 0.0)) {
        throw SpecError("majorants need kappa > 0, C1 > 0 and C2 > 0");
    }
    if ((d1 && *d1 < 0.0) || (d2 && *d2 < 0.0)) {
        throw SpecError("dissipativity constants must be non-negative");
    }
    std::vector<double> s(u_norm_samples.begin(), u_norm_samples.end());
    std::sort(s.begin(), s.end());
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (mu && mu(s[i]) < mu(s[i - 1])) {
            std::ostringstream os;
            os << "mu must be non-decreasing; decreases at |u| = " << s[i];
            throw SpecError(os.str());
        }
        if (mu_hat && mu_hat(s[i]) > mu_hat(s[i - 1])) {
            std::ostringstream os;
            os << "mu_hat must be non-increasing; increases at |u| = " << s[i];
            throw SpecError(os.str());
        }
    }
}

}  // namespace parapos
