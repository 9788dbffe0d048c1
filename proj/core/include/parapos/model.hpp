#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parapos/errors.hpp"

namespace parapos {

/// Point in R^n, n <= 2. Unused trailing coordinates are zero, so Euclidean
/// norms are correct in every dimension.
using Point = std::array<double, 2>;

double norm(const Point& x);

enum class BoundaryKind { dirichlet_zero, cauchy_nested };

std::string to_string(BoundaryKind kind);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// An interval (n = 1) or axis-aligned rectangle (n = 2).
///
/// A `cauchy_nested` domain stands for the whole space approximated by boxes
/// [-r, r]^n; it carries the radius schedule and cutoff transition width and its
/// bounds are the largest box.
class SpatialDomain {
public:
    SpatialDomain(std::vector<Interval> bounds, BoundaryKind kind = BoundaryKind::dirichlet_zero);

    static SpatialDomain cauchy(int dimension, std::vector<double> radii, double transition_width);

    int dimension() const { return static_cast<int>(bounds_.size()); }
    const Interval& axis(int i) const { return bounds_.at(static_cast<std::size_t>(i)); }
    BoundaryKind boundary() const { return kind_; }
    bool contains(const Point& x, double slack = 1e-12) const;

    const std::vector<double>& cutoff_radii() const { return radii_; }
    double transition_width() const { return transition_width_; }

    bool operator==(const SpatialDomain&) const = default;

private:
    SpatialDomain() = default;

    std::vector<Interval> bounds_;
    BoundaryKind kind_ = BoundaryKind::dirichlet_zero;
    std::vector<double> radii_;
    double transition_width_ = 0.0;
};

/// Uniform tensor grid including boundary nodes. Node (i, j) has flat index i + nx * j.
class Grid {
public:
    Grid(SpatialDomain domain, std::vector<int> nodes_per_axis);

    const SpatialDomain& domain() const { return domain_; }
    int dimension() const { return domain_.dimension(); }
    int nodes(int axis) const { return nodes_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    std::size_t size() const { return static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(nodes_[1]); }

    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(j);
    }
    std::array<int, 2> coords(std::size_t idx) const {
        return {static_cast<int>(idx % static_cast<std::size_t>(nodes_[0])),
                static_cast<int>(idx / static_cast<std::size_t>(nodes_[0]))};
    }
    Point point(std::size_t idx) const;
    bool is_boundary(std::size_t idx) const;

    /// Trapezoid quadrature weight of a node (product of per-axis weights).
    double quadrature_weight(std::size_t idx) const;

    bool operator==(const Grid&) const = default;

private:
    SpatialDomain domain_;
    std::array<int, 2> nodes_{1, 1};
    std::array<double, 2> spacing_{0.0, 0.0};
};

/// m scalar arrays on a grid, stored component-major.
class Field {
public:
    Field(Grid grid, int components);

    const Grid& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t nodes() const { return grid_.size(); }

    std::span<double> component(int k);
    std::span<const double> component(int k) const;

    double& at(int k, std::size_t idx) { return values_[offset(k) + idx]; }
    double at(int k, std::size_t idx) const { return values_[offset(k) + idx]; }

    /// State vector u(x) at one node.
    void gather(std::size_t idx, std::span<double> out) const;

    std::span<double> raw() { return values_; }
    std::span<const double> raw() const { return values_; }

    void zero_boundary();
    /// max over boundary nodes of |u^k|, all components.
    double boundary_sup() const;
    bool all_finite() const;

private:
    std::size_t offset(int k) const { return static_cast<std::size_t>(k) * grid_.size(); }

    Grid grid_;
    int components_;
    std::vector<double> values_;
};

/// Symmetric n x n matrix with n <= 2, stored dense.
struct DiffusionMatrix {
    int n = 1;
    std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

    static DiffusionMatrix scalar(int n, double d);

    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * 2 + j)]; }
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * 2 + j)]; }

    double min_eigenvalue() const;
    double max_eigenvalue() const;
};

/// A(t, x, u) for component k. Components sharing one matrix ignore `component`.
using DiffusionFn =
    std::function<DiffusionMatrix(double t, const Point& x, std::span<const double> u, int component)>;
/// b(t, x, u, p) written into `out` (length n). p is row-major m x n: p[k * n + i] = d_i u^k.
using DriftFn = std::function<void(double t, const Point& x, std::span<const double> u,
                                   std::span<const double> p, std::span<double> out)>;
/// c(t, x, u, p) written into `out` (length m).
using SourceFn = std::function<void(double t, const Point& x, std::span<const double> u,
                                    std::span<const double> p, std::span<double> out)>;
/// Scalar coefficient of (t, x).
using ScalarField = std::function<double(double t, const Point& x)>;
/// Initial profile x -> m-vector.
using InitialProfile = std::function<void(const Point& x, std::span<double> out)>;

/// Evaluators for a_ij (per component), b_i and c^k.
struct CoefficientSet {
    int components = 1;
    int dimension = 1;
    DiffusionFn diffusion;
    DriftFn drift;  ///< empty means b = 0
    SourceFn source;
    bool gradient_dependent = false;
    /// Set when every component uses d_k * I with d_k constant in (t, x, u).
    std::optional<std::vector<double>> constant_diffusion;

    bool has_drift() const { return static_cast<bool>(drift); }
};

/// Lotka-Volterra coefficients: d_k, beta_k(t,x), gamma_ki(t,x).
struct LVCoefficients {
    int species = 0;
    std::vector<double> diffusion;
    std::vector<ScalarField> growth;
    std::vector<std::vector<ScalarField>> interaction;

    /// Two-species form with (beta, gamma, delta, rho, sigma, theta)
    /// = (beta_1, gamma_11, gamma_12, beta_2, gamma_21, gamma_22).
    static LVCoefficients two_species(double d1, double d2, ScalarField beta, ScalarField gamma,
                                      ScalarField delta, ScalarField rho, ScalarField sigma,
                                      ScalarField theta);

    /// Throws SpecError on size mismatches or non-positive d_k.
    void validate() const;

    /// u^k (beta_k - sum_i gamma_ki u^i)
    void source(double t, const Point& x, std::span<const double> u, std::span<double> out) const;
};

/// A sampled coefficient value that was negative.
struct SignViolation {
    std::string coefficient;
    double t = 0.0;
    Point x{};
    double value = 0.0;
};

/// Samples every beta_k and gamma_ki on the grid nodes at the given times and
/// reports negative values. Values are never clamped.
std::vector<SignViolation> sample_lv_signs(const LVCoefficients& lv, const Grid& grid,
                                           std::span<const double> times);

/// Full description of an instance of the parabolic problem.
struct ProblemSpec {
    SpatialDomain domain;
    CoefficientSet coefficients;
    Field initial;
    double horizon = 1.0;
    std::optional<LVCoefficients> lv;

    const Grid& grid() const { return initial.grid(); }
    void validate() const;
};

struct CoefficientValues {
    std::vector<DiffusionMatrix> diffusion;  ///< one per component
    std::vector<double> drift;               ///< length n
    std::vector<double> source;              ///< length m
};

/// Symmetrized diffusion for one component. Asymmetry above 1e-12 relative or
/// non-finite entries raise CoefficientError.
DiffusionMatrix checked_diffusion(const CoefficientSet& coefficients, double t, const Point& x,
                                  std::span<const double> u, int component);

CoefficientValues evaluate_coefficients(const ProblemSpec& spec, double t, const Point& x,
                                        std::span<const double> u, std::span<const double> p);

ProblemSpec build_lv_problem(const LVCoefficients& lv, const SpatialDomain& domain, const Field& initial,
                             double horizon);

/// Samples `profile` at every node; boundary nodes are set to zero on Dirichlet domains.
Field discretize(const Grid& grid, int components, const InitialProfile& profile);

/// C^2 radial cutoff: 1 for |x| <= r - w, 0 for |x| >= r, quintic smoothstep between.
class RadialCutoff {
public:
    RadialCutoff(double radius, double transition_width);

    double radius() const { return radius_; }
    double transition_width() const { return width_; }
    double profile(double rho) const;
    double operator()(const Point& x) const { return profile(norm(x)); }

private:
    double radius_;
    double width_;
};

RadialCutoff build_cutoff(double radius, double transition_width);

/// Growth envelopes used by the parabolicity and growth checks.
struct Majorants {
    double kappa = 0.0;
    std::function<double(double)> mu;      ///< upper envelope of A, function of |u|
    std::function<double(double)> mu_hat;  ///< lower envelope of A, function of |u|
    std::function<double(double)> theta1;
    std::function<double(double, double)> theta2;
    std::optional<double> d1;
    std::optional<double> d2;
    double C1 = 1.0;
    double C2 = 1.0;

    /// Structural invariants plus monotonicity of mu / mu_hat on the given |u| samples.
    void validate(std::span<const double> u_norm_samples) const;
};

}  // namespace parapos
