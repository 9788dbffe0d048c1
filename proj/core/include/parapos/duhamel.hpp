#pragma once

#include <vector>

#include "parapos/fdm.hpp"
#include "parapos/model.hpp"

namespace parapos {

/// p_t(x) = (2 pi d t)^{-n/2} exp(-|x|^2 / (2 d t)), the density of variance d t per axis.
/// It is the fundamental solution of d_t u = (d / 2) Lap u, so the equation d_t u = D Lap u
/// uses d = 2 D. Throws DomainError for t <= 0 or d <= 0.
double heat_kernel(double t, const Point& x, double d, int dimension = 1);

struct KernelConfig {
    std::vector<double> diffusion;  ///< D_k of d_t u^k = D_k Lap u^k; empty means take them from the ProblemSpec
    double truncation = 8.0;        ///< kernel support in standard deviations
    int max_iterations = 50;        ///< Picard cap per window
    double tolerance = 1e-11;       ///< Picard stop on sup-change, relative to 1 + sup|v|
    double dt = 1e-3;               ///< time step of the source history
    int max_window_steps = 50;
    int snapshot_stride = 10;

    void validate() const;
};

/// Source values f(s_i, .) at increasing times s_0 = 0 < ... < s_M = t.
struct SourceHistory {
    std::vector<double> times;
    std::vector<Field> values;
};

/// Applies P_tau componentwise to `field` (zero extension outside the box, trapezoid in
/// space). Discrete weights are normalised to unit mass, which only matters when the
/// kernel is narrower than the grid spacing. Boundary nodes of the result are zero.
Field heat_evolve(const Field& field, double tau, const KernelConfig& config);

/// u(t) = P_t phi + int_0^t P_{t-s} f(s) ds with the trapezoid rule in s. Every term is
/// one direct kernel application; composing many short kernels would lose variance once
/// they are narrower than the grid. An empty history means f = 0; t = 0 returns phi.
Field duhamel_apply(const Field& phi, const SourceHistory& history, double t, const KernelConfig& config);

struct PicardResult {
    Trajectory trajectory;
    int iterations = 0;                        ///< summed over windows
    std::vector<std::vector<double>> changes;  ///< sup-change per iteration, one list per window
    bool converged = true;
    double window_length = 0.0;
    double jacobian_bound = 0.0;
};

/// Fixed point of v -> P_t phi + int_0^t P_{t-s} c(s, ., |v|) ds by Picard iteration,
/// marching over windows no longer than 1 / (2 sup |d c / d u|). Requires constant
/// per-component diffusion, no drift and a gradient-independent source.
/// Throws NonContraction when the sup-change grows three times in a row.
PicardResult picard_solve(const ProblemSpec& spec, const KernelConfig& config);

}  // namespace parapos
