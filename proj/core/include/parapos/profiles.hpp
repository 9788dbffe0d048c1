#pragma once

#include <vector>

#include "parapos/model.hpp"

namespace parapos {

/// Scalar initial-data shapes. Each returns one component; `stack` combines them.
namespace profiles {

using Scalar = std::function<double(const Point&)>;

Scalar zero();
/// amplitude * prod_i sin(mode_i * pi * (x_i - lo_i) / L_i) over the domain box.
Scalar sine(const SpatialDomain& domain, double amplitude, std::array<int, 2> modes = {1, 1});
Scalar gaussian(double amplitude, Point center, double width);
/// amplitude * (1 - |x - c|^2 / R^2)^power inside the ball, 0 outside.
Scalar bump(double amplitude, Point center, double radius, int power = 3);
/// amplitude on the box shrunk by `ramp`, quintic smoothstep to 0 at the box edges.
Scalar plateau(const SpatialDomain& domain, double amplitude, double ramp);
/// Piecewise-linear tent with peak at `peak` (1D only), zero at the interval ends.
Scalar hat(const SpatialDomain& domain, double amplitude, double peak);

InitialProfile stack(std::vector<Scalar> components);

}  // namespace profiles

/// Positive solution of d * Lap_h psi + psi * (rate - crowding * psi) = 0 with zero
/// boundary values, where Lap_h is the same second-order stencil the solvers use.
/// Coefficients are evaluated at time t. Newton iteration from rate/crowding * sine;
/// throws NonConvergence if the residual does not fall below `tolerance`.
std::vector<double> scalar_steady_state(const Grid& grid, double d, const ScalarField& rate,
                                        const ScalarField& crowding, double t = 0.0, double tolerance = 1e-13);

/// Discrete Laplacian (3-point / 5-point) at interior nodes, 0 on boundary nodes.
std::vector<double> discrete_laplacian(const Grid& grid, std::span<const double> values);

}  // namespace parapos
