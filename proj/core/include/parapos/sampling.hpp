#pragma once

#include <cstdint>
#include <vector>

#include "parapos/model.hpp"

namespace parapos {

/// Sample counts and radii for the hypothesis checks over [0,T] x F x {|u| <= C1} x {|p| <= C2}.
struct SampleBudget {
    int t_points = 5;
    int x_points = 9;   ///< per spatial axis
    int u_points = 32;
    int p_points = 8;
    double u_radius = 1.0;  ///< C1
    double p_radius = 1.0;  ///< C2
    std::uint64_t seed = 1;

    void validate() const;
};

/// Deterministic, prefix-nested sample sets. Every sequence is the leading part of a
/// fixed infinite sequence (anchors first, then a shifted Halton sequence), so a larger
/// budget always contains the samples of a smaller one.
class SamplePlan {
public:
    SamplePlan(const SampleBudget& budget, const SpatialDomain& domain, double horizon, int components);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Point>& points() const { return points_; }

    /// u in the closed ball of radius C1.
    const std::vector<std::vector<double>>& states() const { return states_; }
    /// u in the non-negative orthant of the ball; a subset of states().
    const std::vector<std::vector<double>>& orthant_states() const { return orthant_; }
    /// p in the ball of radius C2 in R^{m x n}.
    const std::vector<std::vector<double>>& gradients() const { return gradients_; }

private:
    std::vector<double> times_;
    std::vector<Point> points_;
    std::vector<std::vector<double>> states_;
    std::vector<std::vector<double>> orthant_;
    std::vector<std::vector<double>> gradients_;
};

/// Radical inverse of i in the given base.
double radical_inverse(std::uint64_t i, unsigned base);

}  // namespace parapos
