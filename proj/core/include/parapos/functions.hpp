#pragma once

#include <filesystem>
#include <vector>

#include "parapos/model.hpp"

namespace parapos {

/// Time factor of a separable coefficient.
struct TimeProfile {
    enum class Kind { constant, exponential, power };
    Kind kind = Kind::constant;
    double a = 1.0;     ///< constant value / asymptote
    double b = 0.0;     ///< transient amplitude
    double rate = 1.0;  ///< decay rate (exponential) or exponent (power)

    /// constant: a; exponential: a + b e^{-rate t}; power: a + b (1 + t)^{-rate}
    double operator()(double t) const;
    double limit() const { return a; }
};

/// Space factor of a separable coefficient. Coordinates are absolute.
struct SpaceProfile {
    enum class Kind { constant, sine, linear, gaussian };
    Kind kind = Kind::constant;
    double base = 1.0;
    double amplitude = 0.0;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> slope{0.0, 0.0};
    std::array<double, 2> wavenumber{0.0, 0.0};
    double width = 1.0;

    /// constant: base
    /// sine:     base + amplitude * prod_i sin(wavenumber_i * (x_i - center_i))
    /// linear:   base + slope . (x - center)
    /// gaussian: base + amplitude * exp(-|x - center|^2 / (2 width^2))
    double operator()(const Point& x) const;
};

ScalarField make_constant(double value);
ScalarField make_separable(TimeProfile time, SpaceProfile space);

/// Coefficient tabulated on a rectilinear (t, x[, y]) lattice with multilinear
/// interpolation. Queries outside the lattice are clamped to its hull.
class TabulatedField {
public:
    TabulatedField(int dimension, std::vector<std::vector<double>> axes, std::vector<double> values);

    /// CSV with a header row; columns t,x,value (1D) or t,x,y,value (2D). Rows may
    /// come in any order but must cover the full lattice exactly once.
    static TabulatedField from_csv(const std::filesystem::path& path, int dimension);

    double operator()(double t, const Point& x) const;

    int dimension() const { return dimension_; }
    const std::vector<std::vector<double>>& axes() const { return axes_; }

private:
    int dimension_;
    std::vector<std::vector<double>> axes_;  ///< t, x[, y]
    std::vector<double> values_;             ///< row-major over (t, x[, y]), last axis fastest
};

/// a0 + a1 s + a2 s^2 + ...
std::function<double(double)> make_polynomial(std::vector<double> coefficients);

}  // namespace parapos
