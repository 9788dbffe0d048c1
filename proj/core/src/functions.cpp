#include "parapos/functions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace parapos {

double TimeProfile::operator()(double t) const {
    switch (kind) {
        case Kind::constant:
            return a;
        case Kind::exponential:
            return a + b * std::exp(-rate * t);
        case Kind::power:
            return a + b * std::pow(1.0 + t, -rate);
    }
    return a;
}

double SpaceProfile::operator()(const Point& x) const {
    switch (kind) {
        case Kind::constant:
            return base;
        case Kind::sine: {
            double p = 1.0;
            for (std::size_t i = 0; i < 2; ++i) {
                if (wavenumber[i] != 0.0) {
                    p *= std::sin(wavenumber[i] * (x[i] - center[i]));
                }
            }
            return base + amplitude * p;
        }
        case Kind::linear:
            return base + slope[0] * (x[0] - center[0]) + slope[1] * (x[1] - center[1]);
        case Kind::gaussian: {
            const double dx = x[0] - center[0];
            const double dy = x[1] - center[1];
            return base + amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        }
    }
    return base;
}

ScalarField make_constant(double value) {
    return [value](double, const Point&) { return value; };
}

ScalarField make_separable(TimeProfile time, SpaceProfile space) {
    return [time, space](double t, const Point& x) { return time(t) * space(x); };
}

TabulatedField::TabulatedField(int dimension, std::vector<std::vector<double>> axes, std::vector<double> values)
    : dimension_(dimension), axes_(std::move(axes)), values_(std::move(values)) {
    if (dimension_ < 1 || dimension_ > 2 || static_cast<int>(axes_.size()) != dimension_ + 1) {
        throw SpecError("tabulated coefficient needs axes t, x[, y]");
    }
    std::size_t expected = 1;
    for (const auto& ax : axes_) {
        if (ax.empty()) {
            throw SpecError("tabulated coefficient axis is empty");
        }
        for (std::size_t i = 1; i < ax.size(); ++i) {
            if (!(ax[i] > ax[i - 1])) {
                throw SpecError("tabulated coefficient axes must increase strictly");
            }
        }
        expected *= ax.size();
    }
    if (values_.size() != expected) {
        throw SpecError("tabulated coefficient values do not cover the lattice");
    }
}

TabulatedField TabulatedField::from_csv(const std::filesystem::path& path, int dimension) {
    std::ifstream in(path);
    if (!in) {
        throw SpecError("cannot open coefficient table " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SpecError("coefficient table " + path.string() + " is empty");
    }
    const std::size_t cols = static_cast<std::size_t>(dimension) + 2;
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw SpecError(path.string() + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
            }
        }
        if (row.size() != cols) {
            throw SpecError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                            " columns");
        }
        rows.push_back(std::move(row));
    }
    std::vector<std::vector<double>> axes(cols - 1);
    for (std::size_t a = 0; a + 1 < cols; ++a) {
        for (const auto& r : rows) {
            axes[a].push_back(r[a]);
        }
        std::sort(axes[a].begin(), axes[a].end());
        axes[a].erase(std::unique(axes[a].begin(), axes[a].end()), axes[a].end());
    }
    std::size_t total = 1;
    for (const auto& ax : axes) {
        total *= ax.size();
    }
    if (rows.size() != total) {
        throw SpecError("coefficient table " + path.string() + " does not form a full lattice");
    }
    std::vector<double> values(total, 0.0);
    std::vector<bool> seen(total, false);
    for (const auto& r : rows) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a + 1 < cols; ++a) {
            const auto pos = static_cast<std::size_t>(
                std::lower_bound(axes[a].begin(), axes[a].end(), r[a]) - axes[a].begin());
            flat = flat * axes[a].size() + pos;
        }
        if (seen[flat]) {
            throw SpecError("coefficient table " + path.string() + " repeats a lattice point");
        }
        seen[flat] = true;
        values[flat] = r[cols - 1];
    }
    return TabulatedField(dimension, std::move(axes), std::move(values));
}

double TabulatedField::operator()(double t, const Point& x) const {
    const std::size_t naxes = axes_.size();
    std::array<std::size_t, 3> lo{};
    std::array<double, 3> frac{};
    std::array<double, 3> q{t, x[0], x[1]};
    for (std::size_t a = 0; a < naxes; ++a) {
        const auto& ax = axes_[a];
        if (ax.size() == 1) {
            lo[a] = 0;
            frac[a] = 0.0;
            continue;
        }
        const double v = std::clamp(q[a], ax.front(), ax.back());
        auto it = std::upper_bound(ax.begin(), ax.end(), v);
        std::size_t i = static_cast<std::size_t>(it - ax.begin());
        i = std::clamp<std::size_t>(i, 1, ax.size() - 1) - 1;
        lo[a] = i;
        frac[a] = (v - ax[i]) / (ax[i + 1] - ax[i]);
    }
    double result = 0.0;
    const std::size_t corners = std::size_t{1} << naxes;
    for (std::size_t c = 0; c < corners; ++c) {
        double w = 1.0;
        std::size_t flat = 0;
        for (std::size_t a = 0; a < naxes; ++a) {
            const bool up = ((c >> a) & 1U) != 0;
            std::size_t i = lo[a];
            if (up) {
                if (axes_[a].size() == 1) {
                    w = 0.0;
                }
                i = std::min(i + 1, axes_[a].size() - 1);
                w *= frac[a];
            } else {
                w *= 1.0 - frac[a];
            }
            flat = flat * axes_[a].size() + i;
        }
        if (w != 0.0) {
            result += w * values_[flat];
        }
    }
    return result;
}

std::function<double(double)> make_polynomial(std::vector<double> coefficients) {
    return [c = std::move(coefficients)](double s) {
        double v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            v = v * s + *it;
        }
        return v;
    };
}

}  // namespace parapos
