#include "parapos/sampling.hpp"

#include <array>
#include <cmath>
#include <random>

namespace parapos {

namespace {

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

// Portable uniform [0,1) from a 64-bit engine (std distributions are implementation-defined).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double shifted(double v, double shift) {
    const double s = v + shift;
    return s >= 1.0 ? s - 1.0 : s;
}

std::vector<double> interval_sequence(double lo, double hi, int count, double shift, unsigned base) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    out.push_back(lo);
    if (count > 1) {
        out.push_back(hi);
    }
    for (std::uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
        out.push_back(lo + (hi - lo) * shifted(radical_inverse(i, base), shift));
    }
    return out;
}

class HaltonStream {
public:
    HaltonStream(int dim, std::mt19937_64& rng) : dim_(dim), shift_(static_cast<std::size_t>(dim)), rng_(rng) {
        for (auto& s : shift_) {
            s = unit(rng);
        }
    }

    std::vector<double> next() {
        std::vector<double> v(static_cast<std::size_t>(dim_));
        ++index_;
        for (int d = 0; d < dim_; ++d) {
            const auto i = static_cast<std::size_t>(d);
            // Beyond the prime table the stream falls back to the seeded engine.
            v[i] = i < kPrimes.size() ? shifted(radical_inverse(index_, kPrimes[i]), shift_[i]) : unit(rng_);
        }
        return v;
    }

private:
    int dim_;
    std::vector<double> shift_;
    std::mt19937_64& rng_;
    std::uint64_t index_ = 0;
};

double euclid(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return std::sqrt(s);
}

std::vector<std::vector<double>> ball_sequence(int dim, double radius, bool orthant, int count, std::mt19937_64& rng) {
    std::vector<std::vector<double>> out;
    const auto d = static_cast<std::size_t>(dim);
    auto push = [&](std::vector<double> v) {
        if (static_cast<int>(out.size()) < count) {
            out.push_back(std::move(v));
        }
    };
    push(std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<double> e(d, 0.0);
        e[k] = radius;
        push(e);
        if (!orthant) {
            e[k] = -radius;
            push(e);
        }
        // Near the origin, where ratios such as (c,u)/|u|^2 attain their supremum.
        e[k] = 1e-6 * radius;
        push(e);
    }
    push(std::vector<double>(d, radius / std::sqrt(static_cast<double>(dim))));
    HaltonStream halton(dim, rng);
    while (static_cast<int>(out.size()) < count) {
        auto h = halton.next();
        for (auto& v : h) {
            v = orthant ? radius * v : radius * (2.0 * v - 1.0);
        }
        if (euclid(h) <= radius) {
            out.push_back(std::move(h));
        }
    }
    return out;
}

}  // namespace

double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

void SampleBudget::validate() const {
    if (t_points < 2 || x_points < 2 || u_points < 2 || p_points < 2) {
        throw SpecError("sample budget counts must be at least 2");
    }
    if (!(u_radius > 0.0) || !(p_radius > 0.0)) {
        throw SpecError("sample radii C1 and C2 must be positive");
    }
}

SamplePlan::SamplePlan(const SampleBudget& budget, const SpatialDomain& domain, double horizon, int components) {
    budget.validate();
    // Independent engines per axis keep each sequence a prefix of a fixed sequence.
    std::mt19937_64 rng_t(budget.seed);
    std::mt19937_64 rng_x(budget.seed ^ 0x9e3779b97f4a7c15ULL);
    std::mt19937_64 rng_u(budget.seed ^ 0xbf58476d1ce4e5b9ULL);
    std::mt19937_64 rng_uo(budget.seed ^ 0x94d049bb133111ebULL);
    std::mt19937_64 rng_p(budget.seed ^ 0x2545f4914f6cdd1dULL);

    times_ = interval_sequence(0.0, horizon, budget.t_points, unit(rng_t), 2);

    std::array<std::vector<double>, 2> axes;
    for (int a = 0; a < domain.dimension(); ++a) {
        axes[static_cast<std::size_t>(a)] =
            interval_sequence(domain.axis(a).lo, domain.axis(a).hi, budget.x_points, unit(rng_x), 3);
    }
    if (domain.dimension() == 1) {
        for (double x : axes[0]) {
            points_.push_back({x, 0.0});
        }
    } else {
        for (double y : axes[1]) {
            for (double x : axes[0]) {
                points_.push_back({x, y});
            }
        }
    }

    orthant_ = ball_sequence(components, budget.u_radius, true, budget.u_points, rng_uo);
    states_ = orthant_;
    auto full = ball_sequence(components, budget.u_radius, false, budget.u_points, rng_u);
    states_.insert(states_.end(), full.begin(), full.end());

    gradients_ = ball_sequence(components * domain.dimension(), budget.p_radius, false, budget.p_points, rng_p);
}

}  // namespace parapos
