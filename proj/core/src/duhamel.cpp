#include "parapos/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace parapos {

namespace {

// Symmetric 1D weights w[0..K] of the discrete kernel with variance 2 D tau, unit total mass.
std::vector<double> axis_weights(double tau, double diffusion, double h, double truncation, int max_offset) {
    const double var = 2.0 * diffusion * tau;
    const double sigma = std::sqrt(var);
    const int K = std::min(max_offset, static_cast<int>(std::ceil(truncation * sigma / h)));
    std::vector<double> w(static_cast<std::size_t>(K) + 1);
    double mass = 0.0;
    for (int k = 0; k <= K; ++k) {
        const double x = k * h;
        w[static_cast<std::size_t>(k)] = std::exp(-x * x / (2.0 * var));
        mass += (k == 0 ? 1.0 : 2.0) * w[static_cast<std::size_t>(k)];
    }
    // Discrete normalisation over the untruncated lattice.
    for (int k = K + 1;; ++k) {
        const double x = k * h;
        const double v = std::exp(-x * x / (2.0 * var));
        mass += 2.0 * v;
        if (v < 1e-18 * mass) {
            break;
        }
    }
    for (double& e : w) {
        e /= mass;
    }
    return w;
}

// Convolves one line of values (stride `step`, `count` entries) in place.
void convolve_line(std::span<double> data, std::size_t start, std::size_t step, int count,
                   const std::vector<double>& w, std::vector<double>& scratch) {
    scratch.assign(static_cast<std::size_t>(count), 0.0);
    const int K = static_cast<int>(w.size()) - 1;
    for (int j = 0; j < count; ++j) {
        const double v = data[start + step * static_cast<std::size_t>(j)];
        if (v == 0.0) {
            continue;
        }
        // Trapezoid end weights for the zero-extended integrand.
        const double vj = (j == 0 || j == count - 1) ? 0.5 * v : v;
        const int lo = std::max(0, j - K);
        const int hi = std::min(count - 1, j + K);
        for (int i = lo; i <= hi; ++i) {
            scratch[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(std::abs(i - j))] * vj;
        }
    }
    for (int i = 0; i < count; ++i) {
        data[start + step * static_cast<std::size_t>(i)] = scratch[static_cast<std::size_t>(i)];
    }
}

std::vector<double> resolve_diffusion(const ProblemSpec& spec, const KernelConfig& config) {
    if (!config.diffusion.empty()) {
        if (static_cast<int>(config.diffusion.size()) != spec.coefficients.components) {
            throw SpecError("kernel diffusion count does not match the component count");
        }
        return config.diffusion;
    }
    if (!spec.coefficients.constant_diffusion) {
        throw SpecError("the integral-equation solver needs constant per-component diffusion");
    }
    return *spec.coefficients.constant_diffusion;
}

void add_scaled(Field& target, const Field& x, double s) {
    auto t = target.raw();
    auto v = x.raw();
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] += s * v[i];
    }
}

double sup_abs(const Field& f) {
    double s = 0.0;
    for (double v : f.raw()) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

// Source evaluated at (|v^1|, ..., |v^m|) on every node.
Field source_field(const ProblemSpec& spec, const Field& v, double t) {
    const Grid& g = v.grid();
    const int m = v.components();
    Field f(g, m);
    std::vector<double> u(static_cast<std::size_t>(m));
    std::vector<double> c(static_cast<std::size_t>(m));
    const std::vector<double> p(static_cast<std::size_t>(m * g.dimension()), 0.0);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        v.gather(idx, u);
        for (double& e : u) {
            e = std::abs(e);
        }
        spec.coefficients.source(t, g.point(idx), u, p, c);
        for (int k = 0; k < m; ++k) {
            const double val = c[static_cast<std::size_t>(k)];
            if (!std::isfinite(val)) {
                throw CoefficientError("source evaluator returned a non-finite value");
            }
            f.at(k, idx) = val;
        }
    }
    return f;
}

}  // namespace

double heat_kernel(double t, const Point& x, double d, int dimension) {
    if (!(t > 0.0)) {
        throw DomainError("heat kernel needs t > 0");
    }
    if (!(d > 0.0)) {
        throw DomainError("heat kernel needs d > 0");
    }
    if (dimension < 1 || dimension > 2) {
        throw DomainError("heat kernel dimension must be 1 or 2");
    }
    const double r2 = dimension == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
    const double s = 2.0 * std::numbers::pi * d * t;
    return std::pow(s, -0.5 * dimension) * std::exp(-r2 / (2.0 * d * t));
}

void KernelConfig::validate() const {
    if (!(truncation >= 6.0)) {
        throw SpecError("kernel truncation must be at least 6 standard deviations");
    }
    if (max_iterations < 1) {
        throw SpecError("Picard iteration cap must be at least 1");
    }
    if (!(tolerance > 0.0) || !(dt > 0.0) || max_window_steps < 1 || snapshot_stride < 1) {
        throw SpecError("kernel tolerance, dt, window steps and stride must be positive");
    }
    for (double d : diffusion) {
        if (!(d > 0.0)) {
            throw SpecError("kernel diffusion constants must be positive");
        }
    }
}

Field heat_evolve(const Field& field, double tau, const KernelConfig& config) {
    if (tau < 0.0) {
        throw DomainError("heat evolution needs tau >= 0");
    }
    const Grid& g = field.grid();
    if (static_cast<int>(config.diffusion.size()) != field.components()) {
        throw SpecError("kernel diffusion count does not match the component count");
    }
    Field out = field;
    if (tau == 0.0) {
        out.zero_boundary();
        return out;
    }
    const int nx = g.nodes(0);
    const int ny = g.dimension() == 2 ? g.nodes(1) : 1;
    std::vector<double> scratch;
    for (int k = 0; k < field.components(); ++k) {
        const double d = config.diffusion[static_cast<std::size_t>(k)];
        auto data = out.component(k);
        const auto wx = axis_weights(tau, d, g.spacing(0), config.truncation, nx - 1);
        for (int j = 0; j < ny; ++j) {
            convolve_line(data, g.index(0, j), 1, nx, wx, scratch);
        }
        if (g.dimension() == 2) {
            const auto wy = axis_weights(tau, d, g.spacing(1), config.truncation, ny - 1);
            for (int i = 0; i < nx; ++i) {
                convolve_line(data, g.index(i, 0), static_cast<std::size_t>(nx), ny, wy, scratch);
            }
        }
    }
    out.zero_boundary();
    return out;
}

Field duhamel_apply(const Field& phi, const SourceHistory& history, double t, const KernelConfig& config) {
    config.validate();
    if (t < 0.0) {
        throw DomainError("Duhamel time must be non-negative");
    }
    if (t == 0.0) {
        return phi;
    }
    if (history.times.empty()) {
        return heat_evolve(phi, t, config);
    }
    const auto& s = history.times;
    if (s.size() != history.values.size() || s.size() < 2 || s.front() != 0.0 ||
        std::abs(s.back() - t) > 1e-12 * std::max(1.0, t)) {
        throw SpecError("source history must run from 0 to t with one field per time");
    }
    // Trapezoid rule in s for the integrand P_{t - s} f(s), every kernel applied directly.
    Field w = heat_evolve(phi, t, config);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i > 0 && !(s[i] > s[i - 1])) {
            throw SpecError("source history times must increase");
        }
        double weight = 0.0;
        if (i > 0) {
            weight += 0.5 * (s[i] - s[i - 1]);
        }
        if (i + 1 < s.size()) {
            weight += 0.5 * (s[i + 1] - s[i]);
        }
        add_scaled(w, heat_evolve(history.values[i], std::max(0.0, t - s[i]), config), weight);
    }
    w.zero_boundary();
    return w;
}

PicardResult picard_solve(const ProblemSpec& spec, const KernelConfig& base) {
    spec.validate();
    const auto& cs = spec.coefficients;
    if (cs.has_drift() || cs.gradient_dependent) {
        throw SpecError("the integral-equation solver needs b = 0 and a gradient-independent source");
    }
    KernelConfig config = base;
    config.diffusion = resolve_diffusion(spec, base);
    config.validate();

    PicardResult result;
    const double bound = positivity_step_bound(spec);
    result.jacobian_bound = std::isfinite(bound) ? 1.0 / (2.0 * bound) : 0.0;
    const double dt = config.dt;
    const double T = spec.horizon;
    const auto total = static_cast<std::size_t>(std::max(1.0, std::round(T / dt)));
    if (std::abs(static_cast<double>(total) * dt - T) > 1e-9 * T) {
        throw SpecError("the horizon must be an integer multiple of the kernel time step");
    }
    // Window no longer than the contraction horizon 1 / (2 sup |dc/du|).
    std::size_t window = static_cast<std::size_t>(config.max_window_steps);
    if (std::isfinite(bound)) {
        window = std::min(window, std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(bound / dt))));
    }
    result.window_length = static_cast<double>(window) * dt;

    Trajectory& traj = result.trajectory;
    traj.positivity_step_bound = bound;
    traj.snapshot_times.push_back(0.0);
    traj.snapshots.push_back(spec.initial);
    traj.diagnostics.push_back(diagnose_step(spec.initial, spec.initial, 0.0, 0.0));

    Field start = spec.initial;
    std::size_t n0 = 0;
    while (n0 < total) {
        const std::size_t K = std::min(window, total - n0);
        auto time = [&](std::size_t i) { return static_cast<double>(n0 + i) * dt; };
        // Free evolution of the window start; also the initial iterate.
        std::vector<Field> free;
        free.push_back(start);
        for (std::size_t i = 1; i <= K; ++i) {
            free.push_back(heat_evolve(start, static_cast<double>(i) * dt, config));
        }
        std::vector<Field> v = free;
        std::vector<double> log;
        bool done = false;
        int rising = 0;
        for (int it = 0; it < config.max_iterations; ++it) {
            std::vector<Field> f;
            f.reserve(K + 1);
            for (std::size_t i = 0; i <= K; ++i) {
                f.push_back(source_field(spec, v[i], time(i)));
            }
            double change = 0.0;
            double scale = 0.0;
            std::vector<Field> next;
            next.reserve(K + 1);
            next.push_back(start);
            for (std::size_t i = 1; i <= K; ++i) {
                Field w = free[i];
                for (std::size_t j = 0; j <= i; ++j) {
                    const double weight = (j == 0 || j == i) ? 0.5 * dt : dt;
                    add_scaled(w, heat_evolve(f[j], static_cast<double>(i - j) * dt, config), weight);
                }
                w.zero_boundary();
                const auto a = w.raw();
                const auto b = v[i].raw();
                for (std::size_t q = 0; q < a.size(); ++q) {
                    change = std::max(change, std::abs(a[q] - b[q]));
                }
                scale = std::max(scale, sup_abs(w));
                next.push_back(std::move(w));
            }
            v = std::move(next);
            ++result.iterations;
            if (!log.empty()) {
                rising = change > log.back() ? rising + 1 : 0;
            }
            log.push_back(change);
            if (rising >= 3) {
                std::ostringstream os;
                os << "Picard sup-change grew three times in a row in the window starting at t = " << time(0)
                   << "; shorten the horizon or the window";
                throw NonContraction(os.str());
            }
            if (change <= config.tolerance * (1.0 + scale)) {
                done = true;
                break;
            }
        }
        result.converged = result.converged && done;
        result.changes.push_back(std::move(log));
        for (std::size_t i = 1; i <= K; ++i) {
            const std::size_t n = n0 + i;
            traj.diagnostics.push_back(diagnose_step(v[i - 1], v[i], time(i), dt));
            if (n % static_cast<std::size_t>(config.snapshot_stride) == 0 || n == total) {
                traj.snapshot_times.push_back(time(i));
                traj.snapshots.push_back(v[i]);
            }
        }
        start = v[K];
        n0 += K;
    }
    return result;
}

}  // namespace parapos
