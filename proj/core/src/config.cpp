#include "parapos/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "parapos/functions.hpp"
#include "parapos/profiles.hpp"

namespace parapos {

namespace {

using nlohmann::json;

std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) { throw ConfigError(ptr.empty() ? "/" : ptr, msg); }

// Strict view of a JSON object: every key must be consumed before finish().
class Obj {
public:
    Obj(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
        if (!j_.is_object()) {
            fail(ptr_, "expected an object");
        }
    }
    ~Obj() = default;
    Obj(const Obj&) = delete;
    Obj& operator=(const Obj&) = delete;

    const std::string& ptr() const { return ptr_; }
    std::string at(const std::string& key) const { return ptr_ + "/" + escape(key); }
    bool has(const std::string& key) const { return j_.contains(key); }

    const json& get(const std::string& key) {
        if (!j_.contains(key)) {
            fail(at(key), "required key is missing");
        }
        used_.insert(key);
        return j_.at(key);
    }
    const json* find(const std::string& key) {
        if (!j_.contains(key)) {
            return nullptr;
        }
        used_.insert(key);
        return &j_.at(key);
    }

    double number(const std::string& key) { return as_number(get(key), at(key)); }
    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        return v ? as_number(*v, at(key)) : fallback;
    }
    double positive(const std::string& key) {
        const double v = number(key);
        if (!(v > 0.0)) {
            fail(at(key), "must be positive");
        }
        return v;
    }
    double positive(const std::string& key, double fallback) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) {
            fail(at(key), "must be positive");
        }
        return v;
    }
    int integer(const std::string& key, int fallback, int min_value) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_number_integer()) {
            fail(at(key), "expected an integer");
        }
        const auto x = v->get<long long>();
        if (x < min_value || x > 100000000) {
            fail(at(key), "must be an integer >= " + std::to_string(min_value));
        }
        return static_cast<int>(x);
    }
    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) {
            return fallback;
        }
        if (!v->is_boolean()) {
            fail(at(key), "expected true or false");
        }
        return v->get<bool>();
    }
    std::string string(const std::string& key) { return as_string(get(key), at(key)); }
    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        return v ? as_string(*v, at(key)) : fallback;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.count(it.key())) {
                fail(at(it.key()), "unknown key");
            }
        }
    }

    static double as_number(const json& v, const std::string& ptr) {
        if (!v.is_number()) {
            fail(ptr, "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            fail(ptr, "must be finite");
        }
        return d;
    }
    static std::string as_string(const json& v, const std::string& ptr) {
        if (!v.is_string()) {
            fail(ptr, "expected a string");
        }
        return v.get<std::string>();
    }

private:
    const json& j_;
    std::string ptr_;
    std::set<std::string> used_;
};

const json& array_at(const json& v, const std::string& ptr) {
    if (!v.is_array()) {
        fail(ptr, "expected an array");
    }
    return v;
}

std::vector<double> number_array(const json& v, const std::string& ptr, std::size_t min_size = 0) {
    array_at(v, ptr);
    if (v.size() < min_size) {
        fail(ptr, "expected at least " + std::to_string(min_size) + " entries");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(Obj::as_number(v[i], ptr + "/" + std::to_string(i)));
    }
    return out;
}

Point point_of(const json& v, const std::string& ptr, int dimension) {
    const auto a = number_array(v, ptr);
    if (static_cast<int>(a.size()) != dimension) {
        fail(ptr, "expected " + std::to_string(dimension) + " coordinates");
    }
    Point p{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        p[i] = a[i];
    }
    return p;
}

struct Context {
    int dimension = 1;
    std::vector<Interval> bounds;  // box used for defaults (mode wavenumbers)
    std::filesystem::path base_dir;
};

TimeProfile parse_time(const json& v, const std::string& ptr) {
    Obj o(v, ptr);
    TimeProfile tp;
    const std::string kind = o.string("kind");
    if (kind == "constant") {
        tp.kind = TimeProfile::Kind::constant;
        tp.a = o.number("value");
    } else if (kind == "exponential" || kind == "power") {
        tp.kind = kind == "exponential" ? TimeProfile::Kind::exponential : TimeProfile::Kind::power;
        tp.a = o.number("a");
        tp.b = o.number("b");
        tp.rate = o.positive("rate");
    } else {
        fail(o.at("kind"), "unknown time profile '" + kind + "' (constant, exponential, power)");
    }
    o.finish();
    return tp;
}

SpaceProfile parse_space(const json& v, const std::string& ptr, const Context& ctx) {
    if (v.is_number()) {
        SpaceProfile sp;
        sp.base = Obj::as_number(v, ptr);
        return sp;
    }
    Obj o(v, ptr);
    SpaceProfile sp;
    const std::string kind = o.string("kind");
    sp.base = o.number("base", kind == "constant" ? 1.0 : 0.0);
    auto vec = [&](const std::string& key, std::array<double, 2>& out) {
        if (const json* j = o.find(key)) {
            const Point p = point_of(*j, o.at(key), ctx.dimension);
            out = p;
        }
    };
    if (kind == "constant") {
        sp.kind = SpaceProfile::Kind::constant;
    } else if (kind == "sine") {
        sp.kind = SpaceProfile::Kind::sine;
        sp.amplitude = o.number("amplitude");
        for (int a = 0; a < ctx.dimension && a < static_cast<int>(ctx.bounds.size()); ++a) {
            sp.center[static_cast<std::size_t>(a)] = ctx.bounds[static_cast<std::size_t>(a)].lo;
        }
        vec("center", sp.center);
        if (const json* m = o.find("modes")) {
            const auto modes = number_array(*m, o.at("modes"));
            if (static_cast<int>(modes.size()) != ctx.dimension || ctx.bounds.empty()) {
                fail(o.at("modes"), "needs one mode per axis of a bounded domain");
            }
            for (int a = 0; a < ctx.dimension; ++a) {
                const auto i = static_cast<std::size_t>(a);
                sp.wavenumber[i] = modes[i] * std::numbers::pi / ctx.bounds[i].length();
            }
        } else {
            vec("wavenumber", sp.wavenumber);
        }
        if (ctx.dimension == 1) {
            // A 1D product must not be annihilated by the unused axis.
            sp.wavenumber[1] = 0.0;
        }
    } else if (kind == "linear") {
        sp.kind = SpaceProfile::Kind::linear;
        vec("center", sp.center);
        vec("slope", sp.slope);
    } else if (kind == "gaussian") {
        sp.kind = SpaceProfile::Kind::gaussian;
        sp.amplitude = o.number("amplitude");
        vec("center", sp.center);
        sp.width = o.positive("width");
    } else {
        fail(o.at("kind"), "unknown space profile '" + kind + "' (constant, sine, linear, gaussian)");
    }
    o.finish();
    return sp;
}

CoefficientConfig parse_coefficient(const json& v, const std::string& ptr, const Context& ctx) {
    CoefficientConfig c;
    if (v.is_number()) {
        const double value = Obj::as_number(v, ptr);
        c.field = make_constant(value);
        c.limit = [value](const Point&) { return value; };
        return c;
    }
    Obj o(v, ptr);
    const std::string family = o.string("family");
    if (family == "constant") {
        const double value = o.number("value");
        c.field = make_constant(value);
        c.limit = [value](const Point&) { return value; };
    } else if (family == "separable" || family == "exponential" || family == "power") {
        TimeProfile tp;
        SpaceProfile sp;
        if (family == "separable") {
            tp = parse_time(o.get("time"), o.at("time"));
            sp = parse_space(o.get("space"), o.at("space"), ctx);
        } else {
            tp.kind = family == "exponential" ? TimeProfile::Kind::exponential : TimeProfile::Kind::power;
            tp.a = o.number("a");
            tp.b = o.number("b");
            tp.rate = o.positive("rate");
            sp.base = 1.0;
        }
        c.field = make_separable(tp, sp);
        const double lim = tp.limit();
        c.limit = [lim, sp](const Point& x) { return lim * sp(x); };
    } else if (family == "table") {
        auto path = std::filesystem::path(o.string("path"));
        if (path.is_relative()) {
            path = ctx.base_dir / path;
        }
        if (!std::filesystem::exists(path)) {
            fail(o.at("path"), "table file not found: " + path.string());
        }
        try {
            auto table = std::make_shared<TabulatedField>(TabulatedField::from_csv(path, ctx.dimension));
            c.field = [table](double t, const Point& x) { return (*table)(t, x); };
        } catch (const Error& e) {
            fail(o.at("path"), e.what());
        }
        if (const json* lim = o.find("limit")) {
            const SpaceProfile sp = parse_space(*lim, o.at("limit"), ctx);
            c.limit = [sp](const Point& x) { return sp(x); };
        }
    } else {
        fail(o.at("family"), "unknown coefficient family '" + family + "' (constant, separable, exponential, power, table)");
    }
    o.finish();
    return c;
}

ProfileConfig parse_profile(const json& v, const std::string& ptr, const Context& ctx) {
    Obj o(v, ptr);
    ProfileConfig p;
    p.shape = o.string("shape");
    json params = json::object();
    auto num = [&](const char* key, std::optional<double> fallback, bool positive) {
        double x = fallback ? o.number(key, *fallback) : o.number(key);
        if (positive && !(x > 0.0)) {
            fail(o.at(key), "must be positive");
        }
        params[key] = x;
    };
    auto pt = [&](const char* key) {
        const Point q = point_of(o.get(key), o.at(key), ctx.dimension);
        params[key] = {q[0], q[1]};
    };
    if (p.shape == "zero") {
    } else if (p.shape == "sine") {
        num("amplitude", std::nullopt, false);
        std::vector<int> modes(2, 1);
        if (const json* m = o.find("modes")) {
            const auto mm = number_array(*m, o.at("modes"));
            if (static_cast<int>(mm.size()) != ctx.dimension) {
                fail(o.at("modes"), "needs one mode per axis");
            }
            for (std::size_t i = 0; i < mm.size(); ++i) {
                modes[i] = static_cast<int>(mm[i]);
                if (modes[i] < 1 || modes[i] != mm[i]) {
                    fail(o.at("modes") + "/" + std::to_string(i), "modes must be positive integers");
                }
            }
        }
        params["modes"] = modes;
    } else if (p.shape == "gaussian") {
        num("amplitude", std::nullopt, false);
        pt("center");
        num("width", std::nullopt, true);
    } else if (p.shape == "bump") {
        num("amplitude", std::nullopt, false);
        pt("center");
        num("radius", std::nullopt, true);
        num("power", 3.0, true);
    } else if (p.shape == "plateau") {
        num("amplitude", std::nullopt, false);
        num("ramp", std::nullopt, true);
    } else if (p.shape == "hat") {
        if (ctx.dimension != 1) {
            fail(ptr, "hat profiles are one-dimensional");
        }
        num("amplitude", std::nullopt, false);
        num("peak", std::nullopt, false);
    } else if (p.shape == "steady") {
        // Validated here, resolved against the grid when the problem is built.
        parse_coefficient(o.get("rate"), o.at("rate"), ctx);
        parse_coefficient(o.get("crowding"), o.at("crowding"), ctx);
        params["rate"] = v.at("rate");
        params["crowding"] = v.at("crowding");
        num("time", 0.0, false);
    } else {
        fail(o.at("shape"), "unknown shape '" + p.shape + "' (zero, sine, gaussian, bump, plateau, hat, steady)");
    }
    o.finish();
    p.params = std::move(params);
    return p;
}

AssumptionId parse_assumption(const json& v, const std::string& ptr) {
    const std::string s = Obj::as_string(v, ptr);
    static const std::map<std::string, AssumptionId> names{
        {"A1", AssumptionId::A1},     {"A2", AssumptionId::A2},
        {"A2'", AssumptionId::A2Prime}, {"A4a", AssumptionId::A4a},
        {"A4b", AssumptionId::A4b},   {"A5", AssumptionId::A5},
        {"A6", AssumptionId::A6},     {"A7a", AssumptionId::A7a},
        {"A7b", AssumptionId::A7b},   {"MonotoneCoeffs", AssumptionId::MonotoneCoeffs},
        {"InitMonotone", AssumptionId::InitMonotone}};
    const auto it = names.find(s);
    if (it == names.end()) {
        fail(ptr, "unknown assumption '" + s + "'");
    }
    return it->second;
}

std::function<double(double)> polynomial_of(const json& v, const std::string& ptr) {
    return make_polynomial(number_array(v, ptr, 1));
}

void parse_domain(Obj& problem, ScenarioConfig& cfg, Context& ctx) {
    Obj d(problem.get("domain"), problem.at("domain"));
    const std::string kind = d.string("boundary", "dirichlet_zero");
    if (kind == "dirichlet_zero") {
        cfg.domain.boundary = BoundaryKind::dirichlet_zero;
        const json& b = array_at(d.get("bounds"), d.at("bounds"));
        if (b.empty() || b.size() > 2) {
            fail(d.at("bounds"), "expected one or two intervals");
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::string p = d.at("bounds") + "/" + std::to_string(i);
            const auto iv = number_array(b[i], p);
            if (iv.size() != 2 || !(iv[1] > iv[0])) {
                fail(p, "expected [lo, hi] with hi > lo");
            }
            cfg.domain.bounds.push_back({iv[0], iv[1]});
        }
        cfg.domain.dimension = static_cast<int>(cfg.domain.bounds.size());
    } else if (kind == "cauchy_nested") {
        cfg.domain.boundary = BoundaryKind::cauchy_nested;
        cfg.domain.dimension = d.integer("dimension", 1, 1);
        if (cfg.domain.dimension > 2) {
            fail(d.at("dimension"), "dimension must be 1 or 2");
        }
        cfg.domain.radii = number_array(d.get("radii"), d.at("radii"), 2);
        cfg.domain.transition_width = d.positive("transition_width");
        cfg.domain.spacing = d.positive("spacing");
        for (std::size_t i = 0; i < cfg.domain.radii.size(); ++i) {
            const double r = cfg.domain.radii[i];
            const std::string p = d.at("radii") + "/" + std::to_string(i);
            if (!(r > cfg.domain.transition_width) || (i > 0 && !(r > cfg.domain.radii[i - 1]))) {
                fail(p, "radii must increase and exceed the transition width");
            }
            const double cells = 2.0 * r / cfg.domain.spacing;
            if (std::abs(cells - std::round(cells)) > 1e-9 * cells) {
                fail(p, "2 r / spacing must be an integer");
            }
        }
        const double rmax = cfg.domain.radii.back();
        cfg.domain.bounds.assign(static_cast<std::size_t>(cfg.domain.dimension), Interval{-rmax, rmax});
    } else {
        fail(d.at("boundary"), "boundary must be dirichlet_zero or cauchy_nested");
    }
    d.finish();
    ctx.dimension = cfg.domain.dimension;
    ctx.bounds = cfg.domain.bounds;
}

void parse_problem(const json& j, const std::string& ptr, ScenarioConfig& cfg, Context& ctx) {
    Obj p(j, ptr);
    parse_domain(p, cfg, ctx);
    if (cfg.domain.boundary == BoundaryKind::dirichlet_zero) {
        Obj g(p.get("grid"), p.at("grid"));
        const auto nodes = number_array(g.get("nodes"), g.at("nodes"));
        if (static_cast<int>(nodes.size()) != cfg.domain.dimension) {
            fail(g.at("nodes"), "expected one node count per axis");
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i] < 3 || nodes[i] != std::floor(nodes[i]) || nodes[i] > 1e6) {
                fail(g.at("nodes") + "/" + std::to_string(i), "node counts must be integers >= 3");
            }
            cfg.nodes.push_back(static_cast<int>(nodes[i]));
        }
        g.finish();
    } else if (p.has("grid")) {
        p.get("grid");
        fail(p.at("grid"), "cauchy_nested domains derive their grids from the spacing");
    }
    cfg.horizon = p.positive("horizon");

    Obj m(p.get("model"), p.at("model"));
    const std::string type = m.string("type");
    if (type != "lotka_volterra") {
        fail(m.at("type"), "only the lotka_volterra model is available from configuration");
    }
    cfg.diffusion = number_array(m.get("diffusion"), m.at("diffusion"), 1);
    for (std::size_t k = 0; k < cfg.diffusion.size(); ++k) {
        if (!(cfg.diffusion[k] > 0.0)) {
            fail(m.at("diffusion") + "/" + std::to_string(k), "diffusion constants must be positive");
        }
    }
    const std::size_t species = cfg.diffusion.size();
    const json& growth = array_at(m.get("growth"), m.at("growth"));
    if (growth.size() != species) {
        fail(m.at("growth"), "expected one growth rate per species");
    }
    for (std::size_t k = 0; k < species; ++k) {
        cfg.growth.push_back(parse_coefficient(growth[k], m.at("growth") + "/" + std::to_string(k), ctx));
    }
    const json& inter = array_at(m.get("interaction"), m.at("interaction"));
    if (inter.size() != species) {
        fail(m.at("interaction"), "expected an m x m interaction matrix");
    }
    for (std::size_t k = 0; k < species; ++k) {
        const std::string rp = m.at("interaction") + "/" + std::to_string(k);
        const json& row = array_at(inter[k], rp);
        if (row.size() != species) {
            fail(rp, "expected an m x m interaction matrix");
        }
        std::vector<CoefficientConfig> r;
        for (std::size_t i = 0; i < species; ++i) {
            r.push_back(parse_coefficient(row[i], rp + "/" + std::to_string(i), ctx));
        }
        cfg.interaction.push_back(std::move(r));
    }
    if (const json* off = m.find("source_offset")) {
        cfg.source_offset = number_array(*off, m.at("source_offset"));
        if (cfg.source_offset.size() != species) {
            fail(m.at("source_offset"), "expected one offset per species");
        }
    }
    m.finish();

    const json& init = array_at(p.get("initial"), p.at("initial"));
    if (init.size() != species) {
        fail(p.at("initial"), "expected one initial profile per species");
    }
    for (std::size_t k = 0; k < species; ++k) {
        cfg.initial.push_back(parse_profile(init[k], p.at("initial") + "/" + std::to_string(k), ctx));
    }
    p.finish();
}

void parse_scheme(const json& j, const std::string& ptr, ScenarioConfig& cfg) {
    Obj s(j, ptr);
    const std::string stepper = s.string("stepper", "imex_be");
    if (stepper == "imex_be") {
        cfg.scheme.stepper = TimeStepper::imex_be;
    } else if (stepper == "imex_cn") {
        cfg.scheme.stepper = TimeStepper::imex_cn;
    } else if (stepper == "erk2") {
        cfg.scheme.stepper = TimeStepper::erk2;
    } else {
        fail(s.at("stepper"), "stepper must be imex_be, imex_cn or erk2");
    }
    cfg.scheme.dt = s.positive("dt");
    const std::string pos = s.string("positivity", "monitor_only");
    if (pos == "monitor_only") {
        cfg.scheme.positivity = PositivityMode::monitor_only;
    } else if (pos == "clip_and_flag") {
        cfg.scheme.positivity = PositivityMode::clip_and_flag;
    } else {
        fail(s.at("positivity"), "positivity must be monitor_only or clip_and_flag");
    }
    cfg.scheme.snapshot_stride = s.integer("snapshot_stride", 10, 1);
    cfg.scheme.linear_tolerance = s.positive("linear_tolerance", 1e-10);
    cfg.scheme.max_linear_iterations = s.integer("max_linear_iterations", 20000, 1);
    s.finish();
}

void parse_checks(const json& j, const std::string& ptr, ScenarioConfig& cfg) {
    Obj c(j, ptr);
    if (const json* a = c.find("assumptions")) {
        array_at(*a, c.at("assumptions"));
        for (std::size_t i = 0; i < a->size(); ++i) {
            cfg.checks.assumptions.push_back(parse_assumption((*a)[i], c.at("assumptions") + "/" + std::to_string(i)));
        }
    } else {
        cfg.checks.assumptions = {AssumptionId::A1, AssumptionId::A2Prime, AssumptionId::A6, AssumptionId::A7a,
                                  AssumptionId::A7b};
    }
    if (const json* b = c.find("budget")) {
        Obj o(*b, c.at("budget"));
        auto& bud = cfg.checks.budget;
        bud.t_points = o.integer("t_points", bud.t_points, 2);
        bud.x_points = o.integer("x_points", bud.x_points, 2);
        bud.u_points = o.integer("u_points", bud.u_points, 2);
        bud.p_points = o.integer("p_points", bud.p_points, 2);
        bud.u_radius = o.positive("u_radius", bud.u_radius);
        bud.p_radius = o.positive("p_radius", bud.p_radius);
        o.finish();
    }
    if (const json* t = c.find("tolerances")) {
        Obj o(*t, c.at("tolerances"));
        auto& tol = cfg.checks.tolerances;
        tol.zero = o.positive("zero", tol.zero);
        tol.sign = o.positive("sign", tol.sign);
        tol.compat = o.positive("compat", tol.compat);
        o.finish();
    }
    if (const json* mj = c.find("majorants")) {
        Obj o(*mj, c.at("majorants"));
        Majorants m;
        m.kappa = o.positive("kappa", 1e-300);
        if (const json* v = o.find("d1")) {
            m.d1 = Obj::as_number(*v, o.at("d1"));
            if (*m.d1 < 0.0) {
                fail(o.at("d1"), "must be non-negative");
            }
        }
        if (const json* v = o.find("d2")) {
            m.d2 = Obj::as_number(*v, o.at("d2"));
            if (*m.d2 < 0.0) {
                fail(o.at("d2"), "must be non-negative");
            }
        }
        if (const json* v = o.find("mu")) {
            m.mu = polynomial_of(*v, o.at("mu"));
        }
        if (const json* v = o.find("mu_hat")) {
            m.mu_hat = polynomial_of(*v, o.at("mu_hat"));
        }
        if (const json* v = o.find("theta1")) {
            m.theta1 = polynomial_of(*v, o.at("theta1"));
        }
        if (const json* v = o.find("theta2")) {
            Obj t2(*v, o.at("theta2"));
            const double K = t2.positive("K");
            t2.finish();
            m.theta2 = [K](double, double p) { return K / ((1.0 + p) * (1.0 + p)); };
        }
        o.finish();
        m.C1 = cfg.checks.budget.u_radius;
        m.C2 = cfg.checks.budget.p_radius;
        cfg.checks.majorants = std::move(m);
    }
    c.finish();
}

void parse_analysis(const json& j, const std::string& ptr, ScenarioConfig& cfg, const Context& ctx) {
    Obj a(j, ptr);
    cfg.analysis.positivity = a.boolean("positivity", false);
    cfg.analysis.max_bound = a.boolean("max_bound", false);
    if (const json* e = a.find("extinction")) {
        Obj o(*e, a.at("extinction"));
        ExtinctionConfig ex;
        ex.component = o.integer("component", 1, 1) - 1;
        if (ex.component >= cfg.species()) {
            fail(o.at("component"), "component index exceeds the species count");
        }
        ex.tolerance = o.positive("tolerance", ex.tolerance);
        ex.window_fraction = o.positive("window_fraction", ex.window_fraction);
        ex.gronwall = o.boolean("gronwall", true);
        o.finish();
        cfg.analysis.extinction = ex;
    }
    if (const json* s = a.find("steady")) {
        Obj o(*s, a.at("steady"));
        SteadyConfig st;
        st.options.window_fraction = o.positive("window_fraction", st.options.window_fraction);
        if (st.options.window_fraction >= 1.0) {
            fail(o.at("window_fraction"), "must be below 1");
        }
        st.options.steady_tol = o.positive("steady_tol", st.options.steady_tol);
        st.options.t_max = o.positive("t_max", st.options.t_max);
        st.refinements = o.integer("refinements", st.refinements, 0);
        st.residual_tolerance = o.positive("residual_tolerance", st.residual_tolerance);
        if (const json* b = o.find("battery")) {
            array_at(*b, o.at("battery"));
            std::vector<TestFunction> battery;
            for (std::size_t i = 0; i < b->size(); ++i) {
                const std::string bp = o.at("battery") + "/" + std::to_string(i);
                Obj t((*b)[i], bp);
                const Point c = point_of(t.get("center"), t.at("center"), ctx.dimension);
                TestFunction tf(c, t.positive("radius"), ctx.dimension);
                t.finish();
                if (!ctx.bounds.empty() && !tf.inside(SpatialDomain(ctx.bounds))) {
                    fail(bp, "test-function support must lie strictly inside the domain");
                }
                battery.push_back(tf);
            }
            st.battery = std::move(battery);
        }
        if (const json* l = o.find("limits")) {
            Obj lo(*l, o.at("limits"));
            for (const char* name : {"beta", "gamma", "delta", "rho", "sigma", "theta"}) {
                if (const json* v = lo.find(name)) {
                    const SpaceProfile sp = parse_space(*v, lo.at(name), ctx);
                    st.limit_overrides[name] = [sp](const Point& x) { return sp(x); };
                }
            }
            lo.finish();
        }
        o.finish();
        cfg.analysis.steady = std::move(st);
    }
    if (const json* n = a.find("nested")) {
        Obj o(*n, a.at("nested"));
        NestedConfig ne;
        ne.tolerance = o.positive("tolerance", ne.tolerance);
        ne.inner_fraction = o.positive("inner_fraction", ne.inner_fraction);
        if (ne.inner_fraction > 1.0) {
            fail(o.at("inner_fraction"), "must not exceed 1");
        }
        o.finish();
        if (cfg.domain.boundary != BoundaryKind::cauchy_nested) {
            fail(a.at("nested"), "nested analysis needs a cauchy_nested domain");
        }
        cfg.analysis.nested = ne;
    }
    if (const json* r = a.find("oracle")) {
        Obj o(*r, a.at("oracle"));
        OracleConfig oc;
        oc.kernel.truncation = o.positive("truncation", oc.kernel.truncation);
        if (oc.kernel.truncation < 6.0) {
            fail(o.at("truncation"), "truncation must be at least 6 standard deviations");
        }
        oc.kernel.tolerance = o.positive("tolerance", oc.kernel.tolerance);
        oc.kernel.max_iterations = o.integer("max_iterations", oc.kernel.max_iterations, 1);
        oc.kernel.max_window_steps = o.integer("max_window_steps", oc.kernel.max_window_steps, 1);
        oc.constant = o.positive("constant", oc.constant);
        oc.burn_in = o.integer("burn_in", 2, 0);
        o.finish();
        cfg.analysis.oracle = oc;
    }
    a.finish();
}

void parse_outputs(const json& j, const std::string& ptr, ScenarioConfig& cfg) {
    Obj o(j, ptr);
    cfg.outputs.directory = o.string("directory", cfg.outputs.directory.string());
    cfg.outputs.csv = o.boolean("csv", true);
    cfg.outputs.binary = o.boolean("binary", true);
    o.finish();
}

}  // namespace

bool ScenarioConfig::modified_source() const {
    for (double v : source_offset) {
        if (v != 0.0) {
            return true;
        }
    }
    return false;
}

ScenarioConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir) {
    ScenarioConfig cfg;
    cfg.document = document;
    cfg.base_dir = base_dir;
    Context ctx;
    ctx.base_dir = base_dir;
    Obj root(document, "");
    cfg.name = root.string("name");
    if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos || cfg.name == "." ||
        cfg.name == "..") {
        fail(root.at("name"), "name must be a non-empty file-name-safe string");
    }
    cfg.description = root.string("description", "");
    if (const json* s = root.find("seed")) {
        if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0)) {
            fail(root.at("seed"), "seed must be a non-negative integer");
        }
        cfg.seed = s->get<std::uint64_t>();
    }
    parse_problem(root.get("problem"), root.at("problem"), cfg, ctx);
    parse_scheme(root.get("scheme"), root.at("scheme"), cfg);
    if (const json* c = root.find("checks")) {
        parse_checks(*c, root.at("checks"), cfg);
    } else {
        parse_checks(json::object(), root.at("checks"), cfg);
    }
    cfg.checks.budget.seed = cfg.seed;
    if (const json* a = root.find("analysis")) {
        parse_analysis(*a, root.at("analysis"), cfg, ctx);
    }
    if (const json* o = root.find("outputs")) {
        parse_outputs(*o, root.at("outputs"), cfg);
    }
    root.finish();
    if (cfg.analysis.oracle) {
        cfg.analysis.oracle->kernel.dt = cfg.scheme.dt;
        cfg.analysis.oracle->kernel.snapshot_stride = cfg.scheme.snapshot_stride;
    }
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc, base_dir);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", "cannot read " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

LVCoefficients build_lv(const ScenarioConfig& config) {
    LVCoefficients lv;
    lv.species = config.species();
    lv.diffusion = config.diffusion;
    for (const auto& g : config.growth) {
        lv.growth.push_back(g.field);
    }
    for (const auto& row : config.interaction) {
        std::vector<ScalarField> r;
        for (const auto& c : row) {
            r.push_back(c.field);
        }
        lv.interaction.push_back(std::move(r));
    }
    lv.validate();
    return lv;
}

namespace {

Context context_of(const ScenarioConfig& config) {
    Context ctx;
    ctx.dimension = config.domain.dimension;
    ctx.bounds = config.domain.bounds;
    ctx.base_dir = config.base_dir;
    return ctx;
}

profiles::Scalar scalar_profile(const ProfileConfig& p, const SpatialDomain& domain) {
    const auto& q = p.params;
    auto point = [&](const char* key) { return Point{q.at(key)[0].get<double>(), q.at(key)[1].get<double>()}; };
    if (p.shape == "zero") {
        return profiles::zero();
    }
    if (p.shape == "sine") {
        const auto modes = q.at("modes").get<std::vector<int>>();
        return profiles::sine(domain, q.at("amplitude").get<double>(), {modes[0], modes[1]});
    }
    if (p.shape == "gaussian") {
        return profiles::gaussian(q.at("amplitude").get<double>(), point("center"), q.at("width").get<double>());
    }
    if (p.shape == "bump") {
        return profiles::bump(q.at("amplitude").get<double>(), point("center"), q.at("radius").get<double>(),
                              static_cast<int>(q.at("power").get<double>()));
    }
    if (p.shape == "plateau") {
        return profiles::plateau(domain, q.at("amplitude").get<double>(), q.at("ramp").get<double>());
    }
    if (p.shape == "hat") {
        return profiles::hat(domain, q.at("amplitude").get<double>(), q.at("peak").get<double>());
    }
    throw SpecError("profile shape '" + p.shape + "' is not a closed-form profile");
}

CoefficientSet with_offset(CoefficientSet cs, std::vector<double> offset) {
    cs.source = [src = cs.source, offset](double t, const Point& x, std::span<const double> u,
                                          std::span<const double> p, std::span<double> out) {
        src(t, x, u, p, out);
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] += offset[k];
        }
    };
    return cs;
}

}  // namespace

ProblemSpec build_problem(const ScenarioConfig& config, std::optional<std::vector<int>> nodes) {
    if (config.domain.boundary != BoundaryKind::dirichlet_zero) {
        throw SpecError("build_problem needs a dirichlet_zero domain");
    }
    const SpatialDomain domain(config.domain.bounds);
    const Grid grid(domain, nodes ? *nodes : config.nodes);
    const int m = config.species();
    Field initial(grid, m);
    const Context ctx = context_of(config);
    for (int k = 0; k < m; ++k) {
        const auto& p = config.initial[static_cast<std::size_t>(k)];
        if (p.shape == "steady") {
            const auto rate = parse_coefficient(p.params.at("rate"), "/problem/initial", ctx);
            const auto crowd = parse_coefficient(p.params.at("crowding"), "/problem/initial", ctx);
            const auto psi = scalar_steady_state(grid, config.diffusion[static_cast<std::size_t>(k)], rate.field,
                                                 crowd.field, p.params.at("time").get<double>());
            std::copy(psi.begin(), psi.end(), initial.component(k).begin());
        } else {
            const auto f = scalar_profile(p, domain);
            for (std::size_t idx = 0; idx < grid.size(); ++idx) {
                initial.at(k, idx) = f(grid.point(idx));
            }
        }
    }
    initial.zero_boundary();
    const LVCoefficients lv = build_lv(config);
    ProblemSpec spec = build_lv_problem(lv, domain, initial, config.horizon);
    if (config.modified_source()) {
        spec.coefficients = with_offset(std::move(spec.coefficients), config.source_offset);
        spec.lv.reset();
    }
    return spec;
}

CauchyProblem build_cauchy_problem(const ScenarioConfig& config) {
    if (config.domain.boundary != BoundaryKind::cauchy_nested) {
        throw SpecError("build_cauchy_problem needs a cauchy_nested domain");
    }
    const SpatialDomain domain =
        SpatialDomain::cauchy(config.domain.dimension, config.domain.radii, config.domain.transition_width);
    const LVCoefficients lv = build_lv(config);
    std::vector<profiles::Scalar> parts;
    for (const auto& p : config.initial) {
        if (p.shape == "steady" || p.shape == "sine" || p.shape == "plateau" || p.shape == "hat") {
            throw SpecError("profile shape '" + p.shape + "' needs a bounded box; use bump, gaussian or zero");
        }
        parts.push_back(scalar_profile(p, domain));
    }
    // The LV coefficient set is built on the largest box and reused by every cutoff problem.
    const Grid probe(SpatialDomain(config.domain.bounds), std::vector<int>(static_cast<std::size_t>(config.domain.dimension), 3));
    Field zero(probe, lv.species);
    ProblemSpec spec = build_lv_problem(lv, SpatialDomain(config.domain.bounds), zero, config.horizon);
    CoefficientSet cs = spec.coefficients;
    if (config.modified_source()) {
        cs = with_offset(std::move(cs), config.source_offset);
    }
    return CauchyProblem{domain, std::move(cs), profiles::stack(std::move(parts)), config.horizon,
                         config.modified_source() ? std::nullopt : std::optional<LVCoefficients>(lv)};
}

LimitCoefficients build_limits(const ScenarioConfig& config) {
    if (config.species() != 2) {
        throw SpecError("limit coefficients are defined for two-species models");
    }
    LimitCoefficients lim;
    lim.d1 = config.diffusion[0];
    lim.d2 = config.diffusion[1];
    const std::map<std::string, const CoefficientConfig*> by_name{
        {"beta", &config.growth[0]},          {"gamma", &config.interaction[0][0]},
        {"delta", &config.interaction[0][1]}, {"rho", &config.growth[1]},
        {"sigma", &config.interaction[1][0]}, {"theta", &config.interaction[1][1]}};
    std::map<std::string, std::function<double(const Point&)>> out;
    for (const auto& [name, coef] : by_name) {
        if (config.analysis.steady) {
            const auto& ov = config.analysis.steady->limit_overrides;
            if (auto it = ov.find(name); it != ov.end()) {
                out[name] = it->second;
                continue;
            }
        }
        if (!coef->limit) {
            throw SpecError("coefficient " + name + " has no analytic limit; supply analysis.steady.limits." + name);
        }
        out[name] = coef->limit;
    }
    lim.beta = out["beta"];
    lim.gamma = out["gamma"];
    lim.delta = out["delta"];
    lim.rho = out["rho"];
    lim.sigma = out["sigma"];
    lim.theta = out["theta"];
    return lim;
}

}  // namespace parapos
