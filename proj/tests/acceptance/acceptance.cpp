// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "parapos/config.hpp"
#include "parapos/duhamel.hpp"
#include "parapos/fdm.hpp"
#include "parapos/functions.hpp"
#include "parapos/profiles.hpp"
#include "parapos/runner.hpp"
#include "parapos/scenario_library.hpp"

using namespace parapos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double sup_abs(const Field& f, int k) {
    double s = 0.0;
    for (double v : f.component(k)) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

double sup_norm(const Field& f) {
    double s = 0.0;
    std::vector<double> u(static_cast<std::size_t>(f.components()));
    for (std::size_t i = 0; i < f.nodes(); ++i) {
        f.gather(i, u);
        double r = 0.0;
        for (double e : u) {
            r += e * e;
        }
        s = std::max(s, std::sqrt(r));
    }
    return s;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

class Runs {
public:
    explicit Runs(fs::path root) : root_(std::move(root)) {}

    const ScenarioResult& get(const std::string& name) {
        auto it = cache_.find(name);
        if (it == cache_.end()) {
            RunOptions o;
            o.out = root_ / "first";
            it = cache_.emplace(name, run_scenario(builtin_scenario(name), o)).first;
            if (it->second.manifest.status != "ok") {
                throw std::runtime_error(name + ": " + it->second.manifest.error);
            }
        }
        return it->second;
    }

    const fs::path& root() const { return root_; }

private:
    fs::path root_;
    std::map<std::string, ScenarioResult> cache_;
};

Outcome positivity(Runs& runs) {
    const auto config = builtin_scenario("S1_positivity");
    const auto& r = runs.get("S1_positivity");
    if (config.scheme.positivity != PositivityMode::monitor_only) {
        return {false, "scenario does not run in monitor_only mode"};
    }
    for (auto id : {AssumptionId::A1, AssumptionId::A7a, AssumptionId::A7b}) {
        if (!r.checks->passed(id)) {
            return {false, to_string(id) + " did not pass"};
        }
    }
    double worst = 0.0;
    for (const auto& d : r.trajectory->diagnostics) {
        worst = std::max(worst, d.negpart_norm / (1.0 + d.sup_norm));
    }
    return {worst <= 1e-8, "max negpart/(1+sup) = " + num(worst) + " over " +
                               std::to_string(r.trajectory->diagnostics.size()) + " steps (limit 1e-8)"};
}

Outcome max_bound(Runs& runs) {
    const auto& r = runs.get("S2_maxbound");
    const auto config = builtin_scenario("S2_maxbound");
    const auto spec = build_problem(config);
    const auto dis = check_dissipativity(spec, config.checks.budget, DissipativityMode::A2Prime);
    const double T = config.horizon;
    const double bound = std::max(std::exp((dis.d2 + 1.0) * T) * sup_norm(spec.initial), std::sqrt(dis.d1));
    double sup = 0.0;
    for (const auto& s : r.trajectory->snapshots) {
        sup = std::max(sup, sup_norm(s));
    }
    for (const auto& d : r.trajectory->diagnostics) {
        sup = std::max(sup, d.sup_norm);
    }
    return {sup <= bound + 1e-6, "sup " + num(sup) + " <= bound " + num(bound) + " (d1 " + num(dis.d1) + ", d2 " +
                                     num(dis.d2) + ")"};
}

Outcome gronwall(Runs& runs) {
    const auto& r = runs.get("S3_extinction");
    const auto spec = build_problem(builtin_scenario("S3_extinction"));
    // int_0^inf e^{-t} dt = 1
    const double B = sup_abs(spec.initial, 0) * std::numbers::e;
    double worst = -INFINITY;
    for (const auto& d : r.trajectory->diagnostics) {
        worst = std::max(worst, d.component_sup[0] - B);
    }
    const double final_sup = r.trajectory->diagnostics.back().component_sup[0];
    const double T = r.trajectory->diagnostics.back().t;
    const bool ok = worst <= 1e-6 && final_sup <= 1e-3 && std::abs(T - 30.0) < 1e-9;
    return {ok, "max(sup u1 - " + num(B) + ") = " + num(worst) + "; final sup " + num(final_sup) + " at T = " + num(T)};
}

Outcome monotone(Runs& runs) {
    const auto& r = runs.get("S4_asymptotics");
    double dudt = INFINITY;
    double dvdt = -INFINITY;
    // entry 0 is t = 0 and carries no time difference
    for (std::size_t i = 1; i < r.trajectory->diagnostics.size(); ++i) {
        const auto& d = r.trajectory->diagnostics[i];
        dudt = std::min(dudt, d.dudt_min);
        dvdt = std::max(dvdt, d.dvdt_max);
    }
    const double slope = r.steady->tail_slope;
    const bool ok = dudt >= -1e-8 && dvdt <= 1e-8 && r.steady->converged && slope <= 1e-8;
    return {ok, "min d_t u " + num(dudt) + ", max d_t v " + num(dvdt) + ", tail slope " + num(slope) + " at T = " +
                    num(r.steady->final_time)};
}

Outcome weak_residual(Runs& runs) {
    const auto& r = runs.get("S4_asymptotics");
    const auto& levels = r.refinement_residuals;
    if (levels.size() != 3) {
        return {false, "expected base plus two refinements, got " + std::to_string(levels.size()) + " levels"};
    }
    double base = 0.0;
    for (const auto& w : levels[0]) {
        base = std::max(base, std::abs(w.value));
    }
    bool decreasing = true;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < levels[0].size(); ++i) {
        for (std::size_t l = 1; l < levels.size(); ++l) {
            const double prev = std::abs(levels[l - 1][i].value);
            const double cur = std::abs(levels[l][i].value);
            decreasing = decreasing && cur < prev;
            worst_ratio = std::max(worst_ratio, cur / prev);
        }
    }
    return {base <= 5e-4 && decreasing, "base max |residual| " + num(base) + " (limit 5e-4); worst refinement ratio " +
                                            num(worst_ratio) + " over " + std::to_string(levels[0].size()) +
                                            " residuals"};
}

Outcome oracle(Runs& runs) {
    const auto config = builtin_scenario("S6_oracle_crosscheck");
    const auto& r = runs.get("S6_oracle_crosscheck");
    const Field& a = r.trajectory->final_state();
    const Field& b = r.picard->trajectory.final_state();
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i) {
        diff = std::max(diff, std::abs(a.raw()[i] - b.raw()[i]));
        scale = std::max(scale, std::abs(b.raw()[i]));
    }
    const double h = a.grid().spacing(0);
    const double gate = std::max(1e-3, config.analysis.oracle->constant * (h * h + config.scheme.dt));
    double ratio = 0.0;
    for (const auto& window : r.picard->changes) {
        for (std::size_t j = 3; j < window.size(); ++j) {
            if (window[j - 1] > 0.0) {
                ratio = std::max(ratio, window[j] / window[j - 1]);
            }
        }
    }
    const double t = r.trajectory->final_time();
    const bool ok = std::abs(t - 0.5) < 1e-12 && diff / scale <= gate && ratio < 1.0 && r.picard->converged;
    return {ok, "relative L-inf " + num(diff / scale) + " (gate " + num(gate) + ") at t = " + num(t) +
                    "; max change ratio after burn-in " + num(ratio)};
}

Outcome logistic() {
    const double exact = std::numbers::e / (1.0 + std::numbers::e);
    LVCoefficients lv;
    lv.species = 1;
    lv.diffusion = {0.01};
    lv.growth = {make_constant(1.0)};
    lv.interaction = {{make_constant(1.0)}};
    const SpatialDomain dom({{0.0, 10.0}});
    const auto profile = profiles::stack({profiles::plateau(dom, 0.5, 2.0)});
    struct Level {
        int nodes;
        double dt;
    };
    std::vector<double> fdm_err;
    std::vector<double> picard_err;
    for (const Level lvl : {Level{201, 4e-3}, Level{401, 2e-3}, Level{801, 1e-3}}) {
        const Grid g(dom, {lvl.nodes});
        const auto spec = build_lv_problem(lv, dom, discretize(g, 1, profile), 1.0);
        SchemeConfig s;
        s.dt = lvl.dt;
        s.snapshot_stride = 1000000;
        const auto centre = g.index((lvl.nodes - 1) / 2);
        fdm_err.push_back(std::abs(solve(spec, s).final_state().at(0, centre) - exact));
    }
    for (const Level lvl : {Level{201, 0.04}, Level{201, 0.02}, Level{401, 0.01}}) {
        const Grid g(dom, {lvl.nodes});
        const auto spec = build_lv_problem(lv, dom, discretize(g, 1, profile), 1.0);
        KernelConfig k;
        k.dt = lvl.dt;
        k.snapshot_stride = 1000000;
        k.max_window_steps = 1000;
        const auto centre = g.index((lvl.nodes - 1) / 2);
        picard_err.push_back(std::abs(picard_solve(spec, k).trajectory.final_state().at(0, centre) - exact));
    }
    auto shrinking = [](const std::vector<double>& e) {
        return std::is_sorted(e.rbegin(), e.rend()) && e.front() > e.back() && e.back() <= 1e-4;
    };
    std::string detail = "U(1) = " + num(exact) + "; fdm errors";
    for (double e : fdm_err) {
        detail += " " + num(e);
    }
    detail += "; picard errors";
    for (double e : picard_err) {
        detail += " " + num(e);
    }
    return {shrinking(fdm_err) && shrinking(picard_err), detail + " (final limit 1e-4)"};
}

Outcome nested(Runs& runs) {
    const auto& r = runs.get("S5_cauchy_nested");
    const auto& d = r.nested->differences;
    bool decreasing = d.size() >= 2;
    for (std::size_t i = 1; i < d.size(); ++i) {
        decreasing = decreasing && d[i] < d[i - 1];
    }
    std::string detail = "differences";
    for (double v : d) {
        detail += " " + num(v);
    }
    return {decreasing && d.back() <= 1e-6, detail + " (final limit 1e-6)"};
}

Outcome order() {
    const SpatialDomain dom({{0.0, 1.0}});
    const Grid coarse(dom, {21});
    SchemeConfig s;
    s.dt = 1e-3;
    s.snapshot_stride = 1000000;

    CoefficientSet heat;
    heat.components = 1;
    heat.dimension = 1;
    heat.diffusion = [](double, const Point&, std::span<const double>, int) { return DiffusionMatrix::scalar(1, 0.1); };
    heat.source = [](double, const Point&, std::span<const double>, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    heat.constant_diffusion = std::vector<double>{0.1};
    const auto heat_profile = profiles::stack({profiles::sine(dom, 1.0)});
    const ProblemSpec heat_spec{dom, heat, discretize(coarse, 1, heat_profile), 0.1, std::nullopt};
    const double heat_order = estimate_order(heat_spec, heat_profile, s, {21}).order;

    const auto lv = LVCoefficients::two_species(0.05, 0.08, make_constant(1.0), make_constant(1.0),
                                                make_constant(0.5), make_constant(0.8), make_constant(0.3),
                                                make_constant(1.0));
    const auto lv_profile = profiles::stack({profiles::sine(dom, 0.6), profiles::sine(dom, 0.4, {2, 1})});
    const auto lv_spec = build_lv_problem(lv, dom, discretize(coarse, 2, lv_profile), 0.5);
    const double lv_order = estimate_order(lv_spec, lv_profile, s, {21}).order;

    const bool ok = std::abs(heat_order - 2.0) <= 0.3 && std::abs(lv_order - 2.0) <= 0.3;
    return {ok, "heat " + num(heat_order) + ", LV " + num(lv_order) + " (2 +/- 0.3)"};
}

Outcome determinism(Runs& runs) {
    const char* names[] = {"S1_positivity", "S2_maxbound", "S3_extinction", "S4_asymptotics", "S5_cauchy_nested",
                           "S6_oracle_crosscheck"};
    int compared = 0;
    std::string mismatch;
    for (const char* name : names) {
        runs.get(name);
        RunOptions o;
        o.out = runs.root() / "second";
        const auto r = run_scenario(builtin_scenario(name), o);
        for (const auto& f : r.manifest.files) {
            if (f.name.size() < 4 || f.name.substr(f.name.size() - 4) != ".csv") {
                continue;
            }
            const auto a = slurp(runs.root() / "first" / name / f.name);
            const auto b = slurp(runs.root() / "second" / name / f.name);
            ++compared;
            if (a.empty() || a != b) {
                mismatch += std::string(" ") + name + "/" + f.name;
            }
        }
    }
    if (!mismatch.empty()) {
        return {false, "differing CSVs:" + mismatch};
    }
    return {compared > 0, std::to_string(compared) + " CSV files bitwise identical across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "parapos_acceptance";
    fs::remove_all(root);
    Runs runs(root);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"positivity (S1)", [&] { return positivity(runs); }},
        {"maximum-principle bound (S2)", [&] { return max_bound(runs); }},
        {"Gronwall bound and extinction (S3)", [&] { return gronwall(runs); }},
        {"monotone convergence (S4)", [&] { return monotone(runs); }},
        {"weak elliptic residual (S4)", [&] { return weak_residual(runs); }},
        {"oracle equivalence (S6)", [&] { return oracle(runs); }},
        {"logistic closed form", [] { return logistic(); }},
        {"nested-box diagonalization (S5)", [&] { return nested(runs); }},
        {"convergence order", [] { return order(); }},
        {"determinism (S1-S6)", [&] { return determinism(runs); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << (i + 1) << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first
                  << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
