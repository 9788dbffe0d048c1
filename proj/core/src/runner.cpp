#include "parapos/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "parapos/trajectory_io.hpp"

#ifndef PARAPOS_VERSION_STRING
#define PARAPOS_VERSION_STRING "0.0.0"
#endif

namespace parapos {

namespace fs = std::filesystem;
using nlohmann::json;

const char* tool_version() { return PARAPOS_VERSION_STRING; }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::verified:
            return "verified";
        case Verdict::violated:
            return "violated";
        case Verdict::inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

int RunManifest::exit_code() const {
    if (status != "ok") {
        return error.rfind("config:", 0) == 0 ? 2 : 3;
    }
    for (const auto& v : verdicts) {
        if (v.verdict != Verdict::verified) {
            return 1;
        }
    }
    return 0;
}

const VerdictEntry* RunManifest::find(const std::string& tag) const {
    for (const auto& v : verdicts) {
        if (v.tag == tag) {
            return &v;
        }
    }
    return nullptr;
}

json RunManifest::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["seed"] = seed;
    j["started"] = started;
    j["finished"] = finished;
    j["status"] = status;
    if (!error.empty()) {
        j["error"] = error;
    }
    json vs = json::array();
    for (const auto& v : verdicts) {
        vs.push_back({{"tag", v.tag}, {"verdict", to_string(v.verdict)}, {"detail", v.detail}, {"data", v.data}});
    }
    j["verdicts"] = std::move(vs);
    json fl = json::array();
    for (const auto& f : files) {
        json e{{"name", f.name}, {"sha256", f.sha256}};
        if (f.sha256 != "self") {
            e["bytes"] = f.bytes;
        }
        fl.push_back(std::move(e));
    }
    j["files"] = std::move(fl);
    j["exit_code"] = exit_code();
    return j;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 computation failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

fs::path resolve_output_root(const std::optional<fs::path>& cli_out, const fs::path& config_default) {
    if (const char* env = std::getenv("PARAPOS_OUT"); env && *env) {
        return fs::path(env);
    }
    if (cli_out) {
        return *cli_out;
    }
    return config_default;
}

namespace {

const std::vector<std::string> kKnownOutputs{"manifest.json",      "checks.json",      "trajectory.csv",
                                             "diagnostics.csv",    "residuals.csv",    "snapshots.bin",
                                             "steady_state.json",  "trajectory_duhamel.csv"};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::mutex& log_mutex() {
    static std::mutex m;
    return m;
}

class Logger {
public:
    Logger(std::ostream* out, std::string name) : out_(out), name_(std::move(name)) {}
    void operator()(const std::string& line) const {
        if (!out_) {
            return;
        }
        std::lock_guard lock(log_mutex());
        *out_ << "[" << name_ << "] " << line << '\n';
        out_->flush();
    }

private:
    std::ostream* out_;
    std::string name_;
};

std::string fmt(double v) { return format_number(v); }

CheckSelection selection_of(const std::vector<AssumptionId>& ids) {
    CheckSelection s;
    s.parabolicity = s.dissipativity_full = s.dissipativity_orthant = false;
    s.growth = s.compatibility = s.positivity_source = false;
    for (AssumptionId id : ids) {
        switch (id) {
            case AssumptionId::A1:
                s.parabolicity = true;
                break;
            case AssumptionId::A2:
                s.dissipativity_full = true;
                break;
            case AssumptionId::A2Prime:
                s.dissipativity_orthant = true;
                break;
            case AssumptionId::A4a:
            case AssumptionId::A4b:
                s.growth = true;
                break;
            case AssumptionId::A5:
                break;
            case AssumptionId::A6:
                s.compatibility = true;
                break;
            case AssumptionId::A7a:
            case AssumptionId::A7b:
                s.positivity_source = true;
                break;
            case AssumptionId::MonotoneCoeffs:
                s.monotone_coefficients = true;
                break;
            case AssumptionId::InitMonotone:
                s.initial_monotonicity = true;
                break;
        }
    }
    return s;
}

// Failed entries among `ids`; entries that were not run do not count.
std::vector<std::string> failures(const HypothesisReport& report, std::initializer_list<AssumptionId> ids) {
    std::vector<std::string> out;
    for (AssumptionId id : ids) {
        if (const ReportEntry* e = report.find(id); e && e->status == CheckStatus::fail) {
            out.push_back(to_string(id));
        }
    }
    return out;
}

// Entries among `ids` that are absent or not applicable.
std::vector<std::string> unchecked(const HypothesisReport& report, std::initializer_list<AssumptionId> ids) {
    std::vector<std::string> out;
    for (AssumptionId id : ids) {
        const ReportEntry* e = report.find(id);
        if (!e || e->status == CheckStatus::not_applicable) {
            out.push_back(to_string(id));
        }
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& i : items) {
        s += (s.empty() ? "" : ", ") + i;
    }
    return s;
}

constexpr std::initializer_list<AssumptionId> kPositivityHypotheses{AssumptionId::A1, AssumptionId::A6,
                                                                    AssumptionId::A7a, AssumptionId::A7b};

// Downgrades a conclusion to inconclusive when the hypotheses it rests on failed.
VerdictEntry gated(std::string tag, const HypothesisReport& report, std::initializer_list<AssumptionId> needed) {
    VerdictEntry v;
    v.tag = std::move(tag);
    const auto bad = failures(report, needed);
    if (!bad.empty()) {
        v.verdict = Verdict::inconclusive;
        v.detail = "hypotheses failed: " + join(bad);
    }
    return v;
}

bool is_gated(const VerdictEntry& v) { return !v.detail.empty(); }

VerdictEntry no_trajectory(std::string tag) {
    VerdictEntry v;
    v.tag = std::move(tag);
    v.verdict = Verdict::inconclusive;
    v.detail = "no fdm trajectory was produced";
    return v;
}

double sup_abs(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) {
        s = std::max(s, std::abs(e));
    }
    return s;
}

double component_sup(const Field& f, int k) { return sup_abs(f.component(k)); }

VerdictEntry positivity_verdict(const HypothesisReport& report, const Trajectory& traj) {
    VerdictEntry v = gated("positivity", report, kPositivityHypotheses);
    double worst = 0.0;  // max of negpart / (1 + sup)
    double worst_t = 0.0;
    for (const auto& d : traj.diagnostics) {
        const double r = d.negpart_norm / (1.0 + d.sup_norm);
        if (r > worst) {
            worst = r;
            worst_t = d.t;
        }
    }
    v.data = {{"max_relative_negative_part", worst}, {"at_time", worst_t}, {"tolerance", 1e-8},
              {"max_clipped", traj.max_clipped}, {"within_positivity_step_bound", traj.within_positivity_bound},
              {"positivity_step_bound", traj.positivity_step_bound}};
    if (is_gated(v)) {
        return v;
    }
    if (worst <= 1e-8) {
        v.verdict = Verdict::verified;
        v.detail = "negative part <= 1e-8 (1 + sup|u|) at every step";
    } else {
        v.verdict = Verdict::violated;
        v.detail = "negative part " + fmt(worst) + " (relative) at t = " + fmt(worst_t);
    }
    return v;
}

VerdictEntry max_bound_verdict(const HypothesisReport& report, const Trajectory& traj, const Field& phi) {
    VerdictEntry v = gated("max-bound", report,
                           {AssumptionId::A1, AssumptionId::A2, AssumptionId::A2Prime, AssumptionId::A6,
                            AssumptionId::A7a, AssumptionId::A7b});
    if (is_gated(v)) {
        return v;
    }
    if (!report.d1 || !report.d2) {
        v.detail = "no dissipativity constants; request A2' or A2";
        return v;
    }
    const double T = traj.diagnostics.back().t;
    const double bound = max_principle_bound(*report.d1, *report.d2, T, phi);
    double sup = 0.0;
    for (const auto& d : traj.diagnostics) {
        sup = std::max(sup, d.sup_norm);
    }
    v.data = {{"d1", *report.d1}, {"d2", *report.d2}, {"horizon", T}, {"bound", bound}, {"trajectory_sup", sup}};
    if (sup <= bound + 1e-6) {
        v.verdict = Verdict::verified;
        v.detail = "sup " + fmt(sup) + " <= bound " + fmt(bound);
    } else {
        v.verdict = Verdict::violated;
        v.detail = "sup " + fmt(sup) + " exceeds bound " + fmt(bound);
    }
    return v;
}

// beta_k -> 0 uniformly, read from the configured analytic limit.
std::optional<std::string> decaying_growth(const ScenarioConfig& cfg, int k, const std::vector<Point>& points) {
    const auto& limit = cfg.growth[static_cast<std::size_t>(k)].limit;
    if (!limit) {
        return "growth rate has no analytic limit; decay cannot be confirmed";
    }
    for (const Point& x : points) {
        if (std::abs(limit(x)) > 1e-12) {
            return "growth rate does not decay to 0 (limit " + fmt(limit(x)) + ")";
        }
    }
    return std::nullopt;
}

std::vector<VerdictEntry> extinction_verdicts(const ScenarioConfig& cfg, const ExtinctionConfig& ex,
                                              const HypothesisReport& report, const Trajectory& traj,
                                              const Field& phi) {
    std::vector<VerdictEntry> out;
    const int k = ex.component;
    const auto points = node_points(phi.grid());
    const auto decay = decaying_growth(cfg, k, points);
    const double sup_phi = component_sup(phi, k);

    if (ex.gronwall) {
        VerdictEntry v = gated("gronwall-bound", report, kPositivityHypotheses);
        if (!is_gated(v)) {
            try {
                const GronwallBound g =
                    gronwall_extinction_bound(sup_phi, cfg.growth[static_cast<std::size_t>(k)].field, points);
                double worst = -1.0;
                double worst_t = 0.0;
                for (const auto& d : traj.diagnostics) {
                    const double s = d.component_sup.at(static_cast<std::size_t>(k));
                    if (s - g.bound > worst) {
                        worst = s - g.bound;
                        worst_t = d.t;
                    }
                }
                v.data = {{"component", k + 1}, {"integral", g.integral}, {"bound", g.bound},
                          {"max_excess", worst}, {"at_time", worst_t}};
                if (worst <= 1e-6) {
                    v.verdict = Verdict::verified;
                    v.detail = "sup u^" + std::to_string(k + 1) + " <= " + fmt(g.bound) + " at every step";
                } else {
                    v.verdict = Verdict::violated;
                    v.detail = "bound exceeded by " + fmt(worst) + " at t = " + fmt(worst_t);
                }
            } catch (const IntegrabilityError& e) {
                v.verdict = Verdict::inconclusive;
                v.detail = std::string("growth rate not integrable: ") + e.what();
            }
        }
        out.push_back(std::move(v));
    }

    VerdictEntry v = gated("extinction", report, kPositivityHypotheses);
    const ExtinctionResult r = extinction_check(traj, k, ex.tolerance, ex.window_fraction);
    v.data = {{"component", k + 1}, {"final_sup", r.final_sup}, {"decreasing", r.decreasing},
              {"tolerance", ex.tolerance}, {"final_time", traj.diagnostics.back().t}};
    if (!is_gated(v)) {
        if (decay) {
            v.verdict = Verdict::inconclusive;
            v.detail = *decay;
        } else if (r.extinct) {
            v.verdict = Verdict::verified;
            v.detail = "final sup " + fmt(r.final_sup) + " <= " + fmt(ex.tolerance) + ", decreasing tail";
        } else {
            v.verdict = Verdict::violated;
            v.detail = "final sup " + fmt(r.final_sup) + (r.decreasing ? "" : ", tail not decreasing");
        }
    }
    out.push_back(std::move(v));
    return out;
}

struct SteadyOutcome {
    SteadyStateReport report;
    std::vector<std::vector<WeakResidual>> levels;
    std::vector<VerdictEntry> verdicts;
};

SteadyOutcome steady_analysis(const ScenarioConfig& cfg, const SteadyConfig& st, const HypothesisReport& report,
                              const ProblemSpec& spec, const SteadyRun& run, const Logger& log) {
    SteadyOutcome out;
    const Trajectory& traj = run.trajectory;
    out.report = extract_steady_state(traj, st.options.window_fraction, st.options.steady_tol);
    const auto needed = {AssumptionId::A1,  AssumptionId::A6,  AssumptionId::A7a, AssumptionId::A7b,
                         AssumptionId::MonotoneCoeffs, AssumptionId::InitMonotone};

    VerdictEntry mono = gated("monotone-convergence", report, needed);
    const auto missing = unchecked(report, {AssumptionId::MonotoneCoeffs, AssumptionId::InitMonotone});
    const MonotoneCheck up = detect_monotone(traj, 0, +1);
    const MonotoneCheck down = detect_monotone(traj, 1, -1);
    out.report.monotone_margins = {up.worst_margin, down.worst_margin};
    mono.data = {{"u_min_rate", up.worst_margin},      {"u_tolerance", up.tolerance},
                 {"v_max_rate", -down.worst_margin},   {"v_tolerance", down.tolerance},
                 {"tail_slope", out.report.tail_slope}, {"steady_tol", st.options.steady_tol},
                 {"stop_time", run.stop_time},         {"converged", out.report.converged}};
    if (!is_gated(mono)) {
        if (!missing.empty()) {
            mono.verdict = Verdict::inconclusive;
            mono.detail = "hypotheses not checked: " + join(missing);
        } else if (up.pass && down.pass && out.report.converged) {
            mono.verdict = Verdict::verified;
            mono.detail = "u non-decreasing, v non-increasing, tail slope " + fmt(out.report.tail_slope);
        } else {
            mono.verdict = Verdict::violated;
            std::string why;
            if (!up.pass) {
                why += "u decreases at t = " + fmt(up.t) + "; ";
            }
            if (!down.pass) {
                why += "v increases at t = " + fmt(down.t) + "; ";
            }
            if (!out.report.converged) {
                why += "no steady state by t = " + fmt(run.stop_time);
            }
            mono.detail = why;
        }
    }
    out.verdicts.push_back(std::move(mono));

    VerdictEntry weak = gated("weak-limit", report, needed);
    const LimitCoefficients limits = build_limits(cfg);
    const SpatialDomain& domain = spec.domain;
    const auto battery = st.battery ? *st.battery : default_battery(domain);
    if (out.report.state) {
        out.report.residuals = elliptic_weak_residual(*out.report.state, limits, battery);
        out.levels.push_back(out.report.residuals);
    }
    // Successive (h, dt) halvings, each run to its own steady state.
    std::vector<int> nodes = cfg.nodes;
    SchemeConfig scheme = cfg.scheme;
    bool refined_ok = true;
    for (int level = 1; level <= st.refinements && out.report.state; ++level) {
        for (int& n : nodes) {
            n = 2 * n - 1;
        }
        scheme.dt *= 0.5;
        scheme.snapshot_stride *= 2;
        log("refinement " + std::to_string(level) + ": " + std::to_string(nodes[0]) + " nodes, dt " + fmt(scheme.dt));
        const ProblemSpec fine = build_problem(cfg, nodes);
        const SteadyRun fr = solve_until_steady(fine, scheme, st.options);
        const SteadyStateReport fs_report =
            extract_steady_state(fr.trajectory, st.options.window_fraction, st.options.steady_tol);
        refined_ok = refined_ok && fs_report.converged;
        out.levels.push_back(elliptic_weak_residual(*fs_report.state, limits, battery));
    }

    double base_max = 0.0;
    bool decreasing = true;
    json table = json::array();
    if (!out.levels.empty()) {
        for (std::size_t i = 0; i < out.levels[0].size(); ++i) {
            json row = json::array();
            for (std::size_t l = 0; l < out.levels.size(); ++l) {
                const double r = std::abs(out.levels[l][i].value);
                row.push_back(r);
                if (l > 0 && !(r < std::abs(out.levels[l - 1][i].value))) {
                    decreasing = false;
                }
            }
            base_max = std::max(base_max, std::abs(out.levels[0][i].value));
            table.push_back({{"test_id", out.levels[0][i].test_id},
                             {"equation", out.levels[0][i].equation},
                             {"magnitudes", std::move(row)}});
        }
    }
    weak.data = {{"base_max_residual", base_max},
                 {"tolerance", st.residual_tolerance},
                 {"levels", out.levels.size()},
                 {"residuals", std::move(table)},
                 {"battery_size", battery.size()},
                 {"note", out.report.battery_note}};
    if (!is_gated(weak)) {
        if (!missing.empty()) {
            weak.verdict = Verdict::inconclusive;
            weak.detail = "hypotheses not checked: " + join(missing);
        } else if (!out.report.converged || !refined_ok) {
            weak.verdict = Verdict::inconclusive;
            weak.detail = "a run did not reach its steady state";
        } else if (base_max <= st.residual_tolerance && decreasing) {
            weak.verdict = Verdict::verified;
            weak.detail = "max residual " + fmt(base_max) + ", decreasing over " +
                          std::to_string(out.levels.size() - 1) + " halvings";
        } else {
            weak.verdict = Verdict::violated;
            weak.detail = base_max > st.residual_tolerance ? "max residual " + fmt(base_max) + " above tolerance"
                                                           : "residuals do not decrease under refinement";
        }
    }
    out.verdicts.push_back(std::move(weak));
    return out;
}

VerdictEntry oracle_verdict(const OracleConfig& oc, const HypothesisReport& report, const Trajectory& fdm,
                            const PicardResult& picard) {
    VerdictEntry v = gated("oracle-equivalence", report, kPositivityHypotheses);
    const Field& a = fdm.final_state();
    const Field& b = picard.trajectory.final_state();
    double diff = 0.0;
    const auto ra = a.raw();
    const auto rb = b.raw();
    for (std::size_t i = 0; i < ra.size(); ++i) {
        diff = std::max(diff, std::abs(ra[i] - rb[i]));
    }
    const double scale = sup_abs(rb);
    const double rel = scale > 0.0 ? diff / scale : diff;
    const Grid& g = a.grid();
    double h = g.spacing(0);
    if (g.dimension() == 2) {
        h = std::max(h, g.spacing(1));
    }
    const double dt = oc.kernel.dt;
    const double gate = std::max(1e-3, oc.constant * (h * h + dt));

    double worst_ratio = 0.0;
    const auto burn = static_cast<std::size_t>(oc.burn_in);
    for (const auto& window : picard.changes) {
        for (std::size_t i = burn; i + 1 < window.size(); ++i) {
            if (window[i] > 0.0) {
                worst_ratio = std::max(worst_ratio, window[i + 1] / window[i]);
            }
        }
    }
    v.data = {{"relative_linf", rel},
              {"tolerance", gate},
              {"compared_at", fdm.final_time()},
              {"picard_iterations", picard.iterations},
              {"picard_windows", picard.changes.size()},
              {"window_length", picard.window_length},
              {"max_change_ratio_after_burn_in", worst_ratio},
              {"picard_converged", picard.converged}};
    if (is_gated(v)) {
        return v;
    }
    if (std::abs(fdm.final_time() - picard.trajectory.final_time()) > 1e-9) {
        v.verdict = Verdict::inconclusive;
        v.detail = "solvers stopped at different times";
    } else if (rel <= gate && worst_ratio < 1.0 && picard.converged) {
        v.verdict = Verdict::verified;
        v.detail = "relative difference " + fmt(rel) + " <= " + fmt(gate) + ", contraction ratio " + fmt(worst_ratio);
    } else {
        v.verdict = Verdict::violated;
        v.detail = rel > gate ? "relative difference " + fmt(rel) + " above " + fmt(gate)
                              : "Picard changes did not contract (ratio " + fmt(worst_ratio) + ")";
    }
    return v;
}

VerdictEntry hypotheses_verdict(const HypothesisReport& report) {
    VerdictEntry v;
    v.tag = "positivity-hypotheses";
    const auto bad = failures(report, kPositivityHypotheses);
    const auto missing = unchecked(report, {AssumptionId::A1, AssumptionId::A7a, AssumptionId::A7b});
    if (!bad.empty()) {
        v.verdict = Verdict::violated;
        v.detail = "failed: " + join(bad);
        for (AssumptionId id : kPositivityHypotheses) {
            if (const ReportEntry* e = report.find(id); e && e->status == CheckStatus::fail) {
                v.data[to_string(id)] = {{"margin", e->worst_margin}, {"note", e->note}};
            }
        }
    } else if (!missing.empty()) {
        v.verdict = Verdict::inconclusive;
        v.detail = "not checked: " + join(missing);
    } else {
        v.verdict = Verdict::verified;
        v.detail = "A1, A7a and A7b pass on the sampled set";
    }
    return v;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

void write_residuals_csv(const fs::path& path, const std::vector<WeakResidual>& residuals) {
    std::ostringstream os;
    os << "test_id,equation,residual\n";
    for (const auto& r : residuals) {
        os << r.test_id << ',' << r.equation << ',' << format_number(r.value) << '\n';
    }
    write_text(path, os.str());
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& input, const RunOptions& options) {
    ScenarioConfig cfg = input;
    if (options.seed) {
        cfg.seed = *options.seed;
        cfg.checks.budget.seed = *options.seed;
    }
    ScenarioResult result;
    RunManifest& m = result.manifest;
    m.scenario = cfg.name;
    m.seed = cfg.seed;
    m.started = utc_now();
    json hashed = cfg.document;
    hashed["seed"] = cfg.seed;
    m.config_hash = sha256_hex(hashed.dump());
    const Logger log(options.log, cfg.name);

    fs::path dir;
    if (options.write_files) {
        dir = resolve_output_root(options.out, cfg.outputs.directory) / cfg.name;
        fs::create_directories(dir);
        for (const auto& name : kKnownOutputs) {
            fs::remove(dir / name);
        }
    }

    try {
        const bool nested = cfg.domain.boundary == BoundaryKind::cauchy_nested;
        std::optional<CauchyProblem> cauchy;
        std::optional<ProblemSpec> spec;
        if (nested) {
            cauchy = build_cauchy_problem(cfg);
            // Hypotheses are checked on the largest cutoff problem.
            spec = cutoff_problem(*cauchy, cfg.domain.radii.back(), cfg.domain.spacing);
            spec->lv = build_lv(cfg);
        } else {
            spec = build_problem(cfg);
        }

        log("checking hypotheses");
        const Majorants* maj = cfg.checks.majorants ? &*cfg.checks.majorants : nullptr;
        result.checks = check_hypotheses(*spec, cfg.checks.budget, selection_of(cfg.checks.assumptions), maj,
                                         cfg.checks.tolerances);
        const HypothesisReport& report = *result.checks;
        if (options.write_files) {
            write_text(dir / "checks.json", report.to_json().dump(2) + "\n");
        }

        std::optional<SteadyRun> steady_run;
        if (nested) {
            NestedOptions no;
            no.spacing = cfg.domain.spacing;
            if (cfg.analysis.nested) {
                no.tolerance = cfg.analysis.nested->tolerance;
                no.inner_fraction = cfg.analysis.nested->inner_fraction;
            }
            log("fdm on nested boxes");
            try {
                auto [traj, rep] = solve_cauchy_nested(*cauchy, no, cfg.scheme);
                result.trajectory = std::move(traj);
                result.nested = std::move(rep);
            } catch (const NonConvergence& e) {
                VerdictEntry v;
                v.tag = "nested-boxes";
                v.verdict = Verdict::violated;
                v.detail = e.what();
                m.verdicts.push_back(std::move(v));
            }
        } else if (cfg.analysis.steady) {
            log("fdm until steady");
            steady_run = solve_until_steady(*spec, cfg.scheme, cfg.analysis.steady->options);
            result.trajectory = steady_run->trajectory;
        } else {
            log("fdm to T = " + fmt(cfg.horizon));
            result.trajectory = solve(*spec, cfg.scheme);
        }

        if (cfg.analysis.oracle && !nested) {
            log("Picard iteration of the integral equation");
            result.picard = picard_solve(*spec, cfg.analysis.oracle->kernel);
        }

        log("analysis");
        const Field& phi = spec->initial;
        if (cfg.analysis.positivity) {
            m.verdicts.push_back(hypotheses_verdict(report));
            m.verdicts.push_back(result.trajectory ? positivity_verdict(report, *result.trajectory)
                                                   : no_trajectory("positivity"));
        }
        if (cfg.analysis.max_bound) {
            m.verdicts.push_back(result.trajectory ? max_bound_verdict(report, *result.trajectory, phi)
                                                   : no_trajectory("max-bound"));
        }
        if (cfg.analysis.extinction) {
            if (result.trajectory) {
                for (auto& v : extinction_verdicts(cfg, *cfg.analysis.extinction, report, *result.trajectory, phi)) {
                    m.verdicts.push_back(std::move(v));
                }
            } else {
                m.verdicts.push_back(no_trajectory("extinction"));
            }
        }
        if (cfg.analysis.steady && steady_run) {
            if (cfg.species() != 2) {
                throw SpecError("steady-state analysis needs a two-species model");
            }
            SteadyOutcome so = steady_analysis(cfg, *cfg.analysis.steady, report, *spec, *steady_run, log);
            for (auto& v : so.verdicts) {
                m.verdicts.push_back(std::move(v));
            }
            result.refinement_residuals = std::move(so.levels);
            result.steady = std::move(so.report);
        }
        if (cfg.analysis.nested && result.nested) {
            VerdictEntry v = gated("nested-boxes", report, kPositivityHypotheses);
            v.data = {{"radii", result.nested->radii}, {"differences", result.nested->differences},
                      {"tolerance", cfg.analysis.nested->tolerance}};
            if (!is_gated(v)) {
                v.verdict = result.nested->converged ? Verdict::verified : Verdict::violated;
                v.detail = result.nested->converged ? "inner differences strictly decrease to " +
                                                          fmt(result.nested->differences.back())
                                                    : "final difference " + fmt(result.nested->differences.back()) +
                                                          " above tolerance";
            }
            m.verdicts.push_back(std::move(v));
        }
        if (cfg.analysis.oracle && result.picard && result.trajectory) {
            m.verdicts.push_back(oracle_verdict(*cfg.analysis.oracle, report, *result.trajectory, *result.picard));
        }

        if (options.write_files) {
            if (result.trajectory) {
                if (cfg.outputs.csv) {
                    write_trajectory_csv(dir / "trajectory.csv", *result.trajectory, "fdm");
                    write_diagnostics_csv(dir / "diagnostics.csv", *result.trajectory);
                }
                if (cfg.outputs.binary) {
                    write_snapshots(dir / "snapshots.bin", *result.trajectory);
                }
            }
            if (result.picard && cfg.outputs.csv) {
                write_trajectory_csv(dir / "trajectory_duhamel.csv", result.picard->trajectory, "duhamel");
            }
            if (result.steady) {
                json sj = result.steady->to_json();
                sj["refinement_levels"] = result.refinement_residuals.size();
                write_text(dir / "steady_state.json", sj.dump(2) + "\n");
                if (cfg.outputs.csv) {
                    write_residuals_csv(dir / "residuals.csv", result.steady->residuals);
                }
            }
        }
    } catch (const ConfigError& e) {
        m.status = "error";
        m.error = std::string("config: ") + e.what();
    } catch (const std::exception& e) {
        m.status = "error";
        m.error = e.what();
    }

    m.finished = utc_now();
    if (options.write_files) {
        std::vector<fs::path> present;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
                present.push_back(entry.path());
            }
        }
        std::sort(present.begin(), present.end());
        for (const auto& p : present) {
            m.files.push_back({p.filename().string(), sha256_file(p), fs::file_size(p)});
        }
        m.files.push_back({"manifest.json", "self", 0});
        write_text(dir / "manifest.json", m.to_json().dump(2) + "\n");
    }
    log(m.status == "ok" ? "done, exit " + std::to_string(m.exit_code()) : "error: " + m.error);
    return result;
}

std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& configs, const RunOptions& options,
                                      int workers) {
    std::vector<ScenarioResult> results(configs.size());
    if (configs.empty()) {
        return results;
    }
    std::size_t pool = workers > 0 ? static_cast<std::size_t>(workers)
                                   : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    pool = std::min(pool, configs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            results[i] = run_scenario(configs[i], options);
        }
    };
    if (pool == 1) {
        work();
        return results;
    }
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < pool; ++w) {
        threads.emplace_back(work);
    }
    for (auto& t : threads) {
        t.join();
    }
    return results;
}

}  // namespace parapos
