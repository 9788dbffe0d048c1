#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "parapos/config.hpp"
#include "parapos/runner.hpp"
#include "parapos/scenario_library.hpp"
#include "parapos/trajectory_io.hpp"

using namespace parapos;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PARAPOS_TEST_DATA;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json minimal() { return nlohmann::json::parse(slurp(kData / "logistic_minimal.json")); }

std::string pointer_of(const nlohmann::json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<accepted>";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("parapos_test_" + name);
    fs::remove_all(p);
    return p;
}

RunOptions options_in(const fs::path& dir) {
    RunOptions o;
    o.out = dir;
    return o;
}

}  // namespace

TEST(LoadConfig, MinimalLogisticFile) {
    const auto c = load_config(kData / "logistic_minimal.json");
    EXPECT_EQ(c.name, "logistic_minimal");
    EXPECT_EQ(c.species(), 1);
    EXPECT_EQ(c.horizon, 1.0);
    EXPECT_EQ(c.nodes, std::vector<int>{21});
    EXPECT_EQ(c.scheme.dt, 0.01);
}

TEST(LoadConfig, MissingHorizon) {
    try {
        load_config(kData / "missing_horizon.json");
        FAIL() << "accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.pointer(), "/problem/horizon");
    }
}

TEST(LoadConfig, NegativeTimeStep) {
    auto doc = minimal();
    doc["scheme"]["dt"] = -0.01;
    EXPECT_EQ(pointer_of(doc), "/scheme/dt");
}

TEST(LoadConfig, UnknownKeysRejected) {
    auto doc = minimal();
    doc["problem"]["colour"] = "blue";
    EXPECT_EQ(pointer_of(doc), "/problem/colour");
    doc = minimal();
    doc["extra"] = 1;
    EXPECT_EQ(pointer_of(doc), "/extra");
}

TEST(LoadConfig, ShapeErrors) {
    auto doc = minimal();
    doc["problem"]["model"]["growth"] = {1.0, 2.0};
    EXPECT_NE(pointer_of(doc), "<accepted>");
    doc = minimal();
    doc["problem"]["initial"][0]["shape"] = "triangle";
    EXPECT_EQ(pointer_of(doc).rfind("/problem/initial/0", 0), 0u);
    doc = minimal();
    doc["problem"]["model"]["diffusion"] = {0.0};
    EXPECT_EQ(pointer_of(doc).rfind("/problem/model/diffusion", 0), 0u);
}

TEST(LoadConfig, UnparseableText) {
    EXPECT_THROW(load_config(kData / "unparseable.json"), ConfigError);
    EXPECT_THROW(load_config(kData / "no_such_file.json"), ConfigError);
}

TEST(LoadConfig, TabulatedCoefficient) {
    auto doc = minimal();
    doc["problem"]["model"]["growth"] = {{{"family", "table"}, {"path", "table_growth.csv"}}};
    const auto c = parse_config(doc, kData);
    EXPECT_DOUBLE_EQ(c.growth[0].field(5.0, {0.5, 0.0}), 1.5);
    doc["problem"]["model"]["growth"][0]["path"] = "missing.csv";
    EXPECT_THROW(parse_config(doc, kData), ConfigError);
}

TEST(ScenarioLibrary, ListsCoreScenarios) {
    const auto list = list_scenarios();
    EXPECT_GE(list.size(), 6u);
    std::set<std::string> names;
    for (const auto& s : list) {
        names.insert(s.name);
        EXPECT_FALSE(s.description.empty());
    }
    for (const char* n : {"S1_positivity", "S2_maxbound", "S3_extinction", "S4_asymptotics", "S5_cauchy_nested",
                          "S6_oracle_crosscheck"}) {
        EXPECT_TRUE(names.count(n)) << n;
    }
    EXPECT_THROW(builtin_document("S0"), ConfigError);
}

TEST(ScenarioLibrary, EveryEntryLoadsFromFile) {
    const auto dir = scratch("library");
    fs::create_directories(dir);
    for (const auto& s : list_scenarios()) {
        const auto path = dir / (s.name + ".json");
        std::ofstream(path) << builtin_document(s.name).dump(2);
        EXPECT_NO_THROW(load_config(path)) << s.name;
    }
}

TEST(ScenarioLibrary, AsymptoticsScenarioSatisfiesOrderingHypotheses) {
    const auto c = builtin_scenario("S4_asymptotics");
    const auto lv = build_lv(c);
    const auto spec = build_problem(c);
    const auto mono = check_monotone_coefficients(lv, spec.domain, c.horizon, c.checks.budget);
    EXPECT_EQ(mono.status, CheckStatus::pass) << mono.note;
    const auto init = check_initial_monotonicity(lv, spec.initial);
    EXPECT_EQ(init.status, CheckStatus::pass) << init.note << " " << init.worst_margin;
}

TEST(OutputRoot, Precedence) {
    ::unsetenv("PARAPOS_OUT");
    EXPECT_EQ(resolve_output_root(std::nullopt, "cfg"), fs::path("cfg"));
    EXPECT_EQ(resolve_output_root(fs::path("cli"), "cfg"), fs::path("cli"));
    ::setenv("PARAPOS_OUT", "env", 1);
    EXPECT_EQ(resolve_output_root(fs::path("cli"), "cfg"), fs::path("env"));
    ::unsetenv("PARAPOS_OUT");
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(RunScenario, PositivityVerifiedAndManifestComplete) {
    ::unsetenv("PARAPOS_OUT");
    const auto dir = scratch("s1");
    const auto r = run_scenario(builtin_scenario("S1_positivity"), options_in(dir));
    EXPECT_EQ(r.manifest.status, "ok") << r.manifest.error;
    EXPECT_EQ(r.manifest.exit_code(), 0);
    const auto* v = r.manifest.find("positivity");
    ASSERT_NE(v, nullptr);
    EXPECT_EQ(v->verdict, Verdict::verified);
    const fs::path out = dir / "S1_positivity";
    std::set<std::string> listed;
    for (const auto& f : r.manifest.files) {
        listed.insert(f.name);
        if (f.sha256 != "self") {
            EXPECT_EQ(f.sha256, sha256_file(out / f.name)) << f.name;
            EXPECT_EQ(f.bytes, fs::file_size(out / f.name));
        }
    }
    for (const auto& entry : fs::directory_iterator(out)) {
        EXPECT_TRUE(listed.count(entry.path().filename().string())) << entry.path();
    }
    for (const char* name : {"manifest.json", "checks.json", "trajectory.csv", "diagnostics.csv", "snapshots.bin"}) {
        EXPECT_TRUE(listed.count(name)) << name;
    }
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    for (const auto& verdict : manifest.at("verdicts")) {
        const auto s = verdict.at("verdict").get<std::string>();
        EXPECT_TRUE(s == "verified" || s == "violated" || s == "inconclusive");
    }
}

TEST(RunScenario, NegativeControlFlagsHypotheses) {
    const auto dir = scratch("n1");
    const auto r = run_scenario(builtin_scenario("N1_a7_violation"), options_in(dir));
    EXPECT_EQ(r.manifest.status, "ok");
    const auto* h = r.manifest.find("positivity-hypotheses");
    ASSERT_NE(h, nullptr);
    EXPECT_EQ(h->verdict, Verdict::violated);
    const auto* p = r.manifest.find("positivity");
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->verdict, Verdict::inconclusive);
    EXPECT_EQ(r.manifest.exit_code(), 1);
    ASSERT_TRUE(r.checks.has_value());
    const auto* a7b = r.checks->find(AssumptionId::A7b);
    ASSERT_NE(a7b, nullptr);
    EXPECT_EQ(a7b->status, CheckStatus::fail);
    EXPECT_TRUE(a7b->witness.has_value());
}

TEST(RunScenario, ReproducibleOutputs) {
    auto config = builtin_scenario("S2_maxbound");
    const auto dir_a = scratch("rep_a");
    const auto dir_b = scratch("rep_b");
    const auto a = run_scenario(config, options_in(dir_a));
    const auto b = run_scenario(config, options_in(dir_b));
    for (const char* name : {"trajectory.csv", "diagnostics.csv", "snapshots.bin", "checks.json"}) {
        EXPECT_EQ(slurp(dir_a / config.name / name), slurp(dir_b / config.name / name)) << name;
    }
    auto strip = [](nlohmann::json j) {
        j.erase("started");
        j.erase("finished");
        for (auto& f : j["files"]) {
            if (f["name"] == "manifest.json") {
                f.erase("bytes");
            }
        }
        return j.dump();
    };
    EXPECT_EQ(strip(a.manifest.to_json()), strip(b.manifest.to_json()));
}

TEST(RunScenario, SeedChangesConfigHash) {
    const auto config = builtin_scenario("N1_a7_violation");
    RunOptions o;
    o.write_files = false;
    const auto a = run_scenario(config, o);
    o.seed = 999;
    const auto b = run_scenario(config, o);
    EXPECT_NE(a.manifest.config_hash, b.manifest.config_hash);
    EXPECT_EQ(b.manifest.seed, 999u);
}

TEST(RunScenario, ModuleErrorsBecomeStatusError) {
    auto doc = minimal();
    doc["scheme"]["stepper"] = "erk2";
    doc["scheme"]["dt"] = 0.5;
    doc["problem"]["model"]["diffusion"] = {1.0};
    RunOptions o;
    o.write_files = false;
    const auto r = run_scenario(parse_config(doc), o);
    EXPECT_EQ(r.manifest.status, "error");
    EXPECT_FALSE(r.manifest.error.empty());
    EXPECT_EQ(r.manifest.exit_code(), 3);
}

TEST(RunScenario, OnlyKnownFilesAreReplaced) {
    const auto dir = scratch("keep");
    const auto config = builtin_scenario("N1_a7_violation");
    fs::create_directories(dir / config.name);
    std::ofstream(dir / config.name / "notes.txt") << "mine";
    run_scenario(config, options_in(dir));
    EXPECT_TRUE(fs::exists(dir / config.name / "notes.txt"));
}

TEST(RunBatch, KeepsInputOrder) {
    std::vector<ScenarioConfig> configs{builtin_scenario("N1_a7_violation"), builtin_scenario("S1_positivity")};
    RunOptions o;
    o.write_files = false;
    const auto results = run_batch(configs, o, 2);
    ASSERT_EQ(results.size(), 2u);
    EXPECT_EQ(results[0].manifest.scenario, "N1_a7_violation");
    EXPECT_EQ(results[1].manifest.scenario, "S1_positivity");
}

TEST(TrajectoryIo, SnapshotRoundTripAndNumberFormat) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1e-300), "1e-300");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);

    Grid g(SpatialDomain({{0.0, 1.0}, {0.0, 1.0}}), {4, 3});
    Trajectory traj;
    for (int s = 0; s < 2; ++s) {
        Field f(g, 2);
        for (std::size_t i = 0; i < f.raw().size(); ++i) {
            f.raw()[i] = 0.25 * static_cast<double>(i) + s;
        }
        traj.snapshot_times.push_back(0.5 * s);
        traj.snapshots.push_back(f);
        traj.diagnostics.push_back(diagnose_step(f, f, 0.5 * s, 0.0));
    }
    const auto path = scratch("snap.bin");
    write_snapshots(path, traj);
    const auto file = read_snapshots(path);
    EXPECT_EQ(file.dims, 2);
    EXPECT_EQ(file.components, 2);
    EXPECT_EQ(file.counts, (std::vector<int>{4, 3}));
    ASSERT_EQ(file.values.size(), 2u);
    EXPECT_EQ(file.times[1], 0.5);
    EXPECT_EQ(file.values[1], std::vector<double>(traj.snapshots[1].raw().begin(), traj.snapshots[1].raw().end()));
    EXPECT_EQ(slurp(path).substr(0, 5), "PPOS1");

    std::ostringstream csv;
    write_trajectory_csv(csv, traj, "fdm");
    const auto text = csv.str();
    EXPECT_EQ(text.rfind("# source=fdm\nt,i,j,component,value\n", 0), 0u);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2 + 2 * 12 * 2);
}
