#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parapos/config.hpp"
#include "parapos/duhamel.hpp"
#include "parapos/fdm.hpp"
#include "parapos/hypothesis.hpp"
#include "parapos/lv_analysis.hpp"

namespace parapos {

const char* tool_version();

enum class Verdict { verified, violated, inconclusive };
std::string to_string(Verdict v);

/// Conclusion checks are conditional: when a hypothesis they rely on failed, the
/// verdict is inconclusive rather than violated.
struct VerdictEntry {
    std::string tag;
    Verdict verdict = Verdict::inconclusive;
    std::string detail;
    nlohmann::json data = nlohmann::json::object();
};

struct EmittedFile {
    std::string name;
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string scenario;
    std::string config_hash;
    std::string version = tool_version();
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::string status = "ok";  ///< "ok" or "error"
    std::string error;
    std::vector<VerdictEntry> verdicts;
    std::vector<EmittedFile> files;

    /// 0 all verified, 1 anything violated or inconclusive, 3 runtime error.
    int exit_code() const;
    const VerdictEntry* find(const std::string& tag) const;
    nlohmann::json to_json() const;
};

/// In-memory products of a run, for callers that want more than the files.
struct ScenarioResult {
    RunManifest manifest;
    std::optional<HypothesisReport> checks;
    std::optional<Trajectory> trajectory;  ///< fdm (largest box for nested runs)
    std::optional<PicardResult> picard;
    std::optional<NestedReport> nested;
    std::optional<SteadyStateReport> steady;
    std::vector<std::vector<WeakResidual>> refinement_residuals;  ///< base resolution first
};

struct RunOptions {
    std::optional<std::filesystem::path> out;  ///< overrides outputs.directory
    std::optional<std::uint64_t> seed;
    bool write_files = true;
    std::ostream* log = nullptr;  ///< progress lines
};

/// Checks, then solvers, then analysis; writes into <out>/<name>/. Module errors are
/// caught and reported as status "error" in the manifest.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Runs scenarios on a bounded worker pool (workers <= 0: hardware concurrency).
/// Results keep the input order.
std::vector<ScenarioResult> run_batch(const std::vector<ScenarioConfig>& configs, const RunOptions& options,
                                      int workers);

/// Output root: PARAPOS_OUT, then the --out value, then the config's directory.
std::filesystem::path resolve_output_root(const std::optional<std::filesystem::path>& cli_out,
                                          const std::filesystem::path& config_default);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace parapos
