#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parapos/duhamel.hpp"
#include "parapos/fdm.hpp"
#include "parapos/hypothesis.hpp"
#include "parapos/lv_analysis.hpp"
#include "parapos/model.hpp"
#include "parapos/sampling.hpp"

namespace parapos {

/// A coefficient beta_k or gamma_ki of (t, x), with its t -> inf limit when the family has one.
struct CoefficientConfig {
    ScalarField field;
    std::function<double(const Point&)> limit;  ///< empty for tabulated data
};

struct DomainConfig {
    BoundaryKind boundary = BoundaryKind::dirichlet_zero;
    std::vector<Interval> bounds;  ///< dirichlet_zero
    int dimension = 1;             ///< cauchy_nested
    std::vector<double> radii;
    double transition_width = 1.0;
    double spacing = 0.05;
};

struct ProfileConfig {
    std::string shape = "zero";
    nlohmann::json params;  ///< validated parameters of the shape
};

struct ChecksConfig {
    std::vector<AssumptionId> assumptions;
    SampleBudget budget;
    CheckTolerances tolerances;
    std::optional<Majorants> majorants;
};

struct ExtinctionConfig {
    int component = 0;  ///< zero-based
    double tolerance = 1e-3;
    double window_fraction = 0.1;
    bool gronwall = true;
};

struct SteadyConfig {
    SteadyOptions options;
    int refinements = 2;
    double residual_tolerance = 5e-4;
    std::optional<std::vector<TestFunction>> battery;  ///< default battery when empty
    std::map<std::string, std::function<double(const Point&)>> limit_overrides;
};

struct NestedConfig {
    double tolerance = 1e-6;
    double inner_fraction = 0.5;
};

struct OracleConfig {
    KernelConfig kernel;
    double constant = 1.0;  ///< C in max(1e-3, C (h^2 + dt))
    double burn_in = 2;
};

struct AnalysisConfig {
    bool positivity = false;
    bool max_bound = false;
    std::optional<ExtinctionConfig> extinction;
    std::optional<SteadyConfig> steady;
    std::optional<NestedConfig> nested;
    std::optional<OracleConfig> oracle;
};

struct OutputsConfig {
    std::filesystem::path directory = "parapos_out";
    bool csv = true;
    bool binary = true;
};

struct ScenarioConfig {
    std::string name;
    std::string description;
    std::uint64_t seed = 1;
    nlohmann::json document;         ///< the validated input
    std::filesystem::path base_dir;  ///< for relative table paths

    DomainConfig domain;
    std::vector<int> nodes;
    double horizon = 1.0;
    std::vector<double> diffusion;
    std::vector<CoefficientConfig> growth;
    std::vector<std::vector<CoefficientConfig>> interaction;
    std::vector<double> source_offset;  ///< empty, or one constant per species added to c^k
    std::vector<ProfileConfig> initial;

    SchemeConfig scheme;
    ChecksConfig checks;
    AnalysisConfig analysis;
    OutputsConfig outputs;

    int species() const { return static_cast<int>(diffusion.size()); }
    bool modified_source() const;
};

/// Reads and validates a scenario file. Unknown keys and schema violations raise
/// ConfigError carrying the JSON pointer of the offending value.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});
ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

LVCoefficients build_lv(const ScenarioConfig& config);

/// Dirichlet problem on the configured box; `nodes` overrides the grid.
ProblemSpec build_problem(const ScenarioConfig& config, std::optional<std::vector<int>> nodes = std::nullopt);
CauchyProblem build_cauchy_problem(const ScenarioConfig& config);
LimitCoefficients build_limits(const ScenarioConfig& config);

}  // namespace parapos
