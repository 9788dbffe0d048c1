#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "parapos/config.hpp"
#include "parapos/errors.hpp"
#include "parapos/runner.hpp"
#include "parapos/scenario_library.hpp"

namespace {

// A built-in name or a path to a scenario file.
parapos::ScenarioConfig load_any(const std::string& ref) {
    if (parapos::is_builtin_scenario(ref)) {
        return parapos::builtin_scenario(ref);
    }
    return parapos::load_config(ref);
}

int cmd_run(const std::vector<std::string>& refs, const std::optional<std::string>& out,
            const std::optional<std::uint64_t>& seed, int workers, bool quiet) {
    std::vector<parapos::ScenarioConfig> configs;
    int code = 0;
    for (const auto& ref : refs) {
        try {
            configs.push_back(load_any(ref));
        } catch (const parapos::ConfigError& e) {
            std::cerr << ref << ": " << e.what() << '\n';
            code = 2;
        }
    }
    if (configs.empty()) {
        return code;
    }
    parapos::RunOptions options;
    if (out) {
        options.out = *out;
    }
    options.seed = seed;
    options.log = quiet ? nullptr : &std::cerr;
    const auto results = parapos::run_batch(configs, options, workers);
    for (const auto& r : results) {
        const auto& m = r.manifest;
        std::cout << m.scenario << ": " << (m.status == "ok" ? "ok" : "error") << '\n';
        for (const auto& v : m.verdicts) {
            std::cout << "  " << v.tag << ": " << parapos::to_string(v.verdict);
            if (!v.detail.empty()) {
                std::cout << " (" << v.detail << ")";
            }
            std::cout << '\n';
        }
        if (!m.error.empty()) {
            std::cout << "  error: " << m.error << '\n';
        }
        code = std::max(code, m.exit_code());
    }
    return code;
}

int cmd_validate(const std::vector<std::string>& refs) {
    int code = 0;
    for (const auto& ref : refs) {
        try {
            const auto cfg = load_any(ref);
            std::cout << ref << ": valid (" << cfg.name << ")\n";
        } catch (const parapos::ConfigError& e) {
            std::cout << ref << ": " << e.what() << '\n';
            code = 2;
        }
    }
    return code;
}

int cmd_list() {
    for (const auto& s : parapos::list_scenarios()) {
        std::cout << s.name << "  " << s.description << '\n';
    }
    return 0;
}

int cmd_show(const std::string& name) {
    std::cout << parapos::builtin_document(name).dump(2) << '\n';
    return 0;
}

int cmd_export(const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& s : parapos::list_scenarios()) {
        const auto path = std::filesystem::path(dir) / (s.name + ".json");
        std::ofstream f(path);
        f << parapos::builtin_document(s.name).dump(2) << '\n';
        if (!f) {
            std::cerr << "cannot write " << path << '\n';
            return 3;
        }
        std::cout << path.string() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and hypothesis checker for parabolic reaction-diffusion systems"};
    app.set_version_flag("--version", std::string(parapos::tool_version()));
    app.require_subcommand(1);

    std::vector<std::string> run_refs;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "Run scenario files or built-in scenarios");
    run->add_option("scenarios", run_refs, "Scenario JSON files or built-in names")->required();
    run->add_option("--out", out, "Output root (PARAPOS_OUT takes precedence)");
    run->add_option("--seed", seed, "Override the sampling seed");
    run->add_option("--workers", workers, "Concurrent scenarios (default: core count)")->check(CLI::NonNegativeNumber);
    run->add_flag("-q,--quiet", quiet, "No progress on standard error");

    auto* list = app.add_subcommand("list", "List built-in scenarios");

    std::vector<std::string> validate_refs;
    auto* validate = app.add_subcommand("validate", "Validate scenario files without running them");
    validate->add_option("scenarios", validate_refs, "Scenario JSON files or built-in names")->required();

    std::string show_name;
    auto* show = app.add_subcommand("show", "Print the JSON of a built-in scenario");
    show->add_option("name", show_name)->required();

    std::string export_dir;
    auto* exp = app.add_subcommand("export", "Write every built-in scenario to a directory");
    exp->add_option("directory", export_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            return cmd_run(run_refs, out, seed, workers, quiet);
        }
        if (*list) {
            return cmd_list();
        }
        if (*validate) {
            return cmd_validate(validate_refs);
        }
        if (*show) {
            return cmd_show(show_name);
        }
        if (*exp) {
            return cmd_export(export_dir);
        }
    } catch (const parapos::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
