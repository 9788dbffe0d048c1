#include "parapos/scenario_library.hpp"

#include <utility>

#include "parapos/errors.hpp"

namespace parapos {

namespace {

struct Entry {
    const char* name;
    const char* text;
};

constexpr Entry kScenarios[] = {
    {"S1_positivity", R"({
  "name": "S1_positivity",
  "description": "Two-species competition on the unit square; non-negativity of both densities.",
  "seed": 11,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 1], [0, 1]]},
    "grid": {"nodes": [41, 41]},
    "horizon": 5.0,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.01, 0.02],
      "growth": [1.0, 0.8],
      "interaction": [[1.0, 0.5], [0.4, 1.0]]
    },
    "initial": [
      {"shape": "bump", "amplitude": 0.8, "center": [0.35, 0.4], "radius": 0.25},
      {"shape": "bump", "amplitude": 0.6, "center": [0.65, 0.6], "radius": 0.25}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "positivity": "monitor_only", "snapshot_stride": 50},
  "checks": {
    "assumptions": ["A1", "A2'", "A6", "A7a", "A7b"],
    "budget": {"u_radius": 2.0, "p_radius": 1.0}
  },
  "analysis": {"positivity": true}
})"},
    {"S2_maxbound", R"({
  "name": "S2_maxbound",
  "description": "Sup-norm of a competition run against the a-priori bound from the dissipativity constants.",
  "seed": 12,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 1]]},
    "grid": {"nodes": [101]},
    "horizon": 2.0,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.05, 0.05],
      "growth": [1.0, {"family": "separable",
                       "time": {"kind": "exponential", "a": 1.0, "b": 0.5, "rate": 2.0},
                       "space": {"kind": "sine", "base": 1.0, "amplitude": 0.2, "modes": [2]}}],
      "interaction": [[1.0, 0.3], [0.6, 1.0]]
    },
    "initial": [
      {"shape": "bump", "amplitude": 1.5, "center": [0.4], "radius": 0.3},
      {"shape": "bump", "amplitude": 0.8, "center": [0.6], "radius": 0.3}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "snapshot_stride": 10},
  "checks": {
    "assumptions": ["A1", "A2'", "A6", "A7a", "A7b"],
    "budget": {"u_radius": 2.0}
  },
  "analysis": {"positivity": true, "max_bound": true}
})"},
    {"S3_extinction", R"({
  "name": "S3_extinction",
  "description": "Integrable growth rate beta(t) = exp(-t): Gronwall bound and extinction of the first species.",
  "seed": 13,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 1]]},
    "grid": {"nodes": [101]},
    "horizon": 30.0,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.05, 0.05],
      "growth": [{"family": "exponential", "a": 0.0, "b": 1.0, "rate": 1.0}, 1.0],
      "interaction": [[1.0, 0.5], [0.5, 1.0]]
    },
    "initial": [
      {"shape": "bump", "amplitude": 0.8, "center": [0.5], "radius": 0.4},
      {"shape": "bump", "amplitude": 0.5, "center": [0.5], "radius": 0.4}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "snapshot_stride": 100},
  "checks": {
    "assumptions": ["A1", "A2'", "A6", "A7a", "A7b"],
    "budget": {"u_radius": 2.0}
  },
  "analysis": {
    "positivity": true,
    "extinction": {"component": 1, "tolerance": 1e-3, "window_fraction": 0.1, "gronwall": true}
  }
})"},
    {"S4_asymptotics", R"({
  "name": "S4_asymptotics",
  "description": "Monotone coefficients and ordered initial data: monotone convergence to a weak steady state.",
  "seed": 14,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 1]]},
    "grid": {"nodes": [201]},
    "horizon": 50.0,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.01, 0.01],
      "growth": [
        {"family": "separable",
         "time": {"kind": "exponential", "a": 2.4, "b": -0.4, "rate": 2.0},
         "space": {"kind": "sine", "base": 1.0, "amplitude": 0.3, "modes": [1]}},
        {"family": "exponential", "a": 2.0, "b": 0.6, "rate": 2.0}
      ],
      "interaction": [
        [{"family": "exponential", "a": 2.0, "b": 1.0, "rate": 2.0},
         {"family": "exponential", "a": 0.2, "b": 0.2, "rate": 2.0}],
        [{"family": "exponential", "a": 0.8, "b": -0.4, "rate": 2.0},
         {"family": "exponential", "a": 2.0, "b": -0.6, "rate": 2.0}]
      ]
    },
    "initial": [
      {"shape": "sine", "amplitude": 0.05},
      {"shape": "steady", "rate": 2.6, "crowding": 1.4}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "snapshot_stride": 10},
  "checks": {
    "assumptions": ["A1", "A2'", "A7a", "A7b", "MonotoneCoeffs", "InitMonotone"],
    "budget": {"u_radius": 2.0}
  },
  "analysis": {
    "positivity": true,
    "steady": {"window_fraction": 0.1, "steady_tol": 1e-8, "t_max": 50.0,
               "refinements": 2, "residual_tolerance": 5e-4}
  }
})"},
    {"S5_cauchy_nested", R"({
  "name": "S5_cauchy_nested",
  "description": "Logistic equation on the line approximated on nested boxes with smooth cutoffs.",
  "seed": 15,
  "problem": {
    "domain": {"boundary": "cauchy_nested", "dimension": 1, "radii": [4, 6, 8],
               "transition_width": 1.0, "spacing": 0.05},
    "horizon": 2.0,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.1],
      "growth": [1.0],
      "interaction": [[1.0]]
    },
    "initial": [
      {"shape": "bump", "amplitude": 0.5, "center": [0.0], "radius": 1.0}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "snapshot_stride": 20},
  "checks": {
    "assumptions": ["A1", "A2'", "A6", "A7a", "A7b"],
    "budget": {"u_radius": 1.0}
  },
  "analysis": {
    "positivity": true,
    "nested": {"tolerance": 1e-6, "inner_fraction": 0.5}
  }
})"},
    {"S6_oracle_crosscheck", R"({
  "name": "S6_oracle_crosscheck",
  "description": "Finite differences against Picard iteration of the heat-kernel integral equation.",
  "seed": 16,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 2]]},
    "grid": {"nodes": [201]},
    "horizon": 0.5,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.005, 0.01],
      "growth": [1.0, 0.8],
      "interaction": [[1.0, 0.5], [0.4, 1.0]]
    },
    "initial": [
      {"shape": "bump", "amplitude": 0.6, "center": [0.9], "radius": 0.3},
      {"shape": "bump", "amplitude": 0.4, "center": [1.1], "radius": 0.3}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.001, "snapshot_stride": 50},
  "checks": {
    "assumptions": ["A1", "A2'", "A6", "A7a", "A7b"],
    "budget": {"u_radius": 1.5}
  },
  "analysis": {
    "positivity": true,
    "oracle": {"truncation": 8, "tolerance": 1e-11, "max_iterations": 50,
               "max_window_steps": 50, "constant": 1.0, "burn_in": 2}
  }
})"},
    {"N1_a7_violation", R"({
  "name": "N1_a7_violation",
  "description": "Negative control: the source of the first species is -1 where its density vanishes.",
  "seed": 21,
  "problem": {
    "domain": {"boundary": "dirichlet_zero", "bounds": [[0, 1]]},
    "grid": {"nodes": [51]},
    "horizon": 0.5,
    "model": {
      "type": "lotka_volterra",
      "diffusion": [0.05, 0.05],
      "growth": [1.0, 1.0],
      "interaction": [[1.0, 0.5], [0.5, 1.0]],
      "source_offset": [-1.0, 0.0]
    },
    "initial": [
      {"shape": "bump", "amplitude": 0.5, "center": [0.5], "radius": 0.3},
      {"shape": "bump", "amplitude": 0.5, "center": [0.5], "radius": 0.3}
    ]
  },
  "scheme": {"stepper": "imex_be", "dt": 0.01, "snapshot_stride": 10},
  "checks": {
    "assumptions": ["A1", "A2'", "A7a", "A7b"],
    "budget": {"u_radius": 1.0}
  },
  "analysis": {"positivity": true}
})"},
};

}  // namespace

std::vector<ScenarioInfo> list_scenarios() {
    std::vector<ScenarioInfo> out;
    for (const auto& e : kScenarios) {
        const auto doc = nlohmann::json::parse(e.text);
        out.push_back({e.name, doc.at("description").get<std::string>()});
    }
    return out;
}

bool is_builtin_scenario(const std::string& name) {
    for (const auto& e : kScenarios) {
        if (name == e.name) {
            return true;
        }
    }
    return false;
}

nlohmann::json builtin_document(const std::string& name) {
    for (const auto& e : kScenarios) {
        if (name == e.name) {
            return nlohmann::json::parse(e.text);
        }
    }
    throw ConfigError("", "no built-in scenario named '" + name + "'");
}

ScenarioConfig builtin_scenario(const std::string& name) { return parse_config(builtin_document(name)); }

}  // namespace parapos
