#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "parapos/model.hpp"
#include "parapos/sampling.hpp"

namespace parapos {

enum class AssumptionId { A1, A2, A2Prime, A4a, A4b, A5, A6, A7a, A7b, MonotoneCoeffs, InitMonotone };
enum class CheckStatus { pass, fail, not_applicable };

std::string to_string(AssumptionId id);
std::string to_string(CheckStatus status);

struct Witness {
    double t = 0.0;
    Point x{};
    std::vector<double> u;
    std::vector<double> p;
    std::optional<std::size_t> node;
};

/// One assumption's outcome. `worst_margin` is the smallest sampled slack of the
/// inequality being checked, so negative values are violations.
struct ReportEntry {
    AssumptionId id = AssumptionId::A1;
    CheckStatus status = CheckStatus::not_applicable;
    double worst_margin = 0.0;
    std::optional<Witness> witness;
    std::string note;
};

struct CheckTolerances {
    double zero = 1e-12;
    double sign = 1e-10;
    double compat = 1e-6;  ///< relative; scaled by (1 + coefficient scale)
};

/// Results are statements about the sample set only.
struct HypothesisReport {
    std::vector<ReportEntry> entries;
    std::optional<double> kappa;
    std::optional<double> d1;
    std::optional<double> d2;

    const ReportEntry* find(AssumptionId id) const;
    /// True when the entry exists and passed.
    bool passed(AssumptionId id) const;
    /// True when no present entry failed.
    bool none_failed() const;

    nlohmann::json to_json() const;
};

enum class DissipativityMode { A2, A2Prime };

struct ParabolicityResult {
    ReportEntry entry;
    double kappa = 0.0;
};

struct DissipativityResult {
    ReportEntry entry;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Smallest eigenvalue of A over the samples; with majorants also mu_hat(|u|) I <= A <= mu(|u|) I.
ParabolicityResult check_parabolicity(const ProblemSpec& spec, const SampleBudget& budget,
                                      const Majorants* majorants = nullptr, const CheckTolerances& tol = {});

/// (c, u) <= d1 + d2 |u|^2 over the full ball (A2) or the non-negative orthant (A2').
/// Estimates d2 as the largest sampled (c,u)/|u|^2 and d1 as the largest excess over d2 |u|^2.
DissipativityResult check_dissipativity(const ProblemSpec& spec, const SampleBudget& budget, DissipativityMode mode,
                                        const Majorants* majorants = nullptr, const CheckTolerances& tol = {});

/// Growth bounds on b and c. The decay of theta2 in |p| is checked on a geometric
/// ladder (last three rungs strictly decreasing), a heuristic stand-in for the limit.
std::pair<ReportEntry, ReportEntry> check_growth(const ProblemSpec& spec, const SampleBudget& budget,
                                                 const Majorants* majorants, const CheckTolerances& tol = {});

/// Boundary compatibility of the initial data, derivatives by one-sided second-order differences.
ReportEntry check_compatibility(const ProblemSpec& spec, const CheckTolerances& tol = {});

/// Non-negative initial data (first) and c^k >= 0 on {u^k = 0, u^i >= 0} (second).
std::pair<ReportEntry, ReportEntry> check_positivity_source(const ProblemSpec& spec, const SampleBudget& budget,
                                                            const CheckTolerances& tol = {});

/// Time-derivative signs (+,-,-,-,+,+) of (beta, gamma, delta, rho, sigma, theta) by
/// central differences with step 1e-4 * max(1, T). Two-species models only.
ReportEntry check_monotone_coefficients(const LVCoefficients& lv, const SpatialDomain& domain, double horizon,
                                        const SampleBudget& budget, const CheckTolerances& tol = {});

/// d1 Lap phi + phi(beta - gamma phi - delta psi) >= 0 and
/// d2 Lap psi + psi(rho - sigma phi - theta psi) <= 0 at interior nodes, t = 0.
/// `initial` carries (phi, psi).
ReportEntry check_initial_monotonicity(const LVCoefficients& lv, const Field& initial,
                                       const CheckTolerances& tol = {});

/// Hoelder regularity of derivatives is not estimable from samples.
ReportEntry hoelder_not_checked();

struct CheckSelection {
    bool parabolicity = true;
    bool dissipativity_full = false;    ///< A2
    bool dissipativity_orthant = true;  ///< A2'
    bool growth = true;
    bool compatibility = true;
    bool positivity_source = true;
    bool monotone_coefficients = false;
    bool initial_monotonicity = false;
};

/// Runs the selected checks and assembles the report in a fixed order. The estimated
/// d1, d2 come from the orthant check when it runs, else from the full-ball check.
HypothesisReport check_hypotheses(const ProblemSpec& spec, const SampleBudget& budget, const CheckSelection& which,
                                  const Majorants* majorants = nullptr, const CheckTolerances& tol = {});

}  // namespace parapos
