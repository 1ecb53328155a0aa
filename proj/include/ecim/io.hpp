#pragma once

#include "ecim/analysis.hpp"
#include "ecim/dynamics.hpp"
#include "ecim/generate.hpp"
#include "ecim/oracle.hpp"
#include "ecim/problem.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace ecim::io {

using nlohmann::json;

// Problem: {"n": int, "J": [[...], ...] row-major, "h": [...], "label": string|null}
json to_json(const CouplingProblem& p);
CouplingProblem problem_from_json(const json& j);

// RunConfig: {"mode", "alpha", "schedule": {"kind", "beta" | "beta0", "r"}, "sigma2", "K", "seed",
//             "record_states", optional "s0"}
json to_json(const RunConfig& config);
RunConfig run_config_from_json(const json& j);

json to_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const json& j);

/// What `oracle` writes: the relaxed optimum plus the spectral classification.
struct OracleReport {
    double e_star = 0.0;
    Vector s_star;
    OptimumMethod method = OptimumMethod::MultiStartProjGrad;
    bool certified = false;
    std::optional<double> mu_hat;
    Definiteness definiteness = Definiteness::Zero;
    bool noise_required = false;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double c_squared = 0.0;
};

json to_json(const OracleReport& report);
OracleReport oracle_report_from_json(const json& j);

json to_json(const BoundReport& report);
BoundReport bound_report_from_json(const json& j);

json to_json(const Verdict& verdict);
json to_json(const RateFit& fit);

/// "k,energy" with one row per recorded energy.
std::string trajectory_csv(const Trajectory& trajectory);

/// "k,mean_gap,ci_halfwidth".
std::string ensemble_csv(const EnsembleStats& stats);
/// Reads mean_gap and ci_halfwidth back; runs and clamp counts are not stored in the CSV.
EnsembleStats ensemble_from_csv(const std::string& text);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace ecim::io
