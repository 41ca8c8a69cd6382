#pragma once

// Experiment wiring: JSON configs, immutable run directories with
// manifests, and the check -> simulate -> analyze pipeline.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "dnls/analysis.hpp"
#include "dnls/io.hpp"
#include "dnls/library.hpp"

namespace dnls {

struct AnalysisConfig {
    double xi_max = 0.0;  // 0 -> (2/3) k_max / max |m_j|
    int xi_points = 257;
    double fit_t0 = 0.0;  // 0 -> max(50, 10 * first sample time)
    double fit_t1 = 0.0;  // 0 -> t_end
};

struct CheckPlanConfig {
    int xi_points = 201;
    int sphere_samples = 2000;
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    std::string model_path;
    Grid1D grid{};
    SolverConfig solver;
    InitialData initial;
    AnalysisConfig analysis;
    CheckPlanConfig check;
    std::string a_matrix_path;
    nlohmann::json raw;
};

ExperimentConfig load_experiment_config(const std::string& path);

double auto_xi_max(const Grid1D& grid, const MassVector& masses);

std::string code_version();

struct SimulateResult {
    std::filesystem::path dir;
    Trajectory trajectory;
    int exit_code = 0;  // 0 ok, 3 blow-up
};

// Creates a fresh run directory under out_root, writes observables.csv,
// snapshots and the config copy, then the manifest (last).
SimulateResult simulate_to_dir(const CubicSystem& sys,
                               const ExperimentConfig& config,
                               const std::filesystem::path& out_root);

struct CheckOutcome {
    std::vector<ConditionReport> reports;
    std::optional<HermitianForm> matrix;
    std::string regime;  // "b3", "b2", "b1", "b0" or "none"
    bool condition_a = false;
    bool all_requested_hold = false;
};

// Runs (a), gauge (N = 1), b3 exactly, then b0/b1/b2 against the supplied
// or searched matrix.
CheckOutcome run_checks(const CubicSystem& sys, const CheckPlanConfig& plan,
                        const std::optional<HermitianForm>& user_matrix);

struct AnalyzeResult {
    std::vector<ProfileState> profiles;
    std::vector<std::pair<double, double>> residual_sup;  // (t, sup |rho|)
    std::optional<DecayFit> fit_pure;
    std::optional<DecayFit> fit_powerlog;
    std::optional<DecayFit> fit_logonly;
    std::optional<ScatteringReport> scattering;
    nlohmann::json summary;
};

// Reads the snapshots of a finished run and produces profiles, residuals
// and decay fits; writes profile CSVs and summary.jsonl into the run dir.
AnalyzeResult analyze_run(const CubicSystem& sys,
                          const ExperimentConfig& config,
                          const std::filesystem::path& run_dir);

struct PipelineResult {
    CheckOutcome checks;
    int exit_code = 0;
    std::filesystem::path run_dir;
    nlohmann::json report;
};

PipelineResult run_pipeline(const ExperimentConfig& config,
                            const std::filesystem::path& out_root,
                            bool quiet);

}  // namespace dnls
