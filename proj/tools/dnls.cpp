// dnls: condition checks, spectral simulation and asymptotic analysis of
// cubic derivative Schrodinger systems. Exit codes: 0 ok, 1 violated
// conditions, 2 parse/usage errors, 3 blow-up.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "dnls/experiment.hpp"

namespace {

using namespace dnls;
using nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 1;
    std::string out = "runs";
    int threads = 0;  // 0 -> hardware concurrency
    bool quiet = false;
};

void add_globals(CLI::App& app, GlobalOpts& g) {
    app.add_option("--seed", g.seed, "Seed for sampling RNG");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads for sweep");
    app.add_flag("--quiet", g.quiet, "Suppress stdout reporting");
}

int cmd_check(const GlobalOpts& g, const std::string& model_path,
              const std::string& a_path, int xi_points, int sphere_samples) {
    const CubicSystem sys = load_model(model_path);
    std::optional<HermitianForm> A;
    if (!a_path.empty()) A = load_hermitian(a_path);

    CheckPlanConfig plan;
    plan.xi_points = xi_points;
    plan.sphere_samples = sphere_samples;
    plan.seed = g.seed;
    const CheckOutcome outcome = run_checks(sys, plan, A);

    std::ostringstream text;
    json rows = json::array();
    for (const ConditionReport& rep : outcome.reports) {
        text << format_report(rep) << "\n";
        json row;
        row["condition"] = rep.condition;
        row["verdict"] = to_string(rep.verdict);
        row["margin"] = rep.margin;
        if (rep.witness) {
            json w;
            w["xi"] = rep.witness->xi;
            w["value"] = rep.witness->value;
            json y = json::array();
            for (const cplx& v : rep.witness->Y)
                y.push_back({v.real(), v.imag()});
            w["Y"] = y;
            row["witness"] = w;
        }
        if (rep.constant) row["constant"] = *rep.constant;
        rows.push_back(row);
    }
    text << "regime: " << outcome.regime << "\n";

    std::filesystem::create_directories(g.out);
    {
        std::ofstream rep(std::filesystem::path(g.out) / "check_report.txt");
        rep << text.str();
    }
    {
        std::ofstream sum(std::filesystem::path(g.out) / "check_summary.jsonl");
        for (const json& row : rows) sum << row.dump() << "\n";
    }
    if (!g.quiet) std::cout << text.str();
    return outcome.all_requested_hold ? 0 : 1;
}

int cmd_simulate(const GlobalOpts& g, const std::string& config_path,
                 const std::string& model_override) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (!model_override.empty()) cfg.model_path = model_override;
    const CubicSystem sys = load_model(cfg.model_path);
    const SimulateResult result = simulate_to_dir(sys, cfg, g.out);
    if (!g.quiet) {
        std::cout << "run_dir: " << result.dir.string() << "\n";
        if (result.exit_code == 3)
            std::cout << "blow-up at t = "
                      << format_double(result.trajectory.blowup_time) << "\n";
    }
    return result.exit_code;
}

int cmd_analyze(const GlobalOpts& g, const std::string& config_path,
                const std::string& run_dir) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const CubicSystem sys = load_model(cfg.model_path);
    const AnalyzeResult result = analyze_run(sys, cfg, run_dir);
    if (!g.quiet) std::cout << result.summary.dump(2) << "\n";
    return 0;
}

int cmd_reduce(const GlobalOpts& g, const std::string& model_path,
               const std::string& profile_path, double t_end, int steps) {
    const CubicSystem sys = load_model(model_path);
    const ProfileState initial = read_profile_csv(profile_path);
    const ProfileState final = integrate_reduced(sys, initial, t_end, steps);
    std::filesystem::create_directories(g.out);
    const auto out_path =
        std::filesystem::path(g.out) / "reduced_profile.csv";
    write_profile_csv(final, out_path.string());
    if (!g.quiet)
        std::cout << "reduced profile at t = " << format_double(final.t)
                  << " -> " << out_path.string() << "\n";
    return 0;
}

int cmd_kms(const GlobalOpts& g, const KmsInput& input, double t_max,
            int samples) {
    const KmsReport report = kms_verify(input, t_max, samples);
    if (!g.quiet) {
        std::cout << "pstar = " << format_double(report.pstar)
                  << "\nC2 = " << format_double(report.c2)
                  << "\nmin margin = " << format_double(report.min_margin)
                  << "\n" << (report.passes() ? "bound holds" : "bound FAILS")
                  << "\n";
    }
    return report.passes() ? 0 : 1;
}

int cmd_pipeline(const GlobalOpts& g, const std::string& config_path) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    cfg.check.seed = g.seed;
    const PipelineResult result = run_pipeline(cfg, g.out, g.quiet);
    return result.exit_code;
}

int cmd_sweep(const GlobalOpts& g,
              const std::vector<std::string>& config_paths) {
    // each run writes only to its own directory; workers share nothing
    int threads = g.threads > 0
                      ? g.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads,
                                        static_cast<int>(config_paths.size())));
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    std::mutex print_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= config_paths.size()) return;
            int code = 0;
            std::string note;
            try {
                ExperimentConfig cfg = load_experiment_config(config_paths[i]);
                cfg.check.seed = g.seed;
                const PipelineResult r = run_pipeline(cfg, g.out, true);
                code = r.exit_code;
                note = r.run_dir.empty() ? std::string("(no run)")
                                         : r.run_dir.string();
            } catch (const std::exception& e) {
                code = 2;
                note = e.what();
            }
            int prev = worst.load();
            while (prev < code && !worst.compare_exchange_weak(prev, code)) {
            }
            if (!g.quiet) {
                std::lock_guard<std::mutex> lock(print_mutex);
                std::cout << config_paths[i] << ": exit " << code << " "
                          << note << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for cubic derivative NLS systems"};
    app.require_subcommand(1);
    GlobalOpts g;
    add_globals(app, g);

    std::string model_path, a_path, config_path, run_dir, profile_path;
    int xi_points = 201, sphere_samples = 2000;
    double t_end = 1000.0, t_max = 1e6;
    int steps = 20000, kms_samples = 400;
    KmsInput kms;
    std::vector<std::string> sweep_configs;

    CLI::App* check = app.add_subcommand("check", "Verify structural conditions");
    check->add_option("--model", model_path, "Model file")->required();
    check->add_option("--a", a_path, "Hermitian matrix file");
    check->add_option("--xi-points", xi_points, "Frequency samples");
    check->add_option("--samples", sphere_samples, "Sphere samples");

    CLI::App* simulate = app.add_subcommand("simulate", "Run the PDE solver");
    simulate->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    simulate->add_option("--model", model_path, "Override the config's model");

    CLI::App* analyze =
        app.add_subcommand("analyze", "Profiles, residuals and decay fits");
    analyze->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();
    analyze->add_option("--run", run_dir, "Run directory")->required();

    CLI::App* reduce =
        app.add_subcommand("reduce", "Integrate the reduced profile ODE");
    reduce->add_option("--model", model_path, "Model file")->required();
    reduce->add_option("--profile", profile_path, "Initial profile CSV")
        ->required();
    reduce->add_option("--t-end", t_end, "Final time");
    reduce->add_option("--steps", steps, "RK4 steps in log t");

    CLI::App* kms_cmd =
        app.add_subcommand("kms", "Verify the ODE comparison bound");
    kms_cmd->add_option("--c0", kms.c0, "Dissipation constant");
    kms_cmd->add_option("--c1", kms.c1, "Forcing constant");
    kms_cmd->add_option("--p", kms.p, "Nonlinearity power (> 1)");
    kms_cmd->add_option("--q", kms.q, "Forcing decay (> 1)");
    kms_cmd->add_option("--psi2", kms.psi2, "Initial value at t = 2");
    kms_cmd->add_option("--t-max", t_max, "Verification horizon");
    kms_cmd->add_option("--samples", kms_samples, "Comparison samples");

    CLI::App* pipeline =
        app.add_subcommand("pipeline", "check -> simulate -> analyze");
    pipeline->add_option("--config", config_path, "Experiment config (JSON)")
        ->required();

    CLI::App* sweep =
        app.add_subcommand("sweep", "Run several pipelines in parallel");
    sweep->add_option("configs", sweep_configs, "Experiment configs")
        ->required();

    // let the global flags appear after the subcommand name
    for (CLI::App* sub : {check, simulate, analyze, reduce, kms_cmd, pipeline,
                          sweep})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*check)
            return cmd_check(g, model_path, a_path, xi_points, sphere_samples);
        if (*simulate) return cmd_simulate(g, config_path, model_path);
        if (*analyze) return cmd_analyze(g, config_path, run_dir);
        if (*reduce) return cmd_reduce(g, model_path, profile_path, t_end, steps);
        if (*kms_cmd) return cmd_kms(g, kms, t_max, kms_samples);
        if (*pipeline) return cmd_pipeline(g, config_path);
        if (*sweep) return cmd_sweep(g, sweep_configs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
