// Command-line front end: runs the stochastic, deterministic and agent-based
// engines, grid-sweep calibration, and trajectory comparison, writing
// plot-ready CSV plus metadata sidecars.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicoid/bicoid.hpp"

namespace fs = std::filesystem;
using namespace bicoid;

namespace {

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<double> final_time;
    std::optional<double> sample_interval;
    std::optional<unsigned> threads;
    std::optional<std::vector<double>> snapshot_minutes;
    std::string out_dir;
    std::string preset;
};

void add_shared_options(CLI::App* cmd, CliOverrides& o) {
    cmd->add_option("--config", o.config_path, "KEY=VALUE configuration file");
    cmd->add_option("--seed", o.seed, "base random seed (required for stochastic engines unless the config sets SEED)");
    cmd->add_option("--runs", o.runs, "ensemble size; 1 writes a single realisation");
    cmd->add_option("--final-time", o.final_time, "simulated horizon in seconds");
    cmd->add_option("--sample-interval", o.sample_interval, "seconds between recorded rows");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all hardware threads)");
    cmd->add_option("--snapshot-minutes", o.snapshot_minutes, "minutes for the snapshot file")->delimiter(',');
    cmd->add_option("--out", o.out_dir, "output directory (else $BICOID_OUT_DIR, else .)");
}

RunConfig assemble_config(EngineKind engine, const CliOverrides& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
    if (cfg.engine && *cfg.engine != engine)
        throw std::invalid_argument("config selects engine " + to_string(*cfg.engine) +
                                    " but the subcommand is " + to_string(engine));
    cfg.engine = engine;
    if (!o.preset.empty()) {
        if (o.preset == "default") cfg.abm = abm_default_config();
        else if (o.preset == "calibrated") cfg.abm = abm_calibrated_config();
        else throw std::invalid_argument("unknown preset '" + o.preset + "' (default|calibrated)");
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.runs) cfg.n_runs = *o.runs;
    if (o.final_time) cfg.final_time = *o.final_time;
    if (o.sample_interval) cfg.sample_interval = *o.sample_interval;
    if (o.threads) cfg.threads = *o.threads;
    if (o.snapshot_minutes) cfg.snapshot_minutes = *o.snapshot_minutes;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    return cfg;
}

fs::path resolve_out_dir(const RunConfig& cfg) {
    std::string dir = cfg.out_dir;
    if (dir.empty())
        if (const char* env = std::getenv("BICOID_OUT_DIR")) dir = env;
    if (dir.empty()) dir = ".";
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::uint64_t require_seed(const RunConfig& cfg) {
    if (!cfg.seed) throw std::invalid_argument("a seed is required: pass --seed or set SEED in the config");
    return *cfg.seed;
}

void run_ssa_command(const RunConfig& cfg) {
    cfg.validate();
    const auto seed = require_seed(cfg);
    const auto out = resolve_out_dir(cfg);
    SsaOptions opts;
    opts.source_mode = cfg.source_mode;
    opts.threads = cfg.threads;
    const double final_time = cfg.effective_final_time();
    const double interval = cfg.effective_sample_interval();

    if (cfg.n_runs == 1) {
        const auto traj = run_ssa(cfg.model, final_time, interval, seed, opts);
        write_trajectory(traj, out / "ssa_run.csv");
        write_snapshots(traj, cfg.snapshot_minutes, out / "ssa_snapshots.csv");
        std::cout << "ssa: wrote " << (out / "ssa_run.csv").string() << " (" << traj.rows() << " rows, "
                  << traj.meta.event_count << " events)\n";
    } else {
        const auto stats = run_ssa_ensemble(cfg.model, final_time, interval, cfg.n_runs, seed, opts);
        write_trajectory(stats.mean_trajectory(), out / "ssa_mean.csv");
        write_snapshots(stats, cfg.snapshot_minutes, out / "ssa_snapshots.csv");
        std::cout << "ssa: wrote " << (out / "ssa_mean.csv").string() << " (" << cfg.n_runs << " runs, "
                  << stats.meta.event_count << " events total)\n";
    }
}

void run_ode_command(const RunConfig& cfg) {
    cfg.validate();
    const auto out = resolve_out_dir(cfg);
    OdeOptions opts;
    opts.dt = cfg.ode_dt;
    const auto traj = solve_mean_field(cfg.model, cfg.effective_final_time(), cfg.effective_sample_interval(), opts);
    write_trajectory(traj, out / "ode.csv");
    write_snapshots(traj, cfg.snapshot_minutes, out / "ode_snapshots.csv");
    std::cout << "ode: wrote " << (out / "ode.csv").string() << " (" << traj.rows() << " rows)\n";
}

void run_abm_command(const RunConfig& cfg) {
    cfg.validate();
    const auto seed = require_seed(cfg);
    const auto out = resolve_out_dir(cfg);

    if (cfg.n_runs == 1) {
        const auto traj = run_abm(cfg.abm, seed);
        write_trajectory(traj, out / "abm_run.csv");
        write_snapshots(traj, cfg.snapshot_minutes, out / "abm_snapshots.csv");
        std::cout << "abm: wrote " << (out / "abm_run.csv").string() << " (" << traj.rows() << " rows)\n";
    } else {
        const auto stats = run_abm_ensemble(cfg.abm, cfg.n_runs, seed, cfg.threads);
        write_trajectory(stats.mean_trajectory(), out / "abm_mean.csv");
        write_snapshots(stats, cfg.snapshot_minutes, out / "abm_snapshots.csv");
        std::cout << "abm: wrote " << (out / "abm_mean.csv").string() << " (" << cfg.n_runs << " runs)\n";
    }
}

void run_sweep_command(const RunConfig& cfg, const std::string& target_flag) {
    cfg.validate();
    const auto seed = require_seed(cfg);
    const auto out = resolve_out_dir(cfg);
    const std::string target_path = !target_flag.empty() ? target_flag : cfg.sweep.target_path;
    if (target_path.empty())
        throw std::invalid_argument("sweep requires a target trajectory: pass --target or set TARGET");

    const auto target = read_trajectory(target_path);
    const auto spec = cfg.sweep.to_spec(cfg.abm);
    const auto results = run_sweep(spec, target, seed, cfg.threads);
    write_sweep_csv(results, spec, seed, out / "sweep_results.csv");
    const auto& best = results.front();
    std::cout << "sweep: " << results.size() << " cases, best case " << best.case_id << " score "
              << format_double(best.score) << " params (" << format_double(best.params[0]) << ", "
              << format_double(best.params[1]) << ", " << format_double(best.params[2]) << ", "
              << format_double(best.params[3]) << ", " << format_double(best.params[4]) << ")\n";
    std::cout << "sweep: wrote " << (out / "sweep_results.csv").string() << "\n";
}

void run_compare_command(const std::string& a_path, const std::string& b_path, std::vector<double> minutes,
                         std::vector<int> compartments_1based) {
    const auto a = read_trajectory(a_path);
    const auto b = read_trajectory(b_path);
    std::vector<double> times_s;
    for (double m : minutes) times_s.push_back(m * 60.0);
    std::vector<int> cols;
    for (int c : compartments_1based) {
        if (c < 1) throw std::invalid_argument("compartment labels are 1-based");
        cols.push_back(c - 1);
    }
    std::vector<double> partials;
    const double score = square_distance(a, b, times_s, cols, &partials);
    for (std::size_t i = 0; i < partials.size(); ++i)
        std::cout << "minute," << format_double(minutes[i]) << ",score," << format_double(partials[i]) << "\n";
    std::cout << "total,score," << format_double(score) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D compartmental Bicoid gradient simulator"};
    app.require_subcommand(1);

    CliOverrides ssa_opts, ode_opts, abm_opts, sweep_opts;
    std::string sweep_target;
    std::string compare_a, compare_b;
    std::vector<double> compare_minutes = {60.0, 100.0, 144.0, 180.0, 200.0};
    std::vector<int> compare_compartments;

    auto* ssa_cmd = app.add_subcommand("ssa", "exact stochastic simulation (direct method)");
    add_shared_options(ssa_cmd, ssa_opts);

    auto* ode_cmd = app.add_subcommand("ode", "deterministic mean-field reference solution");
    add_shared_options(ode_cmd, ode_opts);

    auto* abm_cmd = app.add_subcommand("abm", "discrete-time agent-based simulation");
    add_shared_options(abm_cmd, abm_opts);
    abm_cmd->add_option("--preset", abm_opts.preset, "parameter preset: default|calibrated");

    auto* sweep_cmd = app.add_subcommand("sweep", "grid-sweep calibration against a target trajectory");
    add_shared_options(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--target", sweep_target, "target trajectory CSV");

    auto* compare_cmd = app.add_subcommand("compare", "square distance between two trajectory files");
    compare_cmd->add_option("candidate", compare_a, "first trajectory CSV")->required();
    compare_cmd->add_option("target", compare_b, "second trajectory CSV")->required();
    compare_cmd->add_option("--minutes", compare_minutes, "comparison times in minutes")->delimiter(',');
    compare_cmd->add_option("--compartments", compare_compartments, "1-based compartment subset")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (ssa_cmd->parsed()) run_ssa_command(assemble_config(EngineKind::Ssa, ssa_opts));
        else if (ode_cmd->parsed()) run_ode_command(assemble_config(EngineKind::Ode, ode_opts));
        else if (abm_cmd->parsed()) run_abm_command(assemble_config(EngineKind::Abm, abm_opts));
        else if (sweep_cmd->parsed()) run_sweep_command(assemble_config(EngineKind::Sweep, sweep_opts), sweep_target);
        else if (compare_cmd->parsed())
            run_compare_command(compare_a, compare_b, compare_minutes, compare_compartments);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
