#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bicoid/calibration.hpp"
#include "bicoid/format.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

inline constexpr const char* artifact_version = "0.1.0";

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("io: failed writing " + path.string());
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

inline nlohmann::ordered_json meta_json(const TrajectoryMeta& meta) {
    nlohmann::ordered_json j;
    j["artifact_version"] = artifact_version;
    j["engine"] = meta.engine;
    j["seed"] = meta.seed;
    j["n_runs"] = meta.n_runs;
    j["sample_interval_s"] = meta.sample_interval;
    if (meta.engine == "ssa" || meta.engine == "ssa-mean") {
        j["event_count"] = meta.event_count;
        j["frozen"] = meta.frozen;
    }
    if (meta.engine == "ode") j["negative_clamps"] = meta.negative_clamps;
    nlohmann::ordered_json params;
    for (const auto& [k, v] : meta.params) params[k] = v;
    j["params"] = std::move(params);
    return j;
}

} // namespace detail

/// Writes `time_s,c1..cN` rows, one per sample, plus a `<name>.meta.json`
/// sidecar carrying engine, parameter snapshot, seeds, run count and event
/// count. Numbers use shortest round-trip formatting, so identical inputs
/// give byte-identical files.
inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& csv_path) {
    traj.validate();
    std::string out;
    out.reserve(traj.samples.size() * 8 + 64);
    out += "time_s";
    for (int c = 1; c <= traj.n_compartments; ++c) out += ",c" + std::to_string(c);
    out += '\n';
    for (std::size_t r = 0; r < traj.rows(); ++r) {
        out += format_double(traj.sample_times[r]);
        for (int c = 0; c < traj.n_compartments; ++c) {
            out += ',';
            out += format_double(traj.at(r, c));
        }
        out += '\n';
    }
    detail::write_text_file(csv_path, out);
    detail::write_text_file(detail::sidecar_path(csv_path), detail::meta_json(traj.meta).dump(2) + "\n");
}

/// Reads a trajectory CSV written by write_trajectory. The sidecar, when
/// present next to the file, restores engine and run metadata.
inline Trajectory read_trajectory(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("io: cannot open " + csv_path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("io: empty trajectory file " + csv_path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("time_s", 0) != 0)
        throw std::runtime_error("io: " + csv_path.string() + " does not look like a trajectory CSV");
    int n_cols = 0;
    for (char ch : line)
        if (ch == ',') ++n_cols;

    Trajectory traj;
    traj.n_compartments = n_cols;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t start = 0;
        int field = 0;
        while (start <= line.size()) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) comma = line.size();
            const std::string_view cell(line.data() + start, comma - start);
            const double v = parse_double(cell, csv_path.string() + ":" + std::to_string(line_no));
            if (field == 0) traj.sample_times.push_back(v);
            else traj.samples.push_back(v);
            ++field;
            start = comma + 1;
            if (comma == line.size()) break;
        }
        if (field != n_cols + 1)
            throw std::runtime_error("io: " + csv_path.string() + ":" + std::to_string(line_no) +
                                     " has " + std::to_string(field) + " fields, expected " +
                                     std::to_string(n_cols + 1));
    }
    traj.validate();

    const auto side = detail::sidecar_path(csv_path);
    if (std::filesystem::exists(side)) {
        std::ifstream meta_in(side);
        nlohmann::json j = nlohmann::json::parse(meta_in, nullptr, /*allow_exceptions=*/true);
        traj.meta.engine = j.value("engine", "");
        traj.meta.seed = j.value("seed", std::uint64_t{0});
        traj.meta.n_runs = j.value("n_runs", 1);
        traj.meta.sample_interval = j.value("sample_interval_s", 0.0);
        traj.meta.event_count = j.value("event_count", std::uint64_t{0});
        traj.meta.frozen = j.value("frozen", false);
        if (j.contains("params"))
            for (const auto& [k, v] : j["params"].items()) traj.meta.params.emplace_back(k, v.get<std::string>());
    } else if (traj.rows() > 1) {
        traj.meta.sample_interval = (traj.sample_times.back() - traj.sample_times.front()) /
                                    static_cast<double>(traj.rows() - 1);
    }
    return traj;
}

namespace detail {

inline std::size_t snapshot_row(const Trajectory& traj, double minute) {
    const double t = minute * 60.0;
    const double interval = traj.rows() > 1 ? traj.sample_interval() : 1.0;
    const double tol = interval * 0.5 + 1e-9;
    if (t < traj.sample_times.front() - tol || t > traj.sample_times.back() + tol)
        throw std::invalid_argument("io: snapshot minute " + format_double(minute) +
                                    " outside the trajectory horizon [" +
                                    format_double(traj.sample_times.front() / 60.0) + ", " +
                                    format_double(traj.sample_times.back() / 60.0) + "] min");
    std::size_t row = 0;
    if (traj.rows() > 1) {
        row = static_cast<std::size_t>(std::llround((t - traj.sample_times.front()) / interval));
        row = std::min(row, traj.rows() - 1);
    }
    if (std::abs(traj.sample_times[row] - t) > tol)
        throw std::invalid_argument("io: snapshot minute " + format_double(minute) +
                                    " has no sample within half an interval");
    return row;
}

inline void write_snapshot_blocks(const std::filesystem::path& csv_path, const std::vector<double>& minutes,
                                  const Trajectory& mean_view, const EnsembleStats* stats,
                                  const TrajectoryMeta& meta) {
    std::string out = stats ? "minute,time_s,compartment,count,std\n" : "minute,time_s,compartment,count\n";
    nlohmann::ordered_json snap_meta = meta_json(meta);
    nlohmann::ordered_json lookup;
    for (double minute : minutes) {
        const std::size_t row = snapshot_row(mean_view, minute);
        lookup[format_double(minute)] = format_double(mean_view.sample_times[row]);
        for (int c = 0; c < mean_view.n_compartments; ++c) {
            out += format_double(minute);
            out += ',';
            out += format_double(mean_view.sample_times[row]);
            out += ',';
            out += std::to_string(c + 1);
            out += ',';
            out += format_double(mean_view.at(row, c));
            if (stats) {
                out += ',';
                out += format_double(stats->std_at(row, c));
            }
            out += '\n';
        }
    }
    snap_meta["snapshot_sample_times_s"] = std::move(lookup);
    write_text_file(csv_path, out);
    write_text_file(sidecar_path(csv_path), snap_meta.dump(2) + "\n");
}

} // namespace detail

/// One block per requested minute: compartment (1-based) against count — the
/// data behind per-time histograms. Minutes resolve to the nearest sample
/// within half an interval; the mapping is recorded in the sidecar.
inline void write_snapshots(const Trajectory& traj, const std::vector<double>& minutes,
                            const std::filesystem::path& csv_path) {
    traj.validate();
    detail::write_snapshot_blocks(csv_path, minutes, traj, nullptr, traj.meta);
}

/// Ensemble flavour: adds a std column per compartment.
inline void write_snapshots(const EnsembleStats& stats, const std::vector<double>& minutes,
                            const std::filesystem::path& csv_path) {
    const Trajectory mean_view = stats.mean_trajectory();
    detail::write_snapshot_blocks(csv_path, minutes, mean_view, &stats, stats.meta);
}

/// Ranked sweep table: rank, case_id, the five parameters, the total score
/// and one per-snapshot partial column per comparison minute. The sidecar
/// records the grid, base configuration and sweep seed.
inline void write_sweep_csv(const std::vector<CaseResult>& results, const SweepSpec& spec, std::uint64_t base_seed,
                            const std::filesystem::path& csv_path) {
    std::string out = "rank,case_id";
    for (const char* name : sweep_parameter_names()) out += std::string(",") + name;
    out += ",score";
    for (double m : spec.comparison_minutes) out += ",score_min" + format_double(m);
    out += '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
        const CaseResult& r = results[i];
        out += std::to_string(i + 1);
        out += ',' + std::to_string(r.case_id);
        for (double p : r.params) out += ',' + format_double(p);
        out += ',' + format_double(r.score);
        for (double s : r.per_snapshot) out += ',' + format_double(s);
        out += '\n';
    }
    detail::write_text_file(csv_path, out);

    nlohmann::ordered_json j;
    j["artifact_version"] = artifact_version;
    j["engine"] = "sweep";
    j["seed"] = base_seed;
    j["runs_per_case"] = spec.runs_per_case;
    j["cases"] = results.size();
    auto range_json = [](const ParamRange& r) {
        nlohmann::ordered_json o;
        o["low"] = format_double(r.low);
        o["high"] = format_double(r.high);
        o["step"] = format_double(r.step);
        return o;
    };
    nlohmann::ordered_json grid;
    grid["source_decay_rate"] = range_json(spec.source_decay_rate);
    grid["protein_decay_rate"] = range_json(spec.protein_decay_rate);
    grid["prob_right"] = range_json(spec.prob_right);
    grid["prob_left"] = range_json(spec.prob_left);
    grid["source_production_prob"] = range_json(spec.source_production_prob);
    j["grid"] = std::move(grid);
    std::vector<double> comp_minutes = spec.comparison_minutes;
    j["comparison_minutes"] = comp_minutes;
    nlohmann::ordered_json base;
    std::vector<std::pair<std::string, std::string>> base_params;
    detail::append_abm_params(base_params, spec.base);
    for (const auto& [k, v] : base_params) base[k] = v;
    j["base_config"] = std::move(base);
    detail::write_text_file(detail::sidecar_path(csv_path), j.dump(2) + "\n");
}

} // namespace bicoid
