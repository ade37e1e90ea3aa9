#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bicoid/abm.hpp"
#include "bicoid/calibration.hpp"
#include "bicoid/format.hpp"
#include "bicoid/params.hpp"
#include "bicoid/ssa.hpp"

namespace bicoid {

enum class EngineKind { Ssa, Ode, Abm, Sweep };

inline std::string to_string(EngineKind e) {
    switch (e) {
    case EngineKind::Ssa: return "ssa";
    case EngineKind::Ode: return "ode";
    case EngineKind::Abm: return "abm";
    case EngineKind::Sweep: return "sweep";
    }
    return "?";
}

/// Sweep block of a run configuration: grid ranges for the five tunable
/// globals plus comparison settings and the target trajectory file.
struct SweepConfig {
    ParamRange source_decay_rate{0.01, 0.01, 1.0};
    ParamRange protein_decay_rate{0.01, 0.01, 1.0};
    ParamRange prob_right{0.5, 0.5, 1.0};
    ParamRange prob_left{0.1, 0.1, 1.0};
    ParamRange source_production_prob{1.0, 1.0, 1.0};
    int runs_per_case = 20;
    std::vector<double> comparison_minutes = {60.0, 100.0, 144.0, 180.0, 200.0};
    std::vector<int> compartments; ///< 0-based; empty means all
    std::string target_path;

    SweepSpec to_spec(const AbmConfig& base) const {
        SweepSpec s;
        s.source_decay_rate = source_decay_rate;
        s.protein_decay_rate = protein_decay_rate;
        s.prob_right = prob_right;
        s.prob_left = prob_left;
        s.source_production_prob = source_production_prob;
        s.base = base;
        s.runs_per_case = runs_per_case;
        s.comparison_minutes = comparison_minutes;
        s.compartments = compartments;
        return s;
    }

    bool operator==(const SweepConfig&) const = default;
};

/// A fully described run: one engine, its parameter blocks, and the shared
/// run/output settings. Parsed from flat KEY=VALUE text whose keys mirror the
/// uppercase starting-condition globals.
struct RunConfig {
    std::optional<EngineKind> engine;
    ModelParams model;
    SourceMode source_mode = SourceMode::ZerothOrder;
    double ode_dt = 0.1;
    AbmConfig abm;
    SweepConfig sweep;
    std::optional<double> final_time;      ///< seconds (ssa/ode; abm uses N_ITERATIONS)
    std::optional<double> sample_interval; ///< seconds; engine default when unset
    std::optional<std::uint64_t> seed;
    int n_runs = 1;
    unsigned threads = 0; ///< 0 = hardware
    std::vector<double> snapshot_minutes = {60.0, 100.0, 144.0, 180.0, 200.0};
    std::string out_dir;

    EngineKind engine_or_throw() const {
        if (!engine) throw std::invalid_argument("config: missing required key ENGINE");
        return *engine;
    }

    double effective_final_time() const {
        if (engine_or_throw() == EngineKind::Abm || engine_or_throw() == EngineKind::Sweep)
            return static_cast<double>(abm.n_iterations);
        return final_time.value_or(12000.0);
    }

    double effective_sample_interval() const {
        if (engine_or_throw() == EngineKind::Abm || engine_or_throw() == EngineKind::Sweep) return 1.0;
        return sample_interval.value_or(60.0);
    }

    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

inline void RunConfig::validate() const {
    const EngineKind e = engine_or_throw();
    if (e == EngineKind::Ssa || e == EngineKind::Ode) {
        model.validate();
        if (final_time && !(*final_time > 0.0))
            throw std::invalid_argument("config: FINAL_TIME must be > 0");
        if (sample_interval && !(*sample_interval > 0.0))
            throw std::invalid_argument("config: SAMPLE_INTERVAL must be > 0");
    }
    if (e == EngineKind::Abm || e == EngineKind::Sweep) abm.validate();
    if (e == EngineKind::Sweep) sweep.to_spec(abm).validate();
    if (n_runs < 1) throw std::invalid_argument("config: RUNS must be >= 1");
    if (e != EngineKind::Sweep) { // sweeps write no snapshot file
        const double horizon_min = effective_final_time() / 60.0;
        for (double m : snapshot_minutes)
            if (m < 0.0 || m > horizon_min + 1e-9)
                throw std::invalid_argument("config: SNAPSHOT_MINUTES entry " + format_double(m) +
                                            " outside the simulated horizon of " + format_double(horizon_min) +
                                            " minutes");
    }
}

namespace detail {

inline std::vector<double> parse_double_list(std::string_view text, const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        auto item = text.substr(start, comma - start);
        if (item.empty()) throw std::invalid_argument("config: key " + key + " has an empty list entry");
        out.push_back(parse_double(item, key));
        start = comma + 1;
        if (comma == text.size()) break;
    }
    if (out.empty()) throw std::invalid_argument("config: key " + key + " has an empty list");
    return out;
}

/// Comma list of 1-based compartment labels or A-B ranges; returns 0-based.
inline std::vector<int> parse_compartment_list(std::string_view text, const std::string& key) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        auto item = text.substr(start, comma - start);
        if (item.empty()) throw std::invalid_argument("config: key " + key + " has an empty list entry");
        const std::size_t dash = item.find('-');
        if (dash == std::string_view::npos) {
            const auto v = parse_int(item, key);
            if (v < 1) throw std::invalid_argument("config: key " + key + " uses 1-based compartment labels");
            out.push_back(static_cast<int>(v) - 1);
        } else {
            const auto lo = parse_int(item.substr(0, dash), key);
            const auto hi = parse_int(item.substr(dash + 1), key);
            if (lo < 1 || hi < lo)
                throw std::invalid_argument("config: key " + key + " has a malformed range '" + std::string(item) +
                                            "'");
            for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<int>(v) - 1);
        }
        start = comma + 1;
        if (comma == text.size()) break;
    }
    return out;
}

inline ParamRange parse_range(std::string_view text, const std::string& key) {
    // low:high:step, or a single value for a fixed parameter
    const std::size_t c1 = text.find(':');
    if (c1 == std::string_view::npos) {
        const double v = parse_double(text, key);
        return {v, v, 1.0};
    }
    const std::size_t c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
        throw std::invalid_argument("config: key " + key + " expects LOW:HIGH:STEP, got '" + std::string(text) +
                                    "'");
    ParamRange r;
    r.low = parse_double(text.substr(0, c1), key);
    r.high = parse_double(text.substr(c1 + 1, c2 - c1 - 1), key);
    r.step = parse_double(text.substr(c2 + 1), key);
    r.validate(key);
    return r;
}

inline std::string render_compartment_list(const std::vector<int>& comps) {
    // compress consecutive 0-based runs into 1-based A-B spans
    std::string out;
    std::size_t i = 0;
    while (i < comps.size()) {
        std::size_t j = i;
        while (j + 1 < comps.size() && comps[j + 1] == comps[j] + 1) ++j;
        if (!out.empty()) out += ',';
        out += std::to_string(comps[i] + 1);
        if (j > i) out += '-' + std::to_string(comps[j] + 1);
        i = j + 1;
    }
    return out;
}

inline std::string render_double_list(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ',';
        out += format_double(v);
    }
    return out;
}

inline std::string render_range(const ParamRange& r) {
    if (r.low == r.high) return format_double(r.low);
    return format_double(r.low) + ':' + format_double(r.high) + ':' + format_double(r.step);
}

} // namespace detail

/// Parses a flat KEY=VALUE document. Lines starting with '#' and blank lines
/// are skipped. Unknown and duplicate keys are errors that name the key; no
/// silent typo tolerance. PRESET (abm parameter sets "default"/"calibrated")
/// and SWEEP_PRESET ("full") are applied before individual keys regardless of
/// their position in the file.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;

    std::vector<std::pair<std::string, std::string>> entries;
    std::unordered_set<std::string> seen;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t");
        std::string_view body(line.data() + b, e - b + 1);
        if (body.front() == '#') continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) + " is not KEY=VALUE: '" +
                                        std::string(body) + "'");
        std::string key(body.substr(0, eq));
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::string value(body.substr(eq + 1));
        std::size_t vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? std::string() : value.substr(vb);
        if (key.empty()) throw std::invalid_argument("config: line " + std::to_string(line_no) + " has an empty key");
        if (!seen.insert(key).second) throw std::invalid_argument("config: duplicate key " + key);
        entries.emplace_back(std::move(key), std::move(value));
    }

    // presets first, then individual keys override
    for (const auto& [key, value] : entries) {
        if (key == "PRESET") {
            if (value == "default") cfg.abm = abm_default_config();
            else if (value == "calibrated") cfg.abm = abm_calibrated_config();
            else throw std::invalid_argument("config: key PRESET must be 'default' or 'calibrated', got '" + value + "'");
        } else if (key == "SWEEP_PRESET") {
            if (value != "full")
                throw std::invalid_argument("config: key SWEEP_PRESET must be 'full', got '" + value + "'");
            const SweepSpec s = full_sweep_spec();
            cfg.sweep.source_decay_rate = s.source_decay_rate;
            cfg.sweep.protein_decay_rate = s.protein_decay_rate;
            cfg.sweep.prob_right = s.prob_right;
            cfg.sweep.prob_left = s.prob_left;
            cfg.sweep.source_production_prob = s.source_production_prob;
        }
    }

    for (const auto& [key, value] : entries) {
        if (key == "PRESET" || key == "SWEEP_PRESET") continue;
        if (key == "ENGINE") {
            if (value == "ssa") cfg.engine = EngineKind::Ssa;
            else if (value == "ode") cfg.engine = EngineKind::Ode;
            else if (value == "abm") cfg.engine = EngineKind::Abm;
            else if (value == "sweep") cfg.engine = EngineKind::Sweep;
            else throw std::invalid_argument("config: key ENGINE must be ssa|ode|abm|sweep, got '" + value + "'");
        } else if (key == "SEED") {
            cfg.seed = parse_uint(value, key);
        } else if (key == "RUNS") {
            cfg.n_runs = static_cast<int>(parse_int(value, key));
        } else if (key == "THREADS") {
            cfg.threads = static_cast<unsigned>(parse_uint(value, key));
        } else if (key == "FINAL_TIME") {
            cfg.final_time = parse_double(value, key);
        } else if (key == "SAMPLE_INTERVAL") {
            cfg.sample_interval = parse_double(value, key);
        } else if (key == "SNAPSHOT_MINUTES") {
            cfg.snapshot_minutes = detail::parse_double_list(value, key);
        } else if (key == "OUT_DIR") {
            cfg.out_dir = value;
        } else if (key == "N_COMPARTMENTS") {
            cfg.model.n_compartments = static_cast<int>(parse_int(value, key));
            cfg.abm.n_compartments = cfg.model.n_compartments;
        } else if (key == "H") {
            cfg.model.h = parse_double(value, key);
        } else if (key == "D") {
            cfg.model.D = parse_double(value, key);
        } else if (key == "T0") {
            cfg.model.t0 = parse_double(value, key);
        } else if (key == "TAU_P") {
            cfg.model.tau_p = parse_double(value, key);
        } else if (key == "TAU_M") {
            cfg.model.tau_m = parse_double(value, key);
        } else if (key == "S0") {
            cfg.model.s0 = parse_double(value, key);
        } else if (key == "SOURCE_MODE") {
            if (value == "zeroth-order") cfg.source_mode = SourceMode::ZerothOrder;
            else if (value == "literal") cfg.source_mode = SourceMode::Literal;
            else throw std::invalid_argument("config: key SOURCE_MODE must be zeroth-order|literal, got '" + value + "'");
        } else if (key == "ODE_DT") {
            cfg.ode_dt = parse_double(value, key);
        } else if (key == "SOURCE_DECAY_RATE") {
            cfg.abm.source_decay_rate = parse_double(value, key);
        } else if (key == "SOURCE_TIME_DECAY") {
            cfg.abm.source_time_decay = parse_int(value, key);
        } else if (key == "SOURCE_TIME_PRODUCE") {
            cfg.abm.source_time_produce = parse_int(value, key);
        } else if (key == "SOURCE_PRODUCTION_PROB") {
            cfg.abm.source_production_prob = parse_double(value, key);
        } else if (key == "PROTEIN_DECAY_RATE") {
            cfg.abm.protein_decay_rate = parse_double(value, key);
        } else if (key == "COMPARTMENT_DIMENSION_X") {
            cfg.abm.compartment_dim_x = parse_double(value, key);
        } else if (key == "COMPARTMENT_DIMENSION_Y") {
            cfg.abm.compartment_dim_y = parse_double(value, key);
        } else if (key == "PROB_RIGHT") {
            cfg.abm.prob_right = parse_double(value, key);
        } else if (key == "PROB_LEFT") {
            cfg.abm.prob_left = parse_double(value, key);
        } else if (key == "DIE") {
            cfg.abm.die_threshold = parse_double(value, key);
        } else if (key == "N_ITERATIONS") {
            cfg.abm.n_iterations = parse_int(value, key);
        } else if (key == "PRODUCE_SEMANTICS") {
            if (value == "period") cfg.abm.produce_semantics = ProduceSemantics::Period;
            else if (value == "initial-delay") cfg.abm.produce_semantics = ProduceSemantics::InitialDelay;
            else throw std::invalid_argument("config: key PRODUCE_SEMANTICS must be period|initial-delay, got '" + value + "'");
        } else if (key == "SWEEP_SOURCE_DECAY_RATE") {
            cfg.sweep.source_decay_rate = detail::parse_range(value, key);
        } else if (key == "SWEEP_PROTEIN_DECAY_RATE") {
            cfg.sweep.protein_decay_rate = detail::parse_range(value, key);
        } else if (key == "SWEEP_PROB_RIGHT") {
            cfg.sweep.prob_right = detail::parse_range(value, key);
        } else if (key == "SWEEP_PROB_LEFT") {
            cfg.sweep.prob_left = detail::parse_range(value, key);
        } else if (key == "SWEEP_SOURCE_PRODUCTION_PROB") {
            cfg.sweep.source_production_prob = detail::parse_range(value, key);
        } else if (key == "RUNS_PER_CASE") {
            cfg.sweep.runs_per_case = static_cast<int>(parse_int(value, key));
        } else if (key == "COMPARISON_MINUTES") {
            cfg.sweep.comparison_minutes = detail::parse_double_list(value, key);
        } else if (key == "COMPARISON_COMPARTMENTS") {
            cfg.sweep.compartments = detail::parse_compartment_list(value, key);
        } else if (key == "TARGET") {
            cfg.sweep.target_path = value;
        } else {
            throw std::invalid_argument("config: unknown key " + key);
        }
    }

    // Cross-field checks that name the offending keys.
    if (!(cfg.abm.prob_right + cfg.abm.prob_left <= 1.0))
        throw std::invalid_argument("config: PROB_RIGHT + PROB_LEFT must be <= 1, got " +
                                    format_double(cfg.abm.prob_right) + " + " + format_double(cfg.abm.prob_left));
    return cfg;
}

/// Canonical text form; parse_config(render_config(c)) == c for any valid c.
inline std::string render_config(const RunConfig& cfg) {
    std::string out;
    auto put = [&](const std::string& key, const std::string& value) { out += key + "=" + value + "\n"; };
    if (cfg.engine) put("ENGINE", to_string(*cfg.engine));
    if (cfg.seed) put("SEED", std::to_string(*cfg.seed));
    put("RUNS", std::to_string(cfg.n_runs));
    put("THREADS", std::to_string(cfg.threads));
    if (cfg.final_time) put("FINAL_TIME", format_double(*cfg.final_time));
    if (cfg.sample_interval) put("SAMPLE_INTERVAL", format_double(*cfg.sample_interval));
    put("SNAPSHOT_MINUTES", detail::render_double_list(cfg.snapshot_minutes));
    if (!cfg.out_dir.empty()) put("OUT_DIR", cfg.out_dir);

    put("N_COMPARTMENTS", std::to_string(cfg.model.n_compartments));
    put("H", format_double(cfg.model.h));
    put("D", format_double(cfg.model.D));
    put("T0", format_double(cfg.model.t0));
    put("TAU_P", format_double(cfg.model.tau_p));
    put("TAU_M", format_double(cfg.model.tau_m));
    put("S0", format_double(cfg.model.s0));
    put("SOURCE_MODE", to_string(cfg.source_mode));
    put("ODE_DT", format_double(cfg.ode_dt));

    put("SOURCE_DECAY_RATE", format_double(cfg.abm.source_decay_rate));
    put("SOURCE_TIME_DECAY", std::to_string(cfg.abm.source_time_decay));
    put("SOURCE_TIME_PRODUCE", std::to_string(cfg.abm.source_time_produce));
    put("SOURCE_PRODUCTION_PROB", format_double(cfg.abm.source_production_prob));
    put("PROTEIN_DECAY_RATE", format_double(cfg.abm.protein_decay_rate));
    put("COMPARTMENT_DIMENSION_X", format_double(cfg.abm.compartment_dim_x));
    put("COMPARTMENT_DIMENSION_Y", format_double(cfg.abm.compartment_dim_y));
    put("PROB_RIGHT", format_double(cfg.abm.prob_right));
    put("PROB_LEFT", format_double(cfg.abm.prob_left));
    put("DIE", format_double(cfg.abm.die_threshold));
    put("N_ITERATIONS", std::to_string(cfg.abm.n_iterations));
    put("PRODUCE_SEMANTICS", to_string(cfg.abm.produce_semantics));

    put("SWEEP_SOURCE_DECAY_RATE", detail::render_range(cfg.sweep.source_decay_rate));
    put("SWEEP_PROTEIN_DECAY_RATE", detail::render_range(cfg.sweep.protein_decay_rate));
    put("SWEEP_PROB_RIGHT", detail::render_range(cfg.sweep.prob_right));
    put("SWEEP_PROB_LEFT", detail::render_range(cfg.sweep.prob_left));
    put("SWEEP_SOURCE_PRODUCTION_PROB", detail::render_range(cfg.sweep.source_production_prob));
    put("RUNS_PER_CASE", std::to_string(cfg.sweep.runs_per_case));
    put("COMPARISON_MINUTES", detail::render_double_list(cfg.sweep.comparison_minutes));
    if (!cfg.sweep.compartments.empty())
        put("COMPARISON_COMPARTMENTS", detail::render_compartment_list(cfg.sweep.compartments));
    if (!cfg.sweep.target_path.empty()) put("TARGET", cfg.sweep.target_path);
    return out;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace bicoid
