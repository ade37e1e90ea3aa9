#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bicoid/ensemble.hpp"
#include "bicoid/format.hpp"
#include "bicoid/rng.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

/// Meaning of source_time_produce. Period (default): a production attempt
/// happens every source_time_produce iterations. InitialDelay: attempts happen
/// every iteration once that many iterations have passed (the alternate
/// reading of the same global).
enum class ProduceSemantics { Period, InitialDelay };

inline std::string to_string(ProduceSemantics s) {
    return s == ProduceSemantics::Period ? "period" : "initial-delay";
}

/// The agent-model globals, plus interpretation switches and test hooks.
/// Iterations map 1:1 to seconds of the stochastic clock.
struct AbmConfig {
    double source_decay_rate = 0.01;        ///< per-step decay of the production probability
    std::int64_t source_time_decay = 8640;  ///< iteration at which source decay begins (144 min)
    std::int64_t source_time_produce = 50;  ///< iterations between production attempts
    double source_production_prob = 1.0;
    double protein_decay_rate = 0.01;       ///< per-step life decay of each protein
    double compartment_dim_x = 5.0;         ///< geometry metadata only, micrometres
    double compartment_dim_y = 15.0;        ///< geometry metadata only, micrometres
    double prob_right = 0.5;
    double prob_left = 0.1;
    double die_threshold = 0.001;           ///< life below this kills the agent
    int n_compartments = 100;
    std::int64_t n_iterations = 12000;
    ProduceSemantics produce_semantics = ProduceSemantics::Period;

    /// Test hook: replace multiplicative life decay with an i.i.d. per-step
    /// death probability (matched-rate comparisons against the exact engine).
    std::optional<double> death_prob;
    /// Test hook: agents present before iteration 1, as (compartment, count)
    /// with 0-based compartments, all at life 1.
    std::vector<std::pair<int, std::int64_t>> initial_agents;

    void validate() const;

    bool operator==(const AbmConfig&) const = default;
};

inline void AbmConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("AbmConfig: " + what); };
    auto prob = [&](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) fail(std::string(name) + " must lie in [0,1]");
    };
    prob(source_production_prob, "source_production_prob");
    prob(prob_right, "prob_right");
    prob(prob_left, "prob_left");
    if (!(prob_right + prob_left <= 1.0)) fail("prob_right + prob_left must be <= 1");
    if (!(source_decay_rate >= 0.0 && source_decay_rate <= 1.0)) fail("source_decay_rate must lie in [0,1]");
    if (!(protein_decay_rate >= 0.0 && protein_decay_rate <= 1.0)) fail("protein_decay_rate must lie in [0,1]");
    if (!(die_threshold > 0.0 && die_threshold < 1.0)) fail("die_threshold must lie in (0,1)");
    if (!(compartment_dim_x > 0.0) || !(compartment_dim_y > 0.0)) fail("compartment dimensions must be > 0");
    if (n_compartments < 2) fail("n_compartments must be >= 2");
    if (n_iterations < 0) fail("n_iterations must be >= 0");
    if (source_time_decay < 0) fail("source_time_decay must be >= 0");
    if (source_time_produce < 1) fail("source_time_produce must be >= 1");
    if (death_prob && !(*death_prob >= 0.0 && *death_prob <= 1.0)) fail("death_prob must lie in [0,1]");
    for (const auto& [c, k] : initial_agents)
        if (c < 0 || c >= n_compartments || k < 0) fail("initial_agents entry out of range");
}

/// The standard starting conditions (right-favoured movement).
inline AbmConfig abm_default_config() { return AbmConfig{}; }

/// Alternative parameter set found by square-distance calibration against the
/// stochastic engine (left-favoured movement).
inline AbmConfig abm_calibrated_config() {
    AbmConfig c;
    c.source_decay_rate = 0.03;
    c.protein_decay_rate = 0.01;
    c.prob_right = 0.2;
    c.prob_left = 0.3;
    c.source_production_prob = 0.7;
    return c;
}

struct ProteinAgent {
    int compartment = 0; ///< 0-based lattice index
    double life = 1.0;   ///< in (0,1]; killed below AbmConfig::die_threshold
};

struct SourceAgent {
    double effective_production_prob = 1.0;
    bool alive = true; ///< informational: production probability still above the kill threshold
};

struct AbmPopulation {
    SourceAgent source;
    std::vector<ProteinAgent> agents; ///< stable creation order
};

inline AbmPopulation make_population(const AbmConfig& cfg) {
    AbmPopulation pop;
    pop.source.effective_production_prob = cfg.source_production_prob;
    pop.source.alive = cfg.source_production_prob >= cfg.die_threshold;
    for (const auto& [compartment, count] : cfg.initial_agents)
        for (std::int64_t k = 0; k < count; ++k) pop.agents.push_back({compartment, 1.0});
    return pop;
}

struct AbmStepStats {
    std::int64_t produced = 0;
    std::int64_t died = 0;
};

namespace detail {

inline bool is_attempt_iteration(std::int64_t iteration, const AbmConfig& cfg) {
    if (cfg.produce_semantics == ProduceSemantics::Period) return iteration % cfg.source_time_produce == 0;
    return iteration >= cfg.source_time_produce;
}

} // namespace detail

/// One iteration, phases in fixed order: source update, production, movement,
/// decay, census. `iteration` is 1-based so that iteration k produces the
/// histogram for simulated second k; with source_time_decay = 8640 the first
/// decayed attempt falls on minute 144. Movement walks agents in stable
/// creation order with one draw each: right below prob_right, left below
/// prob_right + prob_left, otherwise stay; hops off either end reflect.
inline AbmStepStats abm_step(AbmPopulation& pop, std::int64_t iteration, const AbmConfig& cfg, Rng& rng,
                             std::vector<std::int64_t>& histogram_out) {
    AbmStepStats stats;
    const int n = cfg.n_compartments;

    // (1) source update
    if (iteration >= cfg.source_time_decay) {
        pop.source.effective_production_prob *= 1.0 - cfg.source_decay_rate;
        pop.source.alive = pop.source.effective_production_prob >= cfg.die_threshold;
    }

    // (2) production
    if (detail::is_attempt_iteration(iteration, cfg)) {
        const double u = uniform_open(rng);
        if (u < pop.source.effective_production_prob) {
            pop.agents.push_back({0, 1.0});
            stats.produced = 1;
        }
    }

    // (3) movement
    for (auto& agent : pop.agents) {
        const double u = uniform_open(rng);
        if (u < cfg.prob_right) {
            if (agent.compartment < n - 1) ++agent.compartment;
        } else if (u < cfg.prob_right + cfg.prob_left) {
            if (agent.compartment > 0) --agent.compartment;
        }
    }

    // (4) decay
    if (cfg.death_prob) {
        const double p = *cfg.death_prob;
        std::size_t kept = 0;
        for (std::size_t i = 0; i < pop.agents.size(); ++i) {
            const double u = uniform_open(rng);
            if (u < p) {
                ++stats.died;
            } else {
                pop.agents[kept++] = pop.agents[i];
            }
        }
        pop.agents.resize(kept);
    } else {
        std::size_t kept = 0;
        for (std::size_t i = 0; i < pop.agents.size(); ++i) {
            pop.agents[i].life *= 1.0 - cfg.protein_decay_rate;
            if (pop.agents[i].life < cfg.die_threshold) {
                ++stats.died;
            } else {
                pop.agents[kept++] = pop.agents[i];
            }
        }
        pop.agents.resize(kept);
    }

    // (5) census
    histogram_out.assign(static_cast<std::size_t>(n), 0);
    for (const auto& agent : pop.agents) ++histogram_out[static_cast<std::size_t>(agent.compartment)];
    return stats;
}

namespace detail {

inline void append_abm_params(std::vector<std::pair<std::string, std::string>>& out, const AbmConfig& c) {
    out.emplace_back("SOURCE_DECAY_RATE", format_double(c.source_decay_rate));
    out.emplace_back("SOURCE_TIME_DECAY", std::to_string(c.source_time_decay));
    out.emplace_back("SOURCE_TIME_PRODUCE", std::to_string(c.source_time_produce));
    out.emplace_back("SOURCE_PRODUCTION_PROB", format_double(c.source_production_prob));
    out.emplace_back("PROTEIN_DECAY_RATE", format_double(c.protein_decay_rate));
    out.emplace_back("COMPARTMENT_DIMENSION_X", format_double(c.compartment_dim_x));
    out.emplace_back("COMPARTMENT_DIMENSION_Y", format_double(c.compartment_dim_y));
    out.emplace_back("PROB_RIGHT", format_double(c.prob_right));
    out.emplace_back("PROB_LEFT", format_double(c.prob_left));
    out.emplace_back("DIE", format_double(c.die_threshold));
    out.emplace_back("N_COMPARTMENTS", std::to_string(c.n_compartments));
    out.emplace_back("N_ITERATIONS", std::to_string(c.n_iterations));
    out.emplace_back("PRODUCE_SEMANTICS", to_string(c.produce_semantics));
}

} // namespace detail

/// Runs the discrete-time model for n_iterations from an empty population,
/// recording the occupancy histogram after every iteration (one row per
/// simulated second) plus the initial state at t = 0.
inline Trajectory run_abm(const AbmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int n = cfg.n_compartments;

    Trajectory traj;
    traj.n_compartments = n;
    traj.sample_times.reserve(static_cast<std::size_t>(cfg.n_iterations) + 1);
    traj.samples.reserve((static_cast<std::size_t>(cfg.n_iterations) + 1) * static_cast<std::size_t>(n));

    AbmPopulation pop = make_population(cfg);
    Rng rng(seed);
    std::vector<std::int64_t> hist(static_cast<std::size_t>(n), 0);
    for (const auto& agent : pop.agents) ++hist[static_cast<std::size_t>(agent.compartment)];

    auto record = [&](double t) {
        traj.sample_times.push_back(t);
        for (auto c : hist) traj.samples.push_back(static_cast<double>(c));
    };
    record(0.0);

    for (std::int64_t it = 1; it <= cfg.n_iterations; ++it) {
        abm_step(pop, it, cfg, rng, hist);
        record(static_cast<double>(it));
    }

    traj.meta.engine = "abm";
    traj.meta.seed = seed;
    traj.meta.n_runs = 1;
    traj.meta.sample_interval = 1.0;
    detail::append_abm_params(traj.meta.params, cfg);
    return traj;
}

/// Seeded ensemble of independent runs (member i uses derive_seed(base, i)),
/// folded in run-index order; bit-identical for any parallelism.
inline EnsembleStats run_abm_ensemble(const AbmConfig& cfg, int n_runs, std::uint64_t base_seed,
                                      unsigned threads = 0) {
    cfg.validate();
    auto stats = accumulate_ensemble(n_runs, threads, [&](int run) {
        return run_abm(cfg, derive_seed(base_seed, static_cast<std::uint64_t>(run)));
    });
    stats.base_seed = base_seed;
    stats.meta.engine = "abm-mean";
    stats.meta.seed = base_seed;
    return stats;
}

} // namespace bicoid
