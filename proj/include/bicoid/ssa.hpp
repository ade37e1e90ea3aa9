#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bicoid/ensemble.hpp"
#include "bicoid/format.hpp"
#include "bicoid/params.hpp"
#include "bicoid/rng.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

/// How the translation channel depends on state. ZerothOrder (the default)
/// fires at rate s(t) regardless of occupancy. Literal multiplies by the
/// first-bin count, which can never leave the empty initial state and grows
/// autocatalytically from a seeded one whenever s(t) exceeds 1/tau_p + d; it
/// is kept behind this switch for fidelity experiments only.
enum class SourceMode { ZerothOrder, Literal };

inline std::string to_string(SourceMode m) {
    return m == SourceMode::ZerothOrder ? "zeroth-order" : "literal";
}

enum class ReactionKind { DiffuseRight, DiffuseLeft, Degrade, Produce };

/// One of the 3N-1 reaction channels. `compartment` is a 0-based lattice
/// index: DiffuseRight fires from compartments 0..N-2, DiffuseLeft from
/// 1..N-1, Degrade from any, Produce into compartment 0 only.
struct ReactionIndex {
    ReactionKind kind;
    int compartment = 0;

    bool operator==(const ReactionIndex&) const = default;
};

/// Total number of distinct reactions for an N-compartment lattice.
inline std::size_t reaction_count(int n_compartments) {
    return 3 * static_cast<std::size_t>(n_compartments) - 1;
}

/// Canonical enumeration order of the flat reaction list:
/// [diffuse-right 0..N-2 | diffuse-left 1..N-1 | degrade 0..N-1 | produce].
inline ReactionIndex reaction_at(std::size_t j, int n_compartments) {
    const std::size_t n = static_cast<std::size_t>(n_compartments);
    if (j < n - 1) return {ReactionKind::DiffuseRight, static_cast<int>(j)};
    j -= n - 1;
    if (j < n - 1) return {ReactionKind::DiffuseLeft, static_cast<int>(j + 1)};
    j -= n - 1;
    if (j < n) return {ReactionKind::Degrade, static_cast<int>(j)};
    j -= n;
    if (j == 0) return {ReactionKind::Produce, 0};
    throw std::out_of_range("reaction_at: index beyond 3N-1");
}

/// Per-reaction rates in canonical order plus cached channel subtotals.
/// Subtotals are computed as rate * (exact integer occupancy sum), so they
/// match the entry sums to the last ulp and carry no accumulation drift.
struct PropensityVector {
    std::vector<double> rates;   ///< length 3N-1
    double diffuse_right = 0.0;  ///< a1 = d * sum_{i<N} m_i
    double diffuse_left = 0.0;   ///< a2 = d * sum_{i>1} m_i
    double degrade = 0.0;        ///< a3 = sum_i m_i / tau_p
    double produce = 0.0;        ///< a4 = s(t), or s(t)*m_1 in literal mode
    double total = 0.0;
};

inline PropensityVector compute_propensities(const LatticeState& state, double t, const ModelParams& params,
                                             SourceMode mode = SourceMode::ZerothOrder) {
    params.validate();
    state.validate(params.n_compartments);
    if (!(t >= 0.0)) throw std::invalid_argument("compute_propensities: t must be >= 0");

    const int n = params.n_compartments;
    const double d = params.hop_rate();
    const auto& m = state.counts;

    std::int64_t sum_right = 0, sum_left = 0, sum_all = 0;
    for (int i = 0; i < n; ++i) {
        sum_all += m[i];
        if (i < n - 1) sum_right += m[i];
        if (i > 0) sum_left += m[i];
    }

    PropensityVector pv;
    pv.rates.resize(reaction_count(n));
    std::size_t j = 0;
    for (int i = 0; i < n - 1; ++i) pv.rates[j++] = d * static_cast<double>(m[i]);
    for (int i = 1; i < n; ++i) pv.rates[j++] = d * static_cast<double>(m[i]);
    for (int i = 0; i < n; ++i) pv.rates[j++] = static_cast<double>(m[i]) / params.tau_p;
    const double s = source_rate(t, params);
    pv.produce = mode == SourceMode::ZerothOrder ? s : s * static_cast<double>(m[0]);
    pv.rates[j] = pv.produce;

    pv.diffuse_right = d * static_cast<double>(sum_right);
    pv.diffuse_left = d * static_cast<double>(sum_left);
    pv.degrade = static_cast<double>(sum_all) / params.tau_p;
    pv.total = pv.diffuse_right + pv.diffuse_left + pv.degrade + pv.produce;
    return pv;
}

namespace detail {

/// Scans a channel block for the first entry whose running sum exceeds
/// `residual`. Falls back to the last positive entry if rounding pushes the
/// residual past the block sum.
template <typename RateAt>
inline int scan_block(int first, int last, RateAt&& rate_at, double residual) {
    double cum = 0.0;
    int last_positive = -1;
    for (int i = first; i <= last; ++i) {
        const double r = rate_at(i);
        if (r > 0.0) last_positive = i;
        cum += r;
        if (residual < cum) return i;
    }
    return last_positive;
}

} // namespace detail

/// Maps the channel-selection draw r2 to a reaction: the unique j with
/// sum_{i<j} a_i <= r2 * a < sum_{i<=j} a_i over the canonical order.
inline ReactionIndex select_reaction(const PropensityVector& pv, double r2) {
    if (!(pv.total > 0.0)) throw std::invalid_argument("select_reaction: total propensity must be > 0");
    if (!(r2 > 0.0 && r2 < 1.0)) throw std::invalid_argument("select_reaction: r2 must lie in (0,1)");

    const std::size_t total_reactions = pv.rates.size();
    const int n = static_cast<int>((total_reactions + 1) / 3);
    const double target = r2 * pv.total;

    const double c1 = pv.diffuse_right;
    const double c2 = c1 + pv.diffuse_left;
    const double c3 = c2 + pv.degrade;

    if (target < c1) {
        int i = detail::scan_block(0, n - 2, [&](int k) { return pv.rates[k]; }, target);
        if (i >= 0) return {ReactionKind::DiffuseRight, i};
    } else if (target < c2) {
        int i = detail::scan_block(0, n - 2, [&](int k) { return pv.rates[(n - 1) + k]; }, target - c1);
        if (i >= 0) return {ReactionKind::DiffuseLeft, i + 1};
    } else if (target < c3) {
        int i = detail::scan_block(0, n - 1, [&](int k) { return pv.rates[2 * (n - 1) + k]; }, target - c2);
        if (i >= 0) return {ReactionKind::Degrade, i};
    } else if (pv.produce > 0.0) {
        return {ReactionKind::Produce, 0};
    }
    // Rounding placed the target in an empty stretch; pick the last channel
    // with any mass so a reaction always fires when total > 0.
    for (std::size_t j = total_reactions; j-- > 0;)
        if (pv.rates[j] > 0.0) return reaction_at(j, n);
    throw std::logic_error("select_reaction: positive total but no positive entry");
}

/// Applies the state update of one reaction. Counts can never go negative
/// because a channel with an empty reactant has zero propensity; this is
/// enforced here unconditionally.
inline void apply_reaction(LatticeState& state, const ReactionIndex& r) {
    auto& m = state.counts;
    const int n = static_cast<int>(m.size());
    auto take = [&](int i) {
        if (m[i] <= 0) throw std::logic_error("apply_reaction: count would go negative at compartment " +
                                              std::to_string(i + 1));
        --m[i];
    };
    switch (r.kind) {
    case ReactionKind::DiffuseRight:
        take(r.compartment);
        ++m[r.compartment + 1];
        break;
    case ReactionKind::DiffuseLeft:
        take(r.compartment);
        ++m[r.compartment - 1];
        break;
    case ReactionKind::Degrade:
        take(r.compartment);
        break;
    case ReactionKind::Produce:
        ++m[0];
        break;
    }
    (void)n;
}

/// One direct-method event. Draws exactly two uniforms in the order (r1, r2),
/// advances time by tau = ln(1/r1)/a and fires the reaction selected by r2.
/// The caller guarantees the total propensity is positive (a frozen system
/// has no next event).
inline std::pair<LatticeState, double> direct_method_step(const LatticeState& state, double t,
                                                          const ModelParams& params, Rng& rng,
                                                          SourceMode mode = SourceMode::ZerothOrder) {
    const PropensityVector pv = compute_propensities(state, t, params, mode);
    if (!(pv.total > 0.0)) throw std::invalid_argument("direct_method_step: system is frozen (total propensity 0)");
    const double r1 = uniform_open(rng);
    const double r2 = uniform_open(rng);
    const double tau = std::log(1.0 / r1) / pv.total;
    LatticeState next = state;
    apply_reaction(next, select_reaction(pv, r2));
    next.time = t + tau;
    return {std::move(next), t + tau};
}

struct SsaOptions {
    SourceMode source_mode = SourceMode::ZerothOrder;
    /// Test hook: start from these counts instead of the empty lattice.
    std::optional<std::vector<std::int64_t>> initial_counts;
    unsigned threads = 0; ///< ensemble workers; 0 = hardware
};

namespace detail {

inline void append_model_params(std::vector<std::pair<std::string, std::string>>& out, const ModelParams& p,
                                SourceMode mode);

} // namespace detail

/// Exact stochastic simulation from t = 0 until the next event would pass
/// `final_time`, sampled on the grid {0, dt, 2dt, ...}: the row at grid time g
/// holds the state immediately before the first event time exceeding g (an
/// event landing exactly on g is included). A frozen system fills the
/// remaining rows with its last state and sets meta.frozen.
inline Trajectory run_ssa(const ModelParams& params, double final_time, double sample_interval, std::uint64_t seed,
                          const SsaOptions& opts = {}) {
    params.validate();
    if (!(final_time > 0.0)) throw std::invalid_argument("run_ssa: final_time must be > 0");
    if (!(sample_interval > 0.0)) throw std::invalid_argument("run_ssa: sample_interval must be > 0");

    const int n = params.n_compartments;
    const double d = params.hop_rate();
    const bool literal = opts.source_mode == SourceMode::Literal;

    std::vector<std::int64_t> m(static_cast<std::size_t>(n), 0);
    if (opts.initial_counts) {
        LatticeState init{*opts.initial_counts, 0.0};
        init.validate(n);
        m = *opts.initial_counts;
    }

    // Channel occupancy sums are integers, so the subtotals a1..a3 derived
    // from them are exact at every event; no periodic recomputation needed.
    std::int64_t sum_right = std::accumulate(m.begin(), m.end() - 1, std::int64_t{0});
    std::int64_t sum_left = std::accumulate(m.begin() + 1, m.end(), std::int64_t{0});
    std::int64_t sum_all = std::accumulate(m.begin(), m.end(), std::int64_t{0});

    const std::size_t n_samples = static_cast<std::size_t>(std::floor(final_time / sample_interval + 1e-9)) + 1;
    Trajectory traj;
    traj.n_compartments = n;
    traj.sample_times.reserve(n_samples);
    traj.samples.reserve(n_samples * static_cast<std::size_t>(n));

    std::size_t next_sample = 0;
    auto record_through = [&](double horizon) {
        // Flush every grid point strictly below `horizon` with the current state.
        while (next_sample < n_samples) {
            const double g = static_cast<double>(next_sample) * sample_interval;
            if (!(g < horizon)) break;
            traj.sample_times.push_back(g);
            for (int i = 0; i < n; ++i) traj.samples.push_back(static_cast<double>(m[i]));
            ++next_sample;
        }
    };

    Rng rng(seed);
    double t = 0.0;
    std::uint64_t events = 0;
    bool frozen = false;

    for (;;) {
        const double s = source_rate(t, params);
        const double a1 = d * static_cast<double>(sum_right);
        const double a2 = d * static_cast<double>(sum_left);
        const double a3 = static_cast<double>(sum_all) / params.tau_p;
        const double a4 = literal ? s * static_cast<double>(m[0]) : s;
        const double total = a1 + a2 + a3 + a4;

        if (!(total > 0.0)) {
            frozen = true;
            break;
        }

        const double r1 = uniform_open(rng);
        const double r2 = uniform_open(rng);
        const double t_next = t + std::log(1.0 / r1) / total;

        record_through(t_next);
        if (t_next > final_time) break;

        const double target = r2 * total;
        const double c1 = a1;
        const double c2 = a1 + a2;
        const double c3 = c2 + a3;
        auto require_found = [](int i) {
            if (i < 0) throw std::logic_error("run_ssa: selection scan found no positive-rate reaction");
            return i;
        };
        if (target < c1) {
            // hop i -> i+1
            const int i =
                require_found(detail::scan_block(0, n - 2, [&](int k) { return d * static_cast<double>(m[k]); },
                                                 target));
            assert(m[i] > 0);
            --m[i];
            ++m[i + 1];
            if (i == 0) sum_left += 1;          // receiver enters the left-hop pool
            if (i == n - 2) sum_right -= 1;     // receiver is the last bin
        } else if (target < c2) {
            // hop i -> i-1; block covers compartments 1..n-1
            const int i = require_found(detail::scan_block(
                              0, n - 2, [&](int k) { return d * static_cast<double>(m[k + 1]); }, target - c1)) +
                          1;
            assert(m[i] > 0);
            --m[i];
            ++m[i - 1];
            if (i == 1) sum_left -= 1;          // receiver is the first bin
            if (i == n - 1) sum_right += 1;     // receiver enters the right-hop pool
        } else if (target < c3) {
            const int i = require_found(detail::scan_block(
                0, n - 1, [&](int k) { return static_cast<double>(m[k]) / params.tau_p; }, target - c2));
            assert(m[i] > 0);
            --m[i];
            sum_all -= 1;
            if (i < n - 1) sum_right -= 1;
            if (i > 0) sum_left -= 1;
        } else {
            ++m[0];
            sum_all += 1;
            sum_right += 1; // the first bin always belongs to the right-hop pool
        }
        ++events;
        t = t_next;
    }

    record_through(std::numeric_limits<double>::infinity());

    traj.meta.engine = "ssa";
    traj.meta.seed = seed;
    traj.meta.n_runs = 1;
    traj.meta.sample_interval = sample_interval;
    traj.meta.event_count = events;
    traj.meta.frozen = frozen;
    detail::append_model_params(traj.meta.params, params, opts.source_mode);
    traj.meta.params.emplace_back("FINAL_TIME", format_double(final_time));
    return traj;
}

/// Seeded ensemble of independent runs; member i uses derive_seed(base, i).
/// Statistics are folded in run-index order, so the result is bit-identical
/// regardless of execution order or parallelism.
inline EnsembleStats run_ssa_ensemble(const ModelParams& params, double final_time, double sample_interval,
                                      int n_runs, std::uint64_t base_seed, const SsaOptions& opts = {}) {
    params.validate();
    auto stats = accumulate_ensemble(n_runs, opts.threads, [&](int run) {
        return run_ssa(params, final_time, sample_interval, derive_seed(base_seed, static_cast<std::uint64_t>(run)),
                       opts);
    });
    stats.base_seed = base_seed;
    stats.meta.engine = "ssa-mean";
    stats.meta.seed = base_seed;
    return stats;
}

namespace detail {

inline void append_model_params(std::vector<std::pair<std::string, std::string>>& out, const ModelParams& p,
                                SourceMode mode) {
    out.emplace_back("N_COMPARTMENTS", std::to_string(p.n_compartments));
    out.emplace_back("H", format_double(p.h));
    out.emplace_back("D", format_double(p.D));
    out.emplace_back("T0", format_double(p.t0));
    out.emplace_back("TAU_P", format_double(p.tau_p));
    out.emplace_back("TAU_M", format_double(p.tau_m));
    out.emplace_back("S0", format_double(p.s0));
    out.emplace_back("SOURCE_MODE", to_string(mode));
}

} // namespace detail

} // namespace bicoid
