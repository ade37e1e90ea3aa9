#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicoid/format.hpp"
#include "bicoid/params.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

/// Expected molecule numbers over the lattice at one instant; the mean-field
/// counterpart of LatticeState.
struct MeanState {
    std::vector<double> values;
    double time = 0.0;
};

/// d/dt of each compartment mean: discrete diffusion with zero-flux ends,
/// uniform degradation, and the time-dependent source feeding the first bin.
///   interior:  d*(n_{i-1} - 2 n_i + n_{i+1}) - n_i/tau_p
///   first bin: d*(n_2 - n_1)       - n_1/tau_p + s(t)
///   last bin:  d*(n_{N-1} - n_N)   - n_N/tau_p
inline void mean_field_rhs_into(const std::vector<double>& n, double t, const ModelParams& params,
                                std::vector<double>& out) {
    const int N = params.n_compartments;
    const double d = params.hop_rate();
    const double inv_tau = 1.0 / params.tau_p;
    out.resize(static_cast<std::size_t>(N));
    out[0] = d * (n[1] - n[0]) - n[0] * inv_tau + source_rate(t, params);
    for (int i = 1; i < N - 1; ++i) out[i] = d * (n[i - 1] - 2.0 * n[i] + n[i + 1]) - n[i] * inv_tau;
    out[N - 1] = d * (n[N - 2] - n[N - 1]) - n[N - 1] * inv_tau;
}

inline std::vector<double> mean_field_rhs(const MeanState& state, double t, const ModelParams& params) {
    params.validate();
    if (static_cast<int>(state.values.size()) != params.n_compartments)
        throw std::invalid_argument("mean_field_rhs: state size does not match n_compartments");
    std::vector<double> out;
    mean_field_rhs_into(state.values, t, params, out);
    return out;
}

/// Explicit-Euler stability limit of the linear system; RK4 steps must stay
/// below it.
inline double rk4_stability_limit(const ModelParams& params) {
    return 1.0 / (2.0 * (2.0 * params.hop_rate() + 1.0 / params.tau_p));
}

struct OdeOptions {
    double dt = 0.1; ///< maximum RK4 step, seconds
    /// Test hook: start from these values instead of the empty lattice.
    std::optional<std::vector<double>> initial_values;
};

namespace detail {

inline void check_ode_step(const ModelParams& params, double dt) {
    const double limit = rk4_stability_limit(params);
    if (!(dt > 0.0) || !(dt < limit))
        throw std::invalid_argument("ode: dt must lie in (0, " + std::to_string(limit) +
                                    ") for stability; got " + std::to_string(dt));
}

/// Classical RK4 from state.time to t_end with steps of at most dt, the last
/// one shortened to land exactly on t_end. Works in place.
inline void rk4_segment(MeanState& state, double t_end, double dt, const ModelParams& params,
                        std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
                        std::vector<double>& k4, std::vector<double>& tmp) {
    const double len = t_end - state.time;
    if (!(len > 0.0)) return;
    const auto n_sub = static_cast<std::size_t>(std::ceil(len / dt - 1e-12));
    const double h = len / static_cast<double>(std::max<std::size_t>(n_sub, 1));
    const std::size_t N = state.values.size();
    auto& y = state.values;
    for (std::size_t step = 0, total = std::max<std::size_t>(n_sub, 1); step < total; ++step) {
        const double t = state.time + h * static_cast<double>(step);
        mean_field_rhs_into(y, t, params, k1);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        mean_field_rhs_into(tmp, t + 0.5 * h, params, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        mean_field_rhs_into(tmp, t + 0.5 * h, params, k3);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
        mean_field_rhs_into(tmp, t + h, params, k4);
        for (std::size_t i = 0; i < N; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    state.time = t_end;
}

} // namespace detail

/// Integrates the mean-field system to `t_end`, restarting at the source
/// cutoff t0 so no RK4 step straddles the decay kink. Returns the end state.
inline MeanState integrate_to(const ModelParams& params, double t_end, const OdeOptions& opts = {},
                              std::optional<MeanState> resume_from = {}) {
    params.validate();
    detail::check_ode_step(params, opts.dt);
    if (!(t_end >= 0.0)) throw std::invalid_argument("integrate_to: t_end must be >= 0");

    MeanState state;
    if (resume_from) {
        state = std::move(*resume_from);
    } else {
        state.values.assign(static_cast<std::size_t>(params.n_compartments), 0.0);
        state.time = 0.0;
        if (opts.initial_values) {
            if (static_cast<int>(opts.initial_values->size()) != params.n_compartments)
                throw std::invalid_argument("integrate_to: initial_values size mismatch");
            state.values = *opts.initial_values;
        }
    }
    if (t_end < state.time) throw std::invalid_argument("integrate_to: t_end precedes the state time");

    std::vector<double> k1, k2, k3, k4, tmp(state.values.size());
    if (state.time < params.t0 && params.t0 < t_end)
        detail::rk4_segment(state, params.t0, opts.dt, params, k1, k2, k3, k4, tmp);
    detail::rk4_segment(state, t_end, opts.dt, params, k1, k2, k3, k4, tmp);
    return state;
}

/// Deterministic reference solution: the mean of the stochastic process
/// (exact for this linear reaction network), sampled on the same grid
/// convention as run_ssa. The integration grid places breakpoints on every
/// sample time and on t0, with RK4 sub-steps of at most dt in between. The
/// exact solution is nonnegative; any sample a step pushes below zero is
/// floored at 0 and counted in meta.negative_clamps.
inline Trajectory solve_mean_field(const ModelParams& params, double final_time, double sample_interval,
                                   const OdeOptions& opts = {}) {
    params.validate();
    detail::check_ode_step(params, opts.dt);
    if (!(final_time > 0.0)) throw std::invalid_argument("solve_mean_field: final_time must be > 0");
    if (!(sample_interval > 0.0)) throw std::invalid_argument("solve_mean_field: sample_interval must be > 0");

    const int N = params.n_compartments;
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(final_time / sample_interval + 1e-9)) + 1;

    MeanState state;
    state.values.assign(static_cast<std::size_t>(N), 0.0);
    if (opts.initial_values) {
        if (static_cast<int>(opts.initial_values->size()) != N)
            throw std::invalid_argument("solve_mean_field: initial_values size mismatch");
        state.values = *opts.initial_values;
    }

    Trajectory traj;
    traj.n_compartments = N;
    traj.sample_times.reserve(n_samples);
    traj.samples.reserve(n_samples * static_cast<std::size_t>(N));

    std::uint64_t clamps = 0;
    auto record = [&](double g) {
        traj.sample_times.push_back(g);
        for (double v : state.values) {
            if (v < 0.0) {
                ++clamps;
                v = 0.0;
            }
            traj.samples.push_back(v);
        }
    };

    std::vector<double> k1, k2, k3, k4, tmp(state.values.size());
    record(0.0);
    for (std::size_t s = 1; s < n_samples; ++s) {
        const double g = static_cast<double>(s) * sample_interval;
        if (state.time < params.t0 && params.t0 < g)
            detail::rk4_segment(state, params.t0, opts.dt, params, k1, k2, k3, k4, tmp);
        detail::rk4_segment(state, g, opts.dt, params, k1, k2, k3, k4, tmp);
        record(g);
    }

    traj.meta.engine = "ode";
    traj.meta.n_runs = 1;
    traj.meta.sample_interval = sample_interval;
    traj.meta.negative_clamps = clamps;
    traj.meta.params.emplace_back("N_COMPARTMENTS", std::to_string(N));
    traj.meta.params.emplace_back("H", format_double(params.h));
    traj.meta.params.emplace_back("D", format_double(params.D));
    traj.meta.params.emplace_back("T0", format_double(params.t0));
    traj.meta.params.emplace_back("TAU_P", format_double(params.tau_p));
    traj.meta.params.emplace_back("TAU_M", format_double(params.tau_m));
    traj.meta.params.emplace_back("S0", format_double(params.s0));
    traj.meta.params.emplace_back("ODE_DT", format_double(opts.dt));
    traj.meta.params.emplace_back("FINAL_TIME", format_double(final_time));
    return traj;
}

/// Total expected molecule count of a state.
inline double total_mass(const MeanState& state) {
    double sum = 0.0;
    for (double v : state.values) sum += v;
    return sum;
}

} // namespace bicoid
