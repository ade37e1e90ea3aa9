#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "bicoid/parallel.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

/// Folds `n_runs` seeded trajectories into per-cell mean and population
/// standard deviation. Runs are computed in index-ordered batches of `threads`
/// workers, then folded strictly in run order (Welford), so the result is
/// bit-identical for any thread count. Memory stays bounded by one batch of
/// trajectories plus the accumulators.
///
/// run_at: Trajectory(int run_index). Every run must share the grid of run 0.
template <typename RunFn>
EnsembleStats accumulate_ensemble(int n_runs, unsigned threads, RunFn&& run_at) {
    if (n_runs < 1) throw std::invalid_argument("accumulate_ensemble: n_runs must be >= 1");
    threads = resolve_threads(threads);

    EnsembleStats stats;
    std::vector<double> m2; // sum of squared deviations, Welford
    int folded = 0;

    auto fold = [&](const Trajectory& run) {
        if (folded == 0) {
            stats.sample_times = run.sample_times;
            stats.n_compartments = run.n_compartments;
            stats.mean.assign(run.samples.size(), 0.0);
            m2.assign(run.samples.size(), 0.0);
            stats.meta = run.meta;
        } else if (run.sample_times.size() != stats.sample_times.size() ||
                   run.n_compartments != stats.n_compartments) {
            throw std::logic_error("accumulate_ensemble: runs disagree on the sampling grid");
        } else {
            stats.meta.event_count += run.meta.event_count;
            stats.meta.frozen = stats.meta.frozen || run.meta.frozen;
        }
        ++folded;
        const double inv_n = 1.0 / static_cast<double>(folded);
        for (std::size_t i = 0; i < run.samples.size(); ++i) {
            const double delta = run.samples[i] - stats.mean[i];
            stats.mean[i] += delta * inv_n;
            m2[i] += delta * (run.samples[i] - stats.mean[i]);
        }
    };

    const int batch = static_cast<int>(threads);
    for (int start = 0; start < n_runs; start += batch) {
        const int count = std::min(batch, n_runs - start);
        auto runs = parallel_map<Trajectory>(static_cast<std::size_t>(count), threads,
                                             [&](std::size_t i) { return run_at(start + static_cast<int>(i)); });
        for (auto& r : runs) fold(r);
    }

    stats.n_runs = n_runs;
    stats.stddev.resize(stats.mean.size());
    const double inv_n = 1.0 / static_cast<double>(n_runs);
    for (std::size_t i = 0; i < m2.size(); ++i) stats.stddev[i] = std::sqrt(m2[i] * inv_n);

    stats.meta.n_runs = n_runs;
    return stats;
}

} // namespace bicoid
