#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bicoid {

/// Molecule counts over the lattice at one instant. One realisation of the
/// state vector n = [n1..nN]; all entries nonnegative.
struct LatticeState {
    std::vector<std::int64_t> counts;
    double time = 0.0;

    void validate(int n_compartments) const {
        if (static_cast<int>(counts.size()) != n_compartments)
            throw std::invalid_argument("LatticeState: expected " + std::to_string(n_compartments) +
                                        " compartments, got " + std::to_string(counts.size()));
        for (auto c : counts)
            if (c < 0) throw std::invalid_argument("LatticeState: negative count");
        if (!(time >= 0.0)) throw std::invalid_argument("LatticeState: negative time");
    }
};

/// Provenance carried with every trajectory: everything needed to reproduce
/// the run byte for byte (engine, parameter snapshot, seeds, run count).
struct TrajectoryMeta {
    std::string engine;                                     ///< "ssa", "ode", "abm", "ssa-mean", "abm-mean"
    std::uint64_t seed = 0;                                 ///< run seed, or ensemble base seed
    int n_runs = 1;
    double sample_interval = 0.0;                           ///< seconds between rows
    std::uint64_t event_count = 0;                          ///< ssa: reactions applied
    bool frozen = false;                                    ///< ssa: propensity hit zero before the horizon
    std::uint64_t negative_clamps = 0;                      ///< ode: samples floored at zero
    std::vector<std::pair<std::string, std::string>> params; ///< ordered parameter snapshot

    bool operator==(const TrajectoryMeta&) const = default;
};

/// Regularly sampled time series of per-compartment values, row-major.
/// Single stochastic/agent runs hold integer-valued cells; the deterministic
/// solver and ensemble means hold reals.
struct Trajectory {
    std::vector<double> sample_times;
    std::vector<double> samples; ///< rows() x n_compartments, flat
    int n_compartments = 0;
    TrajectoryMeta meta;

    std::size_t rows() const { return sample_times.size(); }

    double at(std::size_t row, int compartment) const {
        return samples[row * static_cast<std::size_t>(n_compartments) + static_cast<std::size_t>(compartment)];
    }

    double& at(std::size_t row, int compartment) {
        return samples[row * static_cast<std::size_t>(n_compartments) + static_cast<std::size_t>(compartment)];
    }

    void validate() const {
        if (samples.size() != rows() * static_cast<std::size_t>(n_compartments))
            throw std::invalid_argument("Trajectory: sample matrix shape mismatch");
        for (std::size_t i = 1; i < sample_times.size(); ++i)
            if (!(sample_times[i] > sample_times[i - 1]))
                throw std::invalid_argument("Trajectory: sample times must strictly increase");
    }

    /// Row spacing; requires at least two rows.
    double sample_interval() const {
        if (meta.sample_interval > 0.0) return meta.sample_interval;
        if (rows() < 2) throw std::logic_error("Trajectory: sample interval unknown for <2 rows");
        return (sample_times.back() - sample_times.front()) / static_cast<double>(rows() - 1);
    }
};

/// Per-time per-compartment mean and population standard deviation over an
/// ensemble of seeded runs.
struct EnsembleStats {
    std::vector<double> sample_times;
    std::vector<double> mean;   ///< flat, rows x n_compartments
    std::vector<double> stddev; ///< same shape; sqrt(M2/n), so 0 for n = 1
    int n_compartments = 0;
    int n_runs = 0;
    std::uint64_t base_seed = 0;
    TrajectoryMeta meta; ///< engine tagged "<engine>-mean"

    double mean_at(std::size_t row, int compartment) const {
        return mean[row * static_cast<std::size_t>(n_compartments) + static_cast<std::size_t>(compartment)];
    }

    double std_at(std::size_t row, int compartment) const {
        return stddev[row * static_cast<std::size_t>(n_compartments) + static_cast<std::size_t>(compartment)];
    }

    /// The mean as a real-valued trajectory (metadata preserved).
    Trajectory mean_trajectory() const {
        Trajectory t;
        t.sample_times = sample_times;
        t.samples = mean;
        t.n_compartments = n_compartments;
        t.meta = meta;
        return t;
    }
};

} // namespace bicoid
