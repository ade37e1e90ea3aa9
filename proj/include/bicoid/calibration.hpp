#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicoid/abm.hpp"
#include "bicoid/parallel.hpp"
#include "bicoid/rng.hpp"
#include "bicoid/trajectory.hpp"

namespace bicoid {

/// Closed arithmetic range {low, low+step, ...} capped at high.
struct ParamRange {
    double low = 0.0;
    double high = 0.0;
    double step = 1.0;

    void validate(const std::string& name) const {
        if (!(low <= high)) throw std::invalid_argument("SweepSpec: " + name + " requires low <= high");
        if (!(step > 0.0)) throw std::invalid_argument("SweepSpec: " + name + " requires step > 0");
    }

    /// floor((high-low)/step) + 1, with a tolerance so 0.04/0.01 counts as 4.
    std::size_t count() const {
        return static_cast<std::size_t>(std::floor((high - low) / step + 1e-9)) + 1;
    }

    double value_at(std::size_t i) const { return low + static_cast<double>(i) * step; }

    bool operator==(const ParamRange&) const = default;
};

/// Names of the five swept parameters, in grid enumeration order.
inline const std::array<const char*, 5>& sweep_parameter_names() {
    static const std::array<const char*, 5> names = {"source_decay_rate", "protein_decay_rate", "prob_right",
                                                     "prob_left", "source_production_prob"};
    return names;
}

/// Grid definition for a calibration sweep over the five tunable globals; all
/// other fields come from `base`. Comparison happens on the ensemble mean at
/// the listed minutes over the listed compartments (0-based; empty = all).
struct SweepSpec {
    ParamRange source_decay_rate{0.01, 0.01, 1.0};
    ParamRange protein_decay_rate{0.01, 0.01, 1.0};
    ParamRange prob_right{0.5, 0.5, 1.0};
    ParamRange prob_left{0.1, 0.1, 1.0};
    ParamRange source_production_prob{1.0, 1.0, 1.0};
    AbmConfig base;
    int runs_per_case = 20;
    std::vector<double> comparison_minutes = {60.0, 100.0, 144.0, 180.0, 200.0};
    std::vector<int> compartments; ///< 0-based subset; empty means all

    void validate() const;
    std::size_t case_count() const {
        return source_decay_rate.count() * protein_decay_rate.count() * prob_right.count() * prob_left.count() *
               source_production_prob.count();
    }

    bool operator==(const SweepSpec&) const = default;
};

inline void SweepSpec::validate() const {
    source_decay_rate.validate("source_decay_rate");
    protein_decay_rate.validate("protein_decay_rate");
    prob_right.validate("prob_right");
    prob_left.validate("prob_left");
    source_production_prob.validate("source_production_prob");
    base.validate();
    if (runs_per_case < 1) throw std::invalid_argument("SweepSpec: runs_per_case must be >= 1");
    if (comparison_minutes.empty()) throw std::invalid_argument("SweepSpec: comparison_minutes must not be empty");
    if (!(prob_right.high + prob_left.high <= 1.0))
        throw std::invalid_argument("SweepSpec: grid contains prob_right + prob_left > 1");
    for (int c : compartments)
        if (c < 0 || c >= base.n_compartments)
            throw std::invalid_argument("SweepSpec: compartment index " + std::to_string(c) + " out of range");
}

/// The full calibration grid: decay rates on [0.01,0.05] step 0.01,
/// movement probabilities on [0.1,0.5] step 0.1, production on [0.2,1.0] step
/// 0.1 (5*5*5*5*9 = 5625 cases).
inline SweepSpec full_sweep_spec(AbmConfig base = {}) {
    SweepSpec s;
    s.source_decay_rate = {0.01, 0.05, 0.01};
    s.protein_decay_rate = {0.01, 0.05, 0.01};
    s.prob_right = {0.1, 0.5, 0.1};
    s.prob_left = {0.1, 0.5, 0.1};
    s.source_production_prob = {0.2, 1.0, 0.1};
    s.base = std::move(base);
    return s;
}

using CaseParams = std::array<double, 5>;

/// Per-case sweep outcome. case_id is the 1-based position in enumeration
/// order; score is the mean of the per-snapshot partial scores.
struct CaseResult {
    std::int64_t case_id = 0;
    CaseParams params{};
    double score = 0.0;
    std::vector<double> per_snapshot;
};

/// Row-major Cartesian product of the five ranges, in the field order
/// (source_decay_rate, protein_decay_rate, prob_right, prob_left,
/// source_production_prob). Deterministic; case_id = 1-based position.
inline std::vector<CaseParams> enumerate_cases(const SweepSpec& spec) {
    spec.validate();
    const std::array<const ParamRange*, 5> ranges = {&spec.source_decay_rate, &spec.protein_decay_rate,
                                                     &spec.prob_right, &spec.prob_left,
                                                     &spec.source_production_prob};
    std::array<std::size_t, 5> counts{};
    std::size_t total = 1;
    for (std::size_t k = 0; k < 5; ++k) {
        counts[k] = ranges[k]->count();
        total *= counts[k];
    }
    if (total == 0) throw std::invalid_argument("enumerate_cases: empty grid");

    std::vector<CaseParams> cases;
    cases.reserve(total);
    std::array<std::size_t, 5> idx{};
    for (std::size_t c = 0; c < total; ++c) {
        CaseParams p;
        for (std::size_t k = 0; k < 5; ++k) p[k] = ranges[k]->value_at(idx[k]);
        cases.push_back(p);
        for (std::size_t k = 5; k-- > 0;) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
    }
    return cases;
}

/// Applies a parameter tuple onto a base configuration.
inline AbmConfig apply_case(const AbmConfig& base, const CaseParams& p) {
    AbmConfig cfg = base;
    cfg.source_decay_rate = p[0];
    cfg.protein_decay_rate = p[1];
    cfg.prob_right = p[2];
    cfg.prob_left = p[3];
    cfg.source_production_prob = p[4];
    return cfg;
}

/// Ensemble base seed for one case: a hash of the parameter tuple's bit
/// patterns with the sweep seed, so re-gridding never changes the seeds of
/// cases that stay in the grid.
inline std::uint64_t case_seed(std::uint64_t base_seed, const CaseParams& p) {
    std::uint64_t h = mix64(base_seed ^ 0x8f1bbcdc4d9f2d11ull);
    for (double v : p) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    return h;
}

namespace detail {

/// Row of `traj` nearest to time t, required within half a sample interval.
inline std::size_t row_near(const Trajectory& traj, double t, const char* which) {
    if (traj.rows() == 0) throw std::invalid_argument(std::string("square_distance: ") + which + " trajectory is empty");
    const double lo = traj.sample_times.front();
    const double hi = traj.sample_times.back();
    double interval = traj.rows() > 1 ? traj.sample_interval() : 1.0;
    const double tol = interval * 0.5 + 1e-9;
    if (t < lo - tol || t > hi + tol)
        throw std::invalid_argument("square_distance: time " + std::to_string(t) + " s outside the " + which +
                                    " trajectory [" + std::to_string(lo) + ", " + std::to_string(hi) + "] s");
    std::size_t row = 0;
    if (traj.rows() > 1) {
        const double pos = (t - lo) / interval;
        row = static_cast<std::size_t>(std::llround(pos));
        row = std::min(row, traj.rows() - 1);
    }
    if (std::abs(traj.sample_times[row] - t) > tol)
        throw std::invalid_argument("square_distance: time " + std::to_string(t) + " s not on the " + which +
                                    " sampling grid");
    return row;
}

} // namespace detail

/// Mean over the requested (time, compartment) cells of the squared
/// difference, in molecules^2. Each time resolves to the nearest sample of
/// each trajectory (within half its own interval); unmatched times are
/// errors naming the time. Optionally emits per-time partial scores, whose
/// mean equals the returned score.
inline double square_distance(const Trajectory& candidate, const Trajectory& target,
                              const std::vector<double>& times_s, const std::vector<int>& compartments = {},
                              std::vector<double>* per_time = nullptr) {
    if (candidate.n_compartments != target.n_compartments)
        throw std::invalid_argument("square_distance: trajectories disagree on compartment count");
    if (times_s.empty()) throw std::invalid_argument("square_distance: no comparison times given");

    std::vector<int> cols = compartments;
    if (cols.empty()) {
        cols.resize(static_cast<std::size_t>(candidate.n_compartments));
        for (int i = 0; i < candidate.n_compartments; ++i) cols[static_cast<std::size_t>(i)] = i;
    } else {
        for (int c : cols)
            if (c < 0 || c >= candidate.n_compartments)
                throw std::invalid_argument("square_distance: compartment index " + std::to_string(c) +
                                            " out of range");
    }

    if (per_time) per_time->clear();
    double sum = 0.0;
    for (double t : times_s) {
        const std::size_t rc = detail::row_near(candidate, t, "candidate");
        const std::size_t rt = detail::row_near(target, t, "target");
        double partial = 0.0;
        for (int c : cols) {
            const double diff = candidate.at(rc, c) - target.at(rt, c);
            partial += diff * diff;
        }
        partial /= static_cast<double>(cols.size());
        if (per_time) per_time->push_back(partial);
        sum += partial;
    }
    return sum / static_cast<double>(times_s.size());
}

/// Runs every grid case as a seeded ensemble, scores its mean against the
/// target at the comparison times, and returns the results sorted ascending
/// by score (ties broken by case_id). Cases execute concurrently; each case's
/// seeds depend only on its parameter tuple and base_seed, so scores are
/// independent of grid shape, scheduling, and thread count.
inline std::vector<CaseResult> run_sweep(const SweepSpec& spec, const Trajectory& target, std::uint64_t base_seed,
                                         unsigned threads = 0) {
    spec.validate();
    const auto cases = enumerate_cases(spec);

    std::vector<double> times_s;
    times_s.reserve(spec.comparison_minutes.size());
    for (double m : spec.comparison_minutes) times_s.push_back(m * 60.0);
    // Fail fast on unmatched comparison times before burning ensemble work.
    for (double t : times_s) detail::row_near(target, t, "target");

    auto results = parallel_map<CaseResult>(cases.size(), threads, [&](std::size_t i) {
        const CaseParams& p = cases[i];
        const AbmConfig cfg = apply_case(spec.base, p);
        cfg.validate();
        const auto stats = run_abm_ensemble(cfg, spec.runs_per_case, case_seed(base_seed, p), /*threads=*/1);
        CaseResult r;
        r.case_id = static_cast<std::int64_t>(i) + 1;
        r.params = p;
        r.score = square_distance(stats.mean_trajectory(), target, times_s, spec.compartments, &r.per_snapshot);
        return r;
    });

    std::stable_sort(results.begin(), results.end(), [](const CaseResult& a, const CaseResult& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.case_id < b.case_id;
    });
    return results;
}

} // namespace bicoid
