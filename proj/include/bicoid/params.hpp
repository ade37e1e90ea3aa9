#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace bicoid {

/// Physical and kinetic constants of the compartmental model. All times are in
/// seconds; minute-denominated inputs are converted at the configuration
/// boundary (144 min -> 8640 s and so on).
struct ModelParams {
    int n_compartments = 100; ///< lattice size N
    double h = 5.0;           ///< compartment length, micrometres
    double D = 3.0;           ///< diffusion constant, micrometres^2/s
    double t0 = 8640.0;       ///< source cutoff time, s
    double tau_p = 5160.0;    ///< protein lifetime, s
    double tau_m = 540.0;     ///< mRNA decay time constant, s
    /// Source production rate, molecules/s. No published value exists; 10/s is
    /// the reference choice so the engines are comparable to each other.
    double s0 = 10.0;

    /// Per-molecule hop rate d = D/h^2. Always recomputed, never stored.
    double hop_rate() const { return D / (h * h); }

    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

inline void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("ModelParams: " + what); };
    if (n_compartments < 2) fail("n_compartments must be >= 2, got " + std::to_string(n_compartments));
    if (!(h > 0.0)) fail("h must be > 0");
    if (!(D >= 0.0)) fail("D must be >= 0");
    if (!(t0 >= 0.0)) fail("t0 must be >= 0");
    if (!(tau_p > 0.0)) fail("tau_p must be > 0");
    if (!(tau_m > 0.0)) fail("tau_m must be > 0");
    if (!(s0 >= 0.0)) fail("s0 must be >= 0");
}

/// Per-molecule hop rate d = D/h^2.
inline double hop_rate(const ModelParams& p) {
    if (!(p.h > 0.0)) throw std::invalid_argument("hop_rate: h must be > 0");
    return p.D / (p.h * p.h);
}

/// Time-dependent source regulation: constant s0 up to and including the
/// cutoff t0, exponential decay with constant tau_m afterwards. The step
/// function evaluates to 1 at its jump, so the rate is continuous at t0.
/// Spatially the source feeds compartment 1 only; callers enforce placement.
inline double source_rate(double t, const ModelParams& p) {
    if (!(t >= 0.0)) throw std::invalid_argument("source_rate: t must be >= 0");
    if (t <= p.t0) return p.s0;
    return p.s0 * std::exp(-(t - p.t0) / p.tau_m);
}

} // namespace bicoid
