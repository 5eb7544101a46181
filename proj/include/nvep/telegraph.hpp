#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "nvep/spin.hpp"

namespace nvep::mc {

// Two-site telegraph frequency process: detuning jumps between +delta (upper
// orbital site) and -delta (lower), with exchange rates w_down (upper->lower)
// and w_up (lower->upper). Times in microseconds, rates/frequencies in MHz.
struct TelegraphConfig {
    double delta_mhz = 775.0;
    double w_down_mhz = 77500.0;
    double w_up_mhz = 77500.0;
    double t_total_us = 0.2;
    int n_trajectories = 20000;
    std::uint64_t seed = 20260816;
    int n_time_samples = 16384;
    int n_workers = 0; // 0 = hardware concurrency

    void validate() const {
        if (!(delta_mhz > 0))
            throw InvariantError("delta_mhz", "delta_mhz must be positive");
        if (!(w_down_mhz >= 0) || !(w_up_mhz >= 0))
            throw InvariantError("w_down_mhz", "exchange rates must be nonnegative");
        if (!(t_total_us > 0))
            throw InvariantError("t_total_us", "t_total_us must be positive");
        if (n_trajectories < 1)
            throw InvariantError("n_trajectories", "n_trajectories must be >= 1");
        if (n_time_samples < 2 || (n_time_samples & (n_time_samples - 1)) != 0)
            throw InvariantError("n_time_samples",
                                 "n_time_samples must be a power of two >= 2");
    }
};

struct CoherenceResult {
    std::vector<double> t_us;                // uniform grid, t_0 = 0 .. t_total
    std::vector<std::complex<double>> g;     // trajectory-averaged e^{i phi(t)}
    // Per-block partial means in fixed block order; reductions and bootstrap
    // run over these so results do not depend on the worker count.
    std::vector<std::vector<std::complex<double>>> block_g;
    std::vector<int> block_n;
    std::vector<double> block_upper_fraction;
    int n_trajectories = 0;
    std::uint64_t seed = 0;
    double noise_floor = 0.0;      // 1/sqrt(n_trajectories); 0 for synthetic G
    double occupancy_upper = 0.0;  // overall dwell-time fraction in the upper site
};

// Event-driven Monte Carlo: exact exponential dwells, phase accrued analytically
// inside each dwell, G sampled on the uniform grid. Deterministic for a given
// (seed, config) independent of n_workers.
CoherenceResult simulate_coherence(const TelegraphConfig& cfg);

// Builds a CoherenceResult from an externally supplied G(t) (tests, closed forms).
CoherenceResult coherence_from_samples(std::vector<double> t_us,
                                       std::vector<std::complex<double>> g);

struct LineshapeOptions {
    int pad_factor = 4;        // zero-padding multiple of the sample count
    int n_bootstrap = 50;      // block-bootstrap replicates for stderr_fwhm
    double delta_mhz = 0.0;    // if > 0, checked against the Nyquist frequency
};

struct LineshapeResult {
    std::vector<double> freq_mhz;  // ascending, negative to positive
    std::vector<double> spectrum;  // >= 0, integrates to 1 over the grid
    double fwhm_mhz = 0.0;
    double peak_center_mhz = 0.0;
    double stderr_fwhm_mhz = 0.0;
    double integral_raw = 0.0;     // grid integral before renormalization
};

// One-sided cosine transform of G via zero-padded FFT; FWHM by linear
// interpolation at half maximum, peak center by parabolic refinement.
// Errors: insufficient decay of |G(t_total)| against max(1e-3, 3*noise_floor);
// aliasing when delta_mhz exceeds the grid Nyquist frequency.
LineshapeResult lineshape_from_coherence(const CoherenceResult& coh,
                                         const LineshapeOptions& opt = {});

struct McSettings {
    int n_trajectories = 20000;
    int n_time_samples = 16384;
    std::uint64_t seed = 20260816;
    double t_total_factor = 10.0; // t_total = factor / expected FWHM
    int n_workers = 0;
    int n_bootstrap = 50;
};

struct FastExchangeReport {
    double delta_mhz;
    double w_down_mhz;
    double w_up_mhz;
    double rate_ratio_u;   // w_up / w_down
    double beta;
    double fwhm_formula_mhz;
    double fwhm_mc_mhz;
    double stderr_fwhm_mhz;
    double relative_error;
    double ci95_lo_mhz;
    double ci95_hi_mhz;
    double peak_center_mhz;
    double fast_exchange_ratio; // w_down / (2 delta)
    double occupancy_upper;
    double occupancy_expected;
    std::string site_convention;
};

// Compares the Monte Carlo FWHM against beta * 2 pi delta^2 / w_down with
// delta = D_perp (bare; the narrowing formula carries no R(T) factor).
// Requires w_down >= 20 * (2 delta).
FastExchangeReport validate_fast_exchange(const core::SpinParams& p, double w_down_mhz,
                                          double w_up_mhz, const McSettings& s = {});

} // namespace nvep::mc
