#pragma once

#include <cstdint>

#include "nvep/fitting.hpp"
#include "nvep/observables.hpp"

namespace nvep::fit {

// Fixed physics surrounding a fit: everything that is not a free parameter.
struct ModelContext {
    core::UnitConstants units;
    core::SpinParams spin;
    phonon::EPhononParams e_phonon;
    phonon::APhononParams a_phonon;
    obs::OpticalRates optical;
    obs::ODMRModelParams odmr;
    obs::VisibilityParams vis;
    phonon::QuadratureSpec quad;
    // ZPL and visibility models evaluate at this strain (0 = rescaled center).
    double zpl_xi_perp_mev = 0.0;
};

// Evaluates the registered model for one series kind at one x, with free
// parameters taken from (names, values) and everything else from ctx.
// Throws FitError on an unknown kind or a missing parameter name.
double model_eval(SeriesKind kind, double x, const Conditions& cond,
                  const std::vector<Parameter>& params,
                  const std::vector<double>& values, const ModelContext& ctx);

// Concatenated weighted residuals in series-then-point order.
std::vector<double> residual_vector(const std::vector<Parameter>& params,
                                    const std::vector<double>& values,
                                    const std::vector<DataSeries>& series,
                                    const ModelContext& ctx);

// Initial parameter vectors for the three fit setups (reference starting values).
std::vector<Parameter> odmr_fit_parameters();
std::vector<Parameter> zpl_fit_parameters();
std::vector<Parameter> visibility_fit_parameters();

// Runs LM on the given series with the given parameters; fills per-series norms.
FitResult fit_series(const std::vector<DataSeries>& series, std::vector<Parameter> params,
                     const ModelContext& ctx, const LMOptions& opt = {});

enum class ZplVisMode { joint, sequential };

// ZPL + visibility with shared B_E, Omega_E; xi_perp = 0 and r fixed at 80 MHz.
// joint: one LM over {b_e, omega_e, b_a, omega_a, gamma0, a_branching};
// sequential: ZPL first, then a_branching alone with the E-params frozen.
FitResult fit_zpl_and_visibility(const std::vector<DataSeries>& zpl_series,
                                 const std::vector<DataSeries>& visibility_series,
                                 std::vector<Parameter> params, const ModelContext& ctx,
                                 ZplVisMode mode = ZplVisMode::joint,
                                 const LMOptions& opt = {});

// y = model(x) + gaussian(0, sigma), deterministic per seed.
DataSeries synthesize_dataset(SeriesKind kind, const std::vector<Parameter>& params,
                              const std::vector<double>& x_grid, double noise_sigma,
                              std::uint64_t seed, const Conditions& cond,
                              const ModelContext& ctx);

} // namespace nvep::fit
