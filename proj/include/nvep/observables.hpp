#pragma once

#include <vector>

#include "nvep/phonon_rates.hpp"
#include "nvep/spin.hpp"

namespace nvep::obs {

using core::SpinParams;
using core::Temperature;
using core::UnitConstants;
using phonon::APhononParams;
using phonon::EPhononParams;
using phonon::QuadratureSpec;

struct OpticalRates {
    double k_rad_mhz = 20.0;
    double k_isc_mhz = 50.0;
    double gamma0_mhz = 16.2;

    void validate() const {
        if (!(k_rad_mhz >= 0))
            throw InvariantError("k_rad_mhz", "k_rad_mhz must be nonnegative");
        if (!(k_isc_mhz >= 0))
            throw InvariantError("k_isc_mhz", "k_isc_mhz must be nonnegative");
        if (!(gamma0_mhz >= 0))
            throw InvariantError("gamma0_mhz", "gamma0_mhz must be nonnegative");
    }
};

struct ODMRModelParams {
    double gamma_inh_mhz = 33.0;
    double c_max = 0.16;
    double kappa_mhz2_per_w = 210.0;
    double gamma1_mhz = -1.0; // < 0 means: derive from OpticalRates

    void validate() const {
        if (!(gamma_inh_mhz >= 0))
            throw InvariantError("gamma_inh_mhz", "gamma_inh_mhz must be nonnegative");
        if (!(c_max >= 0) || c_max > 1)
            throw InvariantError("c_max", "c_max must lie in [0, 1]");
        if (!(kappa_mhz2_per_w >= 0))
            throw InvariantError("kappa_mhz2_per_w", "kappa_mhz2_per_w must be nonnegative");
    }
};

struct VisibilityParams {
    double a_branching = 0.40;
    double r_rate_mhz = 80.0;
    int sign_branch = +1;

    void validate() const {
        if (!(a_branching >= 0) || a_branching > 1)
            throw InvariantError("a_branching", "a_branching must lie in [0, 1]");
        if (!(r_rate_mhz > 0))
            throw InvariantError("r_rate_mhz", "r_rate_mhz must be positive");
        if (sign_branch != 1 && sign_branch != -1)
            throw InvariantError("sign_branch", "sign_branch must be +1 or -1");
    }
};

// Power-independent part of the homogeneous ODMR width: (k + 0.5 k_isc)/pi.
double gamma_infinity_mhz(const OpticalRates& o);

// Effective optically induced spin relaxation rate k*k_isc/(k + 0.5 k_isc).
double gamma_one_mhz(const OpticalRates& o);

inline double effective_gamma1_mhz(const ODMRModelParams& m, const OpticalRates& o) {
    return m.gamma1_mhz >= 0 ? m.gamma1_mhz : gamma_one_mhz(o);
}

enum class MnMode { exact, quadratic };

// Motional-narrowing linewidth beta(T) * 2 pi D_perp^2 / W_down in MHz.
// mode::exact evaluates W_down by quadrature, mode::quadratic uses Q T^2 with
// Q from q_constant. Carries a fast-exchange validity ratio W_down/(2 D_perp).
struct MotionalNarrowing {
    double gamma_mn_mhz;
    double w_down_hz;
    double fast_exchange_ratio; // W_down / (2 D_perp); formula dubious below ~10
};

MotionalNarrowing gamma_mn(Temperature t, const SpinParams& p, const EPhononParams& e,
                           MnMode mode, const QuadratureSpec& q = {},
                           const UnitConstants& u = {});

// Same linewidth from an externally supplied Q (Hz K^-2), e.g. an ODMR-fit value.
double gamma_mn_from_q_mhz(Temperature t, const SpinParams& p, double q_hz_per_k2,
                           const UnitConstants& u = {});

// Full homogeneous width entering Eq. (3): gamma_infinity + gamma_mn.
double gamma_h_mhz(Temperature t, const SpinParams& p, const EPhononParams& e,
                   const OpticalRates& o, MnMode mode = MnMode::exact,
                   const QuadratureSpec& q = {}, const UnitConstants& u = {});

// ODMR linewidth and contrast vs RF power, given the homogeneous width.
double odmr_linewidth_mhz(double p_rf_w, const ODMRModelParams& m, double gamma_h,
                          double gamma1);
double odmr_contrast(double p_rf_w, const ODMRModelParams& m, double gamma_h,
                     double gamma1);

struct Baseline {
    double offset = 1.0;
    double slope_per_mhz = 0.0;
};

// Fluorescence spectrum: linear background minus two Lorentzian dips of equal
// width and depth centered at d_parallel +- splitting/2.
std::vector<double> odmr_spectrum(const std::vector<double>& f_grid_mhz, Temperature t,
                                  double p_rf_w, const Baseline& baseline,
                                  const ODMRModelParams& m, const OpticalRates& o,
                                  const SpinParams& p, const EPhononParams& e,
                                  MnMode mode = MnMode::exact, const QuadratureSpec& q = {},
                                  const UnitConstants& u = {});

// ZPL width W_down/2pi + W_A/pi + gamma0 in MHz. W_down uses the xi_perp carried
// by p; pass xi_perp = 0 to model a strain-free (rescaled) center.
double zpl_width_mhz(Temperature t, const EPhononParams& e, const APhononParams& a,
                     const OpticalRates& o, const SpinParams& p,
                     const QuadratureSpec& q = {}, const UnitConstants& u = {});

// ZPL polarization visibility (W_up - W_down + s*r*(1-a)/(1+a)) / (W_down + W_up + r).
double visibility(Temperature t, const VisibilityParams& v, const EPhononParams& e,
                  const SpinParams& p, const QuadratureSpec& q = {},
                  const UnitConstants& u = {});

} // namespace nvep::obs
