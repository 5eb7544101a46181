#pragma once

#include "nvep/quadrature.hpp"
#include "nvep/spin.hpp"
#include "nvep/units.hpp"

namespace nvep::phonon {

using core::SpinParams;
using core::Temperature;
using core::UnitConstants;

// E-mode two-phonon (Raman) rate law W = B_E * T^5 * I(x_perp, omega_e/kT).
struct EPhononParams {
    double b_e_hz_per_k5 = 1.32;
    double omega_e_mev = 13.0;

    void validate(const UnitConstants& u = {}) const {
        if (!(b_e_hz_per_k5 > 0))
            throw InvariantError("b_e_hz_per_k5", "b_e_hz_per_k5 must be positive");
        if (!(omega_e_mev > 0) || omega_e_mev > u.debye_energy_reference_mev)
            throw InvariantError("omega_e_mev",
                                 "omega_e_mev must lie in (0, debye_energy_reference_mev]");
    }
};

// A1-mode rate law W_A = B_A * T^7 * I_A(omega_a/kT).
struct APhononParams {
    double b_a_hz_per_k7 = 24e-6;
    double omega_a_mev = 37.0;

    void validate(const UnitConstants& u = {}) const {
        if (!(b_a_hz_per_k7 > 0))
            throw InvariantError("b_a_hz_per_k7", "b_a_hz_per_k7 must be positive");
        if (!(omega_a_mev > 0) || omega_a_mev > u.debye_energy_reference_mev)
            throw InvariantError("omega_a_mev",
                                 "omega_a_mev must lie in (0, debye_energy_reference_mev]");
    }
};

// g(y) = y/(e^y - 1), the Bose kernel in a form finite at y = 0.
// Series substitution within |y| < 1e-3 keeps the removable point exact;
// g(-x) = x e^x/(e^x - 1) covers the stimulated branch.
double bose_g(double y);

// I_E(x_perp, x_max) = int_{x_perp}^{x_max} x^2 e^x (x-x_perp)^2 /
//                      [(e^x - 1)(e^{x-x_perp} - 1)] dx.
// An infinite x_max is truncated at max(50, 10*x_perp + 50), where the
// integrand has decayed below any tested tolerance.
double bose_integral_e(double x_perp, double x_max, const QuadratureSpec& q = {});

// I_A(x_max) = int_0^{x_max} e^x x^6/(e^x - 1)^2 dx, same infinity handling.
double bose_integral_a(double x_max, const QuadratureSpec& q = {});

// Orbital population transfer rates in Hz. Both vanish at T = 0.
double w_down(Temperature t, const EPhononParams& e, const SpinParams& p,
              const QuadratureSpec& q = {}, const UnitConstants& u = {});
double w_up(Temperature t, const EPhononParams& e, const SpinParams& p,
            const QuadratureSpec& q = {}, const UnitConstants& u = {});

// High-temperature coefficient Q (Hz K^-2) such that W_down -> Q T^2 when
// 1 >> x_perp and 1 >> omega_e/kT.
double q_constant(const EPhononParams& e, const SpinParams& p, const UnitConstants& u = {});

// A1-mode Raman rate in Hz; vanishes at T = 0.
double w_a(Temperature t, const APhononParams& a, const QuadratureSpec& q = {},
           const UnitConstants& u = {});

// Inverts B_E = (64/pi) * hbar * eta_E^2 * k_B^5 for the spectral-density
// coefficient eta_E; round-trips with b_e_from_eta.
double eta_e_from_b_e(const EPhononParams& e, const UnitConstants& u = {});
double b_e_from_eta(double eta_e, const UnitConstants& u = {});

} // namespace nvep::phonon
