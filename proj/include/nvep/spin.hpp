#pragma once

#include <array>

#include "nvep/units.hpp"

namespace nvep::core {

// Ground-state fine structure and hyperfine constants of the modeled center.
// The strain splitting is stored as the energy h*xi_perp in meV.
struct SpinParams {
    double d_parallel_mhz = 1420.0;
    double d_perp_mhz = 775.0;
    double a_hyperfine_mhz = 40.0;
    double xi_perp_mev = 4.6;

    void validate() const {
        if (!(d_perp_mhz > 0))
            throw InvariantError("d_perp_mhz", "d_perp_mhz must be positive");
        if (!(a_hyperfine_mhz >= 0))
            throw InvariantError("a_hyperfine_mhz", "a_hyperfine_mhz must be nonnegative");
        if (!(xi_perp_mev >= 0))
            throw InvariantError("xi_perp_mev", "xi_perp_mev must be nonnegative");
        if (!(d_parallel_mhz > d_perp_mhz))
            throw InvariantError("d_parallel_mhz", "d_parallel_mhz must exceed d_perp_mhz");
    }
};

struct Temperature {
    double kelvin = 295.0;

    void validate() const {
        if (!(kelvin >= 0))
            throw InvariantError("kelvin", "temperature must be nonnegative");
    }
};

// Dimensionless thermal ratio x = h*xi_perp / (k_B T). Infinite at T = 0 with xi > 0.
double thermal_x(Temperature t, const SpinParams& p, const UnitConstants& u = {});

// Temperature reduction factor R(T) = (e^x - 1)/(e^x + 1) = tanh(x/2), in [0, 1].
// T = 0 returns the limit: 1 for xi_perp > 0, 0 for xi_perp = 0.
double reduction_factor(Temperature t, const SpinParams& p, const UnitConstants& u = {});

// beta(T) = 8u/(1+u)^3 with u = e^{-x}; in (0, 32/27]. T = 0 returns the limit 0
// for xi_perp > 0 (1 for xi_perp = 0, where u = 1 at any temperature).
double beta_factor(Temperature t, const SpinParams& p, const UnitConstants& u = {});

// Same factor from the rate ratio u = w_up/w_down directly.
double beta_from_ratio(double u);

struct FineStructure {
    std::array<double, 3> levels_mhz;  // ascending eigenvalues of the spin-1 matrix
    double f_plus_mhz;                 // transition D_parallel + D_perp*r
    double f_minus_mhz;                // transition D_parallel - D_perp*r
};

// Diagonalizes D_par*(Sz^2 - 2/3) - D_perp*r*(Sx^2 - Sy^2) in the (+1, 0, -1) basis
// and returns the levels and the two transition frequencies from the m_s=0-like level.
FineStructure fine_structure_levels(double r, const SpinParams& p);

// Observed ODMR splitting, Eq. form (2/3)*D_perp*R + (4/3)*sqrt(A^2 + D_perp^2 R^2).
double odmr_splitting_mhz(Temperature t, const SpinParams& p, const UnitConstants& u = {});

} // namespace nvep::core
