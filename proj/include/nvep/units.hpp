#pragma once

#include "nvep/errors.hpp"

namespace nvep::core {

// Physical constants in the unit system used throughout:
// energies in eV (meV at API boundaries), temperatures in K, rates in Hz.
struct UnitConstants {
    double h_planck_ev_s = 4.135667696e-15;      // CODATA
    double k_boltzmann_ev_per_k = 8.617333262e-5; // CODATA
    double debye_energy_reference_mev = 168.0;    // diamond Debye energy, informational

    void validate() const {
        if (!(h_planck_ev_s > 0))
            throw InvariantError("h_planck_ev_s", "h_planck_ev_s must be positive");
        if (!(k_boltzmann_ev_per_k > 0))
            throw InvariantError("k_boltzmann_ev_per_k", "k_boltzmann_ev_per_k must be positive");
        if (!(debye_energy_reference_mev > 0))
            throw InvariantError("debye_energy_reference_mev",
                                 "debye_energy_reference_mev must be positive");
    }
};

// E = h f, energies in meV, frequencies in Hz. Exact inverse of the function below.
inline double energy_mev_to_frequency_hz(double e_mev, const UnitConstants& u = {}) {
    return e_mev * 1e-3 / u.h_planck_ev_s;
}

inline double frequency_hz_to_energy_mev(double f_hz, const UnitConstants& u = {}) {
    return f_hz * u.h_planck_ev_s * 1e3;
}

} // namespace nvep::core
