#include "nvep/phonon_rates.hpp"

#include <cmath>

namespace nvep::phonon {

namespace {

constexpr double kPi = 3.14159265358979323846;

double effective_xmax(double x_perp, double x_max) {
    if (std::isinf(x_max))
        return std::max(50.0, 10.0 * x_perp + 50.0);
    return x_max;
}

} // namespace

double bose_g(double y) {
    if (std::abs(y) < 1e-3) {
        const double y2 = y * y;
        return 1.0 - 0.5 * y + y2 / 12.0 - y2 * y2 / 720.0;
    }
    return y / std::expm1(y);
}

double bose_integral_e(double x_perp, double x_max, const QuadratureSpec& q) {
    if (!(x_perp >= 0))
        throw DomainError("bose_integral_e: x_perp must be nonnegative");
    x_max = effective_xmax(x_perp, x_max);
    if (!(x_perp <= x_max))
        throw DomainError("bose_integral_e: requires x_perp <= x_max");
    if (x_perp == x_max)
        return 0.0;

    // x^2 e^x (x-xp)^2 / [(e^x-1)(e^{x-xp}-1)] = x*g(-x) * (x-xp)*g(x-xp)
    auto f = [x_perp](double x) {
        const double y = x - x_perp;
        return x * bose_g(-x) * y * bose_g(y);
    };
    return integrate_adaptive(f, x_perp, x_max, q).value;
}

double bose_integral_a(double x_max, const QuadratureSpec& q) {
    x_max = effective_xmax(0.0, x_max);
    if (!(x_max >= 0))
        throw DomainError("bose_integral_a: x_max must be nonnegative");
    if (x_max == 0.0)
        return 0.0;

    // e^x x^6/(e^x-1)^2 = x^4 * g(x) * g(-x)
    auto f = [](double x) { return x * x * x * x * bose_g(x) * bose_g(-x); };
    return integrate_adaptive(f, 0.0, x_max, q).value;
}

double w_down(Temperature t, const EPhononParams& e, const SpinParams& p,
              const QuadratureSpec& q, const UnitConstants& u) {
    if (!(t.kelvin >= 0))
        throw DomainError("w_down: temperature must be nonnegative");
    if (t.kelvin == 0.0)
        return 0.0;
    const double x_perp = core::thermal_x(t, p, u);
    const double x_max = e.omega_e_mev * 1e-3 / (u.k_boltzmann_ev_per_k * t.kelvin);
    if (x_max <= x_perp)
        return 0.0;
    const double t2 = t.kelvin * t.kelvin;
    return e.b_e_hz_per_k5 * t2 * t2 * t.kelvin * bose_integral_e(x_perp, x_max, q);
}

double w_up(Temperature t, const EPhononParams& e, const SpinParams& p,
            const QuadratureSpec& q, const UnitConstants& u) {
    if (t.kelvin == 0.0)
        return 0.0;
    return w_down(t, e, p, q, u) * std::exp(-core::thermal_x(t, p, u));
}

double q_constant(const EPhononParams& e, const SpinParams& p, const UnitConstants& u) {
    if (!(p.xi_perp_mev < e.omega_e_mev))
        throw DomainError("q_constant: requires xi_perp < omega_e");
    const double omega_k = e.omega_e_mev * 1e-3 / u.k_boltzmann_ev_per_k; // cutoff in K
    const double d = p.xi_perp_mev / e.omega_e_mev;
    return (e.b_e_hz_per_k5 / 3.0) * omega_k * omega_k * omega_k *
           (1.0 - d) * (1.0 - d) * (1.0 + 0.5 * d);
}

double w_a(Temperature t, const APhononParams& a, const QuadratureSpec& q,
           const UnitConstants& u) {
    if (!(t.kelvin >= 0))
        throw DomainError("w_a: temperature must be nonnegative");
    if (t.kelvin == 0.0)
        return 0.0;
    const double x_max = a.omega_a_mev * 1e-3 / (u.k_boltzmann_ev_per_k * t.kelvin);
    const double t2 = t.kelvin * t.kelvin;
    return a.b_a_hz_per_k7 * t2 * t2 * t2 * t.kelvin * bose_integral_a(x_max, q);
}

double eta_e_from_b_e(const EPhononParams& e, const UnitConstants& u) {
    if (!(e.b_e_hz_per_k5 > 0))
        throw DomainError("eta_e_from_b_e: b_e must be positive");
    const double hbar = u.h_planck_ev_s / (2.0 * kPi);
    const double kb = u.k_boltzmann_ev_per_k;
    const double kb5 = kb * kb * kb * kb * kb;
    return std::sqrt(e.b_e_hz_per_k5 * kPi / (64.0 * hbar * kb5));
}

double b_e_from_eta(double eta_e, const UnitConstants& u) {
    const double hbar = u.h_planck_ev_s / (2.0 * kPi);
    const double kb = u.k_boltzmann_ev_per_k;
    const double kb5 = kb * kb * kb * kb * kb;
    return (64.0 / kPi) * hbar * eta_e * eta_e * kb5;
}

} // namespace nvep::phonon
