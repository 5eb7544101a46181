#include "nvep/spin.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace nvep::core {

double thermal_x(Temperature t, const SpinParams& p, const UnitConstants& u) {
    if (p.xi_perp_mev < 0)
        throw DomainError("xi_perp_mev must be nonnegative");
    if (t.kelvin == 0.0)
        return p.xi_perp_mev > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return p.xi_perp_mev * 1e-3 / (u.k_boltzmann_ev_per_k * t.kelvin);
}

double reduction_factor(Temperature t, const SpinParams& p, const UnitConstants& u) {
    const double x = thermal_x(t, p, u);
    if (std::isinf(x))
        return 1.0;
    return std::tanh(0.5 * x);
}

double beta_from_ratio(double u) {
    if (!(u >= 0))
        throw DomainError("rate ratio u must be nonnegative");
    const double s = 1.0 + u;
    return 8.0 * u / (s * s * s);
}

double beta_factor(Temperature t, const SpinParams& p, const UnitConstants& u) {
    const double x = thermal_x(t, p, u);
    if (std::isinf(x))
        return 0.0;
    return beta_from_ratio(std::exp(-x));
}

FineStructure fine_structure_levels(double r, const SpinParams& p) {
    if (!(r >= 0.0 && r <= 1.0))
        throw DomainError("reduction factor r must lie in [0, 1]");

    // Basis (+1, 0, -1): Sz^2 - 2/3 = diag(1/3, -2/3, 1/3); Sx^2 - Sy^2 couples
    // |+1> and |-1> with unit matrix element.
    const double dpar = p.d_parallel_mhz;
    const double c = p.d_perp_mhz * r;
    Eigen::Matrix3d h;
    h << dpar / 3.0, 0.0, -c,
         0.0, -2.0 * dpar / 3.0, 0.0,
         -c, 0.0, dpar / 3.0;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    const auto& ev = es.eigenvalues();
    const auto& vec = es.eigenvectors();

    // The m_s=0-like level has the dominant |0> component.
    int zero_like = 0;
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        const double w = std::abs(vec(1, i));
        if (w > best) {
            best = w;
            zero_like = i;
        }
    }

    FineStructure out;
    for (int i = 0; i < 3; ++i)
        out.levels_mhz[static_cast<size_t>(i)] = ev(i);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (i == zero_like)
            continue;
        const double f = ev(i) - ev(zero_like);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    out.f_plus_mhz = hi;
    out.f_minus_mhz = lo;
    return out;
}

double odmr_splitting_mhz(Temperature t, const SpinParams& p, const UnitConstants& u) {
    const double r = reduction_factor(t, p, u);
    const double dr = p.d_perp_mhz * r;
    const double a = p.a_hyperfine_mhz;
    return (2.0 / 3.0) * dr + (4.0 / 3.0) * std::sqrt(a * a + dr * dr);
}

} // namespace nvep::core
