#include "nvep/observables.hpp"

#include <cmath>

namespace nvep::obs {

namespace {
constexpr double kPi = 3.14159265358979323846;
} // namespace

double gamma_infinity_mhz(const OpticalRates& o) {
    return (o.k_rad_mhz + 0.5 * o.k_isc_mhz) / kPi;
}

double gamma_one_mhz(const OpticalRates& o) {
    const double denom = o.k_rad_mhz + 0.5 * o.k_isc_mhz;
    if (!(denom > 0))
        throw DomainError("gamma_one: k_rad + 0.5*k_isc must be positive");
    return o.k_rad_mhz * o.k_isc_mhz / denom;
}

MotionalNarrowing gamma_mn(Temperature t, const SpinParams& p, const EPhononParams& e,
                           MnMode mode, const QuadratureSpec& q, const UnitConstants& u) {
    if (!(t.kelvin > 0))
        throw DomainError("gamma_mn: requires T > 0");
    double w_down_hz;
    if (mode == MnMode::quadratic) {
        w_down_hz = phonon::q_constant(e, p, u) * t.kelvin * t.kelvin;
    } else {
        w_down_hz = phonon::w_down(t, e, p, q, u);
    }
    if (!(w_down_hz > 0))
        throw DomainError("gamma_mn: W_down must be positive");

    const double d_perp_hz = p.d_perp_mhz * 1e6;
    const double beta = core::beta_factor(t, p, u);
    MotionalNarrowing out;
    out.w_down_hz = w_down_hz;
    out.gamma_mn_mhz = beta * 2.0 * kPi * d_perp_hz * d_perp_hz / w_down_hz * 1e-6;
    out.fast_exchange_ratio = w_down_hz / (2.0 * d_perp_hz);
    return out;
}

double gamma_mn_from_q_mhz(Temperature t, const SpinParams& p, double q_hz_per_k2,
                           const UnitConstants& u) {
    if (!(t.kelvin > 0))
        throw DomainError("gamma_mn_from_q: requires T > 0");
    if (!(q_hz_per_k2 > 0))
        throw DomainError("gamma_mn_from_q: Q must be positive");
    const double w_down_hz = q_hz_per_k2 * t.kelvin * t.kelvin;
    const double d_perp_hz = p.d_perp_mhz * 1e6;
    const double beta = core::beta_factor(t, p, u);
    return beta * 2.0 * kPi * d_perp_hz * d_perp_hz / w_down_hz * 1e-6;
}

double gamma_h_mhz(Temperature t, const SpinParams& p, const EPhononParams& e,
                   const OpticalRates& o, MnMode mode, const QuadratureSpec& q,
                   const UnitConstants& u) {
    return gamma_infinity_mhz(o) + gamma_mn(t, p, e, mode, q, u).gamma_mn_mhz;
}

double odmr_linewidth_mhz(double p_rf_w, const ODMRModelParams& m, double gamma_h,
                          double gamma1) {
    if (!(p_rf_w >= 0))
        throw DomainError("odmr_linewidth: RF power must be nonnegative");
    return m.gamma_inh_mhz +
           gamma_h * std::sqrt(1.0 + 4.0 * kPi * m.kappa_mhz2_per_w * p_rf_w /
                                         (gamma_h * gamma1));
}

double odmr_contrast(double p_rf_w, const ODMRModelParams& m, double gamma_h,
                     double gamma1) {
    if (!(p_rf_w >= 0))
        throw DomainError("odmr_contrast: RF power must be nonnegative");
    const double s = 4.0 * kPi * m.kappa_mhz2_per_w * p_rf_w;
    return m.c_max * s / (s + gamma1 * gamma_h);
}

std::vector<double> odmr_spectrum(const std::vector<double>& f_grid_mhz, Temperature t,
                                  double p_rf_w, const Baseline& baseline,
                                  const ODMRModelParams& m, const OpticalRates& o,
                                  const SpinParams& p, const EPhononParams& e,
                                  MnMode mode, const QuadratureSpec& q,
                                  const UnitConstants& u) {
    if (f_grid_mhz.empty())
        throw DomainError("odmr_spectrum: empty frequency grid");
    for (size_t i = 1; i < f_grid_mhz.size(); ++i)
        if (!(f_grid_mhz[i] > f_grid_mhz[i - 1]))
            throw DomainError("odmr_spectrum: frequency grid must be strictly increasing");

    const double gamma1 = effective_gamma1_mhz(m, o);
    const double gh = gamma_h_mhz(t, p, e, o, mode, q, u);
    const double width = odmr_linewidth_mhz(p_rf_w, m, gh, gamma1);
    const double contrast = odmr_contrast(p_rf_w, m, gh, gamma1);
    const double f0 = p.d_parallel_mhz;
    const double split = core::odmr_splitting_mhz(t, p, u);
    const double hw = 0.5 * width; // HWHM of each dip
    const double depth = baseline.offset * contrast;

    std::vector<double> out(f_grid_mhz.size());
    for (size_t i = 0; i < f_grid_mhz.size(); ++i) {
        const double f = f_grid_mhz[i];
        const double dm = f - (f0 - 0.5 * split);
        const double dp = f - (f0 + 0.5 * split);
        const double lm = hw * hw / (dm * dm + hw * hw); // unit-peak Lorentzians
        const double lp = hw * hw / (dp * dp + hw * hw);
        out[i] = baseline.offset + baseline.slope_per_mhz * (f - f0) - depth * (lm + lp);
    }
    return out;
}

double zpl_width_mhz(Temperature t, const EPhononParams& e, const APhononParams& a,
                     const OpticalRates& o, const SpinParams& p, const QuadratureSpec& q,
                     const UnitConstants& u) {
    const double wd = phonon::w_down(t, e, p, q, u);
    const double wa = phonon::w_a(t, a, q, u);
    return (wd / (2.0 * kPi) + wa / kPi) * 1e-6 + o.gamma0_mhz;
}

double visibility(Temperature t, const VisibilityParams& v, const EPhononParams& e,
                  const SpinParams& p, const QuadratureSpec& q, const UnitConstants& u) {
    v.validate();
    const double wd = phonon::w_down(t, e, p, q, u);
    const double wu = phonon::w_up(t, e, p, q, u);
    const double r_hz = v.r_rate_mhz * 1e6;
    const double s = static_cast<double>(v.sign_branch);
    return (wu - wd + s * r_hz * (1.0 - v.a_branching) / (1.0 + v.a_branching)) /
           (wd + wu + r_hz);
}

} // namespace nvep::obs
