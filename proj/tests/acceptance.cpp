// Acceptance gate: one PASS/FAIL line per criterion, exit code = failure count.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <vector>

#include "nvep/models.hpp"
#include "nvep/observables.hpp"
#include "nvep/phonon_rates.hpp"
#include "nvep/spin.hpp"
#include "nvep/telegraph.hpp"

using namespace nvep;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("%s  criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!ok)
        ++g_failures;
}

void note(const std::string& text) {
    std::printf("      note: %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

// Least-squares slope of ln(f) against ln(T) over [t_lo, t_hi].
template <typename Fn>
double loglog_slope(Fn&& fn, double t_lo, double t_hi, int n = 13) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double t : logspace(t_lo, t_hi, n)) {
        const double x = std::log(t);
        const double y = std::log(fn(t));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void criterion_1() {
    const auto t0 = Clock::now();
    const double inf = std::numeric_limits<double>::infinity();
    const double ie = phonon::bose_integral_e(0.0, inf);
    const double ia = phonon::bose_integral_a(inf);
    const double ie_ref = 24.0 * std::pow(kPi, 4) / 90.0;   // 4! zeta(4)
    const double ia_ref = 720.0 * std::pow(kPi, 6) / 945.0; // 6! zeta(6)
    const double re = std::abs(ie / ie_ref - 1.0);
    const double ra = std::abs(ia / ia_ref - 1.0);
    const double dt = elapsed_s(t0);
    report(1, re < 1e-6 && ra < 1e-6 && dt < 1.0,
           "Bose integral identities: I_E(0,inf) = " + fmt(ie) + " (rel err " + fmt(re) +
               "), I_A(inf) = " + fmt(ia) + " (rel err " + fmt(ra) + "), " + fmt(dt) +
               " s");
}

void criterion_2() {
    const phonon::EPhononParams e;
    core::SpinParams p0;
    p0.xi_perp_mev = 0.0;
    const core::SpinParams p46;

    const double t = 5000.0; // omega_e / k_B T = 0.03
    auto rel_at = [&](const core::SpinParams& p) {
        return std::abs(phonon::w_down({t}, e, p) / (phonon::q_constant(e, p) * t * t) -
                        1.0);
    };
    auto flatness = [&](const core::SpinParams& p) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
        int n = 0;
        for (double tk = 295.0; tk <= 550.0 + 1e-9; tk += 5.0) {
            const double v = phonon::w_down({tk}, e, p) / (tk * tk);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            ++n;
        }
        return (hi - lo) / (sum / n);
    };

    const double rel0 = rel_at(p0);
    const double flat0 = flatness(p0);
    report(2, rel0 < 1e-3 && flat0 < 0.01,
           "high-T closed form at 5000 K, strain-free: rel err " + fmt(rel0) +
               " (< 1e-3); W_down/T^2 spread over 295-550 K = " + fmt(flat0) +
               " (< 1%)");
    note("with h*xi_perp = 4.6 meV the same comparisons give " + fmt(rel_at(p46)) +
         " and " + fmt(flatness(p46)) +
         "; the strain kernel correction exceeds the strain-free tolerances");
}

void criterion_3() {
    const phonon::EPhononParams e; // B_E = 1.32 Hz K^-5, Omega_E = 13 meV
    const core::SpinParams p46;    // h*xi_perp = 4.6 meV
    const double q_mhz = phonon::q_constant(e, p46) * 1e-6;
    const double rel = std::abs(q_mhz - 0.83) / 0.83;
    report(3, rel < 0.30,
           "Q cross-consistency: Q from ZPL parameters = " + fmt(q_mhz) +
               " MHz K^-2 vs ODMR-fit 0.83 +- 0.06 (rel diff " + fmt(rel) + ", < 30%)");
}

void criterion_4() {
    const phonon::EPhononParams e;
    const phonon::APhononParams a;
    const obs::OpticalRates o;
    core::SpinParams p0;
    p0.xi_perp_mev = 0.0;
    const double wd_over_2pi_mhz = phonon::w_down({295.0}, e, p0) / (2.0 * kPi) * 1e-6;
    const double zpl = obs::zpl_width_mhz({295.0}, e, a, o, p0);
    const double ratio = zpl / wd_over_2pi_mhz;
    report(4, ratio > 10.0,
           "scale gap at 295 K: W_down/2pi = " + fmt(wd_over_2pi_mhz) +
               " MHz vs zpl_width = " + fmt(zpl) + " MHz (ratio " + fmt(ratio) +
               ", > 10)");
}

void criterion_5() {
    const phonon::EPhononParams e;
    const phonon::APhononParams a;
    const obs::OpticalRates o; // k_rad = 20, k_isc = 50
    const core::SpinParams p;

    const double zpl0 = obs::zpl_width_mhz({0.0}, e, a, o, p);
    obs::VisibilityParams vp;
    vp.sign_branch = +1;
    const double vis_plus = obs::visibility({0.0}, vp, e, p);
    vp.sign_branch = -1;
    const double vis_minus = obs::visibility({0.0}, vp, e, p);
    const double v_ref = (1.0 - 0.40) / (1.0 + 0.40);
    const double g1 = obs::gamma_one_mhz(o);
    const double ginf = obs::gamma_infinity_mhz(o);

    const bool ok = std::abs(zpl0 - 16.2) <= 0.01 && std::abs(vis_plus - v_ref) <= 1e-4 &&
                    std::abs(vis_minus + v_ref) <= 1e-4 && std::abs(g1 - 22.22) <= 0.01 &&
                    std::abs(ginf - 14.32) <= 0.01;
    report(5, ok,
           "limits: zpl_width(0) = " + fmt(zpl0) + " MHz, visibility(0) = " +
               fmt(vis_plus) + " / " + fmt(vis_minus) + ", gamma_one = " + fmt(g1) +
               " MHz, gamma_infinity = " + fmt(ginf) + " MHz");
}

void criterion_6() {
    const auto t0 = Clock::now();
    const core::SpinParams p;
    const mc::McSettings s; // defaults
    const double wd = 50.0 * (2.0 * p.d_perp_mhz);
    const auto r0 = mc::validate_fast_exchange(p, wd, wd, s);
    const auto r18 = mc::validate_fast_exchange(p, wd, wd * std::exp(-0.18), s);
    const double dt = elapsed_s(t0);
    const bool ok = std::abs(r0.relative_error) < 0.05 &&
                    std::abs(r18.relative_error) < 0.05 && dt < 60.0;
    report(6, ok,
           "stochastic oracle vs fast-exchange formula at w_down = 50*(2 D_perp): rel "
           "err " +
               fmt(r0.relative_error) + " (x = 0), " + fmt(r18.relative_error) +
               " (x = 0.18), " + fmt(dt) + " s (< 60)");
    note("x = 0:    MC FWHM " + fmt(r0.fwhm_mc_mhz) + " MHz, formula " +
         fmt(r0.fwhm_formula_mhz) + " MHz, 95% CI [" + fmt(r0.ci95_lo_mhz) + ", " +
         fmt(r0.ci95_hi_mhz) + "]");
    note("x = 0.18: MC FWHM " + fmt(r18.fwhm_mc_mhz) + " MHz, formula " +
         fmt(r18.fwhm_formula_mhz) + " MHz, 95% CI [" + fmt(r18.ci95_lo_mhz) + ", " +
         fmt(r18.ci95_hi_mhz) + "]");
}

void criterion_7() {
    using fit::Conditions;
    using fit::DataSeries;
    using fit::SeriesKind;

    // six-dataset ODMR bundle, noiseless, +-30% perturbed starts
    const auto t0 = Clock::now();
    const fit::ModelContext ctx;
    const auto truth = fit::odmr_fit_parameters();

    Conditions at_power;
    at_power.rf_power_w = 0.4;
    Conditions at_294;
    at_294.temperature_k = 294.0;
    Conditions at_394;
    at_394.temperature_k = 394.0;

    std::vector<DataSeries> bundle;
    bundle.push_back(fit::synthesize_dataset(SeriesKind::linewidth_vs_T, truth,
                                             linspace(295.0, 550.0, 18), 0.0, 1,
                                             at_power, ctx));
    bundle.push_back(fit::synthesize_dataset(SeriesKind::linewidth_vs_P, truth,
                                             linspace(0.0, 1.0, 15), 0.0, 2, at_294,
                                             ctx));
    bundle.push_back(fit::synthesize_dataset(SeriesKind::linewidth_vs_P, truth,
                                             linspace(0.0, 1.0, 15), 0.0, 3, at_394,
                                             ctx));
    bundle.push_back(fit::synthesize_dataset(SeriesKind::contrast_vs_P, truth,
                                             linspace(0.0, 1.0, 15), 0.0, 4, at_294,
                                             ctx));
    bundle.push_back(fit::synthesize_dataset(SeriesKind::contrast_vs_P, truth,
                                             linspace(0.0, 1.0, 15), 0.0, 5, at_394,
                                             ctx));
    bundle.push_back(fit::synthesize_dataset(SeriesKind::splitting_vs_T, truth,
                                             linspace(10.0, 550.0, 28), 0.0, 6, {},
                                             ctx));

    auto start = truth;
    for (size_t i = 0; i < start.size(); ++i)
        start[i].value *= (i % 2 == 0) ? 1.3 : 0.7;
    const auto res = fit::fit_series(bundle, start, ctx);
    double worst = 0.0;
    for (size_t i = 0; i < truth.size(); ++i)
        worst = std::max(worst,
                         std::abs(res.parameters[i].value / truth[i].value - 1.0));
    const double dt_odmr = elapsed_s(t0);
    const bool ok_odmr = res.converged && worst < 0.005 && dt_odmr < 30.0;

    // ZPL + visibility bundle with shared E-phonon parameters
    const auto t1 = Clock::now();
    fit::ModelContext zctx;
    zctx.zpl_xi_perp_mev = 0.0;
    auto ztruth = fit::zpl_fit_parameters();
    ztruth.push_back(fit::visibility_fit_parameters()[0]);

    Conditions vis_cond;
    vis_cond.sign_branch = +1;
    const std::vector<DataSeries> zpl = {fit::synthesize_dataset(
        SeriesKind::zpl_vs_T, ztruth, logspace(2.0, 300.0, 25), 0.0, 7, {}, zctx)};
    const std::vector<DataSeries> vis = {fit::synthesize_dataset(
        SeriesKind::visibility_vs_T, ztruth, logspace(4.0, 300.0, 12), 0.0, 8, vis_cond,
        zctx)};

    auto zstart = ztruth;
    for (size_t i = 0; i < zstart.size(); ++i)
        zstart[i].value *= (i % 2 == 0) ? 1.3 : 0.7;
    const auto zres = fit::fit_zpl_and_visibility(zpl, vis, zstart, zctx);
    double zworst = 0.0;
    for (size_t i = 0; i < ztruth.size(); ++i)
        zworst = std::max(zworst,
                          std::abs(zres.parameters[i].value / ztruth[i].value - 1.0));
    const double dt_zpl = elapsed_s(t1);
    const bool ok_zpl = zres.converged && zworst < 0.01 && dt_zpl < 30.0;

    report(7, ok_odmr && ok_zpl,
           "round-trip fits: six-dataset ODMR bundle worst recovery " + fmt(worst) +
               " (< 0.5%) in " + fmt(dt_odmr) + " s; ZPL+visibility bundle worst " +
               fmt(zworst) + " (< 1%) in " + fmt(dt_zpl) + " s");
}

void criterion_8() {
    const phonon::EPhononParams e;
    const phonon::APhononParams a;
    const core::SpinParams p46;
    core::SpinParams p0;
    p0.xi_perp_mev = 0.0;

    // detailed balance w_up/w_down = e^{-x}
    double db_worst = 0.0;
    for (double t : {140.0, 295.0, 330.0, 475.0, 700.0}) {
        const double x = core::thermal_x({t}, p46);
        const double ratio =
            phonon::w_up({t}, e, p46) / phonon::w_down({t}, e, p46);
        db_worst = std::max(db_worst, std::abs(ratio * std::exp(x) - 1.0));
    }

    // half-saturation identity of the power-broadening law
    const obs::OpticalRates o;
    const obs::ODMRModelParams m;
    const double g1 = obs::effective_gamma1_mhz(m, o);
    const double gh = obs::gamma_h_mhz({295.0}, p46, e, o);
    const double p_star = g1 * gh / (4.0 * kPi * m.kappa_mhz2_per_w);
    const double c_err =
        std::abs(obs::odmr_contrast(p_star, m, gh, g1) / (0.5 * m.c_max) - 1.0);
    const double w_err = std::abs((obs::odmr_linewidth_mhz(p_star, m, gh, g1) -
                                   m.gamma_inh_mhz) /
                                      (std::sqrt(2.0) * gh) -
                                  1.0);

    // beta never exceeds 32/27
    double beta_max = 0.0;
    for (double t : logspace(1.0, 5000.0, 400))
        beta_max = std::max(beta_max, core::beta_factor({t}, p46));

    // eigenvalues against the closed form
    double eig_worst = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = i / 100.0;
        const auto fs = core::fine_structure_levels(r, p46);
        const double expect[3] = {-2.0 * p46.d_parallel_mhz / 3.0,
                                  p46.d_parallel_mhz / 3.0 - p46.d_perp_mhz * r,
                                  p46.d_parallel_mhz / 3.0 + p46.d_perp_mhz * r};
        for (int k = 0; k < 3; ++k)
            eig_worst = std::max(eig_worst, std::abs(fs.levels_mhz[static_cast<size_t>(k)] -
                                                     expect[k]));
    }

    // low-temperature power laws
    const double s5 =
        loglog_slope([&](double t) { return phonon::w_down({t}, e, p0); }, 4.0, 10.0);
    const double s7 =
        loglog_slope([&](double t) { return phonon::w_a({t}, a); }, 4.0, 20.0);
    const double s5_wide =
        loglog_slope([&](double t) { return phonon::w_down({t}, e, p0); }, 4.0, 20.0);

    const bool ok = db_worst <= 1e-12 && c_err <= 1e-12 && w_err <= 1e-12 &&
                    beta_max <= 32.0 / 27.0 + 1e-15 && eig_worst <= 1e-9 &&
                    std::abs(s5 - 5.0) <= 0.02 && std::abs(s7 - 7.0) <= 0.02;
    report(8, ok,
           "properties: detailed balance dev " + fmt(db_worst) +
               ", half-saturation devs " + fmt(c_err) + "/" + fmt(w_err) +
               ", max beta " + fmt(beta_max) + " (<= 32/27), eigenvalue dev " +
               fmt(eig_worst) + " MHz, T^5 slope " + fmt(s5) + " on 4-10 K, T^7 slope " +
               fmt(s7) + " on 4-20 K");
    note("the T^5 window matters: over 4-20 K the finite Omega_E cutoff already bends "
         "the slope to " +
         fmt(s5_wide));
}

} // namespace

int main() {
    struct Entry {
        int n;
        void (*fn)();
    };
    const Entry entries[] = {{1, criterion_1}, {2, criterion_2}, {3, criterion_3},
                             {4, criterion_4}, {5, criterion_5}, {6, criterion_6},
                             {7, criterion_7}, {8, criterion_8}};
    for (const auto& e : entries) {
        try {
            e.fn();
        } catch (const std::exception& ex) {
            report(e.n, false, std::string("unexpected exception: ") + ex.what());
        }
    }
    if (g_failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria failed\n", g_failures);
    return g_failures;
}
