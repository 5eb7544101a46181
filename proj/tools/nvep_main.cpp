#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nvep/config.hpp"
#include "nvep/csv.hpp"
#include "nvep/models.hpp"
#include "nvep/observables.hpp"
#include "nvep/svg.hpp"
#include "nvep/telegraph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nvep;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
    for (auto& x : v)
        x = std::pow(10.0, x);
    return v;
}

std::vector<double> temperature_grid(double tmin, double tmax, double step) {
    if (!(tmin > 0) || !(tmax >= tmin) || !(step > 0))
        throw InvariantError("tmin", "need 0 < tmin <= tmax and step > 0");
    std::vector<double> v;
    for (double t = tmin; t <= tmax + 1e-9 * step; t += step)
        v.push_back(t);
    return v;
}

struct Session {
    io::RunConfig cfg;
    fs::path out;

    fs::path path(const std::string& name) const { return out / name; }

    void prepare() {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec)
            throw IoError("cannot create output directory '" + out.string() + "'");
        write_json("config_used.json", io::config_to_json(cfg));
    }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream f(path(name));
        if (!f)
            throw IoError("cannot open '" + path(name).string() + "' for writing");
        f << j.dump(2) << "\n";
        if (!f)
            throw IoError("failed writing '" + path(name).string() + "'");
    }

    fit::ModelContext context() const {
        fit::ModelContext ctx;
        ctx.units = cfg.constants;
        ctx.spin = cfg.spin;
        ctx.e_phonon = cfg.e_phonon;
        ctx.a_phonon = cfg.a_phonon;
        ctx.optical = cfg.optical;
        ctx.odmr = cfg.odmr;
        ctx.vis = cfg.vis;
        ctx.quad = cfg.quadrature;
        return ctx;
    }

    mc::McSettings mc_settings() const {
        mc::McSettings s;
        s.n_trajectories = cfg.mc.n_trajectories;
        s.n_time_samples = cfg.mc.n_time_samples;
        s.seed = cfg.mc.seed;
        s.t_total_factor = cfg.mc.t_total_factor;
        s.n_workers = cfg.mc.n_workers;
        s.n_bootstrap = cfg.mc.n_bootstrap;
        return s;
    }
};

json fit_result_to_json(const fit::FitResult& r, const io::RunConfig& cfg) {
    json jp = json::array();
    for (const auto& p : r.parameters) {
        json e = {{"name", p.name},
                  {"value", p.value},
                  {"uncertainty", p.uncertainty},
                  {"fixed", p.fixed},
                  {"transform", p.transform == fit::Transform::log ? "log" : "none"}};
        if (std::isfinite(p.lower))
            e["lower"] = p.lower;
        if (std::isfinite(p.upper))
            e["upper"] = p.upper;
        jp.push_back(e);
    }
    json jc = json::array();
    for (const auto& row : r.covariance)
        jc.push_back(row);
    json js = json::array();
    for (const auto& [kind, norm] : r.per_series_norms)
        js.push_back({{"kind", kind}, {"residual_norm", norm}});
    return {{"parameters", jp},
            {"free_names", r.free_names},
            {"covariance", jc},
            {"chi2", r.chi2},
            {"chi2_reduced", r.chi2_reduced},
            {"n_points", r.n_points},
            {"n_free", r.n_free},
            {"n_iterations", r.n_iterations},
            {"converged", r.converged},
            {"singular_covariance", r.singular_covariance},
            {"unit_weights", r.unit_weights},
            {"per_series", js},
            {"config", io::config_to_json(cfg)}};
}

std::vector<double> fitted_values(const fit::FitResult& r) {
    std::vector<double> v(r.parameters.size());
    for (size_t i = 0; i < r.parameters.size(); ++i)
        v[i] = r.parameters[i].value;
    return v;
}

// Data points plus the fitted/model curve for every series of one kind.
void overlay_svg(const Session& s, const std::string& name, const std::string& title,
                 const std::string& x_label, const std::string& y_label, bool log_y,
                 const std::vector<fit::DataSeries>& series,
                 const std::vector<fit::Parameter>& params,
                 const std::vector<double>& values, const fit::ModelContext& ctx) {
    io::SvgAxes axes;
    axes.title = title;
    axes.x_label = x_label;
    axes.y_label = y_label;
    axes.log_y = log_y;
    std::vector<io::SvgSeries> plots;
    int idx = 0;
    for (const auto& d : series) {
        ++idx;
        io::SvgSeries curve;
        curve.style = io::SvgSeries::Style::line;
        const double lo = d.x.front();
        const double hi = d.x.back();
        curve.x = log_y ? logspace(std::max(lo, 1e-3), hi, 160) : linspace(lo, hi, 160);
        for (double x : curve.x)
            curve.y.push_back(fit::model_eval(d.kind, x, d.conditions, params, values, ctx));
        curve.label = std::string(fit::to_string(d.kind)) + " model " + std::to_string(idx);
        plots.push_back(std::move(curve));

        io::SvgSeries pts;
        pts.style = d.unit_weights ? io::SvgSeries::Style::points
                                   : io::SvgSeries::Style::error_bars;
        pts.x = d.x;
        pts.y = d.y;
        if (!d.unit_weights)
            pts.yerr = d.sigma;
        pts.label = std::string(fit::to_string(d.kind)) + " data " + std::to_string(idx);
        plots.push_back(std::move(pts));
    }
    io::render_svg(s.path(name).string(), axes, plots);
}

int finish_fit(const Session& s, const fit::FitResult& result,
               const std::vector<fit::DataSeries>& series, const fit::ModelContext& ctx) {
    s.write_json("fit_result.json", fit_result_to_json(result, s.cfg));

    std::map<fit::SeriesKind, std::vector<fit::DataSeries>> by_kind;
    for (const auto& d : series)
        by_kind[d.kind].push_back(d);
    const std::vector<double> values = fitted_values(result);
    for (const auto& [kind, group] : by_kind) {
        const std::string base = fit::to_string(kind);
        const bool log_y = kind == fit::SeriesKind::zpl_vs_T;
        overlay_svg(s, "fit_" + base + ".svg", base, base[base.size() - 1] == 'P'
                        ? "RF power (W)" : "temperature (K)",
                    base, log_y, group, result.parameters, values, ctx);
    }
    if (!result.converged) {
        std::cerr << "fit did not converge after " << result.n_iterations
                  << " iterations; artifacts written\n";
        return 4;
    }
    std::cout << "fit converged: chi2_reduced = " << result.chi2_reduced << "\n";
    return 0;
}

int cmd_rates(Session& s, double tmin, double tmax, double step) {
    const auto grid = temperature_grid(tmin, tmax, step);
    const auto& c = s.cfg;
    const double q_hz = phonon::q_constant(c.e_phonon, c.spin, c.constants);
    std::vector<double> wd, wu, wa, gmn_exact, gmn_quad, wd_t2, qcol;
    for (double t : grid) {
        const double w_down_hz = phonon::w_down({t}, c.e_phonon, c.spin, c.quadrature,
                                                c.constants);
        wd.push_back(w_down_hz);
        wu.push_back(phonon::w_up({t}, c.e_phonon, c.spin, c.quadrature, c.constants));
        wa.push_back(phonon::w_a({t}, c.a_phonon, c.quadrature, c.constants));
        gmn_exact.push_back(obs::gamma_mn({t}, c.spin, c.e_phonon, obs::MnMode::exact,
                                          c.quadrature, c.constants)
                                .gamma_mn_mhz);
        gmn_quad.push_back(obs::gamma_mn({t}, c.spin, c.e_phonon, obs::MnMode::quadratic,
                                         c.quadrature, c.constants)
                               .gamma_mn_mhz);
        wd_t2.push_back(w_down_hz / (t * t));
        qcol.push_back(q_hz);
    }
    io::write_csv(s.path("rates.csv").string(),
                  "T_K,w_down_Hz,w_up_Hz,w_a_Hz,gamma_mn_exact_MHz,gamma_mn_quadratic_MHz,"
                  "w_down_over_T2_Hz_per_K2,q_Hz_per_K2",
                  {grid, wd, wu, wa, gmn_exact, gmn_quad, wd_t2, qcol});

    io::SvgAxes axes;
    axes.title = "phonon rates";
    axes.x_label = "temperature (K)";
    axes.y_label = "rate (Hz)";
    axes.log_y = true;
    io::SvgSeries sd{io::SvgSeries::Style::line, grid, wd, {}, "W_down"};
    io::SvgSeries su{io::SvgSeries::Style::line, grid, wu, {}, "W_up"};
    io::SvgSeries sa{io::SvgSeries::Style::line, grid, wa, {}, "W_A"};
    io::render_svg(s.path("rates.svg").string(), axes, {sd, su, sa});
    std::cout << "wrote " << s.path("rates.csv").string() << " (" << grid.size()
              << " rows)\n";
    return 0;
}

int cmd_odmr_simulate(Session& s, double temp, double p_rf, double tmin, double tmax,
                      double step) {
    const auto& c = s.cfg;
    const fit::ModelContext ctx = s.context();
    const double gamma1 = obs::effective_gamma1_mhz(c.odmr, c.optical);
    const double gh = obs::gamma_h_mhz({temp}, c.spin, c.e_phonon, c.optical,
                                       obs::MnMode::exact, c.quadrature, c.constants);
    const double width = obs::odmr_linewidth_mhz(p_rf, c.odmr, gh, gamma1);
    const double contrast = obs::odmr_contrast(p_rf, c.odmr, gh, gamma1);
    const double split = core::odmr_splitting_mhz({temp}, c.spin, c.constants);

    const double span = 0.5 * split + 6.0 * width;
    const auto f_grid = linspace(c.spin.d_parallel_mhz - span,
                                 c.spin.d_parallel_mhz + span, 2001);
    const auto spec = obs::odmr_spectrum(f_grid, {temp}, p_rf, {}, c.odmr, c.optical,
                                         c.spin, c.e_phonon, obs::MnMode::exact,
                                         c.quadrature, c.constants);
    io::write_csv(s.path("spectrum.csv").string(), "f_MHz,intensity", {f_grid, spec});

    io::SvgAxes axes;
    axes.title = "simulated ODMR spectrum";
    axes.x_label = "frequency (MHz)";
    axes.y_label = "fluorescence (arb.)";
    io::render_svg(s.path("spectrum.svg").string(), axes,
                   {{io::SvgSeries::Style::line, f_grid, spec, {}, "model"}});

    // model curves in ingestible series format (sigma column 0 = none)
    const auto t_grid = temperature_grid(tmin, tmax, step);
    const auto p_grid = linspace(0.0, std::max(0.5, 1.25 * p_rf), 101);
    fit::Conditions cond_t;
    cond_t.rf_power_w = p_rf;
    fit::Conditions cond_p;
    cond_p.temperature_k = temp;
    const auto params = fit::odmr_fit_parameters();
    std::vector<fit::Parameter> start = params;
    start[0].value = c.odmr.gamma_inh_mhz;
    start[1].value = c.odmr.kappa_mhz2_per_w;
    start[2].value = c.odmr.c_max;
    start[3].value = phonon::q_constant(c.e_phonon, c.spin, c.constants) * 1e-6;
    start[4].value = c.spin.xi_perp_mev;
    io::save_series(s.path("linewidth_vs_T.csv").string(),
                    fit::synthesize_dataset(fit::SeriesKind::linewidth_vs_T, start, t_grid,
                                            0.0, c.mc.seed, cond_t, ctx));
    io::save_series(s.path("linewidth_vs_P.csv").string(),
                    fit::synthesize_dataset(fit::SeriesKind::linewidth_vs_P, start, p_grid,
                                            0.0, c.mc.seed, cond_p, ctx));
    io::save_series(s.path("contrast_vs_P.csv").string(),
                    fit::synthesize_dataset(fit::SeriesKind::contrast_vs_P, start, p_grid,
                                            0.0, c.mc.seed, cond_p, ctx));
    io::save_series(s.path("splitting_vs_T.csv").string(),
                    fit::synthesize_dataset(fit::SeriesKind::splitting_vs_T, start, t_grid,
                                            0.0, c.mc.seed, {}, ctx));

    s.write_json("odmr_summary.json",
                 {{"temperature_k", temp},
                  {"rf_power_w", p_rf},
                  {"splitting_mhz", split},
                  {"linewidth_mhz", width},
                  {"contrast", contrast},
                  {"gamma_h_mhz", gh},
                  {"gamma_infinity_mhz", obs::gamma_infinity_mhz(c.optical)},
                  {"gamma1_mhz", gamma1}});
    std::cout << "T = " << temp << " K, P = " << p_rf << " W: splitting = " << split
              << " MHz, linewidth = " << width << " MHz, contrast = " << contrast << "\n";
    return 0;
}

int cmd_odmr_fit(Session& s, const std::vector<std::string>& files) {
    const auto& c = s.cfg;
    std::vector<fit::DataSeries> series;
    for (const auto& f : files)
        series.push_back(io::load_series(f));

    std::vector<fit::Parameter> params = fit::odmr_fit_parameters();
    params[0].value = c.odmr.gamma_inh_mhz;
    params[1].value = c.odmr.kappa_mhz2_per_w;
    params[2].value = c.odmr.c_max;
    params[3].value = phonon::q_constant(c.e_phonon, c.spin, c.constants) * 1e-6;
    params[4].value = c.spin.xi_perp_mev;

    const fit::ModelContext ctx = s.context();
    const fit::FitResult result = fit::fit_series(series, params, ctx);
    return finish_fit(s, result, series, ctx);
}

int cmd_zpl_eval(Session& s, double tmin, double tmax) {
    const auto& c = s.cfg;
    const auto grid = logspace(tmin, tmax, 150);
    std::vector<double> w;
    for (double t : grid)
        w.push_back(obs::zpl_width_mhz({t}, c.e_phonon, c.a_phonon, c.optical, c.spin,
                                       c.quadrature, c.constants));
    fit::DataSeries out;
    out.kind = fit::SeriesKind::zpl_vs_T;
    out.x = grid;
    out.y = w;
    out.sigma.assign(grid.size(), 1.0);
    out.unit_weights = true;
    io::save_series(s.path("zpl_curve.csv").string(), out);

    io::SvgAxes axes;
    axes.title = "ZPL width model";
    axes.x_label = "temperature (K)";
    axes.y_label = "ZPL width (MHz)";
    axes.log_y = true;
    io::render_svg(s.path("zpl.svg").string(), axes,
                   {{io::SvgSeries::Style::line, grid, w, {}, "model"}});
    std::cout << "zpl_width(" << tmin << " K) = " << w.front() << " MHz, zpl_width("
              << tmax << " K) = " << w.back() << " MHz\n";
    return 0;
}

int cmd_zpl_fit(Session& s, const std::vector<std::string>& files, bool sequential) {
    std::vector<fit::DataSeries> zpl, vis, all;
    for (const auto& f : files) {
        fit::DataSeries d = io::load_series(f);
        if (d.kind == fit::SeriesKind::zpl_vs_T)
            zpl.push_back(d);
        else if (d.kind == fit::SeriesKind::visibility_vs_T)
            vis.push_back(d);
        else
            throw FitError("zpl fit accepts zpl_vs_T and visibility_vs_T series, got " +
                           std::string(fit::to_string(d.kind)));
        all.push_back(std::move(d));
    }
    if (zpl.empty())
        throw FitError("zpl fit requires at least one zpl_vs_T series");

    const auto& c = s.cfg;
    fit::ModelContext ctx = s.context();
    ctx.zpl_xi_perp_mev = 0.0; // rescaled center

    std::vector<fit::Parameter> params = fit::zpl_fit_parameters();
    params[0].value = c.e_phonon.b_e_hz_per_k5;
    params[1].value = c.e_phonon.omega_e_mev;
    params[2].value = c.a_phonon.b_a_hz_per_k7;
    params[3].value = c.a_phonon.omega_a_mev;
    params[4].value = c.optical.gamma0_mhz;

    fit::FitResult result;
    if (vis.empty()) {
        result = fit::fit_series(zpl, params, ctx);
    } else {
        for (auto& p : fit::visibility_fit_parameters())
            params.push_back(p);
        params.back().value = c.vis.a_branching;
        result = fit::fit_zpl_and_visibility(zpl, vis, params, ctx,
                                             sequential ? fit::ZplVisMode::sequential
                                                        : fit::ZplVisMode::joint);
    }
    return finish_fit(s, result, all, ctx);
}

int cmd_visibility_eval(Session& s, double tmin, double tmax) {
    const auto& c = s.cfg;
    const auto grid = logspace(tmin, tmax, 150);
    std::vector<double> v;
    for (double t : grid)
        v.push_back(obs::visibility({t}, c.vis, c.e_phonon, c.spin, c.quadrature,
                                    c.constants));
    fit::DataSeries out;
    out.kind = fit::SeriesKind::visibility_vs_T;
    out.x = grid;
    out.y = v;
    out.sigma.assign(grid.size(), 1.0);
    out.unit_weights = true;
    out.conditions.sign_branch = c.vis.sign_branch;
    io::save_series(s.path("visibility_curve.csv").string(), out);

    io::SvgAxes axes;
    axes.title = "ZPL polarization visibility model";
    axes.x_label = "temperature (K)";
    axes.y_label = "visibility";
    io::render_svg(s.path("visibility.svg").string(), axes,
                   {{io::SvgSeries::Style::line, grid, v, {}, "model"}});
    std::cout << "visibility(" << tmin << " K) = " << v.front() << ", visibility(" << tmax
              << " K) = " << v.back() << "\n";
    return 0;
}

int cmd_visibility_fit(Session& s, const std::vector<std::string>& files) {
    std::vector<fit::DataSeries> series;
    for (const auto& f : files) {
        fit::DataSeries d = io::load_series(f);
        if (d.kind != fit::SeriesKind::visibility_vs_T)
            throw FitError("visibility fit accepts only visibility_vs_T series");
        series.push_back(std::move(d));
    }
    fit::ModelContext ctx = s.context();
    ctx.zpl_xi_perp_mev = 0.0;
    std::vector<fit::Parameter> params = fit::visibility_fit_parameters();
    params[0].value = s.cfg.vis.a_branching;
    const fit::FitResult result = fit::fit_series(series, params, ctx);
    return finish_fit(s, result, series, ctx);
}

int cmd_mn_validate(Session& s, double temp, double w_down_mhz, double w_up_mhz) {
    const auto& c = s.cfg;
    json extra;
    if (w_down_mhz <= 0) {
        // physical exchange rates at the requested temperature
        const double wd_hz = phonon::w_down({temp}, c.e_phonon, c.spin, c.quadrature,
                                            c.constants);
        const double wu_hz = phonon::w_up({temp}, c.e_phonon, c.spin, c.quadrature,
                                          c.constants);
        w_down_mhz = wd_hz * 1e-6;
        w_up_mhz = wu_hz * 1e-6;
        extra["temperature_k"] = temp;
        extra["gamma_mn_exact_mhz"] = obs::gamma_mn({temp}, c.spin, c.e_phonon,
                                                    obs::MnMode::exact, c.quadrature,
                                                    c.constants)
                                          .gamma_mn_mhz;
    } else if (w_up_mhz < 0) {
        w_up_mhz = w_down_mhz;
    }

    const mc::FastExchangeReport r =
        mc::validate_fast_exchange(c.spin, w_down_mhz, w_up_mhz, s.mc_settings());

    json j = {{"delta_mhz", r.delta_mhz},
              {"w_down_mhz", r.w_down_mhz},
              {"w_up_mhz", r.w_up_mhz},
              {"rate_ratio_u", r.rate_ratio_u},
              {"beta", r.beta},
              {"fwhm_formula_mhz", r.fwhm_formula_mhz},
              {"fwhm_mc_mhz", r.fwhm_mc_mhz},
              {"stderr_fwhm_mhz", r.stderr_fwhm_mhz},
              {"relative_error", r.relative_error},
              {"ci95_mhz", {r.ci95_lo_mhz, r.ci95_hi_mhz}},
              {"peak_center_mhz", r.peak_center_mhz},
              {"fast_exchange_ratio", r.fast_exchange_ratio},
              {"occupancy_upper", r.occupancy_upper},
              {"occupancy_expected", r.occupancy_expected},
              {"site_convention", r.site_convention},
              {"mc",
               {{"n_trajectories", c.mc.n_trajectories},
                {"n_time_samples", c.mc.n_time_samples},
                {"seed", c.mc.seed},
                {"t_total_factor", c.mc.t_total_factor},
                {"n_bootstrap", c.mc.n_bootstrap}}}};
    for (auto& [k, v] : extra.items())
        j[k] = v;
    s.write_json("mn_report.json", j);
    std::cout << "FWHM: MC = " << r.fwhm_mc_mhz << " MHz, formula = " << r.fwhm_formula_mhz
              << " MHz, relative error = " << r.relative_error << " (stderr "
              << r.stderr_fwhm_mhz << " MHz)\n";
    return 0;
}

int cmd_report(Session& s, const std::vector<std::string>& files) {
    const auto& c = s.cfg;
    const fit::ModelContext ctx = s.context();
    std::map<fit::SeriesKind, std::vector<fit::DataSeries>> data;
    for (const auto& f : files) {
        fit::DataSeries d = io::load_series(f);
        data[d.kind].push_back(std::move(d));
    }

    // model parameters straight from the config
    std::vector<fit::Parameter> odmr_p = fit::odmr_fit_parameters();
    odmr_p[0].value = c.odmr.gamma_inh_mhz;
    odmr_p[1].value = c.odmr.kappa_mhz2_per_w;
    odmr_p[2].value = c.odmr.c_max;
    odmr_p[3].value = phonon::q_constant(c.e_phonon, c.spin, c.constants) * 1e-6;
    odmr_p[4].value = c.spin.xi_perp_mev;
    std::vector<fit::Parameter> zpl_p = fit::zpl_fit_parameters();
    zpl_p[0].value = c.e_phonon.b_e_hz_per_k5;
    zpl_p[1].value = c.e_phonon.omega_e_mev;
    zpl_p[2].value = c.a_phonon.b_a_hz_per_k7;
    zpl_p[3].value = c.a_phonon.omega_a_mev;
    zpl_p[4].value = c.optical.gamma0_mhz;
    std::vector<fit::Parameter> vis_p = fit::visibility_fit_parameters();
    vis_p[0].value = c.vis.a_branching;

    struct Panel {
        fit::SeriesKind kind;
        const char* file;
        const char* title;
        const char* x_label;
        const char* y_label;
        bool log_y;
        std::vector<fit::Parameter>* params;
        std::vector<fit::Conditions> default_conditions;
    };
    fit::Conditions p04, p02, p005, t294, vplus, vminus;
    p04.rf_power_w = 0.4;
    p02.rf_power_w = 0.2;
    p005.rf_power_w = 0.05;
    t294.temperature_k = 294.0;
    vplus.sign_branch = +1;
    vminus.sign_branch = -1;
    std::vector<Panel> panels = {
        {fit::SeriesKind::linewidth_vs_T, "fig_linewidth_vs_T.svg", "ODMR linewidth vs T",
         "temperature (K)", "linewidth (MHz)", false, &odmr_p, {p04, p02, p005}},
        {fit::SeriesKind::linewidth_vs_P, "fig_linewidth_vs_P.svg", "ODMR linewidth vs P",
         "RF power (W)", "linewidth (MHz)", false, &odmr_p, {t294}},
        {fit::SeriesKind::contrast_vs_P, "fig_contrast_vs_P.svg", "ODMR contrast vs P",
         "RF power (W)", "contrast", false, &odmr_p, {t294}},
        {fit::SeriesKind::splitting_vs_T, "fig_splitting_vs_T.svg", "ODMR splitting vs T",
         "temperature (K)", "splitting (MHz)", false, &odmr_p, {fit::Conditions{}}},
        {fit::SeriesKind::zpl_vs_T, "fig_zpl_vs_T.svg", "ZPL width vs T",
         "temperature (K)", "ZPL width (MHz)", true, &zpl_p, {fit::Conditions{}}},
        {fit::SeriesKind::visibility_vs_T, "fig_visibility_vs_T.svg",
         "ZPL polarization visibility", "temperature (K)", "visibility", false, &vis_p,
         {vplus, vminus}},
    };

    for (const auto& panel : panels) {
        io::SvgAxes axes;
        axes.title = panel.title;
        axes.x_label = panel.x_label;
        axes.y_label = panel.y_label;
        axes.log_y = panel.log_y;
        std::vector<io::SvgSeries> plots;
        std::vector<double> values(panel.params->size());
        for (size_t i = 0; i < panel.params->size(); ++i)
            values[i] = (*panel.params)[i].value;

        std::vector<fit::Conditions> conds;
        const auto it = data.find(panel.kind);
        if (it != data.end())
            for (const auto& d : it->second)
                conds.push_back(d.conditions);
        else
            conds = panel.default_conditions;

        const bool vs_power = panel.kind == fit::SeriesKind::linewidth_vs_P ||
                              panel.kind == fit::SeriesKind::contrast_vs_P;
        int idx = 0;
        for (const auto& cond : conds) {
            ++idx;
            io::SvgSeries curve;
            curve.style = io::SvgSeries::Style::line;
            if (vs_power)
                curve.x = linspace(0.0, 0.5, 160);
            else if (panel.log_y)
                curve.x = logspace(2.0, 300.0, 160);
            else
                curve.x = linspace(250.0, 550.0, 160);
            if (it != data.end()) {
                const auto& d = it->second[static_cast<size_t>(idx - 1)];
                curve.x = panel.log_y ? logspace(d.x.front(), d.x.back(), 160)
                                      : linspace(d.x.front(), d.x.back(), 160);
            }
            for (double x : curve.x)
                curve.y.push_back(
                    fit::model_eval(panel.kind, x, cond, *panel.params, values, ctx));
            curve.label = "model " + std::to_string(idx);
            plots.push_back(std::move(curve));
        }
        if (it != data.end()) {
            idx = 0;
            for (const auto& d : it->second) {
                ++idx;
                io::SvgSeries pts;
                pts.style = d.unit_weights ? io::SvgSeries::Style::points
                                           : io::SvgSeries::Style::error_bars;
                pts.x = d.x;
                pts.y = d.y;
                if (!d.unit_weights)
                    pts.yerr = d.sigma;
                pts.label = "data " + std::to_string(idx);
                plots.push_back(std::move(pts));
            }
        }
        io::render_svg(s.path(panel.file).string(), axes, plots);
    }
    std::cout << "wrote " << panels.size() << " report panels to " << s.out.string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"electron-phonon model of NV-center spectroscopy"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed_override = -1;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed_override, "Monte Carlo seed (overrides config)");

    double tmin = 295.0, tmax = 550.0, step = 5.0;
    double temp = 294.0, p_rf = 0.4;
    double w_down_mhz = 0.0, w_up_mhz = -1.0;
    double tmin_log = 2.0, tmax_log = 300.0;
    bool xi_zero = false, sequential = false;
    std::vector<std::string> data_files;

    auto* rates = app.add_subcommand("rates", "phonon rate laws over a temperature grid");
    rates->fallthrough();
    rates->add_option("--tmin", tmin, "grid start (K)")->capture_default_str();
    rates->add_option("--tmax", tmax, "grid end (K)")->capture_default_str();
    rates->add_option("--step", step, "grid step (K)")->capture_default_str();
    rates->add_flag("--xi-zero", xi_zero, "evaluate at zero strain splitting");

    auto* odmr = app.add_subcommand("odmr", "ODMR lineshape and saturation");
    odmr->require_subcommand(1);
    odmr->fallthrough();
    auto* odmr_sim = odmr->add_subcommand("simulate", "forward model curves and spectrum");
    odmr_sim->fallthrough();
    odmr_sim->add_option("--temp", temp, "temperature (K)")->capture_default_str();
    odmr_sim->add_option("--rf-power", p_rf, "RF power (W)")->capture_default_str();
    odmr_sim->add_option("--tmin", tmin, "curve grid start (K)")->capture_default_str();
    odmr_sim->add_option("--tmax", tmax, "curve grid end (K)")->capture_default_str();
    odmr_sim->add_option("--step", step, "curve grid step (K)")->capture_default_str();
    auto* odmr_fit = odmr->add_subcommand("fit", "simultaneous multi-dataset ODMR fit");
    odmr_fit->fallthrough();
    odmr_fit->add_option("--data", data_files, "series CSV file (repeatable)")
        ->required()
        ->expected(-1);

    auto* zpl = app.add_subcommand("zpl", "zero-phonon line width");
    zpl->require_subcommand(1);
    zpl->fallthrough();
    auto* zpl_eval = zpl->add_subcommand("eval", "model curve over a temperature grid");
    zpl_eval->fallthrough();
    zpl_eval->add_option("--tmin", tmin_log, "grid start (K)")->capture_default_str();
    zpl_eval->add_option("--tmax", tmax_log, "grid end (K)")->capture_default_str();
    zpl_eval->add_flag("--xi-zero", xi_zero, "evaluate the rescaled (zero-strain) center");
    auto* zpl_fit = zpl->add_subcommand("fit", "fit ZPL (and optional visibility) data");
    zpl_fit->fallthrough();
    zpl_fit->add_option("--data", data_files, "series CSV file (repeatable)")
        ->required()
        ->expected(-1);
    zpl_fit->add_flag("--sequential", sequential,
                      "fit ZPL first, then the branching ratio (default: joint)");

    auto* vis = app.add_subcommand("visibility", "ZPL polarization visibility");
    vis->require_subcommand(1);
    vis->fallthrough();
    auto* vis_eval = vis->add_subcommand("eval", "model curve over a temperature grid");
    vis_eval->fallthrough();
    vis_eval->add_option("--tmin", tmin_log, "grid start (K)")->capture_default_str();
    vis_eval->add_option("--tmax", tmax_log, "grid end (K)")->capture_default_str();
    vis_eval->add_flag("--xi-zero", xi_zero, "evaluate the rescaled (zero-strain) center");
    auto* vis_fit = vis->add_subcommand("fit", "fit the branching ratio to visibility data");
    vis_fit->fallthrough();
    vis_fit->add_option("--data", data_files, "series CSV file (repeatable)")
        ->required()
        ->expected(-1);

    auto* mn = app.add_subcommand("mn", "motional narrowing oracle");
    mn->require_subcommand(1);
    mn->fallthrough();
    auto* mn_validate = mn->add_subcommand(
        "validate", "Monte Carlo telegraph lineshape vs the fast-exchange formula");
    mn_validate->fallthrough();
    mn_validate->add_option("--temp", temp, "temperature (K) for physical rates")
        ->capture_default_str();
    mn_validate->add_option("--w-down", w_down_mhz,
                            "override upper->lower rate (MHz); 0 = derive from --temp");
    mn_validate->add_option("--w-up", w_up_mhz,
                            "override lower->upper rate (MHz); default = w-down");
    mn_validate->add_flag("--xi-zero", xi_zero, "zero strain (symmetric telegraph)");

    auto* report = app.add_subcommand("report", "figure-style panels from data + model");
    report->fallthrough();
    report->add_option("--data", data_files, "series CSV file (repeatable)")->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        Session s;
        if (!config_path.empty())
            s.cfg = io::load_config(config_path);
        if (seed_override >= 0)
            s.cfg.mc.seed = static_cast<std::uint64_t>(seed_override);
        if (xi_zero)
            s.cfg.spin.xi_perp_mev = 0.0;
        s.out = out_dir.empty() ? fs::path(s.cfg.output_dir) : fs::path(out_dir);
        s.prepare();

        if (rates->parsed())
            return cmd_rates(s, tmin, tmax, step);
        if (odmr_sim->parsed())
            return cmd_odmr_simulate(s, temp, p_rf, tmin, tmax, step);
        if (odmr_fit->parsed())
            return cmd_odmr_fit(s, data_files);
        if (zpl_eval->parsed())
            return cmd_zpl_eval(s, tmin_log, tmax_log);
        if (zpl_fit->parsed())
            return cmd_zpl_fit(s, data_files, sequential);
        if (vis_eval->parsed())
            return cmd_visibility_eval(s, tmin_log, tmax_log);
        if (vis_fit->parsed())
            return cmd_visibility_fit(s, data_files);
        if (mn_validate->parsed())
            return cmd_mn_validate(s, temp, w_down_mhz, w_up_mhz);
        if (report->parsed())
            return cmd_report(s, data_files);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const io::ConfigParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        std::cerr << "invalid value for '" << e.field() << "': " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << e.what() << "\n";
        return 5;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
