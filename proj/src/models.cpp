#include "nvep/models.hpp"

#include <cmath>
#include <map>

#include "nvep/rng.hpp"

namespace nvep::fit {

namespace {

class ParamView {
public:
    ParamView(const std::vector<Parameter>& params, const std::vector<double>& values)
        : params_(params), values_(values) {}

    double operator()(const std::string& name) const {
        for (size_t i = 0; i < params_.size(); ++i)
            if (params_[i].name == name)
                return values_[i];
        throw FitError("model references missing parameter '" + name + "'");
    }

    double get_or(const std::string& name, double fallback) const {
        for (size_t i = 0; i < params_.size(); ++i)
            if (params_[i].name == name)
                return values_[i];
        return fallback;
    }

private:
    const std::vector<Parameter>& params_;
    const std::vector<double>& values_;
};

double require_condition(double v, const char* what, SeriesKind kind) {
    if (std::isnan(v))
        throw FitError(std::string("series ") + to_string(kind) +
                       " requires the condition '" + what + "'");
    return v;
}

double odmr_gamma_h(double t_kelvin, const ParamView& p, const ModelContext& ctx) {
    core::SpinParams spin = ctx.spin;
    spin.xi_perp_mev = p("xi_perp_mev");
    const double q_hz = p("q_mhz_per_k2") * 1e6;
    const double gamma_mn = obs::gamma_mn_from_q_mhz({t_kelvin}, spin, q_hz, ctx.units);
    return obs::gamma_infinity_mhz(ctx.optical) + gamma_mn;
}

double odmr_width(double t_kelvin, double p_rf_w, const ParamView& p,
                  const ModelContext& ctx) {
    obs::ODMRModelParams m = ctx.odmr;
    m.gamma_inh_mhz = p("gamma_inh_mhz");
    m.kappa_mhz2_per_w = p("kappa_mhz2_per_w");
    const double gamma1 = obs::effective_gamma1_mhz(ctx.odmr, ctx.optical);
    return obs::odmr_linewidth_mhz(p_rf_w, m, odmr_gamma_h(t_kelvin, p, ctx), gamma1);
}

double odmr_contrast_model(double t_kelvin, double p_rf_w, const ParamView& p,
                           const ModelContext& ctx) {
    obs::ODMRModelParams m = ctx.odmr;
    m.c_max = p("c_max");
    m.kappa_mhz2_per_w = p("kappa_mhz2_per_w");
    const double gamma1 = obs::effective_gamma1_mhz(ctx.odmr, ctx.optical);
    return obs::odmr_contrast(p_rf_w, m, odmr_gamma_h(t_kelvin, p, ctx), gamma1);
}

} // namespace

double model_eval(SeriesKind kind, double x, const Conditions& cond,
                  const std::vector<Parameter>& params,
                  const std::vector<double>& values, const ModelContext& ctx) {
    const ParamView p(params, values);
    switch (kind) {
    case SeriesKind::linewidth_vs_T:
        return odmr_width(x, require_condition(cond.rf_power_w, "rf_power_W", kind), p,
                          ctx);
    case SeriesKind::linewidth_vs_P:
        return odmr_width(require_condition(cond.temperature_k, "temperature_K", kind), x,
                          p, ctx);
    case SeriesKind::contrast_vs_P:
        return odmr_contrast_model(
            require_condition(cond.temperature_k, "temperature_K", kind), x, p, ctx);
    case SeriesKind::splitting_vs_T: {
        core::SpinParams spin = ctx.spin;
        spin.xi_perp_mev = p("xi_perp_mev");
        return core::odmr_splitting_mhz({x}, spin, ctx.units);
    }
    case SeriesKind::zpl_vs_T: {
        phonon::EPhononParams e{p("b_e_hz_per_k5"), p("omega_e_mev")};
        phonon::APhononParams a{p("b_a_hz_per_k7"), p("omega_a_mev")};
        obs::OpticalRates o = ctx.optical;
        o.gamma0_mhz = p("gamma0_mhz");
        core::SpinParams spin = ctx.spin;
        spin.xi_perp_mev = ctx.zpl_xi_perp_mev;
        return obs::zpl_width_mhz({x}, e, a, o, spin, ctx.quad, ctx.units);
    }
    case SeriesKind::visibility_vs_T: {
        phonon::EPhononParams e{p.get_or("b_e_hz_per_k5", ctx.e_phonon.b_e_hz_per_k5),
                                p.get_or("omega_e_mev", ctx.e_phonon.omega_e_mev)};
        obs::VisibilityParams v = ctx.vis;
        v.a_branching = p("a_branching");
        v.sign_branch = cond.sign_branch;
        core::SpinParams spin = ctx.spin;
        spin.xi_perp_mev = ctx.zpl_xi_perp_mev;
        return obs::visibility({x}, v, e, spin, ctx.quad, ctx.units);
    }
    }
    throw FitError("unknown series kind");
}

std::vector<double> residual_vector(const std::vector<Parameter>& params,
                                    const std::vector<double>& values,
                                    const std::vector<DataSeries>& series,
                                    const ModelContext& ctx) {
    std::vector<double> out;
    size_t total = 0;
    for (const auto& s : series)
        total += s.x.size();
    out.reserve(total);
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double m = model_eval(s.kind, s.x[i], s.conditions, params, values, ctx);
            out.push_back((m - s.y[i]) / s.sigma[i]);
        }
    }
    return out;
}

std::vector<Parameter> odmr_fit_parameters() {
    const double inf = std::numeric_limits<double>::infinity();
    return {
        {"gamma_inh_mhz", 33.0, 0.0, inf, false, Transform::none, 0.0},
        {"kappa_mhz2_per_w", 210.0, 0.0, inf, false, Transform::none, 0.0},
        {"c_max", 0.16, 0.0, 1.0, false, Transform::none, 0.0},
        {"q_mhz_per_k2", 0.83, 0.0, inf, false, Transform::none, 0.0},
        {"xi_perp_mev", 4.6, 0.0, inf, false, Transform::none, 0.0},
    };
}

std::vector<Parameter> zpl_fit_parameters() {
    const double inf = std::numeric_limits<double>::infinity();
    return {
        {"b_e_hz_per_k5", 1.32, 1e-12, inf, false, Transform::log, 0.0},
        {"omega_e_mev", 13.0, 0.1, 168.0, false, Transform::none, 0.0},
        {"b_a_hz_per_k7", 24e-6, 1e-18, inf, false, Transform::log, 0.0},
        {"omega_a_mev", 37.0, 0.1, 168.0, false, Transform::none, 0.0},
        {"gamma0_mhz", 16.2, 0.0, inf, false, Transform::none, 0.0},
    };
}

std::vector<Parameter> visibility_fit_parameters() {
    return {
        {"a_branching", 0.40, 0.0, 1.0, false, Transform::none, 0.0},
    };
}

FitResult fit_series(const std::vector<DataSeries>& series, std::vector<Parameter> params,
                     const ModelContext& ctx, const LMOptions& opt) {
    if (series.empty())
        throw FitError("fit_series: no data series given");
    bool any_unit_weights = false;
    for (const auto& s : series) {
        s.validate();
        any_unit_weights = any_unit_weights || s.unit_weights;
    }
    const std::vector<Parameter> names = params;
    ResidualFn fn = [&series, &names, &ctx](const std::vector<double>& values) {
        return residual_vector(names, values, series, ctx);
    };
    FitResult result = levenberg_marquardt(fn, std::move(params), opt);
    result.unit_weights = any_unit_weights;

    std::vector<double> values(result.parameters.size());
    for (size_t i = 0; i < result.parameters.size(); ++i)
        values[i] = result.parameters[i].value;
    for (const auto& s : series) {
        double norm = 0.0;
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double r =
                (model_eval(s.kind, s.x[i], s.conditions, result.parameters, values, ctx) -
                 s.y[i]) /
                s.sigma[i];
            norm += r * r;
        }
        result.per_series_norms.emplace_back(to_string(s.kind), std::sqrt(norm));
    }
    return result;
}

FitResult fit_zpl_and_visibility(const std::vector<DataSeries>& zpl_series,
                                 const std::vector<DataSeries>& visibility_series,
                                 std::vector<Parameter> params, const ModelContext& ctx,
                                 ZplVisMode mode, const LMOptions& opt) {
    std::vector<DataSeries> all = zpl_series;
    all.insert(all.end(), visibility_series.begin(), visibility_series.end());

    if (mode == ZplVisMode::joint)
        return fit_series(all, std::move(params), ctx, opt);

    // Sequential: ZPL parameters first, then a_branching with the rest frozen.
    std::vector<Parameter> stage1 = params;
    for (auto& p : stage1)
        if (p.name == "a_branching")
            p.fixed = true;
    FitResult r1 = fit_series(zpl_series, std::move(stage1), ctx, opt);

    std::vector<Parameter> stage2 = r1.parameters;
    for (auto& p : stage2) {
        p.fixed = (p.name != "a_branching");
        if (p.name == "a_branching")
            p.fixed = false;
    }
    FitResult r2 = fit_series(visibility_series, std::move(stage2), ctx, opt);

    // Merge: values/uncertainties from the stage that fit each parameter.
    FitResult out = r2;
    for (auto& p : out.parameters) {
        if (p.name == "a_branching")
            continue;
        for (const auto& q : r1.parameters)
            if (q.name == p.name) {
                p = q;
                break;
            }
    }
    out.chi2 = r1.chi2 + r2.chi2;
    out.n_points = r1.n_points + r2.n_points;
    out.n_free = r1.n_free + r2.n_free;
    out.chi2_reduced = out.chi2 / std::max(1, out.n_points - out.n_free);
    out.n_iterations = r1.n_iterations + r2.n_iterations;
    out.converged = r1.converged && r2.converged;
    out.singular_covariance = r1.singular_covariance || r2.singular_covariance;
    out.unit_weights = r1.unit_weights || r2.unit_weights;
    out.per_series_norms = r1.per_series_norms;
    out.per_series_norms.insert(out.per_series_norms.end(), r2.per_series_norms.begin(),
                                r2.per_series_norms.end());
    return out;
}

DataSeries synthesize_dataset(SeriesKind kind, const std::vector<Parameter>& params,
                              const std::vector<double>& x_grid, double noise_sigma,
                              std::uint64_t seed, const Conditions& cond,
                              const ModelContext& ctx) {
    if (!(noise_sigma >= 0))
        throw FitError("synthesize_dataset: noise sigma must be nonnegative");
    std::vector<double> values(params.size());
    for (size_t i = 0; i < params.size(); ++i)
        values[i] = params[i].value;

    DataSeries s;
    s.kind = kind;
    s.conditions = cond;
    s.x = x_grid;
    s.y.resize(x_grid.size());
    s.sigma.assign(x_grid.size(), noise_sigma > 0 ? noise_sigma : 1.0);
    s.unit_weights = noise_sigma == 0;
    mc::PhiloxStream rng(seed, 0);
    for (size_t i = 0; i < x_grid.size(); ++i) {
        const double m = model_eval(kind, x_grid[i], cond, params, values, ctx);
        s.y[i] = m + (noise_sigma > 0 ? noise_sigma * rng.normal() : 0.0);
    }
    return s;
}

} // namespace nvep::fit
