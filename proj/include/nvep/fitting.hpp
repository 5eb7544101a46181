#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nvep/errors.hpp"

namespace nvep::fit {

enum class Transform { none, log };

struct Parameter {
    std::string name;
    double value = 0.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    bool fixed = false;
    Transform transform = Transform::none;
    double uncertainty = 0.0; // 1 sigma, filled in by the fitter

    void validate() const {
        if (!(lower < upper))
            throw InvariantError(name, "parameter bounds must satisfy lower < upper");
        if (!(value >= lower && value <= upper))
            throw InvariantError(name, "parameter value must lie within its bounds");
        if (transform == Transform::log) {
            if (!(value > 0))
                throw InvariantError(name, "log transform requires a positive value");
            if (lower < 0 || !(upper > 0))
                throw InvariantError(name, "log transform requires positive bounds");
        }
    }
};

enum class SeriesKind {
    linewidth_vs_T,
    linewidth_vs_P,
    contrast_vs_P,
    splitting_vs_T,
    zpl_vs_T,
    visibility_vs_T,
};

const char* to_string(SeriesKind k);

// Fixed experimental conditions attached to one series. NaN marks "not set".
struct Conditions {
    double temperature_k = std::numeric_limits<double>::quiet_NaN();
    double rf_power_w = std::numeric_limits<double>::quiet_NaN();
    double optical_power_w = std::numeric_limits<double>::quiet_NaN(); // metadata only
    int sign_branch = +1;
};

struct DataSeries {
    SeriesKind kind = SeriesKind::linewidth_vs_T;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> sigma;
    Conditions conditions;
    bool unit_weights = false; // true when the file carried no uncertainties

    void validate() const {
        if (x.size() != y.size() || x.size() != sigma.size())
            throw InvariantError("x", "series columns must have equal lengths");
        if (x.empty())
            throw InvariantError("x", "series must not be empty");
        for (size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1]))
                throw InvariantError("x", "series x values must be strictly increasing");
        for (double s : sigma)
            if (!(s > 0))
                throw InvariantError("sigma", "series sigmas must be positive");
    }
};

// Residuals (model - y)/sigma as a flat vector, for the current parameter values
// (full vector, fixed entries included, in the order given to the fitter).
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct LMOptions {
    double tol_chi2_rel = 1e-10;
    double tol_step = 1e-12;
    double tol_gradient = 1e-14; // on the max |g| component, relative to max(1, chi2)
    int max_iterations = 1000;
    double fd_rel_step = 1e-6;
    double fd_abs_floor = 1e-12;
};

struct FitResult {
    std::vector<Parameter> parameters;
    std::vector<std::string> free_names; // order of covariance rows/columns
    std::vector<std::vector<double>> covariance; // unscaled (J^T J)^-1, free params
    double chi2 = 0.0;
    double chi2_reduced = 0.0;
    int n_points = 0;
    int n_free = 0;
    int n_iterations = 0;
    bool converged = false;
    bool singular_covariance = false;
    bool unit_weights = false; // chi2_reduced is unscaled if any series lacked sigmas
    std::vector<std::pair<std::string, double>> per_series_norms;
};

// Damped normal-equation steps with a gain-ratio damping update. Parameters are
// internally rescaled by their initial magnitudes (or log-transformed); bounds
// are enforced by clamping proposed steps. Covariance comes from the SVD
// pseudo-inverse of J^T J with singular values below 1e-12 of the largest
// truncated. Uncertainties are sqrt(diag(cov)) * sqrt(chi2_reduced).
FitResult levenberg_marquardt(const ResidualFn& residuals,
                              std::vector<Parameter> params, const LMOptions& opt = {});

} // namespace nvep::fit
