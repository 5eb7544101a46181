#include "nvep/fitting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace nvep::fit {

const char* to_string(SeriesKind k) {
    switch (k) {
    case SeriesKind::linewidth_vs_T: return "linewidth_vs_T";
    case SeriesKind::linewidth_vs_P: return "linewidth_vs_P";
    case SeriesKind::contrast_vs_P: return "contrast_vs_P";
    case SeriesKind::splitting_vs_T: return "splitting_vs_T";
    case SeriesKind::zpl_vs_T: return "zpl_vs_T";
    case SeriesKind::visibility_vs_T: return "visibility_vs_T";
    }
    return "unknown";
}

namespace {

// Internal coordinates: u = v/scale (none) or u = ln v (log), per free parameter.
struct Coords {
    std::vector<size_t> free_idx;
    std::vector<double> scale;

    double to_u(const Parameter& p, double v, size_t k) const {
        return p.transform == Transform::log ? std::log(v) : v / scale[k];
    }
    double to_v(const Parameter& p, double u, size_t k) const {
        const double v = p.transform == Transform::log ? std::exp(u) : u * scale[k];
        return std::clamp(v, p.lower, p.upper);
    }
    // dv/du at v, for mapping covariance back to natural units
    double dv_du(const Parameter& p, double v, size_t k) const {
        return p.transform == Transform::log ? v : scale[k];
    }
};

Eigen::VectorXd eval(const ResidualFn& f, const std::vector<Parameter>& params,
                     const Coords& c, const std::vector<Parameter>& base,
                     const Eigen::VectorXd& u) {
    std::vector<double> values(base.size());
    for (size_t i = 0; i < base.size(); ++i)
        values[i] = base[i].value;
    for (size_t k = 0; k < c.free_idx.size(); ++k) {
        const size_t i = c.free_idx[k];
        values[i] = c.to_v(params[i], u(static_cast<Eigen::Index>(k)), k);
    }
    const std::vector<double> r = f(values);
    return Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

} // namespace

FitResult levenberg_marquardt(const ResidualFn& residuals, std::vector<Parameter> params,
                              const LMOptions& opt) {
    for (const auto& p : params)
        p.validate();

    Coords c;
    for (size_t i = 0; i < params.size(); ++i) {
        if (params[i].fixed)
            continue;
        c.free_idx.push_back(i);
        const double mag = std::abs(params[i].value);
        c.scale.push_back(mag > 0 ? mag : 1.0);
    }
    const size_t nf = c.free_idx.size();
    if (nf == 0)
        throw FitError("levenberg_marquardt: no free parameters");

    Eigen::VectorXd u(static_cast<Eigen::Index>(nf));
    for (size_t k = 0; k < nf; ++k)
        u(static_cast<Eigen::Index>(k)) =
            c.to_u(params[c.free_idx[k]], params[c.free_idx[k]].value, k);

    Eigen::VectorXd r = eval(residuals, params, c, params, u);
    const Eigen::Index m = r.size();
    if (m < static_cast<Eigen::Index>(nf))
        throw FitError("levenberg_marquardt: fewer residuals than free parameters");
    double chi2 = r.squaredNorm();

    auto jacobian = [&](const Eigen::VectorXd& at) {
        Eigen::MatrixXd j(m, static_cast<Eigen::Index>(nf));
        for (size_t k = 0; k < nf; ++k) {
            const double h = std::max(opt.fd_rel_step * std::abs(at(static_cast<Eigen::Index>(k))),
                                      opt.fd_abs_floor);
            Eigen::VectorXd up = at, dn = at;
            up(static_cast<Eigen::Index>(k)) += h;
            dn(static_cast<Eigen::Index>(k)) -= h;
            j.col(static_cast<Eigen::Index>(k)) =
                (eval(residuals, params, c, params, up) -
                 eval(residuals, params, c, params, dn)) /
                (2.0 * h);
        }
        return j;
    };

    FitResult out;
    out.n_points = static_cast<int>(m);
    out.n_free = static_cast<int>(nf);

    double lambda = -1.0;
    double nu = 2.0;
    bool converged = false;
    int iter = 0;
    Eigen::MatrixXd j;

    while (iter < opt.max_iterations && !converged) {
        ++iter;
        j = jacobian(u);
        if (!j.allFinite()) {
            converged = false; // derivatives unavailable: stop rather than stall
            break;
        }
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::VectorXd g = j.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= opt.tol_gradient * std::max(1.0, chi2)) {
            converged = true; // stationary point (e.g. started at the minimum)
            break;
        }
        if (lambda < 0)
            lambda = 1e-3 * a.diagonal().maxCoeff();

        bool stepped = false;
        while (!stepped) {
            Eigen::MatrixXd ad = a;
            ad.diagonal().array() += lambda;
            const Eigen::VectorXd h = ad.ldlt().solve(-g);

            Eigen::VectorXd u_new = u;
            for (size_t k = 0; k < nf; ++k) {
                // keep u consistent with the clamped natural value
                const size_t i = c.free_idx[k];
                const double v =
                    c.to_v(params[i], u(static_cast<Eigen::Index>(k)) +
                                          h(static_cast<Eigen::Index>(k)), k);
                u_new(static_cast<Eigen::Index>(k)) = c.to_u(params[i], v, k);
            }
            const Eigen::VectorXd r_new = eval(residuals, params, c, params, u_new);
            const double chi2_new = r_new.squaredNorm();
            const double predicted = h.dot(lambda * h - g); // > 0 for a descent step
            const double rho = predicted > 0 ? (chi2 - chi2_new) / predicted : -1.0;

            if (rho > 0) {
                const double step_norm = (u_new - u).norm();
                const double drop = chi2 - chi2_new;
                u = u_new;
                r = r_new;
                chi2 = chi2_new;
                const double shrink = 1.0 - std::pow(2.0 * rho - 1.0, 3.0);
                lambda *= std::max(1.0 / 3.0, shrink);
                nu = 2.0;
                stepped = true;
                if (drop < opt.tol_chi2_rel * std::max(chi2, 1e-300) ||
                    step_norm < opt.tol_step)
                    converged = true;
            } else if (std::isfinite(chi2_new) &&
                       (u_new - u).norm() <= opt.tol_step * (u.norm() + opt.tol_step)) {
                // rejected step of negligible effective size (typically a bound
                // clamp snapping back): nothing left to gain at this precision
                stepped = true;
                converged = true;
            } else {
                lambda *= nu;
                nu *= 2.0;
                // negated comparison so NaN-poisoned systems also bail out
                if (!(lambda < 1e32)) { // no descent direction left at any damping
                    stepped = true;
                    converged = false;
                    iter = opt.max_iterations;
                }
            }
        }
    }

    // Covariance of the free parameters from the SVD pseudo-inverse of J^T J.
    j = jacobian(u);
    Eigen::MatrixXd cov_u =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nf), static_cast<Eigen::Index>(nf));
    bool singular = !j.allFinite();
    if (!singular) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(j,
                                              Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double cutoff = 1e-12 * sv(0);
        Eigen::VectorXd inv2(sv.size());
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) {
                inv2(i) = 1.0 / (sv(i) * sv(i));
            } else {
                inv2(i) = 0.0;
                singular = true;
            }
        }
        cov_u = svd.matrixV() * inv2.asDiagonal() * svd.matrixV().transpose();
    }

    for (size_t k = 0; k < nf; ++k) {
        const size_t i = c.free_idx[k];
        params[i].value = c.to_v(params[i], u(static_cast<Eigen::Index>(k)), k);
    }

    const int dof = std::max(1, static_cast<int>(m) - static_cast<int>(nf));
    out.chi2 = chi2;
    out.chi2_reduced = chi2 / dof;
    out.n_iterations = iter;
    out.converged = converged;
    out.singular_covariance = singular;

    out.covariance.assign(nf, std::vector<double>(nf, 0.0));
    for (size_t a_i = 0; a_i < nf; ++a_i) {
        const size_t i = c.free_idx[a_i];
        const double da = c.dv_du(params[i], params[i].value, a_i);
        for (size_t b_i = 0; b_i < nf; ++b_i) {
            const size_t jj = c.free_idx[b_i];
            const double db = c.dv_du(params[jj], params[jj].value, b_i);
            out.covariance[a_i][b_i] =
                cov_u(static_cast<Eigen::Index>(a_i), static_cast<Eigen::Index>(b_i)) * da *
                db;
        }
    }
    for (size_t k = 0; k < nf; ++k) {
        const size_t i = c.free_idx[k];
        params[i].uncertainty = std::sqrt(std::max(0.0, out.covariance[k][k]) *
                                          out.chi2_reduced);
        out.free_names.push_back(params[i].name);
    }
    out.parameters = std::move(params);
    return out;
}

} // namespace nvep::fit
