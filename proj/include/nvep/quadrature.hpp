#pragma once

#include <functional>

#include "nvep/errors.hpp"

namespace nvep::phonon {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 200;

    void validate() const {
        if (!(rel_tol > 0))
            throw InvariantError("rel_tol", "rel_tol must be positive");
        if (!(abs_tol > 0))
            throw InvariantError("abs_tol", "abs_tol must be positive");
        if (max_subdivisions < 10)
            throw InvariantError("max_subdivisions", "max_subdivisions must be >= 10");
    }
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int n_subdivisions = 0;
};

// Globally adaptive bisection with a Gauss-Kronrod 7/15 rule per panel.
// Panels are refined worst-error-first until
//   sum of panel errors <= max(abs_tol, rel_tol * |integral|).
// Throws QuadratureError once max_subdivisions bisections are exhausted.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureSpec& spec = {});

} // namespace nvep::phonon
