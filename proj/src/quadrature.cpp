#include "nvep/quadrature.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace nvep::phonon {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
constexpr double kWg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

struct Panel {
    double a, b;
    double value;  // K15 estimate
    double error;  // |K15 - G7|

    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double fc = f(c);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1)
            resg += kWg[i / 2] * fsum;
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    p.error = std::abs((resk - resg) * h);
    return p;
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    QuadratureResult out;
    if (a == b)
        return out;

    std::priority_queue<Panel> panels;
    Panel root = evaluate_panel(f, a, b);
    double total_value = root.value;
    double total_error = root.error;
    panels.push(root);

    int n_sub = 0;
    while (total_error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value))) {
        if (n_sub >= spec.max_subdivisions)
            throw QuadratureError("adaptive quadrature: tolerance not met after " +
                                  std::to_string(n_sub) + " subdivisions");
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++n_sub;
    }

    out.value = total_value;
    out.error_estimate = total_error;
    out.n_subdivisions = n_sub;
    return out;
}

} // namespace nvep::phonon
