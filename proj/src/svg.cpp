#include "nvep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nvep::io {

namespace {

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

// Largest nice step (1/2/5 * 10^k) giving at most ~7 intervals.
double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (raw <= m * mag)
            return m * mag;
    }
    return 10.0 * mag;
}

struct Range {
    double lo, hi;
    double span() const { return hi - lo; }
};

} // namespace

std::string render_svg_string(const SvgAxes& axes, const std::vector<SvgSeries>& series) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool any = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw DomainError("svg: series x/y length mismatch");
        if (s.style == SvgSeries::Style::error_bars && s.yerr.size() != s.y.size())
            throw DomainError("svg: error_bars series needs matching yerr");
        for (size_t i = 0; i < s.x.size(); ++i) {
            const double e = s.style == SvgSeries::Style::error_bars ? s.yerr[i] : 0.0;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || !std::isfinite(e))
                throw DomainError("svg: non-finite data");
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = s.y[i] - e;
                ymax = s.y[i] + e;
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i] - e);
                ymax = std::max(ymax, s.y[i] + e);
            }
        }
    }
    if (axes.log_y && (!any || ymin <= 0))
        throw DomainError("svg: log-y axis requires positive y data");

    auto pad = [](Range r, double frac) {
        const double p = r.span() > 0 ? frac * r.span() : std::max(1.0, std::abs(r.lo)) * frac;
        return Range{r.lo - p, r.hi + p};
    };
    Range rx = pad({xmin, xmax}, 0.05);
    Range ry = axes.log_y ? pad({std::log10(ymin), std::log10(ymax)}, 0.05)
                          : pad({ymin, ymax}, 0.05);

    const double left = 70, right = 20, top = 36, bottom = 52;
    const double px0 = left, px1 = axes.width - right;
    const double py0 = top, py1 = axes.height - bottom;
    auto sx = [&](double x) { return px0 + (x - rx.lo) / rx.span() * (px1 - px0); };
    auto sy = [&](double y) {
        const double v = axes.log_y ? std::log10(y) : y;
        return py1 - (v - ry.lo) / ry.span() * (py1 - py0);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
        << fmt2(axes.width) << "\" height=\"" << fmt2(axes.height) << "\" viewBox=\"0 0 "
        << fmt2(axes.width) << " " << fmt2(axes.height) << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << fmt2(axes.width) << "\" height=\""
        << fmt2(axes.height) << "\" fill=\"#ffffff\"/>\n";

    // ticks and grid
    svg << "<g stroke=\"#d9d9d9\" stroke-width=\"1\">\n";
    std::vector<double> xticks, yticks;
    {
        const double step = nice_step(rx.span());
        for (double t = std::ceil(rx.lo / step) * step; t <= rx.hi + 1e-9 * step; t += step)
            xticks.push_back(t);
        if (axes.log_y) {
            for (double d = std::ceil(ry.lo); d <= std::floor(ry.hi) + 1e-9; d += 1.0)
                yticks.push_back(d); // decades, in log10 units
        } else {
            const double ystep = nice_step(ry.span());
            for (double t = std::ceil(ry.lo / ystep) * ystep; t <= ry.hi + 1e-9 * ystep;
                 t += ystep)
                yticks.push_back(t);
        }
        for (double t : xticks)
            svg << "<line x1=\"" << fmt2(sx(t)) << "\" y1=\"" << fmt2(py0) << "\" x2=\""
                << fmt2(sx(t)) << "\" y2=\"" << fmt2(py1) << "\"/>\n";
        for (double t : yticks) {
            const double yy = axes.log_y ? sy(std::pow(10.0, t)) : sy(t);
            svg << "<line x1=\"" << fmt2(px0) << "\" y1=\"" << fmt2(yy) << "\" x2=\""
                << fmt2(px1) << "\" y2=\"" << fmt2(yy) << "\"/>\n";
        }
    }
    svg << "</g>\n";

    svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">\n";
    for (double t : xticks)
        svg << "<text x=\"" << fmt2(sx(t)) << "\" y=\"" << fmt2(py1 + 18)
            << "\" text-anchor=\"middle\">" << fmt4(t) << "</text>\n";
    for (double t : yticks) {
        const double val = axes.log_y ? std::pow(10.0, t) : t;
        svg << "<text x=\"" << fmt2(px0 - 8) << "\" y=\"" << fmt2(sy(val) + 4)
            << "\" text-anchor=\"end\">" << fmt4(val) << "</text>\n";
    }
    svg << "<text x=\"" << fmt2(0.5 * (px0 + px1)) << "\" y=\"" << fmt2(axes.height - 14)
        << "\" text-anchor=\"middle\">" << escape_xml(axes.x_label) << "</text>\n";
    svg << "<text x=\"18\" y=\"" << fmt2(0.5 * (py0 + py1))
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << fmt2(0.5 * (py0 + py1)) << ")\">" << escape_xml(axes.y_label) << "</text>\n";
    svg << "<text x=\"" << fmt2(0.5 * (px0 + px1)) << "\" y=\"22\" text-anchor=\"middle\""
        << " font-size=\"14\">" << escape_xml(axes.title) << "</text>\n";
    svg << "</g>\n";

    svg << "<rect x=\"" << fmt2(px0) << "\" y=\"" << fmt2(py0) << "\" width=\""
        << fmt2(px1 - px0) << "\" height=\"" << fmt2(py1 - py0)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    size_t color_idx = 0;
    for (const auto& s : series) {
        const char* color = kPalette[color_idx++ % 6];
        if (s.style == SvgSeries::Style::line) {
            svg << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i)
                svg << (i ? " " : "") << fmt2(sx(s.x[i])) << "," << fmt2(sy(s.y[i]));
            svg << "\"/>\n";
        } else {
            svg << "<g stroke=\"" << color << "\" fill=\"" << color << "\">\n";
            for (size_t i = 0; i < s.x.size(); ++i) {
                const double cx = sx(s.x[i]);
                const double cy = sy(s.y[i]);
                if (s.style == SvgSeries::Style::error_bars && s.yerr[i] > 0) {
                    const double ylo = sy(axes.log_y
                                              ? std::max(s.y[i] - s.yerr[i], 1e-300)
                                              : s.y[i] - s.yerr[i]);
                    const double yhi = sy(s.y[i] + s.yerr[i]);
                    svg << "<line x1=\"" << fmt2(cx) << "\" y1=\"" << fmt2(ylo)
                        << "\" x2=\"" << fmt2(cx) << "\" y2=\"" << fmt2(yhi) << "\"/>\n";
                    for (double ye : {ylo, yhi})
                        svg << "<line x1=\"" << fmt2(cx - 3) << "\" y1=\"" << fmt2(ye)
                            << "\" x2=\"" << fmt2(cx + 3) << "\" y2=\"" << fmt2(ye)
                            << "\"/>\n";
                }
                svg << "<circle cx=\"" << fmt2(cx) << "\" cy=\"" << fmt2(cy)
                    << "\" r=\"2.5\"/>\n";
            }
            svg << "</g>\n";
        }
    }

    // legend, top-right corner of the plot area
    double ly = py0 + 16;
    color_idx = 0;
    for (const auto& s : series) {
        const char* color = kPalette[color_idx++ % 6];
        if (s.label.empty())
            continue;
        const double lx = px1 - 150;
        svg << "<line x1=\"" << fmt2(lx) << "\" y1=\"" << fmt2(ly - 4) << "\" x2=\""
            << fmt2(lx + 24) << "\" y2=\"" << fmt2(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << fmt2(lx + 30) << "\" y=\"" << fmt2(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222222\">"
            << escape_xml(s.label) << "</text>\n";
        ly += 16;
    }

    svg << "</svg>\n";
    return svg.str();
}

void render_svg(const std::string& path, const SvgAxes& axes,
                const std::vector<SvgSeries>& series) {
    const std::string doc = render_svg_string(axes, series);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << doc;
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

} // namespace nvep::io
