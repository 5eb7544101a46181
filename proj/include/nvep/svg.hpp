#pragma once

#include <string>
#include <vector>

#include "nvep/errors.hpp"

namespace nvep::io {

struct SvgAxes {
    double width = 720.0;
    double height = 480.0;
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
};

struct SvgSeries {
    enum class Style { line, points, error_bars };
    Style style = Style::line;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr; // used by error_bars
    std::string label;        // legend entry; empty = not listed
};

// Standalone SVG 1.1 document: axes with 1/2/5 tick steps (decade ticks in
// log-y mode), legend, error bars. Byte-deterministic for identical input.
std::string render_svg_string(const SvgAxes& axes, const std::vector<SvgSeries>& series);

void render_svg(const std::string& path, const SvgAxes& axes,
                const std::vector<SvgSeries>& series);

} // namespace nvep::io
