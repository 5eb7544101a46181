#pragma once

#include <string>
#include <vector>

#include "nvep/fitting.hpp"

namespace nvep::io {

using fit::DataSeries;
using fit::SeriesKind;

// Full round-trip precision for CSV/JSON artifacts.
std::string fmt_g17(double v);

// Mandated header per series kind; files must match it exactly.
const char* header_for(SeriesKind kind);

// Inverse lookup; throws InvariantError("header") for an unknown header.
SeriesKind kind_from_header(const std::string& header);

// Reads one data series: '#' condition comments, exact header, finite decimal
// cells. An all-zero sigma column selects unit weights (sigma = 1, flagged);
// mixed zero and positive sigmas are rejected.
DataSeries load_series(const std::string& path);

// Writes a series in the same format, conditions first, values at %.17g.
void save_series(const std::string& path, const DataSeries& s);

// Generic numeric CSV with one header line; columns must have equal lengths.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& columns);

} // namespace nvep::io
