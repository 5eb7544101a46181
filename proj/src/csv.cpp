#include "nvep/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nvep::io {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* header_for(SeriesKind kind) {
    switch (kind) {
    case SeriesKind::linewidth_vs_T: return "T_K,linewidth_MHz,sigma_MHz";
    case SeriesKind::linewidth_vs_P: return "P_W,linewidth_MHz,sigma_MHz";
    case SeriesKind::contrast_vs_P: return "P_W,contrast,sigma";
    case SeriesKind::splitting_vs_T: return "T_K,splitting_MHz,sigma_MHz";
    case SeriesKind::zpl_vs_T: return "T_K,zpl_width_MHz,sigma_MHz";
    case SeriesKind::visibility_vs_T: return "T_K,visibility,sigma";
    }
    throw InvariantError("kind", "unknown series kind");
}

SeriesKind kind_from_header(const std::string& header) {
    for (SeriesKind k :
         {SeriesKind::linewidth_vs_T, SeriesKind::linewidth_vs_P, SeriesKind::contrast_vs_P,
          SeriesKind::splitting_vs_T, SeriesKind::zpl_vs_T, SeriesKind::visibility_vs_T})
        if (header == header_for(k))
            return k;
    throw InvariantError("header", "unrecognized CSV header '" + header + "'");
}

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, const std::string& path, size_t line_no) {
    const std::string c = strip(cell);
    double v = 0.0;
    const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
    if (res.ec != std::errc{} || res.ptr != c.data() + c.size() || !std::isfinite(v))
        throw InvariantError("cell", path + ":" + std::to_string(line_no) +
                                         ": cell '" + c + "' is not a finite decimal");
    return v;
}

void apply_condition(fit::Conditions& cond, const std::string& key,
                     const std::string& value, const std::string& path, size_t line_no) {
    if (key == "temperature_K")
        cond.temperature_k = parse_cell(value, path, line_no);
    else if (key == "rf_power_W")
        cond.rf_power_w = parse_cell(value, path, line_no);
    else if (key == "optical_power_W")
        cond.optical_power_w = parse_cell(value, path, line_no);
    else if (key == "sign_branch")
        cond.sign_branch = static_cast<int>(parse_cell(value, path, line_no));
    else
        throw InvariantError(key, path + ":" + std::to_string(line_no) +
                                      ": unknown condition key '" + key + "'");
}

} // namespace

DataSeries load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    DataSeries s;
    std::string line;
    size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = strip(line);
        if (t.empty())
            continue;
        if (t[0] == '#') {
            const std::string body = strip(t.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string::npos)
                continue; // free-form comment
            apply_condition(s.conditions, strip(body.substr(0, eq)),
                            strip(body.substr(eq + 1)), path, line_no);
            continue;
        }
        if (!have_header) {
            s.kind = kind_from_header(t);
            have_header = true;
            continue;
        }
        std::stringstream ss(t);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            row.push_back(parse_cell(cell, path, line_no));
        if (row.size() != 3)
            throw InvariantError("row", path + ":" + std::to_string(line_no) +
                                            ": expected 3 columns, got " +
                                            std::to_string(row.size()));
        s.x.push_back(row[0]);
        s.y.push_back(row[1]);
        s.sigma.push_back(row[2]);
    }
    if (!have_header)
        throw InvariantError("header", path + ": no header line found");
    if (s.x.empty())
        throw InvariantError("x", path + ": no data rows");

    size_t n_zero = 0;
    for (double v : s.sigma) {
        if (v == 0.0)
            ++n_zero;
        else if (!(v > 0))
            throw InvariantError("sigma", path + ": sigmas must be nonnegative");
    }
    if (n_zero == s.sigma.size()) {
        // no uncertainties supplied: unit weights, chi2 reported unscaled
        s.unit_weights = true;
        s.sigma.assign(s.sigma.size(), 1.0);
    } else if (n_zero > 0) {
        throw InvariantError("sigma",
                             path + ": mixed zero and positive sigmas are not supported");
    }
    s.validate();
    return s;
}

void save_series(const std::string& path, const DataSeries& s) {
    s.validate();
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    if (!std::isnan(s.conditions.temperature_k))
        out << "# temperature_K = " << fmt_g17(s.conditions.temperature_k) << "\n";
    if (!std::isnan(s.conditions.rf_power_w))
        out << "# rf_power_W = " << fmt_g17(s.conditions.rf_power_w) << "\n";
    if (!std::isnan(s.conditions.optical_power_w))
        out << "# optical_power_W = " << fmt_g17(s.conditions.optical_power_w) << "\n";
    if (s.kind == SeriesKind::visibility_vs_T)
        out << "# sign_branch = " << s.conditions.sign_branch << "\n";
    out << header_for(s.kind) << "\n";
    for (size_t i = 0; i < s.x.size(); ++i)
        out << fmt_g17(s.x[i]) << "," << fmt_g17(s.y[i]) << ","
            << fmt_g17(s.unit_weights ? 0.0 : s.sigma[i]) << "\n";
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& columns) {
    if (columns.empty())
        throw IoError("write_csv: no columns");
    const size_t n = columns[0].size();
    for (const auto& c : columns)
        if (c.size() != n)
            throw IoError("write_csv: column length mismatch");
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << header << "\n";
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < columns.size(); ++j)
            out << (j ? "," : "") << fmt_g17(columns[j][i]);
        out << "\n";
    }
    if (!out)
        throw IoError("failed writing '" + path + "'");
}

} // namespace nvep::io
