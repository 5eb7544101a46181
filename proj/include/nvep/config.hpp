#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "nvep/observables.hpp"

namespace nvep::io {

// JSON config parse failure with position information for diagnostics.
class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& msg, size_t line, size_t column)
        : Error(msg), line_(line), column_(column) {}
    size_t line() const { return line_; }
    size_t column() const { return column_; }

private:
    size_t line_, column_;
};

struct McConfig {
    int n_trajectories = 20000;
    int n_time_samples = 16384;
    std::uint64_t seed = 20260816;
    double t_total_factor = 10.0;
    int n_workers = 0;
    int n_bootstrap = 50;

    void validate() const {
        if (n_trajectories < 1)
            throw InvariantError("n_trajectories", "n_trajectories must be >= 1");
        if (n_time_samples < 2 || (n_time_samples & (n_time_samples - 1)) != 0)
            throw InvariantError("n_time_samples",
                                 "n_time_samples must be a power of two >= 2");
        if (!(t_total_factor > 0))
            throw InvariantError("t_total_factor", "t_total_factor must be positive");
        if (n_workers < 0)
            throw InvariantError("n_workers", "n_workers must be nonnegative");
        if (n_bootstrap < 0)
            throw InvariantError("n_bootstrap", "n_bootstrap must be nonnegative");
    }
};

struct RunConfig {
    core::UnitConstants constants;
    core::SpinParams spin;
    phonon::EPhononParams e_phonon;
    phonon::APhononParams a_phonon;
    obs::OpticalRates optical;
    obs::ODMRModelParams odmr;
    obs::VisibilityParams vis;
    phonon::QuadratureSpec quadrature;
    McConfig mc;
    std::string output_dir = "out";

    void validate() const {
        constants.validate();
        spin.validate();
        e_phonon.validate(constants);
        a_phonon.validate(constants);
        optical.validate();
        odmr.validate();
        vis.validate();
        quadrature.validate();
        mc.validate();
    }
};

// Parses a config object; defaults fill omitted sections, unknown keys are
// rejected with InvariantError naming the key path.
RunConfig config_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const RunConfig& c);

// Reads and parses a JSON config file. Throws ConfigParseError (with line and
// column) for malformed JSON, InvariantError for invalid content, IoError for
// unreadable files.
RunConfig load_config(const std::string& path);

} // namespace nvep::io
