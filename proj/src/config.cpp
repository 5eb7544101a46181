#include "nvep/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace nvep::io {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> known) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok) {
            const std::string path =
                section.empty() ? item.key() : section + "." + item.key();
            throw InvariantError(path, "unknown configuration key '" + path + "'");
        }
    }
}

double num(const json& j, const char* key, double fallback, const std::string& section) {
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_number())
        throw InvariantError(section + "." + key,
                             std::string("'") + key + "' must be a number");
    return v.get<double>();
}

int integer(const json& j, const char* key, int fallback, const std::string& section) {
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (!v.is_number_integer())
        throw InvariantError(section + "." + key,
                             std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

} // namespace

RunConfig config_from_json(const json& j) {
    if (!j.is_object())
        throw InvariantError("config", "config root must be a JSON object");
    check_keys(j, "",
               {"constants", "spin", "e_phonon", "a_phonon", "optical", "odmr",
                "visibility", "quadrature", "mc", "output_dir"});

    RunConfig c;
    if (j.contains("constants")) {
        const auto& s = j.at("constants");
        check_keys(s, "constants",
                   {"h_planck_ev_s", "k_boltzmann_ev_per_k", "debye_energy_reference_mev"});
        c.constants.h_planck_ev_s =
            num(s, "h_planck_ev_s", c.constants.h_planck_ev_s, "constants");
        c.constants.k_boltzmann_ev_per_k =
            num(s, "k_boltzmann_ev_per_k", c.constants.k_boltzmann_ev_per_k, "constants");
        c.constants.debye_energy_reference_mev = num(
            s, "debye_energy_reference_mev", c.constants.debye_energy_reference_mev,
            "constants");
    }
    if (j.contains("spin")) {
        const auto& s = j.at("spin");
        check_keys(s, "spin",
                   {"d_parallel_mhz", "d_perp_mhz", "a_hyperfine_mhz", "xi_perp_mev"});
        c.spin.d_parallel_mhz = num(s, "d_parallel_mhz", c.spin.d_parallel_mhz, "spin");
        c.spin.d_perp_mhz = num(s, "d_perp_mhz", c.spin.d_perp_mhz, "spin");
        c.spin.a_hyperfine_mhz = num(s, "a_hyperfine_mhz", c.spin.a_hyperfine_mhz, "spin");
        c.spin.xi_perp_mev = num(s, "xi_perp_mev", c.spin.xi_perp_mev, "spin");
    }
    if (j.contains("e_phonon")) {
        const auto& s = j.at("e_phonon");
        check_keys(s, "e_phonon", {"b_e_hz_per_k5", "omega_e_mev"});
        c.e_phonon.b_e_hz_per_k5 =
            num(s, "b_e_hz_per_k5", c.e_phonon.b_e_hz_per_k5, "e_phonon");
        c.e_phonon.omega_e_mev = num(s, "omega_e_mev", c.e_phonon.omega_e_mev, "e_phonon");
    }
    if (j.contains("a_phonon")) {
        const auto& s = j.at("a_phonon");
        check_keys(s, "a_phonon", {"b_a_hz_per_k7", "omega_a_mev"});
        c.a_phonon.b_a_hz_per_k7 =
            num(s, "b_a_hz_per_k7", c.a_phonon.b_a_hz_per_k7, "a_phonon");
        c.a_phonon.omega_a_mev = num(s, "omega_a_mev", c.a_phonon.omega_a_mev, "a_phonon");
    }
    if (j.contains("optical")) {
        const auto& s = j.at("optical");
        check_keys(s, "optical", {"k_rad_mhz", "k_isc_mhz", "gamma0_mhz"});
        c.optical.k_rad_mhz = num(s, "k_rad_mhz", c.optical.k_rad_mhz, "optical");
        c.optical.k_isc_mhz = num(s, "k_isc_mhz", c.optical.k_isc_mhz, "optical");
        c.optical.gamma0_mhz = num(s, "gamma0_mhz", c.optical.gamma0_mhz, "optical");
    }
    if (j.contains("odmr")) {
        const auto& s = j.at("odmr");
        check_keys(s, "odmr", {"gamma_inh_mhz", "c_max", "kappa_mhz2_per_w", "gamma1_mhz"});
        c.odmr.gamma_inh_mhz = num(s, "gamma_inh_mhz", c.odmr.gamma_inh_mhz, "odmr");
        c.odmr.c_max = num(s, "c_max", c.odmr.c_max, "odmr");
        c.odmr.kappa_mhz2_per_w = num(s, "kappa_mhz2_per_w", c.odmr.kappa_mhz2_per_w, "odmr");
        c.odmr.gamma1_mhz = num(s, "gamma1_mhz", c.odmr.gamma1_mhz, "odmr");
    }
    if (j.contains("visibility")) {
        const auto& s = j.at("visibility");
        check_keys(s, "visibility", {"a_branching", "r_rate_mhz", "sign_branch"});
        c.vis.a_branching = num(s, "a_branching", c.vis.a_branching, "visibility");
        c.vis.r_rate_mhz = num(s, "r_rate_mhz", c.vis.r_rate_mhz, "visibility");
        c.vis.sign_branch = integer(s, "sign_branch", c.vis.sign_branch, "visibility");
    }
    if (j.contains("quadrature")) {
        const auto& s = j.at("quadrature");
        check_keys(s, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
        c.quadrature.rel_tol = num(s, "rel_tol", c.quadrature.rel_tol, "quadrature");
        c.quadrature.abs_tol = num(s, "abs_tol", c.quadrature.abs_tol, "quadrature");
        c.quadrature.max_subdivisions =
            integer(s, "max_subdivisions", c.quadrature.max_subdivisions, "quadrature");
    }
    if (j.contains("mc")) {
        const auto& s = j.at("mc");
        check_keys(s, "mc",
                   {"n_trajectories", "n_time_samples", "seed", "t_total_factor",
                    "n_workers", "n_bootstrap"});
        c.mc.n_trajectories = integer(s, "n_trajectories", c.mc.n_trajectories, "mc");
        c.mc.n_time_samples = integer(s, "n_time_samples", c.mc.n_time_samples, "mc");
        if (s.contains("seed")) {
            const auto& v = s.at("seed");
            if (!v.is_number_integer())
                throw InvariantError("mc.seed", "'seed' must be an integer");
            c.mc.seed = v.get<std::uint64_t>();
        }
        c.mc.t_total_factor = num(s, "t_total_factor", c.mc.t_total_factor, "mc");
        c.mc.n_workers = integer(s, "n_workers", c.mc.n_workers, "mc");
        c.mc.n_bootstrap = integer(s, "n_bootstrap", c.mc.n_bootstrap, "mc");
    }
    if (j.contains("output_dir")) {
        const auto& v = j.at("output_dir");
        if (!v.is_string())
            throw InvariantError("output_dir", "'output_dir' must be a string");
        c.output_dir = v.get<std::string>();
    }

    c.validate();
    return c;
}

json config_to_json(const RunConfig& c) {
    json j;
    j["constants"] = {{"h_planck_ev_s", c.constants.h_planck_ev_s},
                      {"k_boltzmann_ev_per_k", c.constants.k_boltzmann_ev_per_k},
                      {"debye_energy_reference_mev", c.constants.debye_energy_reference_mev}};
    j["spin"] = {{"d_parallel_mhz", c.spin.d_parallel_mhz},
                 {"d_perp_mhz", c.spin.d_perp_mhz},
                 {"a_hyperfine_mhz", c.spin.a_hyperfine_mhz},
                 {"xi_perp_mev", c.spin.xi_perp_mev}};
    j["e_phonon"] = {{"b_e_hz_per_k5", c.e_phonon.b_e_hz_per_k5},
                     {"omega_e_mev", c.e_phonon.omega_e_mev}};
    j["a_phonon"] = {{"b_a_hz_per_k7", c.a_phonon.b_a_hz_per_k7},
                     {"omega_a_mev", c.a_phonon.omega_a_mev}};
    j["optical"] = {{"k_rad_mhz", c.optical.k_rad_mhz},
                    {"k_isc_mhz", c.optical.k_isc_mhz},
                    {"gamma0_mhz", c.optical.gamma0_mhz}};
    j["odmr"] = {{"gamma_inh_mhz", c.odmr.gamma_inh_mhz},
                 {"c_max", c.odmr.c_max},
                 {"kappa_mhz2_per_w", c.odmr.kappa_mhz2_per_w}};
    if (c.odmr.gamma1_mhz >= 0)
        j["odmr"]["gamma1_mhz"] = c.odmr.gamma1_mhz;
    j["visibility"] = {{"a_branching", c.vis.a_branching},
                       {"r_rate_mhz", c.vis.r_rate_mhz},
                       {"sign_branch", c.vis.sign_branch}};
    j["quadrature"] = {{"rel_tol", c.quadrature.rel_tol},
                       {"abs_tol", c.quadrature.abs_tol},
                       {"max_subdivisions", c.quadrature.max_subdivisions}};
    j["mc"] = {{"n_trajectories", c.mc.n_trajectories},
               {"n_time_samples", c.mc.n_time_samples},
               {"seed", c.mc.seed},
               {"t_total_factor", c.mc.t_total_factor},
               {"n_workers", c.mc.n_workers},
               {"n_bootstrap", c.mc.n_bootstrap}};
    j["output_dir"] = c.output_dir;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1, col = 1;
        const size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
        for (size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigParseError("JSON parse error in '" + path + "' at line " +
                                   std::to_string(line) + ", column " +
                                   std::to_string(col) + ": " + e.what(),
                               line, col);
    }
    return config_from_json(j);
}

} // namespace nvep::io
