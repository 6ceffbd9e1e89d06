#pragma once

#include "rydmed/scenario.hpp"

#include "json.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rydmed {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChainOptions {
    int n = 8;
    std::string boundary = "open";  // open | periodic
    double prune = 1e-4;            // relative to |J1|
    std::string source = "scenario";  // scenario | model
    // model mode: uniform couplings by distance p = 1, 2, ...
    std::vector<double> J_perp_hz, J_zz_hz;
    double b_z_hz = 0.0;
    double E_spin_hz = 0.0;
    bool correlations = false;
};

struct RunConfig {
    bool has_scenario = false;
    Scenario scenario;
    std::string lattice_atom = "Rb";
    std::vector<double> sweep_kappa0;  // pi/L_at
    bool has_chain = false;
    ChainOptions chain;
    std::string output_dir = "out";
    std::string constants;  // empty: default constants file
    nlohmann::json source;   // document as read
};

// Strict parse: every key is known, every physical quantity carries a unit.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

// Scenario written back in the config schema with SI units, so a sidecar can be re-run.
nlohmann::json scenario_to_json(const Scenario& sc);
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace rydmed
