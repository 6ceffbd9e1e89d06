#pragma once

#include "rydmed/config.hpp"
#include "rydmed/species.hpp"

#include <cstdlib>
#include <string>

namespace testing_support {

inline std::string source_dir()
{
    if (const char* s = std::getenv("RYDMED_SOURCE")) return s;
    return RYDMED_SOURCE_DIR;
}

inline std::string config_path(const std::string& name) { return source_dir() + "/configs/" + name; }

inline const rydmed::SpeciesRegistry& registry()
{
    static rydmed::SpeciesRegistry r = rydmed::SpeciesRegistry::load_default();
    return r;
}

// scenario of a shipped config, shrunk to n spins on an n-cell ring
inline rydmed::Scenario small_scenario(const std::string& name, int n)
{
    auto cfg = rydmed::load_config(config_path(name));
    auto sc = cfg.scenario;
    sc.geometry.n_spins = n;
    sc.geometry.n_atoms = n;
    sc.n_cells = n;
    sc.engine.convergence_cap = 0;
    return sc;
}

}  // namespace testing_support
