#pragma once

#include "rydmed/scenario.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace rydmed {

// shortest round-trip representation
std::string fmt_double(double v);

// columns i,m,J_perp_Hz,J_zz_Hz with indices relative to the centre spin
void write_couplings_csv(std::ostream& os, const CouplingTable& t, bool all_rows);
// columns i,b_z_Hz for every computed row
void write_bfield_csv(std::ostream& os, const CouplingTable& t);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Provenance record written next to every output file.  No timestamp when deterministic.
nlohmann::json make_provenance(const std::string& command, const nlohmann::json& config, const nlohmann::json& extra,
                               bool deterministic);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rydmed
