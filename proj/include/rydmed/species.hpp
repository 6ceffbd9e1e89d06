#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rydmed {

struct RydbergLevel {
    int n = 1;
    int l = 0;
    double j = 0.5;
    double mj = 0.5;

    void validate() const;  // throws std::invalid_argument
};

struct RotationalState {
    int J = 0;
    int mJ = 0;
};

struct DefectChannel {
    double mu = 0.0;
    std::vector<double> ritz;  // reserved; not applied
    std::string source;
    std::optional<std::pair<int, int>> n_range;
};

class QuantumDefectTable {
public:
    QuantumDefectTable() = default;
    explicit QuantumDefectTable(std::string species) : species_(std::move(species)) {}

    void set(int l, double j, DefectChannel ch);
    bool has(int l, double j) const;
    const DefectChannel& channel(int l, double j) const;  // throws if missing
    double mu(int l, double j) const { return channel(l, j).mu; }
    const std::string& species() const { return species_; }

private:
    std::string species_;
    std::map<std::pair<int, int>, DefectChannel> ch_;  // key (l, 2j)
};

struct MoleculeSpec {
    std::string label;
    double B_hz = 0.0;
    double d_debye = 0.0;
    double d_au = 0.0;
};

struct AtomSpec {
    std::string label;
    double mass_kg = 0.0;
    QuantumDefectTable defects;
};

// Registry loaded from the constants document (data/constants.json).
class SpeciesRegistry {
public:
    static SpeciesRegistry load(const std::string& path);
    static SpeciesRegistry load_default();
    static std::string default_path();

    const AtomSpec& atom(const std::string& label) const;
    const MoleculeSpec& molecule(const std::string& label) const;
    const std::string& version() const { return version_; }
    const std::string& path() const { return path_; }

private:
    std::map<std::string, AtomSpec> atoms_;
    std::map<std::string, MoleculeSpec> molecules_;
    std::string version_;
    std::string path_;
};

double effective_n(const RydbergLevel& level, const QuantumDefectTable& defects);

// -1/(2 n*^2) in atomic units.
double rydberg_energy(const RydbergLevel& level, const QuantumDefectTable& defects);
double rydberg_energy_hz(const RydbergLevel& level, const QuantumDefectTable& defects);

// B J(J+1) in Hz.
double rotational_energy(const MoleculeSpec& spec, int J);

// E_upper - E_lower - E_spin, Hz.
double forster_defect(double spin_transition_hz, const RydbergLevel& upper, const RydbergLevel& lower,
                      const QuantumDefectTable& defects);

// <to| d_q |from> for a rigid rotor, atomic units. q in {-1, 0, +1}.
double rotational_dipole_element(const MoleculeSpec& spec, const RotationalState& from,
                                 const RotationalState& to, int q);

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

}  // namespace rydmed
