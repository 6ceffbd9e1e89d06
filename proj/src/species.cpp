#include "rydmed/species.hpp"

#include "rydmed/units.hpp"

#include <gsl/gsl_sf_coupling.h>
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace rydmed {

namespace {

int twice(double x) { return static_cast<int>(std::lround(2.0 * x)); }

double quantity(const nlohmann::json& q, const char* what)
{
    if (!q.is_object() || !q.contains("value") || !q.contains("unit"))
        throw std::runtime_error(std::string("constants: '") + what + "' needs value and unit");
    return q.at("value").get<double>();
}

}  // namespace

void RydbergLevel::validate() const
{
    if (n < 1) throw std::invalid_argument("RydbergLevel: n must be >= 1");
    if (l < 0 || l >= n) throw std::invalid_argument("RydbergLevel: need 0 <= l < n");
    const int j2 = twice(j), mj2 = twice(mj);
    if (j2 < std::abs(2 * l - 1) || j2 > 2 * l + 1 || (j2 % 2) == 0)
        throw std::invalid_argument("RydbergLevel: j incompatible with l");
    if (std::abs(mj2) > j2 || (mj2 % 2) == 0) throw std::invalid_argument("RydbergLevel: |m_j| > j");
}

void QuantumDefectTable::set(int l, double j, DefectChannel ch)
{
    if (ch.mu < 0.0) throw std::invalid_argument("quantum defect must be non-negative");
    ch_[{l, twice(j)}] = std::move(ch);
}

bool QuantumDefectTable::has(int l, double j) const { return ch_.count({l, twice(j)}) != 0; }

const DefectChannel& QuantumDefectTable::channel(int l, double j) const
{
    auto it = ch_.find({l, twice(j)});
    if (it == ch_.end())
        throw std::out_of_range("no quantum defect for " + species_ + " l=" + std::to_string(l) +
                                " 2j=" + std::to_string(twice(j)));
    return it->second;
}

std::string SpeciesRegistry::default_path()
{
    if (const char* env = std::getenv("RYDMED_CONSTANTS")) return env;
    return std::string(RYDMED_DATA_DIR) + "/constants.json";
}

SpeciesRegistry SpeciesRegistry::load_default() { return load(default_path()); }

SpeciesRegistry SpeciesRegistry::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file " + path);
    nlohmann::json doc = nlohmann::json::parse(in);

    SpeciesRegistry reg;
    reg.path_ = path;
    reg.version_ = doc.value("version", "unversioned");

    for (auto& [name, a] : doc.at("atoms").items()) {
        AtomSpec spec;
        spec.label = name;
        const auto& m = a.at("mass");
        spec.mass_kg = units::mass_to_kg(quantity(m, "mass"), m.at("unit").get<std::string>());
        spec.defects = QuantumDefectTable(name);
        for (const auto& c : a.at("channels")) {
            DefectChannel ch;
            ch.mu = c.at("mu").get<double>();
            ch.source = c.value("source", "");
            if (c.contains("ritz")) ch.ritz = c.at("ritz").get<std::vector<double>>();
            if (c.contains("n_range")) {
                auto r = c.at("n_range").get<std::vector<int>>();
                if (r.size() == 2) ch.n_range = std::make_pair(r[0], r[1]);
            }
            spec.defects.set(c.at("l").get<int>(), c.at("j").get<double>(), std::move(ch));
        }
        reg.atoms_[name] = std::move(spec);
    }
    for (auto& [name, m] : doc.at("molecules").items()) {
        MoleculeSpec spec;
        spec.label = name;
        const auto& B = m.at("B");
        const auto& d = m.at("d");
        spec.B_hz = units::frequency_to_hz(quantity(B, "B"), B.at("unit").get<std::string>());
        spec.d_au = units::dipole_to_au(quantity(d, "d"), d.at("unit").get<std::string>());
        spec.d_debye = spec.d_au / units::debye_au;
        if (spec.B_hz <= 0.0 || spec.d_au <= 0.0)
            throw std::runtime_error("molecule " + name + ": B and d must be positive");
        reg.molecules_[name] = spec;
    }
    return reg;
}

const AtomSpec& SpeciesRegistry::atom(const std::string& label) const
{
    auto it = atoms_.find(label);
    if (it == atoms_.end()) throw std::out_of_range("unknown atom species '" + label + "'");
    return it->second;
}

const MoleculeSpec& SpeciesRegistry::molecule(const std::string& label) const
{
    auto it = molecules_.find(label);
    if (it == molecules_.end()) throw std::out_of_range("unknown molecule '" + label + "'");
    return it->second;
}

double effective_n(const RydbergLevel& level, const QuantumDefectTable& defects)
{
    level.validate();
    const double ns = level.n - defects.mu(level.l, level.j);
    if (ns <= 0.0) throw std::domain_error("non-positive effective quantum number");
    return ns;
}

double rydberg_energy(const RydbergLevel& level, const QuantumDefectTable& defects)
{
    const double ns = effective_n(level, defects);
    return -0.5 / (ns * ns);
}

double rydberg_energy_hz(const RydbergLevel& level, const QuantumDefectTable& defects)
{
    return units::au_to_hz(rydberg_energy(level, defects));
}

double rotational_energy(const MoleculeSpec& spec, int J)
{
    if (J < 0) throw std::invalid_argument("J must be non-negative");
    return spec.B_hz * J * (J + 1);
}

double forster_defect(double spin_transition_hz, const RydbergLevel& upper, const RydbergLevel& lower,
                      const QuantumDefectTable& defects)
{
    // difference taken in a.u. first to keep the two large energies from cancelling in Hz
    const double gap = rydberg_energy(upper, defects) - rydberg_energy(lower, defects);
    return units::au_to_hz(gap) - spin_transition_hz;
}

double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3)
{
    return gsl_sf_coupling_3j(twice(j1), twice(j2), twice(j3), twice(m1), twice(m2), twice(m3));
}

double rotational_dipole_element(const MoleculeSpec& spec, const RotationalState& from,
                                 const RotationalState& to, int q)
{
    if (std::abs(from.mJ) > from.J || std::abs(to.mJ) > to.J) throw std::invalid_argument("|m_J| > J");
    if (std::abs(to.J - from.J) != 1 || to.mJ - from.mJ != q) return 0.0;
    const double phase = (to.mJ % 2 == 0) ? 1.0 : -1.0;
    const double a = wigner3j(to.J, 1, from.J, -to.mJ, q, from.mJ);
    const double b = wigner3j(to.J, 1, from.J, 0, 0, 0);
    return spec.d_au * phase * std::sqrt((2.0 * from.J + 1) * (2.0 * to.J + 1)) * a * b;
}

}  // namespace rydmed
