#include "rydmed/units.hpp"

#include <stdexcept>

namespace rydmed::units {

double recoil_hz(double period_m, double mass_kg)
{
    const double k = pi / period_m;
    return hbar * hbar * k * k / (2.0 * mass_kg) / planck;
}

double length_to_m(double v, const std::string& unit)
{
    if (unit == "m") return v;
    if (unit == "um") return v * 1e-6;
    if (unit == "nm") return v * 1e-9;
    if (unit == "a0") return v * bohr_m;
    throw std::invalid_argument("unknown length unit '" + unit + "'");
}

double frequency_to_hz(double v, const std::string& unit)
{
    if (unit == "Hz") return v;
    if (unit == "kHz") return v * 1e3;
    if (unit == "MHz") return v * 1e6;
    if (unit == "GHz") return v * 1e9;
    if (unit == "cm^-1") return v * inv_cm_hz;
    if (unit == "Eh") return v * hartree_hz;
    throw std::invalid_argument("unknown frequency unit '" + unit + "'");
}

double mass_to_kg(double v, const std::string& unit)
{
    if (unit == "kg") return v;
    if (unit == "amu") return v * amu_kg;
    throw std::invalid_argument("unknown mass unit '" + unit + "'");
}

double dipole_to_au(double v, const std::string& unit)
{
    if (unit == "D") return v * debye_au;
    if (unit == "ea0" || unit == "au") return v;
    throw std::invalid_argument("unknown dipole unit '" + unit + "'");
}

}  // namespace rydmed::units
