#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rydmed/species.hpp"
#include "rydmed/units.hpp"

#include <cmath>
#include <stdexcept>

using namespace rydmed;

namespace {

const SpeciesRegistry& reg()
{
    static SpeciesRegistry r = SpeciesRegistry::load_default();
    return r;
}

RydbergLevel lvl(int n, int l, double j) { return {n, l, j, 0.5}; }

double defect_mhz(const std::string& mol, const std::string& atom, int n, double j)
{
    const auto& d = reg().atom(atom).defects;
    const double spin = rotational_energy(reg().molecule(mol), 1) - rotational_energy(reg().molecule(mol), 0);
    return forster_defect(spin, lvl(n, 1, j), lvl(n, 0, 0.5), d) * 1e-6;
}

}  // namespace

TEST_CASE("hydrogen ground state is -1/2 hartree")
{
    const auto& h = reg().atom("H").defects;
    CHECK(rydberg_energy(lvl(1, 0, 0.5), h) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(rydberg_energy(lvl(2, 1, 1.5), h) == doctest::Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("Rb 65s energy against an extended-precision evaluation")
{
    const auto& rb = reg().atom("Rb").defects;
    const long double ns = 65.0L - static_cast<long double>(rb.mu(0, 0.5));
    const long double ref = -0.5L / (ns * ns);
    CHECK(std::abs(rydberg_energy(lvl(65, 0, 0.5), rb) - static_cast<double>(ref)) < 1e-18);
    CHECK(effective_n(lvl(65, 0, 0.5), rb) == doctest::Approx(static_cast<double>(ns)).epsilon(1e-15));
}

TEST_CASE("Rb 65s - 65p1/2 transition frequency")
{
    const auto& rb = reg().atom("Rb").defects;
    const double f = rydberg_energy_hz(lvl(65, 1, 0.5), rb) - rydberg_energy_hz(lvl(65, 0, 0.5), rb);
    CHECK(std::abs(f - 13.082e9) < 1e6);
}

TEST_CASE("rotational splitting")
{
    const auto& lics = reg().molecule("LiCs");
    const double two_b = rotational_energy(lics, 1) - rotational_energy(lics, 0);
    CHECK(std::abs(two_b - 13.071e9) < 5e6);
    CHECK(rotational_energy(lics, 2) - rotational_energy(lics, 1) == doctest::Approx(2.0 * two_b).epsilon(1e-14));
    CHECK(rotational_energy(lics, 2) == doctest::Approx(3.0 * two_b).epsilon(1e-14));
}

TEST_CASE("Forster defects")
{
    CHECK(std::abs(defect_mhz("LiCs", "Rb", 65, 0.5) - 11.0) < 2.0);
    SUBCASE("Rb rows of the molecule table")
    {
        CHECK(std::abs(defect_mhz("LiRb", "Rb", 62, 0.5) - (-52.0)) < 5.0);
        CHECK(std::abs(defect_mhz("LiNa", "Rb", 53, 1.5) - 111.0) < 5.0);
        CHECK(std::abs(defect_mhz("LiK", "Rb", 59, 0.5) - 176.0) < 5.0);
    }
    SUBCASE("Na row")
    {
        CHECK(std::abs(defect_mhz("LiCs", "Na", 64, 1.5) - (-26.4)) < 5.0);
    }
    SUBCASE("definition")
    {
        const auto& rb = reg().atom("Rb").defects;
        const double e = forster_defect(1e9, lvl(40, 1, 1.5), lvl(41, 0, 0.5), rb);
        CHECK(e == doctest::Approx(rydberg_energy_hz(lvl(40, 1, 1.5), rb) - rydberg_energy_hz(lvl(41, 0, 0.5), rb) - 1e9));
    }
}

TEST_CASE("3j symbols against tabulated values")
{
    CHECK(wigner3j(1, 1, 0, 0, 0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)));
    CHECK(wigner3j(1, 1, 2, 0, 0, 0) == doctest::Approx(std::sqrt(2.0 / 15.0)));
    CHECK(wigner3j(1, 1, 1, 1, -1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(wigner3j(0.5, 0.5, 1, 0.5, -0.5, 0) == doctest::Approx(1.0 / std::sqrt(6.0)));
    CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);
    CHECK(wigner3j(1, 1, 3, 0, 0, 0) == 0.0);
}

TEST_CASE("rotor dipole elements")
{
    const auto& m = reg().molecule("LiCs");
    const double d = m.d_au;
    CHECK(d == doctest::Approx(5.39 * units::debye_au).epsilon(1e-12));
    CHECK(std::abs(rotational_dipole_element(m, {0, 0}, {1, 0}, 0)) == doctest::Approx(d / std::sqrt(3.0)).epsilon(1e-13));

    SUBCASE("closed form for Delta J = +1, q = 0")
    {
        for (int J = 0; J < 5; ++J)
            for (int mj = -J; mj <= J; ++mj) {
                const double ref = d * std::sqrt(((J + 1.0) * (J + 1.0) - mj * mj) / ((2.0 * J + 1.0) * (2.0 * J + 3.0)));
                CHECK(std::abs(rotational_dipole_element(m, {J, mj}, {J + 1, mj}, 0)) == doctest::Approx(ref).epsilon(1e-12));
            }
    }
    SUBCASE("sum rule")
    {
        for (int J = 0; J < 4; ++J) {
            double s = 0.0;
            for (int Jp : {J - 1, J + 1}) {
                if (Jp < 0) continue;
                for (int mp = -Jp; mp <= Jp; ++mp)
                    for (int q = -1; q <= 1; ++q) {
                        const double v = rotational_dipole_element(m, {J, 0}, {Jp, mp}, q);
                        s += v * v;
                    }
            }
            CHECK(s == doctest::Approx(d * d).epsilon(1e-12));
        }
    }
    SUBCASE("selection rules")
    {
        CHECK(rotational_dipole_element(m, {0, 0}, {0, 0}, 0) == 0.0);
        CHECK(rotational_dipole_element(m, {0, 0}, {2, 0}, 0) == 0.0);
        CHECK(rotational_dipole_element(m, {0, 0}, {1, 1}, 0) == 0.0);
        CHECK(rotational_dipole_element(m, {1, 0}, {2, 0}, 1) == 0.0);
    }
}

TEST_CASE("invalid input is rejected")
{
    const auto& rb = reg().atom("Rb").defects;
    CHECK_THROWS_AS(rydberg_energy(lvl(3, 3, 3.5), rb), std::invalid_argument);
    CHECK_THROWS_AS(rydberg_energy(lvl(10, 1, 2.5), rb), std::invalid_argument);
    CHECK_THROWS_AS(lvl(10, 12, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS(rb.channel(7, 7.5));
    CHECK_THROWS(reg().atom("Xe"));
    CHECK_THROWS(reg().molecule("NaK"));
    CHECK_THROWS(SpeciesRegistry::load("/nonexistent/constants.json"));
}
