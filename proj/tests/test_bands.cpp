#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "rydmed/bands.hpp"
#include "rydmed/species.hpp"
#include "rydmed/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

using namespace rydmed;

namespace {

LatticeSpec lattice(double V0, int N = 100)
{
    LatticeSpec s;
    s.V0_erec = V0;
    s.n_cells = N;
    s.period_m = 500e-9;
    s.mass_kg = SpeciesRegistry::load_default().atom("Rb").mass_kg;
    return s;
}

double free_energy(int kappa, int N, int band, int smax)
{
    std::vector<double> e;
    for (int s = -smax; s <= smax; ++s) {
        const double q = static_cast<double>(kappa) / N + s;
        e.push_back(4.0 * q * q);
    }
    std::sort(e.begin(), e.end());
    return e[band - 1];
}

}  // namespace

TEST_CASE("free particle folds the parabola")
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto b = solve_bands(lattice(0.0), 10, 8);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    double worst = 0.0;
    for (int k = -50; k < 50; ++k)
        for (int nu = 1; nu <= 8; ++nu) worst = std::max(worst, std::abs(b.energy(k, nu) - free_energy(k, 100, nu, 10)));
    CHECK(worst < 1e-12);
}

TEST_CASE("recoil energy of Rb at 500 nm")
{
    const auto s = lattice(-1.0);
    const double ref = units::hbar * std::pow(units::pi / 500e-9, 2) / (2.0 * s.mass_kg) / (2.0 * units::pi);
    CHECK(s.recoil_hz() == doctest::Approx(ref).epsilon(1e-12));
    CHECK(s.recoil_hz() == doctest::Approx(2295.7).epsilon(1e-3));
}

TEST_CASE("shallow lattice against real-space shooting")
{
    const int N = 100;
    const auto b = solve_bands(lattice(-1.0, N), 10, 6);
    const oracle::BlochOracle orc(-1.0);
    double worst = 0.0;
    for (int k = 1; k < N / 2; ++k) {
        const auto ref = orc.energies(k, N, 6);
        REQUIRE(ref.size() == 6);
        for (int nu = 1; nu <= 6; ++nu) worst = std::max(worst, std::abs(b.energy(k, nu) - ref[nu - 1]));
    }
    // zone centre and edge: only the lowest band is free of near-degeneracies
    worst = std::max(worst, std::abs(b.energy(0, 1) - orc.energies(0, N, 1)[0]));
    worst = std::max(worst, std::abs(b.energy(-N / 2, 1) - orc.energies(N / 2, N, 1)[0]));
    CHECK(worst < 1e-6);
}

TEST_CASE("band structure symmetries")
{
    const int N = 100;
    const auto b = solve_bands(lattice(-1.0, N), 10, 6);
    for (int k = 1; k < N / 2; ++k)
        for (int nu = 1; nu <= 6; ++nu) CHECK(b.energy(k, nu) == doctest::Approx(b.energy(-k, nu)).epsilon(1e-12));
    for (int k = 0; k < N / 2 - 1; ++k) CHECK(b.energy(k + 1, 1) > b.energy(k, 1));
    for (int k = 0; k < N / 2 - 1; ++k) CHECK(b.energy(k + 1, 2) < b.energy(k, 2));
    CHECK(&b.at(7 + N, 3) == &b.at(7, 3));
    CHECK(&b.at(-7 - N, 2) == &b.at(-7, 2));
    // weak-lattice gap at the zone edge is |V0|/2 to leading order
    const double gap = b.energy(-N / 2, 2) - b.energy(-N / 2, 1);
    CHECK(gap == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("Bloch coefficients are orthonormal")
{
    const auto b = solve_bands(lattice(-3.0, 20), 12, 6);
    for (int k = -10; k < 10; ++k)
        for (int a = 1; a <= 6; ++a)
            for (int c = a; c <= 6; ++c) {
                double dot = 0.0;
                for (int s = -12; s <= 12; ++s) dot += b.at(k, a).coeff(s) * b.at(k, c).coeff(s);
                CHECK(dot == doctest::Approx(a == c ? 1.0 : 0.0).epsilon(1e-12));
            }
}

TEST_CASE("Bloch function normalised on the ring")
{
    const auto spec = lattice(-1.0, 10);
    const auto b = solve_bands(spec, 10, 4);
    const auto& st = b.at(3, 2);
    const int M = 20000;
    double acc = 0.0;
    const double len = spec.n_cells * spec.period_m;
    for (int i = 0; i < M; ++i) acc += std::norm(bloch_value(st, spec, (i + 0.5) * len / M));
    CHECK(acc * len / M == doctest::Approx(1.0).epsilon(1e-10));
    const auto x = 0.37 * spec.period_m;
    CHECK(std::abs(bloch_periodic(st, spec, x + spec.period_m) - bloch_periodic(st, spec, x)) < 1e-9 * std::abs(bloch_periodic(st, spec, x)));
}

TEST_CASE("Fourier cutoff convergence")
{
    const auto a = solve_bands(lattice(-1.0), 10, 6);
    const auto c = solve_bands(lattice(-1.0), 14, 6);
    double worst = 0.0;
    for (int k = -50; k < 50; ++k)
        for (int nu = 1; nu <= 6; ++nu) worst = std::max(worst, std::abs(a.energy(k, nu) - c.energy(k, nu)));
    CHECK(worst < 1e-10);
}

TEST_CASE("bands CSV")
{
    const auto b = solve_bands(lattice(0.0, 4), 4, 2);
    std::ostringstream os;
    write_bands_csv(os, b);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "kappa,k_over_Kat,band,energy_over_Erec");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 8);
}

TEST_CASE("invalid lattice input")
{
    CHECK_THROWS_AS(solve_bands(lattice(-1.0, 7), 10, 4), std::invalid_argument);
    CHECK_THROWS_AS(solve_bands(lattice(-1.0), 4, 4), std::invalid_argument);
    auto s = lattice(-1.0);
    s.mass_kg = 0.0;
    CHECK_THROWS_AS(solve_bands(s, 10, 4), std::invalid_argument);
    const auto b = solve_bands(lattice(-1.0), 10, 4);
    CHECK_THROWS_AS(b.at(0, 5), std::out_of_range);
}
