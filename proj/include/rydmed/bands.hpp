#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

namespace rydmed {

struct LatticeSpec {
    double period_m = 500e-9;   // L_at
    double V0_erec = -1.0;      // depth in units of E_rec (signed)
    int n_cells = 100;          // N_latt_at, even
    double mass_kg = 0.0;

    void validate() const;
    double recoil_hz() const;
    double K() const;  // pi / L_at, 1/m
};

struct BlochState {
    int band = 1;   // 1-based
    int kappa = 0;  // -N/2 .. N/2-1
    int smax = 10;
    std::vector<double> c;  // c_s for s = -smax..smax, real with largest entry positive
    double energy = 0.0;    // E_rec

    double coeff(int s) const { return (s < -smax || s > smax) ? 0.0 : c[s + smax]; }
    double k(const LatticeSpec& spec) const;  // 1/m
};

class BandStructure {
public:
    BandStructure() = default;
    BandStructure(LatticeSpec spec, int smax, int n_bands, std::vector<BlochState> states);

    const LatticeSpec& spec() const { return spec_; }
    int smax() const { return smax_; }
    int n_bands() const { return n_bands_; }
    int n_kappa() const { return spec_.n_cells; }
    const BlochState& at(int kappa, int band) const;
    double energy(int kappa, int band) const { return at(kappa, band).energy; }
    const std::vector<BlochState>& states() const { return states_; }

private:
    LatticeSpec spec_;
    int smax_ = 0;
    int n_bands_ = 0;
    std::vector<BlochState> states_;  // kappa-major, band-minor
};

BandStructure solve_bands(const LatticeSpec& spec, int smax, int n_bands);

// u_k(x), periodic with L_at, normalised so that phi = u e^{ikx} has unit norm on N L_at.
std::complex<double> bloch_periodic(const BlochState& st, const LatticeSpec& spec, double x_m);
std::complex<double> bloch_value(const BlochState& st, const LatticeSpec& spec, double x_m);

// columns kappa,k_over_Kat,band,energy_over_Erec
void write_bands_csv(std::ostream& os, const BandStructure& bands);

}  // namespace rydmed
