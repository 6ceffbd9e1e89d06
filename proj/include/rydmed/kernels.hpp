#pragma once

#include "rydmed/radial.hpp"

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rydmed {

struct BilayerGeometry {
    double rho_m = 500e-9;
    double L_spin_m = 500e-9;
    double L_at_m = 500e-9;
    int n_spins = 100;
    int n_atoms = 100;  // N_a

    void validate() const;
    // spin m sits at (m - n_spins/2) L_spin, so index n_spins/2 is the centre spin at x = 0
    double spin_position_m(int index) const;
    int centre() const { return n_spins / 2; }
};

enum class KernelKind { cd_dm0, cd_dm1, same_parity, dd_flip, dd_diag };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);
bool needs_radial(KernelKind k);

// Charge-dipole kernels, x, rho in a.u.  pair = (ns, np) radial functions.
double kernel_cd_dm0(double x, double rho, const RadialPair& pair);
// sqrt(3/2) cos(eta) sin(eta) e^{-i nu} I3(R)/R^3 with e^{-i nu} = sign(x)
double kernel_cd_dm1(double x, double rho, const RadialPair& pair);
// rho/R^3 (1 - containment(R)); pair = (ns, ns)
double kernel_same_parity(double x, double rho, const RadialPair& pair);
double kernel_dd_flip(double x, double rho);  // x rho / R^5
double kernel_dd_diag(double x, double rho);  // (1 - 3 rho^2/R^2) / R^3

double kernel_value(KernelKind kind, double x, double rho, const RadialPair* pair);

// Radial factor multiplying the point-dipole shape (d_rad for cd channels, 1 for dd)
double dipole_strength(KernelKind kind, const RadialPair* pair);
double dipole_shape(KernelKind kind, double x, double rho);
// int dipole_shape(x) e^{iQx} dx in closed form
std::complex<double> dipole_shape_ft(KernelKind kind, double Q, double rho);

// Fourier transform of a kernel sampled at Q_n = 2 pi n / ring: closed-form dipole part plus
// numerically integrated short-range residual.  Values are cached per n.
class KernelTransform {
public:
    KernelTransform(KernelKind kind, double rho, double ring_length, std::shared_ptr<const RadialPair> pair);

    std::complex<double> at(int n);
    double Q(int n) const;
    KernelKind kind() const { return kind_; }
    double residual_support() const { return xres_; }  // half-width of residual support, a.u.
    double residual_peak() const { return res_peak_; }  // max |residual| / max |kernel|

private:
    KernelKind kind_;
    double rho_, ring_;
    std::shared_ptr<const RadialPair> pair_;
    double strength_ = 1.0;
    double xres_ = 0.0;
    double res_peak_ = 0.0;
    std::vector<double> xs_, ws_, rs_;  // residual quadrature nodes
    std::map<int, std::complex<double>> cache_;
};

struct DirectDDTerms {
    double resonant = 0.0;     // (1-3cos^2)/2R^3 (d+d- + d-d+ + 2 dz dz)
    double cross = 0.0;        // (3/sqrt2) sin cos /2R^3 * (d+ dz products)
    double double_flip = 0.0;  // -(3/2) sin^2 /2R^3 * (d+ d+ products)
};

// dipole products in a.u.; R in a.u.; result in a.u. of energy
DirectDDTerms direct_dd_terms(double theta, double R, double dpm_product, double dz_product,
                              double dpz_product = 0.0, double dpp_product = 0.0);

// sum over the inclusive quasimomentum grid kappa = -N/2..N/2 of exp(i k p L)
std::complex<double> plane_wave_bz_sum(int p, int N);
double plane_wave_bz_closed(int p, int N);

// (-1)^p / (R_qi^3 R_qm^3) for a plane-wave mediator with the dominant weight midway between the spins
double plane_wave_coupling(int p, double rho, double L);

}  // namespace rydmed
